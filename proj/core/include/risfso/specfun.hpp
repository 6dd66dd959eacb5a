#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace risfso::specfun {

// Thrown when a gamma-type function is evaluated at a pole or outside its domain.
struct PoleError : std::domain_error {
  using std::domain_error::domain_error;
};

// Thrown when every evaluation strategy for a Meijer G instance fails; callers
// never receive a silent number.
struct EvalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// log|x| plus sign, the working representation for products of gammas.
struct SignedLog {
  double log_abs = -std::numeric_limits<double>::infinity();
  double sign = 0.0;  // -1, 0 or +1
};

// Gamma(x) for real x, as a signed log. Throws PoleError at non-positive integers.
SignedLog lgamma_signed(double x);

// Principal-branch log-gamma for complex argument (Lanczos + reflection).
std::complex<double> ln_gamma_complex(std::complex<double> z);

// Lower incomplete gamma(s, x); series for x < s+1, continued fraction otherwise.
double lower_incomplete_gamma(double s, double x);
// Regularized P(s, x) = gamma(s, x) / Gamma(s).
double regularized_gamma_p(double s, double x);

// Modified Bessel I of order 0 or 1. Throws std::overflow_error once e^x is not
// representable.
double bessel_i(int order, double x);
// Modified Bessel K of real order (Temme series below x=2, Steed CF2 above).
double bessel_k(double nu, double x);

// G^{m,n}_{p,q}(z | a; b) parameter bundle, classical convention: the first m
// entries of b and first n entries of a sit in the integrand numerator.
struct MeijerGSpec {
  int m = 0;
  int n = 0;
  std::vector<double> a;
  std::vector<double> b;

  int p() const { return static_cast<int>(a.size()); }
  int q() const { return static_cast<int>(b.size()); }
  // Throws std::invalid_argument on order violations or cross-group pole
  // degeneracy (a_i - b_j a positive integer for i <= n, j <= m).
  void validate() const;
};

enum class GMethod { slater, mellin_barnes };

struct EvalReport {
  double value = 0.0;
  double abs_err_estimate = 0.0;
  GMethod method = GMethod::slater;
  bool perturbation_applied = false;
};

// Evaluate G at real z > 0. Primary path: Slater residue expansion (left or
// right pole set picked by convergence), with symmetric eps-perturbation when
// poles in the active set coincide. Fallback: Mellin-Barnes contour quadrature.
EvalReport meijer_g(const MeijerGSpec& spec, double z);

// Force a specific strategy (no collision handling); used for cross-checks.
EvalReport meijer_g(const MeijerGSpec& spec, double z, GMethod force);

}  // namespace risfso::specfun
