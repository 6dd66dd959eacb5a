#include "risfso/specfun.hpp"

#include <cmath>
#include <numbers>

namespace risfso::specfun {

namespace {

bool is_nonpositive_integer(double x, double tol = 1e-12) {
  return x <= tol && std::abs(x - std::round(x)) < tol;
}

// Lanczos g=7, n=9 coefficients.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

std::complex<double> lanczos_lngamma(std::complex<double> z) {
  // Valid for Re(z) >= 0.5.
  z -= 1.0;
  std::complex<double> x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  std::complex<double> t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(x);
}

}  // namespace

SignedLog lgamma_signed(double x) {
  if (is_nonpositive_integer(x))
    throw PoleError("gamma pole at non-positive integer " + std::to_string(x));
  if (x > 0.0) return {std::lgamma(x), 1.0};
  // Gamma(x) < 0 on (-1,0), (-3,-2), ... i.e. where floor(x) is odd.
  long long f = static_cast<long long>(std::floor(x));
  double sign = (f % 2 != 0) ? -1.0 : 1.0;
  return {std::lgamma(x), sign};
}

std::complex<double> ln_gamma_complex(std::complex<double> z) {
  if (z.imag() == 0.0 && is_nonpositive_integer(z.real()))
    throw PoleError("log-gamma pole at non-positive integer");
  if (z.real() >= 0.5) return lanczos_lngamma(z);
  // Reflection: ln Gamma(z) = ln(pi) - ln sin(pi z) - ln Gamma(1 - z).
  const double pi = std::numbers::pi;
  return std::log(pi) - std::log(std::sin(pi * z)) - lanczos_lngamma(1.0 - z);
}

double regularized_gamma_p(double s, double x) {
  if (s <= 0.0) throw std::domain_error("regularized_gamma_p: s must be > 0");
  if (x < 0.0) throw std::domain_error("regularized_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double eps = 1e-16;
  const double lg = std::lgamma(s);
  if (x < s + 1.0) {
    // Series for P(s,x).
    double ap = s;
    double del = 1.0 / s;
    double sum = del;
    for (int i = 0; i < 10000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    return sum * std::exp(-x + s * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(s,x).
  const double fpmin = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  double q = std::exp(-x + s * std::log(x) - lg) * h;
  return 1.0 - q;
}

double lower_incomplete_gamma(double s, double x) {
  if (s <= 0.0) throw std::domain_error("lower_incomplete_gamma: s must be > 0");
  if (x < 0.0) throw std::domain_error("lower_incomplete_gamma: x must be >= 0");
  return regularized_gamma_p(s, x) * std::tgamma(s);
}

}  // namespace risfso::specfun
