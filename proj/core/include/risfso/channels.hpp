#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "risfso/specfun.hpp"

namespace risfso::channels {

struct RicianHop {
  double k = 0.0;      // shape factor, >= 0
  double omega = 1.0;  // scale, > 0
};

struct RfCascadeConfig {
  RicianHop hop1;      // S-M
  RicianHop hop2;      // M-R or M-E
  int n_elements = 1;  // N
  int n_surfaces = 1;  // M
  double gamma_bar = 1.0;  // linear
  void validate() const;
};

struct ProductMoments {
  double mean = 0.0;      // E(R_j)
  double variance = 0.0;  // Var(R_j)
  double a = 0.0;         // N mean^2 / variance - 1
  double b = 0.0;         // variance / mean
};

// Truncated generalized power series in gamma^(1/2):
// S(gamma) = sum_j coeffs[j] * gamma^(base_exponent + j/2).
struct SeriesPoly {
  double base_exponent = 0.0;
  std::vector<double> coeffs;
  int n_max = 0;
  double domain_hint = 0.0;  // gamma range with tail estimate <= 1e-8

  double eval(double gamma) const;
};

struct MalagaConfig {
  double alpha = 2.296;     // large-scale turbulence, > 0
  int beta = 2;             // small-scale, positive integer
  double g = 0.4231;        // off-axis scatter power
  double omega_big = 1.3265;  // coherent average power omega_d
  double xi = 1.1;          // pointing-error severity
  int r = 1;                // 1 = HD, 2 = IM/DD
  double gamma_bar_d = 1.0;  // linear
  void validate() const;
};

struct MalagaDerived {
  double x_const = 0.0;  // X_d
  double w_bar = 0.0;    // w-bar_d
  double z_const = 0.0;  // Z_d
  double h_const = 0.0;  // h_d
  double u_elec = 0.0;   // U_d (electrical SNR, linear)
  std::vector<double> u_m;  // U_{m}, m = 1..beta at index m-1
  std::vector<double> v_m;  // V_{m}
  std::vector<double> w_m;  // W_{m}
  std::vector<double> l1;   // L_{d1}, length r
  std::vector<double> l2;   // L_{d2}, length 3r (per m; alpha/xi blocks + m block)
  // source parameters retained for the evaluators
  double alpha = 0.0, xi2 = 0.0, g = 0.0, omega_big = 0.0, gamma_bar = 0.0;
  int beta = 0, r = 1;
};

ProductMoments rician_product_moments(const RfCascadeConfig& cfg);

double rf_cdf(double gamma, const ProductMoments& mom, double gamma_bar);
double rf_pdf(double gamma, const ProductMoments& mom, double gamma_bar);

SeriesPoly rf_series_coeffs(const ProductMoments& mom, double gamma_bar,
                            int n_max);

// F^M as a truncated series (repeated Cauchy products of the half-integer
// power series; identical term-by-term to the multinomial form).
SeriesPoly best_ris_cdf(const SeriesPoly& series, int m_surfaces);

// Order-statistic density with the exponential retained.
double best_ris_pdf(double gamma, const SeriesPoly& series,
                    const ProductMoments& mom, double gamma_bar,
                    int m_surfaces);

MalagaDerived malaga_derive(const MalagaConfig& cfg);

double fso_pdf(double gamma, const MalagaDerived& d);
double fso_cdf(double gamma, const MalagaDerived& d);

// Per-m G spec of the FSO CDF; evaluate at z = h_d * gamma / U_d.
specfun::MeijerGSpec fso_cdf_gspec(const MalagaDerived& d, int m);

double dual_hop_cdf(double gamma, const std::function<double(double)>& f_s,
                    const std::function<double(double)>& f_d);

// Paper-literal physical mapping; excluded from acceptance criteria.
std::pair<double, double> malaga_from_physical(double v, double zeta,
                                               double theta_x, double theta_y);

}  // namespace risfso::channels
