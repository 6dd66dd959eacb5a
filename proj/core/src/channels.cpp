#include "risfso/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace risfso::channels {

using specfun::bessel_i;
using specfun::regularized_gamma_p;

void RfCascadeConfig::validate() const {
  if (hop1.k < 0.0 || hop2.k < 0.0)
    throw std::invalid_argument("RfCascadeConfig: k must be >= 0");
  if (hop1.omega <= 0.0 || hop2.omega <= 0.0)
    throw std::invalid_argument("RfCascadeConfig: omega must be > 0");
  if (n_elements < 1) throw std::invalid_argument("RfCascadeConfig: N >= 1");
  if (n_surfaces < 1) throw std::invalid_argument("RfCascadeConfig: M >= 1");
  if (gamma_bar <= 0.0)
    throw std::invalid_argument("RfCascadeConfig: gamma_bar > 0");
}

void MalagaConfig::validate() const {
  if (alpha <= 0.0) throw std::invalid_argument("MalagaConfig: alpha > 0");
  if (beta < 1) throw std::invalid_argument("MalagaConfig: beta must be a positive integer");
  if (g <= 0.0) throw std::invalid_argument("MalagaConfig: g > 0");
  if (omega_big < 0.0) throw std::invalid_argument("MalagaConfig: omega >= 0");
  if (xi <= 0.0) throw std::invalid_argument("MalagaConfig: xi > 0");
  if (r != 1 && r != 2) throw std::invalid_argument("MalagaConfig: r in {1,2}");
  if (gamma_bar_d <= 0.0)
    throw std::invalid_argument("MalagaConfig: gamma_bar_d > 0");
}

namespace {

double rician_bracket(double k) {
  return (k + 1.0) * bessel_i(0, 0.5 * k) + k * bessel_i(1, 0.5 * k);
}

}  // namespace

ProductMoments rician_product_moments(const RfCascadeConfig& cfg) {
  cfg.validate();
  const double k1 = cfg.hop1.k, k2 = cfg.hop2.k;
  const double o1 = cfg.hop1.omega, o2 = cfg.hop2.omega;
  const double pi = std::numbers::pi;
  const double br1 = rician_bracket(k1), br2 = rician_bracket(k2);
  ProductMoments mom;
  mom.mean = pi * std::exp(-0.5 * (k1 + k2)) / (4.0 * std::sqrt(o1 * o2)) *
             br1 * br2;
  mom.variance = (16.0 * (k1 + 1.0) * (k2 + 1.0) -
                  pi * pi * std::exp(-k1 - k2) * br1 * br1 * br2 * br2) /
                 (16.0 * o1 * o2);
  mom.a = cfg.n_elements * mom.mean * mom.mean / mom.variance - 1.0;
  mom.b = mom.variance / mom.mean;
  return mom;
}

double rf_cdf(double gamma, const ProductMoments& mom, double gamma_bar) {
  if (gamma < 0.0) throw std::domain_error("rf_cdf: gamma >= 0");
  if (gamma == 0.0) return 0.0;
  double x = std::sqrt(gamma) / (mom.b * std::sqrt(gamma_bar));
  return regularized_gamma_p(mom.a + 1.0, x);
}

double rf_pdf(double gamma, const ProductMoments& mom, double gamma_bar) {
  if (gamma <= 0.0) throw std::domain_error("rf_pdf: gamma > 0");
  const double a = mom.a, b = mom.b;
  double lx = 0.5 * (a - 1.0) * std::log(gamma) -
              std::sqrt(gamma) / (b * std::sqrt(gamma_bar)) -
              std::log(2.0) - (a + 1.0) * std::log(b) -
              std::lgamma(a + 1.0) - 0.5 * (a + 1.0) * std::log(gamma_bar);
  return std::exp(lx);
}

double SeriesPoly::eval(double gamma) const {
  if (gamma == 0.0) return base_exponent > 0.0 ? 0.0 : (coeffs.empty() ? 0.0 : coeffs[0]);
  double sg = std::sqrt(gamma);
  double lead = std::pow(gamma, base_exponent);
  double acc = 0.0, pw = 1.0;
  for (double c : coeffs) {
    acc += c * pw;
    pw *= sg;
  }
  return lead * acc;
}

namespace {

double series_domain_hint(const SeriesPoly& s) {
  // Alternating-series flavored bound: gamma where the last retained term
  // reaches 1e-8.
  for (int j = static_cast<int>(s.coeffs.size()) - 1; j >= 0; --j) {
    double c = std::abs(s.coeffs[j]);
    if (c == 0.0) continue;
    double expo = s.base_exponent + 0.5 * j;
    if (expo <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(1e-8 / c, 1.0 / expo);
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

SeriesPoly rf_series_coeffs(const ProductMoments& mom, double gamma_bar,
                            int n_max) {
  if (n_max < 0) throw std::invalid_argument("rf_series_coeffs: n_max >= 0");
  const double a = mom.a, b = mom.b;
  SeriesPoly s;
  s.base_exponent = 0.5 * (a + 1.0);
  s.n_max = n_max;
  s.coeffs.resize(n_max + 1);
  const double lbg = std::log(b * std::sqrt(gamma_bar));
  for (int nn = 0; nn <= n_max; ++nn) {
    double lg = -std::lgamma(nn + 1.0) - std::log(a + nn + 1.0) -
                std::lgamma(a + 1.0) - (a + nn + 1.0) * lbg;
    s.coeffs[nn] = ((nn % 2 == 0) ? 1.0 : -1.0) * std::exp(lg);
  }
  s.domain_hint = series_domain_hint(s);
  return s;
}

SeriesPoly best_ris_cdf(const SeriesPoly& series, int m_surfaces) {
  if (m_surfaces < 1) throw std::invalid_argument("best_ris_cdf: M >= 1");
  if (m_surfaces == 1) return series;
  const int n_max = series.n_max;
  auto mul = [n_max](const SeriesPoly& x, const SeriesPoly& y) {
    SeriesPoly out;
    out.base_exponent = x.base_exponent + y.base_exponent;
    out.n_max = n_max;
    out.coeffs.assign(n_max + 1, 0.0);
    for (size_t i = 0; i < x.coeffs.size(); ++i) {
      if (x.coeffs[i] == 0.0) continue;
      for (size_t j = 0; j < y.coeffs.size() && i + j < out.coeffs.size(); ++j)
        out.coeffs[i + j] += x.coeffs[i] * y.coeffs[j];
    }
    return out;
  };
  SeriesPoly acc = series;
  for (int i = 1; i < m_surfaces; ++i) acc = mul(acc, series);
  acc.domain_hint = series_domain_hint(acc);
  return acc;
}

double best_ris_pdf(double gamma, const SeriesPoly& series,
                    const ProductMoments& mom, double gamma_bar,
                    int m_surfaces) {
  if (gamma <= 0.0) throw std::domain_error("best_ris_pdf: gamma > 0");
  double fm1 = 1.0;
  if (m_surfaces > 1) {
    // The truncated series diverges past its domain_hint; as a CDF power the
    // factor is capped at 1 (and floored at 0 against truncation wiggle).
    fm1 = best_ris_cdf(series, m_surfaces - 1).eval(gamma);
    fm1 = std::clamp(fm1, 0.0, 1.0);
  }
  // delta_j = M e^{-sqrt(gamma)/(b sqrt(gbar))} / (2 b^{2P} Gamma(2P) gbar^P),
  // 2P = a + 1.
  const double a = mom.a, b = mom.b;
  double ldelta = std::log(static_cast<double>(m_surfaces)) -
                  std::sqrt(gamma) / (b * std::sqrt(gamma_bar)) -
                  std::log(2.0) - (a + 1.0) * std::log(b) -
                  std::lgamma(a + 1.0) - 0.5 * (a + 1.0) * std::log(gamma_bar);
  return fm1 * std::exp(ldelta + 0.5 * (a - 1.0) * std::log(gamma));
}

MalagaDerived malaga_derive(const MalagaConfig& cfg) {
  cfg.validate();
  MalagaDerived d;
  const double alpha = cfg.alpha, g = cfg.g, om = cfg.omega_big;
  const int beta = cfg.beta, r = cfg.r;
  const double xi2 = cfg.xi * cfg.xi;
  d.alpha = alpha;
  d.beta = beta;
  d.r = r;
  d.g = g;
  d.omega_big = om;
  d.xi2 = xi2;
  d.gamma_bar = cfg.gamma_bar_d;

  d.x_const = std::pow(2.0, 1.0 - r) * std::pow(alpha, 0.5 * alpha) * xi2 /
              (std::pow(g, 1.0 + 0.5 * alpha) * std::tgamma(alpha)) *
              std::pow(g * beta / (g * beta + om), beta + 0.5 * alpha);
  d.w_bar = xi2 * alpha * beta * (g + om) /
            ((xi2 + 1.0) * (g * beta + om));
  const double u2 = alpha * xi2 * (xi2 + 2.0) * (g + om) * cfg.gamma_bar_d /
                    ((xi2 + 1.0) * (xi2 + 1.0) * (alpha + 1.0) *
                     (2.0 * g * (g + 2.0 * om) +
                      om * om * (1.0 + 1.0 / beta)));
  d.u_elec = (r == 1) ? cfg.gamma_bar_d : u2;
  d.z_const = d.x_const / std::pow(2.0 * std::numbers::pi, r - 1.0);
  d.h_const = std::pow(d.w_bar, r) / std::pow(static_cast<double>(r), 2.0 * r);
  for (int m = 1; m <= beta; ++m) {
    double um = 1.0;
    // binom(beta-1, m-1)
    um = std::exp(std::lgamma(static_cast<double>(beta)) -
                  std::lgamma(static_cast<double>(m)) -
                  std::lgamma(static_cast<double>(beta - m + 1)));
    um *= std::pow(g * beta + om, 1.0 - 0.5 * m) /
          std::tgamma(static_cast<double>(m)) * std::pow(om / g, m - 1.0) *
          std::pow(alpha / beta, 0.5 * m);
    double vm = um * std::pow(alpha * beta / (g * beta + om),
                              -0.5 * (alpha + m));
    d.u_m.push_back(um);
    d.v_m.push_back(vm);
    d.w_m.push_back(vm * std::pow(static_cast<double>(r), alpha + m - 1.0));
  }
  auto delta_list = [r](double c) {
    std::vector<double> out;
    for (int j = 0; j < r; ++j) out.push_back((c + j) / r);
    return out;
  };
  d.l1 = delta_list(xi2 + 1.0);
  d.l2 = delta_list(xi2);
  for (double x : delta_list(alpha)) d.l2.push_back(x);
  // The m-dependent Delta(r, m) block is appended per-m in fso_cdf_gspec.
  return d;
}

specfun::MeijerGSpec fso_cdf_gspec(const MalagaDerived& d, int m) {
  specfun::MeijerGSpec sp;
  sp.m = 3 * d.r;
  sp.n = 1;
  sp.a.push_back(1.0);
  for (double x : d.l1) sp.a.push_back(x);
  sp.b = d.l2;
  for (int j = 0; j < d.r; ++j)
    sp.b.push_back((static_cast<double>(m) + j) / d.r);
  sp.b.push_back(0.0);
  return sp;
}

double fso_cdf(double gamma, const MalagaDerived& d) {
  if (gamma < 0.0) throw std::domain_error("fso_cdf: gamma >= 0");
  if (gamma == 0.0) return 0.0;
  const double z = d.h_const * gamma / d.u_elec;
  double total = 0.0;
  for (int m = 1; m <= d.beta; ++m) {
    auto rep = specfun::meijer_g(fso_cdf_gspec(d, m), z);
    total += d.z_const * d.w_m[m - 1] * rep.value;
  }
  return total;
}

double fso_pdf(double gamma, const MalagaDerived& d) {
  if (gamma <= 0.0) throw std::domain_error("fso_pdf: gamma > 0");
  const double z = d.w_bar * std::pow(gamma / d.u_elec, 1.0 / d.r);
  double total = 0.0;
  for (int m = 1; m <= d.beta; ++m) {
    specfun::MeijerGSpec sp;
    sp.m = 3;
    sp.n = 0;
    sp.a = {d.xi2 + 1.0};
    sp.b = {d.xi2, d.alpha, static_cast<double>(m)};
    auto rep = specfun::meijer_g(sp, z);
    total += d.x_const / gamma * d.v_m[m - 1] * rep.value;
  }
  return total;
}

double dual_hop_cdf(double gamma, const std::function<double(double)>& f_s,
                    const std::function<double(double)>& f_d) {
  double fs = f_s(gamma), fd = f_d(gamma);
  if (fs < 0.0 || fs > 1.0 || fd < 0.0 || fd > 1.0)
    throw std::domain_error("dual_hop_cdf: CDF evaluators must return [0,1]");
  return fs + fd - fs * fd;
}

std::pair<double, double> malaga_from_physical(double v, double zeta,
                                               double theta_x,
                                               double theta_y) {
  if (zeta < 0.0 || zeta > 1.0)
    throw std::domain_error("malaga_from_physical: zeta in [0,1]");
  // Paper-literal: c_d = 2 V_zeta (1 - zeta),
  // omega_d = c_d + 2 V_zeta + sqrt(2 V_zeta c_d) cos(theta_x - theta_y).
  const double two_v_zeta = v * zeta;
  const double c_d = two_v_zeta * (1.0 - zeta);
  const double omega_d = c_d + two_v_zeta +
                         std::sqrt(two_v_zeta * c_d) *
                             std::cos(theta_x - theta_y);
  const double g = v * (1.0 - zeta);  // residual scatter power input
  return {g, omega_d};
}

}  // namespace risfso::channels
