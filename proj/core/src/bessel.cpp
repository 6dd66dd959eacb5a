#include "risfso/specfun.hpp"

#include <cmath>
#include <numbers>

namespace risfso::specfun {

namespace {

double bessel_i_series(int order, double x) {
  // I_v(x) = (x/2)^v sum_k (x^2/4)^k / (k! (k+v)!)
  const double t = 0.25 * x * x;
  double term = (order == 0) ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= t / (static_cast<double>(k) * (k + order));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

double bessel_i_asymptotic(int order, double x) {
  // I_v(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(v) / x^k, mu = 4 v^2.
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::abs(term);
  for (int k = 1; k < 40; ++k) {
    term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    if (std::abs(term) > prev) break;  // optimal truncation
    prev = std::abs(term);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * sum;
}

// 1/Gamma(1+x) ~ 1 + c1 x + c2 x^2 + c3 x^3 near 0.
constexpr double kEulerGamma = 0.57721566490153286;

void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                  double& gammi) {
  gampl = 1.0 / std::tgamma(1.0 + mu);
  gammi = 1.0 / std::tgamma(1.0 - mu);
  if (std::abs(mu) > 1e-4) {
    gam1 = (gammi - gampl) / (2.0 * mu);
  } else {
    // Limit -EulerGamma with quadratic correction from the 1/Gamma expansion.
    const double g = kEulerGamma;
    const double zeta3 = 1.2020569031595943;
    const double c3 = g * g * g / 6.0 -
                      g * std::numbers::pi * std::numbers::pi / 12.0 +
                      zeta3 / 3.0;
    gam1 = -(g + c3 * mu * mu);
  }
  gam2 = 0.5 * (gammi + gampl);
}

double bessel_k_impl(double nu, double x) {
  // Temme (x < 2) / Steed CF2 (x >= 2) with upward recurrence; cf. the
  // classical besselik algorithm.
  const double eps = 1e-16;
  const double pi = std::numbers::pi;
  int nl = static_cast<int>(nu + 0.5);
  double mu = nu - nl;  // in [-0.5, 0.5]
  double mu2 = mu * mu;
  double xi = 1.0 / x;
  double rkmu, rk1;
  if (x < 2.0) {
    double x2 = 0.5 * x;
    double pimu = pi * mu;
    double fact = (std::abs(pimu) < eps) ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    double fact2 = (std::abs(e) < eps) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    // gampl/gammi hold 1/Gamma(1 +- mu); p, q need Gamma(1 +- mu) itself
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i <= 10000; ++i) {
      ff = (i * ff + p + q) / (i * i - mu2);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      double del = c * ff;
      sum += del;
      double del1 = c * (p - i * ff);
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    rkmu = sum;
    rk1 = sum1 * 2.0 * xi;
  } else {
    // CF2 evaluated with Steed's algorithm.
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    double a1 = 0.25 - mu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 10000; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < eps) break;
    }
    h = a1 * h;
    rkmu = std::sqrt(pi / (2.0 * x)) * std::exp(-x) / s;
    rk1 = rkmu * (mu + x + 0.5 - h) * xi;
  }
  for (int i = 1; i <= nl; ++i) {
    double rktemp = (mu + i) * 2.0 * xi * rk1 + rkmu;
    rkmu = rk1;
    rk1 = rktemp;
  }
  return rkmu;
}

}  // namespace

double bessel_i(int order, double x) {
  if (order != 0 && order != 1)
    throw std::domain_error("bessel_i: order must be 0 or 1");
  if (x < 0.0) throw std::domain_error("bessel_i: x must be >= 0");
  if (x > 708.0) throw std::overflow_error("bessel_i: e^x overflows");
  if (x < 18.0) return bessel_i_series(order, x);
  return bessel_i_asymptotic(order, x);
}

double bessel_k(double nu, double x) {
  if (x <= 0.0) throw std::domain_error("bessel_k: x must be > 0");
  return bessel_k_impl(std::abs(nu), x);  // K_{-nu} = K_{nu}
}

}  // namespace risfso::specfun
