#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "risfso/channels.hpp"
#include "risfso/specfun.hpp"

namespace risfso::metrics {

struct SystemConfig {
  channels::RfCascadeConfig rf_main;  // S-M-R
  channels::RfCascadeConfig rf_eve;   // S-M-E (shares N, M)
  channels::MalagaConfig fso;
  double t_rs = 0.5;        // target secrecy rate, bits/s/Hz
  int truncation = 40;      // series n_max
  double split_point = 0.0;  // <= 0 selects the documented defaults

  double phi() const { return std::exp2(t_rs); }
  void validate() const;
};

enum class Method { closed_form, quadrature, asymptotic, monte_carlo };

struct MetricResult {
  double value = 0.0;
  Method method = Method::quadrature;
  double err_estimate = 0.0;
  std::map<std::string, double> diagnostics;
};

MetricResult sop_closed_form(const SystemConfig& cfg);
MetricResult sop_quadrature(const SystemConfig& cfg);
MetricResult sop_asymptotic(const SystemConfig& cfg);
MetricResult asc_closed_form(const SystemConfig& cfg);
MetricResult asc_quadrature(const SystemConfig& cfg);

// EST = t_rs * (1 - sop); domain error for sop outside [0,1].
double est(double t_rs, double sop_value);

// Finite-range split identity: lhs from the 0-to-a Meijer-G expression, rhs by
// direct quadrature of gamma^q G(c gamma) on [0, a]. `upper` guards the
// quadrature domain (requires a <= upper).
std::pair<double, double> split_integral_check(double q_exponent,
                                               const specfun::MeijerGSpec& g_spec,
                                               double c_scale, double a,
                                               double upper);

// G-spec builders used by the closed forms (exposed for testing):
// finite piece G^{3r,2}_{r+2,3r+2} and infinite piece G^{3r+1,1}_{r+2,3r+2}
// of the R1/R2 split at exponent qc.
std::pair<specfun::MeijerGSpec, specfun::MeijerGSpec> sop_r_gspecs(
    const channels::MalagaDerived& d, int m, double qc);
// ASC X3/X4 kernel G^{3r+1,2}_{r+2,3r+2} at argument h/U.
specfun::MeijerGSpec asc_x3_gspec(const channels::MalagaDerived& d, int m,
                                  double mu);

}  // namespace risfso::metrics
