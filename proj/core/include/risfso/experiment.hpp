#pragma once

#include <string>
#include <utility>
#include <vector>

#include "risfso/metrics.hpp"
#include "risfso/montecarlo.hpp"

namespace risfso::experiment {

enum class SweepVariable {
  gamma_bar_s_db,
  gamma_bar_e_db,
  gamma_bar_d_db,
  t_rs,
  n_elements,
  m_surfaces,
  k_main,
  k_eve,
  xi,
  detection,
};

enum class Metric { sop, asc, est };
enum class OutputFormat { csv, json };

struct Experiment {
  metrics::SystemConfig system;
  SweepVariable variable = SweepVariable::gamma_bar_s_db;
  std::vector<double> values;
  std::vector<Metric> metrics_list = {Metric::sop};
  std::vector<metrics::Method> methods = {metrics::Method::quadrature};
  montecarlo::McConfig mc;
  OutputFormat format = OutputFormat::csv;
  std::string out_path;
  bool timing = false;  // wall_ms stays 0 unless enabled (determinism)
  // Named system-config overlays; each produces its own row block with its
  // own config digest. Empty means the base system only.
  std::vector<std::pair<std::string, metrics::SystemConfig>> variants;

  void validate() const;  // throws ConfigError with field-path messages
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResultRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string metric;
  std::string method;
  double value = 0.0;
  double err_lo = 0.0;
  double err_hi = 0.0;
  double wall_ms = 0.0;
  std::string config_digest;
  std::string error;  // empty on success; short tag otherwise
};

struct RunResult {
  std::vector<ResultRow> rows;
};

// Flat dotted-key text (lines `a.b.c = v`, `#` comments) or a JSON object
// with the same keys; unknown keys are hard errors.
Experiment parse_config(const std::string& text);
Experiment load_config(const std::string& path);
std::string emit_config(const Experiment& exp);

Experiment preset(const std::string& name);
std::vector<std::string> preset_names();

std::string config_digest(const Experiment& exp, const std::string& variant);

RunResult run(const Experiment& exp);
std::string to_csv(const RunResult& result);
std::string to_json(const RunResult& result);
// Writes to exp.output path (or returns false if path empty).
bool write_output(const Experiment& exp, const RunResult& result);

std::string to_string(SweepVariable v);
std::string to_string(Metric m);
std::string to_string(metrics::Method m);

}  // namespace risfso::experiment
