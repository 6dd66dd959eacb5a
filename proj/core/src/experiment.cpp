#include "risfso/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace risfso::experiment {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

const std::map<std::string, SweepVariable> kSweepNames = {
    {"gamma_bar_s_db", SweepVariable::gamma_bar_s_db},
    {"gamma_bar_e_db", SweepVariable::gamma_bar_e_db},
    {"gamma_bar_d_db", SweepVariable::gamma_bar_d_db},
    {"t_rs", SweepVariable::t_rs},
    {"n_elements", SweepVariable::n_elements},
    {"m_surfaces", SweepVariable::m_surfaces},
    {"k_main", SweepVariable::k_main},
    {"k_eve", SweepVariable::k_eve},
    {"xi", SweepVariable::xi},
    {"detection", SweepVariable::detection},
};

const std::map<std::string, Metric> kMetricNames = {
    {"sop", Metric::sop}, {"asc", Metric::asc}, {"est", Metric::est}};

const std::map<std::string, metrics::Method> kMethodNames = {
    {"closed_form", metrics::Method::closed_form},
    {"quadrature", metrics::Method::quadrature},
    {"asymptotic", metrics::Method::asymptotic},
    {"monte_carlo", metrics::Method::monte_carlo}};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos])))
      ++pos;
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  double x = parse_double(key, v);
  if (x != std::floor(x)) throw ConfigError(key + ": not an integer: " + v);
  return static_cast<long>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

// Items separated by commas and/or whitespace.
std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Baseline system used by every preset.
metrics::SystemConfig baseline_system() {
  metrics::SystemConfig sys;
  sys.rf_main.hop1 = {2.0, 1.0};
  sys.rf_main.hop2 = {2.0, 1.0};
  sys.rf_main.n_elements = 2;
  sys.rf_main.n_surfaces = 2;
  sys.rf_main.gamma_bar = db_to_linear(20.0);
  sys.rf_eve = sys.rf_main;
  sys.rf_eve.gamma_bar = db_to_linear(0.0);
  sys.fso = channels::MalagaConfig{};
  sys.fso.gamma_bar_d = db_to_linear(25.0);
  sys.t_rs = 0.5;
  return sys;
}

// Eve's first hop is the shared S-M link.
void finalize_system(metrics::SystemConfig& sys) {
  sys.rf_eve.hop1 = sys.rf_main.hop1;
  sys.rf_eve.n_elements = sys.rf_main.n_elements;
  sys.rf_eve.n_surfaces = sys.rf_main.n_surfaces;
}

bool apply_system_key(metrics::SystemConfig& sys, const std::string& key,
                      const std::string& val, const std::string& path) {
  if (key == "k_main") {
    sys.rf_main.hop1.k = sys.rf_main.hop2.k = parse_double(path, val);
  } else if (key == "omega_main") {
    sys.rf_main.hop1.omega = sys.rf_main.hop2.omega = parse_double(path, val);
  } else if (key == "k_eve") {
    sys.rf_eve.hop2.k = parse_double(path, val);
  } else if (key == "omega_eve") {
    sys.rf_eve.hop2.omega = parse_double(path, val);
  } else if (key == "n_elements") {
    sys.rf_main.n_elements = static_cast<int>(parse_int(path, val));
  } else if (key == "m_surfaces") {
    sys.rf_main.n_surfaces = static_cast<int>(parse_int(path, val));
  } else if (key == "gamma_bar_s_db") {
    sys.rf_main.gamma_bar = db_to_linear(parse_double(path, val));
  } else if (key == "gamma_bar_e_db") {
    sys.rf_eve.gamma_bar = db_to_linear(parse_double(path, val));
  } else if (key == "gamma_bar_d_db") {
    sys.fso.gamma_bar_d = db_to_linear(parse_double(path, val));
  } else if (key == "fso.alpha") {
    sys.fso.alpha = parse_double(path, val);
  } else if (key == "fso.beta") {
    sys.fso.beta = static_cast<int>(parse_int(path, val));
  } else if (key == "fso.g") {
    sys.fso.g = parse_double(path, val);
  } else if (key == "fso.omega") {
    sys.fso.omega_big = parse_double(path, val);
  } else if (key == "fso.xi") {
    sys.fso.xi = parse_double(path, val);
  } else if (key == "fso.r") {
    sys.fso.r = static_cast<int>(parse_int(path, val));
  } else if (key == "t_rs") {
    sys.t_rs = parse_double(path, val);
  } else if (key == "truncation") {
    sys.truncation = static_cast<int>(parse_int(path, val));
  } else if (key == "split_point") {
    sys.split_point = parse_double(path, val);
  } else {
    return false;
  }
  return true;
}

void apply_sweep_point(metrics::SystemConfig& sys, SweepVariable var,
                       double v) {
  switch (var) {
    case SweepVariable::gamma_bar_s_db:
      sys.rf_main.gamma_bar = db_to_linear(v);
      break;
    case SweepVariable::gamma_bar_e_db:
      sys.rf_eve.gamma_bar = db_to_linear(v);
      break;
    case SweepVariable::gamma_bar_d_db:
      sys.fso.gamma_bar_d = db_to_linear(v);
      break;
    case SweepVariable::t_rs:
      sys.t_rs = v;
      break;
    case SweepVariable::n_elements:
      sys.rf_main.n_elements = static_cast<int>(v);
      break;
    case SweepVariable::m_surfaces:
      sys.rf_main.n_surfaces = static_cast<int>(v);
      break;
    case SweepVariable::k_main:
      sys.rf_main.hop1.k = sys.rf_main.hop2.k = v;
      break;
    case SweepVariable::k_eve:
      sys.rf_eve.hop2.k = v;
      break;
    case SweepVariable::xi:
      sys.fso.xi = v;
      break;
    case SweepVariable::detection:
      sys.fso.r = static_cast<int>(v);
      break;
  }
  finalize_system(sys);
}

void check_sweep_domain(SweepVariable var, const std::vector<double>& values) {
  for (double v : values) {
    bool ok = true;
    switch (var) {
      case SweepVariable::t_rs:
        ok = v > 0.0;
        break;
      case SweepVariable::n_elements:
      case SweepVariable::m_surfaces:
        ok = v >= 1.0 && v == std::floor(v);
        break;
      case SweepVariable::k_main:
      case SweepVariable::k_eve:
        ok = v >= 0.0;
        break;
      case SweepVariable::xi:
        ok = v > 0.0;
        break;
      case SweepVariable::detection:
        ok = v == 1.0 || v == 2.0;
        break;
      default:
        break;  // dB axes are unrestricted
    }
    if (!ok)
      throw ConfigError("sweep.values: " + fmt_short(v) +
                        " outside the domain of " + to_string(var));
  }
}

struct RawConfig {
  std::map<std::string, std::string> entries;  // dotted key -> value
  std::vector<std::string> order;              // first-appearance order
  void put(const std::string& k, const std::string& v) {
    if (!entries.count(k)) order.push_back(k);
    entries[k] = v;
  }
};

RawConfig tokenize_flat(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    raw.put(key, val);
  }
  return raw;
}

RawConfig tokenize_json(const std::string& text) {
  RawConfig raw;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  // flatten nested objects into dotted keys; arrays join into value lists
  std::function<void(const std::string&, const nlohmann::json&)> walk =
      [&](const std::string& prefix, const nlohmann::json& v) {
        if (v.is_object()) {
          for (auto& [k, sub] : v.items())
            walk(prefix.empty() ? k : prefix + "." + k, sub);
        } else if (v.is_array()) {
          std::string joined;
          for (auto& item : v) {
            if (!joined.empty()) joined += ",";
            joined += item.is_string() ? item.get<std::string>()
                                       : nlohmann::to_string(item);
          }
          raw.put(prefix, joined);
        } else if (v.is_string()) {
          raw.put(prefix, v.get<std::string>());
        } else {
          raw.put(prefix, nlohmann::to_string(v));
        }
      };
  walk("", j);
  return raw;
}

Experiment from_raw(const RawConfig& raw) {
  Experiment exp;
  exp.system = baseline_system();
  // variant label -> (key suffix -> value), lexicographic by label
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> var_raw;
  bool have_values = false, have_from = false, have_to = false,
       have_step = false;
  double from = 0, to = 0, step = 0;
  for (const std::string& key : raw.order) {
    const std::string& val = raw.entries.at(key);
    if (key.rfind("system.", 0) == 0) {
      if (!apply_system_key(exp.system, key.substr(7), val, key))
        throw ConfigError("unknown config key: " + key);
    } else if (key == "sweep.variable") {
      auto it = kSweepNames.find(val);
      if (it == kSweepNames.end())
        throw ConfigError("sweep.variable: unknown variable '" + val + "'");
      exp.variable = it->second;
    } else if (key == "sweep.values") {
      exp.values.clear();
      for (const std::string& s : split_list(val))
        exp.values.push_back(parse_double(key, s));
      have_values = true;
    } else if (key == "sweep.from") {
      from = parse_double(key, val);
      have_from = true;
    } else if (key == "sweep.to") {
      to = parse_double(key, val);
      have_to = true;
    } else if (key == "sweep.step") {
      step = parse_double(key, val);
      have_step = true;
    } else if (key == "metrics") {
      exp.metrics_list.clear();
      for (const std::string& s : split_list(val)) {
        auto it = kMetricNames.find(s);
        if (it == kMetricNames.end())
          throw ConfigError("metrics: unknown metric '" + s + "'");
        exp.metrics_list.push_back(it->second);
      }
    } else if (key == "methods") {
      exp.methods.clear();
      for (const std::string& s : split_list(val)) {
        auto it = kMethodNames.find(s);
        if (it == kMethodNames.end())
          throw ConfigError("methods: unknown method '" + s + "'");
        exp.methods.push_back(it->second);
      }
    } else if (key == "mc.samples") {
      exp.mc.samples = static_cast<std::uint64_t>(parse_int(key, val));
    } else if (key == "mc.batches") {
      exp.mc.batches = static_cast<int>(parse_int(key, val));
    } else if (key == "mc.seed") {
      exp.mc.seed = static_cast<std::uint64_t>(parse_int(key, val));
    } else if (key == "mc.mode") {
      if (val == "paper_independent")
        exp.mc.mode = montecarlo::McMode::paper_independent;
      else if (val == "physical_shared")
        exp.mc.mode = montecarlo::McMode::physical_shared;
      else
        throw ConfigError("mc.mode: unknown mode '" + val + "'");
    } else if (key == "output.format") {
      if (val == "csv")
        exp.format = OutputFormat::csv;
      else if (val == "json")
        exp.format = OutputFormat::json;
      else
        throw ConfigError("output.format: must be csv or json");
    } else if (key == "output.path") {
      exp.out_path = val;
    } else if (key == "output.timing") {
      exp.timing = parse_bool(key, val);
    } else if (key.rfind("variant.", 0) == 0) {
      std::string rest = key.substr(8);
      // labels may contain dots; the ".system." marker delimits them
      auto sys_pos = rest.find(".system.");
      if (sys_pos == std::string::npos)
        throw ConfigError("variant overrides must target system.*: " + key);
      std::string label = rest.substr(0, sys_pos);
      if (label.empty())
        throw ConfigError("variant key needs a label and a field: " + key);
      var_raw[label].emplace_back(rest.substr(sys_pos + 8), val);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (!have_values) {
    if (!(have_from && have_to && have_step))
      throw ConfigError("sweep.values: empty (give values or from/to/step)");
    if (step <= 0.0) throw ConfigError("sweep.step: must be > 0");
    for (double v = from; v <= to + 0.5 * step; v += step)
      exp.values.push_back(v);
  }
  finalize_system(exp.system);
  for (auto& [label, kvs] : var_raw) {
    metrics::SystemConfig sys = exp.system;
    for (auto& [k, v] : kvs) {
      if (!apply_system_key(sys, k, v, "variant." + label + ".system." + k))
        throw ConfigError("unknown config key: variant." + label +
                          ".system." + k);
    }
    finalize_system(sys);
    exp.variants.emplace_back(label, sys);
  }
  exp.validate();
  return exp;
}

void emit_system(std::ostringstream& out, const metrics::SystemConfig& sys,
                 const std::string& prefix) {
  auto kv = [&](const std::string& k, const std::string& v) {
    out << prefix << k << " = " << v << "\n";
  };
  kv("k_main", fmt_double(sys.rf_main.hop1.k));
  kv("omega_main", fmt_double(sys.rf_main.hop1.omega));
  kv("k_eve", fmt_double(sys.rf_eve.hop2.k));
  kv("omega_eve", fmt_double(sys.rf_eve.hop2.omega));
  kv("n_elements", std::to_string(sys.rf_main.n_elements));
  kv("m_surfaces", std::to_string(sys.rf_main.n_surfaces));
  kv("gamma_bar_s_db", fmt_double(linear_to_db(sys.rf_main.gamma_bar)));
  kv("gamma_bar_e_db", fmt_double(linear_to_db(sys.rf_eve.gamma_bar)));
  kv("gamma_bar_d_db", fmt_double(linear_to_db(sys.fso.gamma_bar_d)));
  kv("fso.alpha", fmt_double(sys.fso.alpha));
  kv("fso.beta", std::to_string(sys.fso.beta));
  kv("fso.g", fmt_double(sys.fso.g));
  kv("fso.omega", fmt_double(sys.fso.omega_big));
  kv("fso.xi", fmt_double(sys.fso.xi));
  kv("fso.r", std::to_string(sys.fso.r));
  kv("t_rs", fmt_double(sys.t_rs));
  kv("truncation", std::to_string(sys.truncation));
  kv("split_point", fmt_double(sys.split_point));
}

}  // namespace

std::string to_string(SweepVariable v) {
  for (auto& [name, val] : kSweepNames)
    if (val == v) return name;
  return "?";
}

std::string to_string(Metric m) {
  for (auto& [name, val] : kMetricNames)
    if (val == m) return name;
  return "?";
}

std::string to_string(metrics::Method m) {
  for (auto& [name, val] : kMethodNames)
    if (val == m) return name;
  return "?";
}

void Experiment::validate() const {
  if (values.empty()) throw ConfigError("sweep.values: must be non-empty");
  check_sweep_domain(variable, values);
  if (metrics_list.empty()) throw ConfigError("metrics: must be non-empty");
  if (methods.empty()) throw ConfigError("methods: must be non-empty");
  try {
    mc.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("mc: ") + e.what());
  }
  auto check_sys = [&](const metrics::SystemConfig& sys,
                       const std::string& where) {
    try {
      sys.validate();
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  };
  check_sys(system, "system");
  for (auto& [label, sys] : variants) check_sys(sys, "variant." + label);
}

Experiment parse_config(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return from_raw(tokenize_json(text));
  return from_raw(tokenize_flat(text));
}

Experiment load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const Experiment& exp) {
  std::ostringstream out;
  emit_system(out, exp.system, "system.");
  out << "sweep.variable = " << to_string(exp.variable) << "\n";
  out << "sweep.values = ";
  for (size_t i = 0; i < exp.values.size(); ++i)
    out << (i ? "," : "") << fmt_double(exp.values[i]);
  out << "\n";
  out << "metrics = ";
  for (size_t i = 0; i < exp.metrics_list.size(); ++i)
    out << (i ? "," : "") << to_string(exp.metrics_list[i]);
  out << "\n";
  out << "methods = ";
  for (size_t i = 0; i < exp.methods.size(); ++i)
    out << (i ? "," : "") << to_string(exp.methods[i]);
  out << "\n";
  out << "mc.samples = " << exp.mc.samples << "\n";
  out << "mc.batches = " << exp.mc.batches << "\n";
  out << "mc.seed = " << exp.mc.seed << "\n";
  out << "mc.mode = "
      << (exp.mc.mode == montecarlo::McMode::paper_independent
              ? "paper_independent"
              : "physical_shared")
      << "\n";
  out << "output.format = "
      << (exp.format == OutputFormat::csv ? "csv" : "json") << "\n";
  if (!exp.out_path.empty()) out << "output.path = " << exp.out_path << "\n";
  out << "output.timing = " << (exp.timing ? "true" : "false") << "\n";
  for (auto& [label, sys] : exp.variants)
    emit_system(out, sys, "variant." + label + ".system.");
  return out.str();
}

std::string config_digest(const Experiment& exp, const std::string& variant) {
  std::string data = emit_config(exp);
  data += "\nvariant=";
  data += variant;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> preset_names() {
  return {"fig_sop_rf",     "fig_asc_rf",     "fig_sop_eve", "fig_est",
          "fig_n_elements", "fig_m_surfaces", "fig_turbulence",
          "fig_detection"};
}

Experiment preset(const std::string& name) {
  Experiment exp;
  exp.system = baseline_system();
  finalize_system(exp.system);
  exp.methods = {metrics::Method::quadrature, metrics::Method::monte_carlo};
  auto variant = [&](const std::string& label, auto&& edit) {
    metrics::SystemConfig sys = exp.system;
    edit(sys);
    finalize_system(sys);
    exp.variants.emplace_back(label, sys);
  };
  auto db_sweep = [&] {
    exp.variable = SweepVariable::gamma_bar_s_db;
    for (double v = 0.0; v <= 40.0 + 1e-9; v += 5.0) exp.values.push_back(v);
  };
  if (name == "fig_sop_rf") {
    exp.metrics_list = {Metric::sop};
    db_sweep();
    exp.methods.insert(exp.methods.begin(), metrics::Method::closed_form);
    variant("k2", [](metrics::SystemConfig& s) {
      s.rf_main.hop1.k = s.rf_main.hop2.k = 2.0;
    });
    variant("k5", [](metrics::SystemConfig& s) {
      s.rf_main.hop1.k = s.rf_main.hop2.k = 5.0;
    });
  } else if (name == "fig_asc_rf") {
    exp.metrics_list = {Metric::asc};
    db_sweep();
    variant("k2", [](metrics::SystemConfig& s) {
      s.rf_main.hop1.k = s.rf_main.hop2.k = 2.0;
    });
    variant("k5", [](metrics::SystemConfig& s) {
      s.rf_main.hop1.k = s.rf_main.hop2.k = 5.0;
    });
  } else if (name == "fig_sop_eve") {
    exp.metrics_list = {Metric::sop};
    db_sweep();
    variant("ge0", [](metrics::SystemConfig& s) {
      s.rf_eve.gamma_bar = db_to_linear(0.0);
    });
    variant("ge5", [](metrics::SystemConfig& s) {
      s.rf_eve.gamma_bar = db_to_linear(5.0);
    });
  } else if (name == "fig_est") {
    exp.metrics_list = {Metric::est};
    exp.variable = SweepVariable::t_rs;
    for (double v = 0.25; v <= 4.0 + 1e-9; v += 0.25) exp.values.push_back(v);
    variant("ge0", [](metrics::SystemConfig& s) {
      s.rf_eve.gamma_bar = db_to_linear(0.0);
    });
    variant("ge5", [](metrics::SystemConfig& s) {
      s.rf_eve.gamma_bar = db_to_linear(5.0);
    });
  } else if (name == "fig_n_elements") {
    exp.metrics_list = {Metric::sop};
    exp.variable = SweepVariable::n_elements;
    exp.values = {1, 2, 3, 4, 5};
    exp.system.rf_main.gamma_bar = db_to_linear(10.0);
  } else if (name == "fig_m_surfaces") {
    exp.metrics_list = {Metric::sop};
    exp.variable = SweepVariable::m_surfaces;
    exp.values = {1, 2, 3};
    exp.system.rf_main.gamma_bar = db_to_linear(10.0);
  } else if (name == "fig_turbulence") {
    exp.metrics_list = {Metric::sop};
    db_sweep();
    variant("t1_a2.296_b2", [](metrics::SystemConfig& s) {
      s.fso.alpha = 2.296;
      s.fso.beta = 2;
    });
    variant("t2_a4.2_b3", [](metrics::SystemConfig& s) {
      s.fso.alpha = 4.2;
      s.fso.beta = 3;
    });
    variant("t3_a8_b4", [](metrics::SystemConfig& s) {
      s.fso.alpha = 8.0;
      s.fso.beta = 4;
    });
  } else if (name == "fig_detection") {
    exp.metrics_list = {Metric::sop};
    db_sweep();
    variant("r1_xi1.1", [](metrics::SystemConfig& s) {
      s.fso.r = 1;
      s.fso.xi = 1.1;
    });
    variant("r1_xi6.7", [](metrics::SystemConfig& s) {
      s.fso.r = 1;
      s.fso.xi = 6.7;
    });
    variant("r2_xi1.1", [](metrics::SystemConfig& s) {
      s.fso.r = 2;
      s.fso.xi = 1.1;
    });
    variant("r2_xi6.7", [](metrics::SystemConfig& s) {
      s.fso.r = 2;
      s.fso.xi = 6.7;
    });
  } else {
    std::string msg = "unknown preset '" + name + "'; valid names:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw ConfigError(msg);
  }
  exp.validate();
  return exp;
}

namespace {

struct Task {
  size_t index;
  metrics::SystemConfig sys;
  double sweep_value;
  Metric metric;
  metrics::Method method;
  std::string digest;
};

ResultRow run_task(const Experiment& exp, const Task& t) {
  ResultRow row;
  row.sweep_var = to_string(exp.variable);
  row.sweep_value = t.sweep_value;
  row.metric = to_string(t.metric);
  row.method = to_string(t.method);
  row.config_digest = t.digest;
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (t.method == metrics::Method::monte_carlo) {
      montecarlo::McEstimate e;
      switch (t.metric) {
        case Metric::sop:
          e = montecarlo::estimate_sop(t.sys, exp.mc);
          break;
        case Metric::asc:
          e = montecarlo::estimate_asc(t.sys, exp.mc);
          break;
        case Metric::est:
          e = montecarlo::estimate_est(t.sys, exp.mc);
          break;
      }
      row.value = e.mean;
      row.err_lo = e.ci95_lo;
      row.err_hi = e.ci95_hi;
    } else {
      auto eval_sop = [&]() {
        switch (t.method) {
          case metrics::Method::closed_form:
            return metrics::sop_closed_form(t.sys);
          case metrics::Method::asymptotic:
            return metrics::sop_asymptotic(t.sys);
          default:
            return metrics::sop_quadrature(t.sys);
        }
      };
      metrics::MetricResult r;
      switch (t.metric) {
        case Metric::sop:
          r = eval_sop();
          break;
        case Metric::asc:
          if (t.method == metrics::Method::asymptotic)
            throw std::runtime_error("asc has no asymptotic form");
          r = t.method == metrics::Method::closed_form
                  ? metrics::asc_closed_form(t.sys)
                  : metrics::asc_quadrature(t.sys);
          break;
        case Metric::est: {
          auto s = eval_sop();
          r.value = metrics::est(t.sys.t_rs, s.value);
          r.err_estimate = t.sys.t_rs * s.err_estimate;
          r.method = s.method;
          break;
        }
      }
      row.value = r.value;
      row.err_lo = r.value - r.err_estimate;
      row.err_hi = r.value + r.err_estimate;
    }
  } catch (const specfun::EvalFailure&) {
    row.error = "error:eval_failure";
  } catch (const specfun::PoleError&) {
    row.error = "error:pole";
  } catch (const std::exception&) {
    row.error = "error:runtime";
  }
  if (!row.error.empty()) {
    row.value = row.err_lo = row.err_hi =
        std::numeric_limits<double>::quiet_NaN();
  }
  if (exp.timing) {
    auto t1 = std::chrono::steady_clock::now();
    row.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  return row;
}

}  // namespace

RunResult run(const Experiment& exp) {
  exp.validate();
  std::vector<std::pair<std::string, metrics::SystemConfig>> blocks;
  if (exp.variants.empty())
    blocks.emplace_back("", exp.system);
  else
    blocks = exp.variants;

  std::vector<Task> tasks;
  for (auto& [label, sys] : blocks) {
    std::string digest = config_digest(exp, label);
    for (double v : exp.values) {
      metrics::SystemConfig point = sys;
      apply_sweep_point(point, exp.variable, v);
      for (Metric met : exp.metrics_list)
        for (metrics::Method meth : exp.methods)
          tasks.push_back(
              {tasks.size(), point, v, met, meth, digest});
    }
  }
  RunResult result;
  result.rows.resize(tasks.size());
  int workers = std::min<int>(montecarlo::worker_count(),
                              static_cast<int>(tasks.size()));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      result.rows[tasks[i].index] = run_task(exp, tasks[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return result;
}

std::string to_csv(const RunResult& result) {
  std::ostringstream out;
  out << "sweep_var,sweep_value,metric,method,value,err_lo,err_hi,wall_ms,"
         "config_digest\n";
  for (const ResultRow& r : result.rows) {
    out << r.sweep_var << "," << fmt_short(r.sweep_value) << "," << r.metric
        << "," << r.method << ",";
    if (r.error.empty())
      out << fmt_double(r.value) << "," << fmt_double(r.err_lo) << ","
          << fmt_double(r.err_hi);
    else
      out << r.error << ",nan,nan";
    out << "," << fmt_short(r.wall_ms) << "," << r.config_digest << "\n";
  }
  return out.str();
}

std::string to_json(const RunResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ResultRow& r : result.rows) {
    nlohmann::json row;
    row["sweep_var"] = r.sweep_var;
    row["sweep_value"] = r.sweep_value;
    row["metric"] = r.metric;
    row["method"] = r.method;
    if (r.error.empty()) {
      row["value"] = r.value;
      row["err_lo"] = r.err_lo;
      row["err_hi"] = r.err_hi;
    } else {
      row["value"] = nullptr;
      row["err_lo"] = nullptr;
      row["err_hi"] = nullptr;
      row["error"] = r.error;
    }
    row["wall_ms"] = r.wall_ms;
    row["config_digest"] = r.config_digest;
    rows.push_back(row);
  }
  nlohmann::json doc;
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

bool write_output(const Experiment& exp, const RunResult& result) {
  if (exp.out_path.empty()) return false;
  std::ofstream out(exp.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + exp.out_path);
  out << (exp.format == OutputFormat::csv ? to_csv(result)
                                          : to_json(result));
  return true;
}

}  // namespace risfso::experiment
