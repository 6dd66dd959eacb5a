#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "risfso/experiment.hpp"
#include "risfso/montecarlo.hpp"

namespace {

using namespace risfso;

int cmd_run(const std::string& path) {
  experiment::Experiment exp = experiment::load_config(path);
  experiment::RunResult result = experiment::run(exp);
  if (!experiment::write_output(exp, result)) {
    std::cout << (exp.format == experiment::OutputFormat::csv
                      ? experiment::to_csv(result)
                      : experiment::to_json(result));
  }
  bool any_error = false;
  for (const auto& row : result.rows)
    if (!row.error.empty()) any_error = true;
  return any_error ? 1 : 0;
}

int cmd_preset(const std::string& name, bool emit_config) {
  experiment::Experiment exp = experiment::preset(name);
  if (emit_config) {
    std::cout << experiment::emit_config(exp);
    return 0;
  }
  experiment::RunResult result = experiment::run(exp);
  if (!experiment::write_output(exp, result))
    std::cout << experiment::to_csv(result);
  bool any_error = false;
  for (const auto& row : result.rows)
    if (!row.error.empty()) any_error = true;
  return any_error ? 1 : 0;
}

int cmd_gfun(int m, int n, const std::vector<double>& a,
             const std::vector<double>& b, double z) {
  specfun::MeijerGSpec spec;
  spec.m = m;
  spec.n = n;
  spec.a = a;
  spec.b = b;
  spec.validate();
  auto rep = specfun::meijer_g(spec, z);
  std::printf("value = %.15g\n", rep.value);
  std::printf("abs_err_estimate = %.3g\n", rep.abs_err_estimate);
  std::printf("method = %s\n",
              rep.method == specfun::GMethod::slater ? "slater"
                                                    : "mellin_barnes");
  std::printf("perturbation_applied = %s\n",
              rep.perturbation_applied ? "true" : "false");
  return 0;
}

int cmd_moments(double k1, double omega1, double k2, double omega2, int n) {
  channels::RfCascadeConfig cfg;
  cfg.hop1 = {k1, omega1};
  cfg.hop2 = {k2, omega2};
  cfg.n_elements = n;
  cfg.validate();
  auto mom = channels::rician_product_moments(cfg);
  std::printf("mean = %.15g\n", mom.mean);
  std::printf("variance = %.15g\n", mom.variance);
  std::printf("a = %.15g\n", mom.a);
  std::printf("b = %.15g\n", mom.b);
  return 0;
}

int cmd_validate(const std::string& path) {
  experiment::Experiment exp = experiment::load_config(path);
  // Analytic vs MC agreement at every sweep point of the base system.
  bool all_ok = true;
  for (double v : exp.values) {
    metrics::SystemConfig sys = exp.system;
    // reuse the run-path sweep application through a single-point run
    experiment::Experiment point = exp;
    point.values = {v};
    point.variants.clear();
    point.methods = {metrics::Method::quadrature,
                     metrics::Method::monte_carlo};
    point.out_path.clear();
    auto rows = experiment::run(point).rows;
    for (size_t i = 0; i + 1 < rows.size(); i += 2) {
      const auto& q = rows[i];
      const auto& mc = rows[i + 1];
      bool ok = q.error.empty() && mc.error.empty() &&
                q.value >= mc.err_lo - 1e-12 && q.value <= mc.err_hi + 1e-12;
      std::printf("%s %s=%g analytic=%.6g mc=[%.6g, %.6g] %s\n",
                  q.metric.c_str(), q.sweep_var.c_str(), v, q.value,
                  mc.err_lo, mc.err_hi, ok ? "agree" : "DISAGREE");
      if (!ok) all_ok = false;
    }
    (void)sys;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy analytics for multi-RIS dual-hop RF-FSO links"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", run_path, "config file path")->required();

  std::string preset_name;
  bool emit = false;
  auto* preset = app.add_subcommand("preset", "Run (or print) a named preset");
  preset->add_option("name", preset_name, "preset name")->required();
  preset->add_flag("--emit-config", emit, "print the config, do not run");

  int gm = 0, gn = 0;
  std::vector<double> ga, gb;
  double gz = 1.0;
  auto* gfun = app.add_subcommand("gfun", "Evaluate a Meijer G-function");
  gfun->add_option("-m", gm)->required();
  gfun->add_option("-n", gn)->required();
  gfun->add_option("-a", ga, "a parameters")->expected(-1);
  gfun->add_option("-b", gb, "b parameters")->expected(-1);
  gfun->add_option("-z", gz)->required();

  double k1 = 0, o1 = 1, k2 = 0, o2 = 1;
  int nn = 1;
  auto* moments = app.add_subcommand("moments", "Rician cascade moments");
  moments->add_option("--k1", k1);
  moments->add_option("--omega1", o1);
  moments->add_option("--k2", k2);
  moments->add_option("--omega2", o2);
  moments->add_option("--n-elements", nn);

  std::string val_path;
  auto* validate = app.add_subcommand("validate", "Analytic vs MC agreement");
  validate->add_option("config", val_path, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_path);
    if (*preset) return cmd_preset(preset_name, emit);
    if (*gfun) return cmd_gfun(gm, gn, ga, gb, gz);
    if (*moments) return cmd_moments(k1, o1, k2, o2, nn);
    if (*validate) return cmd_validate(val_path);
  } catch (const risfso::experiment::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
