#include <benchmark/benchmark.h>

#include <cmath>

#include "risfso/channels.hpp"
#include "risfso/metrics.hpp"
#include "risfso/montecarlo.hpp"
#include "risfso/specfun.hpp"

using namespace risfso;

namespace {

metrics::SystemConfig baseline() {
  metrics::SystemConfig sys;
  sys.rf_main.hop1 = {2.0, 1.0};
  sys.rf_main.hop2 = {2.0, 1.0};
  sys.rf_main.n_elements = 2;
  sys.rf_main.n_surfaces = 2;
  sys.rf_main.gamma_bar = 100.0;
  sys.rf_eve = sys.rf_main;
  sys.rf_eve.gamma_bar = 1.0;
  sys.fso = channels::MalagaConfig{};
  sys.fso.gamma_bar_d = std::pow(10.0, 2.5);
  return sys;
}

void BM_MeijerGFsoCdf(benchmark::State& state) {
  auto d = channels::malaga_derive(channels::MalagaConfig{});
  for (auto _ : state)
    benchmark::DoNotOptimize(channels::fso_cdf(10.0, d));
}
BENCHMARK(BM_MeijerGFsoCdf);

void BM_MeijerGSlater(benchmark::State& state) {
  specfun::MeijerGSpec sp;
  sp.m = 2;
  sp.n = 1;
  sp.a = {0.3};
  sp.b = {-0.4, -1.1};
  for (auto _ : state)
    benchmark::DoNotOptimize(specfun::meijer_g(sp, 0.7).value);
}
BENCHMARK(BM_MeijerGSlater);

void BM_SopQuadrature(benchmark::State& state) {
  auto sys = baseline();
  for (auto _ : state)
    benchmark::DoNotOptimize(metrics::sop_quadrature(sys).value);
}
BENCHMARK(BM_SopQuadrature);

void BM_McSop(benchmark::State& state) {
  auto sys = baseline();
  montecarlo::McConfig mc;
  mc.samples = 10000;
  mc.batches = 10;
  for (auto _ : state)
    benchmark::DoNotOptimize(montecarlo::estimate_sop(sys, mc).mean);
}
BENCHMARK(BM_McSop);

void BM_CascadeSample(benchmark::State& state) {
  auto cfg = baseline().rf_main;
  montecarlo::Rng rng(1, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(montecarlo::sample_cascade_snr(cfg, rng));
}
BENCHMARK(BM_CascadeSample);

}  // namespace

BENCHMARK_MAIN();
