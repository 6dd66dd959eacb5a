#include "risfso/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace risfso::montecarlo {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t scramble(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t master_seed, std::uint64_t stream_index)
    : state_(scramble(master_seed ^ scramble(stream_index))) {}

std::uint64_t Rng::next_u64() {
  std::uint64_t z = (state_ += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  // 53-bit mantissa in (0, 1): never returns exactly 0.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(t);
  have_cached_ = true;
  return r * std::cos(t);
}

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    // Boost to shape+1 then scale by U^{1/shape}.
    double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

void McConfig::validate() const {
  if (samples < 10000)
    throw std::invalid_argument("McConfig: samples must be >= 1e4");
  if (batches < 10) throw std::invalid_argument("McConfig: batches >= 10");
}

namespace {

double sample_rician_envelope(const channels::RicianHop& hop, Rng& rng) {
  const double sigma = std::sqrt(1.0 / (2.0 * hop.omega));
  const double nu = sigma * std::sqrt(2.0 * hop.k);
  double x = nu + sigma * rng.normal();
  double y = sigma * rng.normal();
  return std::sqrt(x * x + y * y);
}

}  // namespace

double sample_cascade_snr(const channels::RfCascadeConfig& cfg, Rng& rng) {
  double total = 0.0;
  for (int i = 0; i < cfg.n_elements; ++i)
    total += sample_rician_envelope(cfg.hop1, rng) *
             sample_rician_envelope(cfg.hop2, rng);
  return cfg.gamma_bar * total * total;
}

std::pair<double, double> sample_best_ris(
    const channels::RfCascadeConfig& cfg_main,
    const channels::RfCascadeConfig& cfg_eve, int m_surfaces, McMode mode,
    Rng& rng) {
  if (m_surfaces < 1) throw std::invalid_argument("sample_best_ris: M >= 1");
  if (mode == McMode::paper_independent) {
    double best_main = 0.0, best_eve = 0.0;
    for (int m = 0; m < m_surfaces; ++m)
      best_main = std::max(best_main, sample_cascade_snr(cfg_main, rng));
    for (int m = 0; m < m_surfaces; ++m)
      best_eve = std::max(best_eve, sample_cascade_snr(cfg_eve, rng));
    return {best_main, best_eve};
  }
  // physical_shared: one index selected by the main link; the S-M envelopes of
  // the selected surface are common to both receivers.
  double best_main = -1.0, eve_at_best = 0.0;
  for (int m = 0; m < m_surfaces; ++m) {
    double sum_main = 0.0, sum_eve = 0.0;
    for (int i = 0; i < cfg_main.n_elements; ++i) {
      double alpha_i = sample_rician_envelope(cfg_main.hop1, rng);
      sum_main += alpha_i * sample_rician_envelope(cfg_main.hop2, rng);
      sum_eve += alpha_i * sample_rician_envelope(cfg_eve.hop2, rng);
    }
    double g_main = cfg_main.gamma_bar * sum_main * sum_main;
    double g_eve = cfg_eve.gamma_bar * sum_eve * sum_eve;
    if (g_main > best_main) {
      best_main = g_main;
      eve_at_best = g_eve;
    }
  }
  return {best_main, eve_at_best};
}

MalagaMixture build_malaga_mixture(const channels::MalagaConfig& cfg) {
  cfg.validate();
  channels::MalagaDerived d = channels::malaga_derive(cfg);
  MalagaMixture mix;
  mix.scale = (cfg.g * cfg.beta + cfg.omega_big) / (cfg.alpha * cfg.beta);
  mix.alpha = cfg.alpha;
  mix.xi2 = d.xi2;
  mix.i_bar = d.xi2 / (d.xi2 + 1.0) * (cfg.g + cfg.omega_big);
  mix.u_elec = d.u_elec;
  mix.r = cfg.r;
  // weight_k = (Eq. 7 term-k constants) * Gamma(alpha) Gamma(k) / 2 *
  //            scale^{(alpha+k)/2}; the u_m already carry the binomial block.
  const double big_a = 2.0 * std::pow(cfg.alpha, 0.5 * cfg.alpha) /
                       (std::pow(cfg.g, 1.0 + 0.5 * cfg.alpha) *
                        std::tgamma(cfg.alpha)) *
                       std::pow(cfg.g * cfg.beta /
                                    (cfg.g * cfg.beta + cfg.omega_big),
                                cfg.beta + 0.5 * cfg.alpha);
  double total = 0.0;
  for (int k = 1; k <= cfg.beta; ++k) {
    double w = big_a * d.u_m[k - 1] * std::tgamma(cfg.alpha) *
               std::tgamma(static_cast<double>(k)) / 2.0 *
               std::pow(mix.scale, 0.5 * (cfg.alpha + k));
    mix.weights.push_back(w);
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-8)
    throw std::runtime_error(
        "build_malaga_mixture: weights do not normalize (sum = " +
        std::to_string(total) + ")");
  for (double& w : mix.weights) w /= total;
  return mix;
}

double sample_fso_snr(const channels::MalagaConfig& cfg,
                      const MalagaMixture& mixture, Rng& rng) {
  // Pick the mixture component, then I_a = scale * G_alpha * G_k.
  double u = rng.uniform();
  int k = 1;
  double acc = 0.0;
  for (size_t i = 0; i < mixture.weights.size(); ++i) {
    acc += mixture.weights[i];
    if (u <= acc || i + 1 == mixture.weights.size()) {
      k = static_cast<int>(i) + 1;
      break;
    }
  }
  double ia = mixture.scale * rng.gamma(mixture.alpha) *
              rng.gamma(static_cast<double>(k));
  double hp = std::pow(rng.uniform(), 1.0 / mixture.xi2);  // A0 = 1
  (void)cfg;
  double composite = ia * hp;
  return mixture.u_elec * std::pow(composite / mixture.i_bar, mixture.r);
}

int worker_count() {
  if (const char* env = std::getenv("RISFSO_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

// Deterministic batch-means estimator: per-batch partial sums are produced in
// parallel but reduced in fixed batch order.
McEstimate run_batches(const McConfig& mc,
                       const std::function<double(Rng&, std::uint64_t)>& draw) {
  mc.validate();
  const int nb = mc.batches;
  std::vector<double> batch_sum(nb, 0.0);
  std::vector<std::uint64_t> batch_n(nb, 0);
  const std::uint64_t base = mc.samples / nb;
  const std::uint64_t rem = mc.samples % nb;
  for (int b = 0; b < nb; ++b) batch_n[b] = base + (b < static_cast<int>(rem) ? 1 : 0);

  auto run_batch = [&](int b) {
    Rng rng(mc.seed, static_cast<std::uint64_t>(b));
    double s = 0.0;
    for (std::uint64_t i = 0; i < batch_n[b]; ++i) s += draw(rng, i);
    batch_sum[b] = s;
  };
  int workers = std::min(worker_count(), nb);
  if (workers <= 1) {
    for (int b = 0; b < nb; ++b) run_batch(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          int b = next.fetch_add(1);
          if (b >= nb) return;
          run_batch(b);
        }
      });
    for (auto& t : pool) t.join();
  }

  McEstimate est;
  est.n = mc.samples;
  double total = 0.0;
  for (int b = 0; b < nb; ++b) total += batch_sum[b];
  est.mean = total / static_cast<double>(mc.samples);
  // Batch means (batch sizes differ by at most one sample).
  double ssq = 0.0;
  for (int b = 0; b < nb; ++b) {
    double mb = batch_sum[b] / static_cast<double>(batch_n[b]);
    double dv = mb - est.mean;
    ssq += dv * dv;
  }
  double var_bm = ssq / (nb - 1);
  est.std_err = std::sqrt(var_bm / nb);
  est.ci95_lo = est.mean - 1.96 * est.std_err;
  est.ci95_hi = est.mean + 1.96 * est.std_err;
  return est;
}

struct DrawContext {
  channels::RfCascadeConfig main_cfg, eve_cfg;
  channels::MalagaConfig fso_cfg;
  MalagaMixture mixture;
  int m_surfaces = 1;
  McMode mode = McMode::paper_independent;
  double phi = 1.0;
};

DrawContext make_context(const metrics::SystemConfig& cfg, const McConfig& mc) {
  cfg.validate();
  DrawContext ctx;
  ctx.main_cfg = cfg.rf_main;
  ctx.eve_cfg = cfg.rf_eve;
  ctx.fso_cfg = cfg.fso;
  ctx.mixture = build_malaga_mixture(cfg.fso);
  ctx.m_surfaces = cfg.rf_main.n_surfaces;
  ctx.mode = mc.mode;
  ctx.phi = cfg.phi();
  return ctx;
}

}  // namespace

McEstimate estimate_sop(const metrics::SystemConfig& cfg, const McConfig& mc) {
  DrawContext ctx = make_context(cfg, mc);
  return run_batches(mc, [&ctx](Rng& rng, std::uint64_t) {
    auto [gs, ge] = sample_best_ris(ctx.main_cfg, ctx.eve_cfg, ctx.m_surfaces,
                                    ctx.mode, rng);
    double gd = sample_fso_snr(ctx.fso_cfg, ctx.mixture, rng);
    double geq = std::min(gs, gd);
    return (geq <= ctx.phi * ge) ? 1.0 : 0.0;
  });
}

McEstimate estimate_asc(const metrics::SystemConfig& cfg, const McConfig& mc) {
  DrawContext ctx = make_context(cfg, mc);
  return run_batches(mc, [&ctx](Rng& rng, std::uint64_t) {
    auto [gs, ge] = sample_best_ris(ctx.main_cfg, ctx.eve_cfg, ctx.m_surfaces,
                                    ctx.mode, rng);
    double gd = sample_fso_snr(ctx.fso_cfg, ctx.mixture, rng);
    double geq = std::min(gs, gd);
    double cs = std::log2(1.0 + geq) - std::log2(1.0 + ge);
    return cs > 0.0 ? cs : 0.0;
  });
}

McEstimate estimate_est(const metrics::SystemConfig& cfg, const McConfig& mc) {
  McEstimate sop = estimate_sop(cfg, mc);
  McEstimate est;
  est.n = sop.n;
  est.mean = cfg.t_rs * (1.0 - sop.mean);
  est.std_err = cfg.t_rs * sop.std_err;
  est.ci95_lo = cfg.t_rs * (1.0 - sop.ci95_hi);
  est.ci95_hi = cfg.t_rs * (1.0 - sop.ci95_lo);
  return est;
}

}  // namespace risfso::montecarlo
