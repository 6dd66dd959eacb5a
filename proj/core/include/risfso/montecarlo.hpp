#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "risfso/channels.hpp"
#include "risfso/metrics.hpp"

namespace risfso::montecarlo {

// Counter-based splittable stream: each batch derives an independent splitmix64
// stream from (master seed, batch index), so results do not depend on the
// parallel schedule.
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t next_u64();
  double uniform();            // (0, 1)
  double normal();             // standard normal, Box-Muller with cache
  double gamma(double shape);  // unit scale, Marsaglia-Tsang

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

enum class McMode { paper_independent, physical_shared };

struct McConfig {
  std::uint64_t samples = 1000000;
  int batches = 100;
  std::uint64_t seed = 1;
  McMode mode = McMode::paper_independent;
  void validate() const;
};

struct McEstimate {
  double mean = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::uint64_t n = 0;
  double std_err = 0.0;
};

struct MalagaMixture {
  std::vector<double> weights;  // per k = 1..beta
  double scale = 0.0;           // (g beta + omega) / (alpha beta)
  // cached constants for sampling
  double alpha = 0.0;
  double xi2 = 0.0;
  double i_bar = 0.0;   // mean composite irradiance with A0 = 1
  double u_elec = 0.0;  // U_d
  int r = 1;
};

double sample_cascade_snr(const channels::RfCascadeConfig& cfg, Rng& rng);

std::pair<double, double> sample_best_ris(
    const channels::RfCascadeConfig& cfg_main,
    const channels::RfCascadeConfig& cfg_eve, int m_surfaces, McMode mode,
    Rng& rng);

MalagaMixture build_malaga_mixture(const channels::MalagaConfig& cfg);
double sample_fso_snr(const channels::MalagaConfig& cfg,
                      const MalagaMixture& mixture, Rng& rng);

McEstimate estimate_sop(const metrics::SystemConfig& cfg, const McConfig& mc);
McEstimate estimate_asc(const metrics::SystemConfig& cfg, const McConfig& mc);
McEstimate estimate_est(const metrics::SystemConfig& cfg, const McConfig& mc);

// Worker pool size: RISFSO_WORKERS env override, else available parallelism.
int worker_count();

}  // namespace risfso::montecarlo
