#pragma once

// Finite-statistics sampling of coincidence outcomes.
//
// Trials are split into fixed-size batches. Each batch draws from its own
// generator seeded by (seed, setting, batch), so aggregate counts are
// identical for any number of worker threads.

#include <cstddef>
#include <cstdint>
#include <span>

#include "skypol/scenarios.hpp"

namespace skypol {

struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t setting = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

struct SampleBatch {
  std::uint64_t n_pp = 0;
  std::uint64_t n_pm = 0;
  std::uint64_t n_mp = 0;
  std::uint64_t n_mm = 0;
  double theta_a = 0.0;
  double theta_b = 0.0;
  StreamId stream;

  std::uint64_t n_total() const { return n_pp + n_pm + n_mp + n_mm; }
  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;
};

struct EstimatedCorrelator {
  double e_hat = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
};

enum class PhaseMode {
  /// Scenario I redraws both source phases per pair; Scenario II keeps them fixed.
  automatic,
  /// Always use the configured phases.
  fixed,
  /// Always redraw phases uniformly on [0, 2 pi) per pair.
  redraw,
};

struct SamplerOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  PhaseMode phase_mode = PhaseMode::automatic;
  std::size_t batch_size = std::size_t{1} << 16;
};

/// Draws n pairs: each is a signal pair with probability
/// f w_sig / (f w_sig + (1-f) w_bg), otherwise a background pair, then an
/// outcome pair from that population's Born-rule probabilities.
SampleBatch sample_coincidences(const ExperimentConfig& cfg, PolarizerAxis a, PolarizerAxis b, std::uint64_t n,
                                StreamId stream, const SamplerOptions& opts = {});

/// e_hat = (n_pp + n_mm - n_pm - n_mp) / n, std_err = sqrt((1 - e_hat^2) / n).
EstimatedCorrelator estimate_correlator(const SampleBatch& batch);

struct ChshEstimate {
  double S_hat = 0.0;
  double std_err = 0.0;
};

/// Four independent settings on substreams 0..3 of `seed`.
ChshEstimate estimate_chsh(const ExperimentConfig& cfg, const ChshConfiguration& chsh_cfg,
                           std::uint64_t n_per_setting, std::uint64_t seed, const SamplerOptions& opts = {});

/// Monte Carlo counterpart of angular_scan. Row k uses substream k; E holds
/// the estimated correlator and the remaining columns the analytic parts.
ScanResult monte_carlo_scan(const ExperimentConfig& cfg, std::span<const double> grid_a,
                            std::span<const double> grid_b, std::uint64_t n_per_point, std::uint64_t seed,
                            const SamplerOptions& opts = {});

}  // namespace skypol
