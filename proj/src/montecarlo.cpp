#include "skypol/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

namespace skypol {

namespace {

using Counts = std::array<std::uint64_t, 4>;

struct OutcomeTable {
  double p_signal = 0.0;
  std::array<double, 4> signal_cdf{};
  std::array<double, 4> background_cdf{};
};

std::array<double, 4> cumulative(const std::array<double, 4>& p) {
  std::array<double, 4> c{};
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    acc += p[k];
    c[k] = acc;
  }
  return c;
}

OutcomeTable build_table(const ExperimentConfig& cfg, const PathAmplitudeSet& amps, PolarizerAxis a,
                         PolarizerAxis b) {
  const TwoPhotonPureState psi = bell_state(cfg.bell_kind);
  std::array<double, 4> sig{};
  int k = 0;
  for (Outcome oa : kOutcomes)
    for (Outcome ob : kOutcomes) sig[static_cast<std::size_t>(k++)] = joint_outcome_probability(psi, a, b, oa, ob);

  const double w_sig = entangled_pair_weight(amps);
  std::array<double, 4> bg = background_outcome_rates(cfg.background, amps, a, b);
  const double w_bg = bg[0] + bg[1] + bg[2] + bg[3];
  if (w_bg > 0.0)
    for (double& x : bg) x /= w_bg;

  const double f = cfg.entangled_fraction;
  const double denom = f * w_sig + (1.0 - f) * w_bg;
  if (!(denom > 0.0)) throw DomainError("sample_coincidences: total coincidence weight is zero");
  return {f * w_sig / denom, cumulative(sig), cumulative(bg)};
}

std::size_t pick(const std::array<double, 4>& cdf, double u) {
  // u is scaled by the final cumulative value to absorb rounding in the sum
  const double x = u * cdf[3];
  for (std::size_t k = 0; k < 3; ++k)
    if (x < cdf[k]) return k;
  return 3;
}

bool redraws_phases(const ExperimentConfig& cfg, PhaseMode mode) {
  switch (mode) {
    case PhaseMode::fixed:
      return false;
    case PhaseMode::redraw:
      return true;
    case PhaseMode::automatic:
      break;
  }
  return cfg.scenario == Scenario::I;
}

std::mt19937_64 batch_generator(StreamId stream, std::uint64_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream.seed), static_cast<std::uint32_t>(stream.seed >> 32),
                    static_cast<std::uint32_t>(stream.setting), static_cast<std::uint32_t>(stream.setting >> 32),
                    static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SampleBatch sample_coincidences(const ExperimentConfig& cfg, PolarizerAxis a, PolarizerAxis b, std::uint64_t n,
                                StreamId stream, const SamplerOptions& opts) {
  if (n == 0) throw DomainError("sample_coincidences: n must be > 0");
  if (opts.batch_size == 0) throw DomainError("sample_coincidences: batch_size must be > 0");
  cfg.validate();

  const bool redraw = redraws_phases(cfg, opts.phase_mode);
  const OutcomeTable fixed_table = build_table(cfg, scenario_amplitudes(cfg), a, b);

  const std::uint64_t batch_size = opts.batch_size;
  const std::uint64_t n_batches = (n + batch_size - 1) / batch_size;
  std::vector<Counts> per_batch(n_batches, Counts{});

  auto run_batch = [&](std::uint64_t ib) {
    auto gen = batch_generator(stream, ib);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const std::uint64_t begin = ib * batch_size;
    const std::uint64_t count = std::min(batch_size, n - begin);
    Counts& c = per_batch[ib];
    for (std::uint64_t t = 0; t < count; ++t) {
      OutcomeTable table = fixed_table;
      if (redraw) {
        const double phi1 = phase(gen);
        const double phi2 = phase(gen);
        table = build_table(cfg, scenario_amplitudes(cfg, phi1, phi2), a, b);
      }
      const bool is_signal = unif(gen) < table.p_signal;
      const double u = unif(gen);
      ++c[pick(is_signal ? table.signal_cdf : table.background_cdf, u)];
    }
  };

  unsigned workers = opts.workers != 0 ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_batches));
  if (workers <= 1) {
    for (std::uint64_t ib = 0; ib < n_batches; ++ib) run_batch(ib);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t ib = next++; ib < n_batches; ib = next++) run_batch(ib);
      });
    }
  }

  SampleBatch out;
  for (const Counts& c : per_batch) {
    out.n_pp += c[0];
    out.n_pm += c[1];
    out.n_mp += c[2];
    out.n_mm += c[3];
  }
  out.theta_a = a.radians();
  out.theta_b = b.radians();
  out.stream = stream;
  return out;
}

EstimatedCorrelator estimate_correlator(const SampleBatch& batch) {
  const std::uint64_t n = batch.n_total();
  if (n == 0) throw DomainError("estimate_correlator: empty batch");
  const double same = static_cast<double>(batch.n_pp + batch.n_mm);
  const double diff = static_cast<double>(batch.n_pm + batch.n_mp);
  const double e = (same - diff) / static_cast<double>(n);
  return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n)), n};
}

ChshEstimate estimate_chsh(const ExperimentConfig& cfg, const ChshConfiguration& c, std::uint64_t n_per_setting,
                           std::uint64_t seed, const SamplerOptions& opts) {
  const std::array<std::pair<PolarizerAxis, PolarizerAxis>, 4> settings{
      {{c.a, c.b}, {c.a_prime, c.b}, {c.a, c.b_prime}, {c.a_prime, c.b_prime}}};
  constexpr std::array<double, 4> signs{1.0, 1.0, 1.0, -1.0};
  ChshEstimate out;
  double var = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto est = estimate_correlator(
        sample_coincidences(cfg, settings[k].first, settings[k].second, n_per_setting, {seed, k}, opts));
    out.S_hat += signs[k] * est.e_hat;
    var += est.std_err * est.std_err;
  }
  out.std_err = std::sqrt(var);
  return out;
}

ScanResult monte_carlo_scan(const ExperimentConfig& cfg, std::span<const double> grid_a,
                            std::span<const double> grid_b, std::uint64_t n_per_point, std::uint64_t seed,
                            const SamplerOptions& opts) {
  ScanResult scan = angular_scan(cfg, grid_a, grid_b);
  for (std::size_t k = 0; k < scan.rows.size(); ++k) {
    ScanRow& row = scan.rows[k];
    const auto batch = sample_coincidences(cfg, PolarizerAxis(row.theta_a), PolarizerAxis(row.theta_b), n_per_point,
                                           {seed, k}, opts);
    row.E = estimate_correlator(batch).e_hat;
  }
  return scan;
}

}  // namespace skypol
