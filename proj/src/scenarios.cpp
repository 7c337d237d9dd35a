#include "skypol/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace skypol {

std::string to_string(Scenario s) { return s == Scenario::I ? "I" : "II"; }

void ExperimentConfig::validate() const {
  if (bell_kind != 1 && bell_kind != 2) throw DomainError("bell_kind must be 1 or 2");
  if (!std::isfinite(entangled_fraction) || entangled_fraction < 0.0 || entangled_fraction > 1.0) {
    throw DomainError("entangled_fraction must lie in [0, 1]");
  }
  if (!std::isfinite(phi1) || !std::isfinite(phi2)) throw DomainError("source phases must be finite");
  background.validate();
  geometry.validate();
}

PathAmplitudeSet scenario_amplitudes(const ExperimentConfig& cfg, double phi1, double phi2) {
  const PathAmplitudeSet amps = path_amplitudes(cfg.geometry, phi1, phi2, cfg.normalization);
  return cfg.scenario == Scenario::II ? scenario2_mask(amps) : amps;
}

PathAmplitudeSet scenario_amplitudes(const ExperimentConfig& cfg) {
  return scenario_amplitudes(cfg, cfg.phi1, cfg.phi2);
}

CorrelatorParts mixture_correlator(const ExperimentConfig& cfg, const PathAmplitudeSet& amps, PolarizerAxis a,
                                   PolarizerAxis b) {
  CorrelatorParts parts;
  parts.E_signal = correlator(bell_state(cfg.bell_kind), a, b);
  parts.w_signal = entangled_pair_weight(amps);
  parts.w_background = background_total_rate(cfg.background, amps);
  if (parts.w_background > 0.0) parts.E_background = background_correlator(cfg.background, amps, a, b);

  const double f = cfg.entangled_fraction;
  const double sig = f * parts.w_signal;
  const double bg = (1.0 - f) * parts.w_background;
  if (!(sig + bg > 0.0)) {
    throw DomainError("total coincidence weight is zero (signal weight " + std::to_string(parts.w_signal) +
                      ", background weight " + std::to_string(parts.w_background) + ")");
  }
  parts.E = (sig * parts.E_signal + bg * parts.E_background) / (sig + bg);
  return parts;
}

CorrelatorParts coincidence_correlator(const ExperimentConfig& cfg, PolarizerAxis a, PolarizerAxis b) {
  cfg.validate();
  return mixture_correlator(cfg, scenario_amplitudes(cfg), a, b);
}

ScanResult angular_scan(const ExperimentConfig& cfg, std::span<const double> grid_a,
                        std::span<const double> grid_b) {
  if (grid_a.empty() || grid_b.empty()) throw DomainError("angular_scan: grids must be non-empty");
  cfg.validate();
  const PathAmplitudeSet amps = scenario_amplitudes(cfg);
  ScanResult out;
  out.scenario = cfg.scenario;
  out.rows.reserve(grid_a.size() * grid_b.size());
  for (double ta : grid_a) {
    for (double tb : grid_b) {
      const CorrelatorParts p = mixture_correlator(cfg, amps, PolarizerAxis(ta), PolarizerAxis(tb));
      out.rows.push_back({ta, tb, p.E, p.E_signal, p.E_background, p.w_signal, p.w_background});
    }
  }
  return out;
}

namespace {

struct DesignColumn {
  const char* name;
  double (*eval)(double ta, double tb, double b1, double b2);
};

constexpr DesignColumn kSignalColumn{"signal cos2(tA-tB)",
                                     [](double ta, double tb, double, double) { return std::cos(2.0 * (ta - tb)); }};
constexpr DesignColumn kProductColumn{"product background cos2(tA-beta1)cos2(tB-beta2)",
                                      [](double ta, double tb, double b1, double b2) {
                                        return std::cos(2.0 * (ta - b1)) * std::cos(2.0 * (tb - b2));
                                      }};
constexpr DesignColumn kInterferenceColumn{
    "interference background cos2(tA-tB)",
    [](double ta, double tb, double, double) { return std::cos(2.0 * (ta - tb)); }};
constexpr DesignColumn kSwappedColumn{"swapped product background cos2(tA-beta2)cos2(tB-beta1)",
                                      [](double ta, double tb, double b1, double b2) {
                                        return std::cos(2.0 * (ta - b2)) * std::cos(2.0 * (tb - b1));
                                      }};

std::vector<DesignColumn> design_columns(Scenario s) {
  if (s == Scenario::II) return {kSignalColumn, kProductColumn};
  return {kSignalColumn, kProductColumn, kInterferenceColumn, kSwappedColumn};
}

Eigen::MatrixXd design_matrix(const ScanResult& scan, const std::vector<DesignColumn>& cols, double beta1,
                              double beta2) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(scan.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const ScanRow& row = scan.rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      x(r, c) = cols[static_cast<std::size_t>(c)].eval(row.theta_a, row.theta_b, beta1, beta2);
    }
  }
  return x;
}

std::string describe_null_directions(const std::vector<DesignColumn>& cols, const Eigen::MatrixXd& v,
                                     const Eigen::VectorXd& s) {
  std::ostringstream os;
  os << "rank-deficient design matrix (smallest singular value " << s(s.size() - 1) << "): degenerate basis";
  const char* sep = " direction";
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (s(j) >= kRankTol) continue;
    os << sep;
    sep = "; direction";
    bool first = true;
    for (Eigen::Index k = 0; k < v.rows(); ++k) {
      if (std::abs(v(k, j)) < 1e-6) continue;
      os << (first ? " " : " + ") << "(" << v(k, j) << ")*[" << cols[static_cast<std::size_t>(k)].name << "]";
      first = false;
    }
  }
  return os.str();
}

}  // namespace

std::vector<double> design_singular_values(const ScanResult& scan, double beta1, double beta2) {
  const Eigen::MatrixXd x = design_matrix(scan, design_columns(scan.scenario), beta1, beta2);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const Eigen::VectorXd s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

FitReport extract_signal(const ScanResult& scan, double beta1, double beta2) {
  std::set<std::pair<double, double>> distinct;
  for (const auto& r : scan.rows) distinct.emplace(r.theta_a, r.theta_b);
  if (distinct.size() < 4) {
    throw DomainError("extract_signal needs at least 4 distinct (theta_a, theta_b) rows, got " +
                      std::to_string(distinct.size()));
  }

  const auto cols = design_columns(scan.scenario);
  const Eigen::MatrixXd x = design_matrix(scan, cols, beta1, beta2);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index r = 0; r < y.size(); ++r) y(r) = scan.rows[static_cast<std::size_t>(r)].E;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::Index last = s.size() - 1;
  if (s(last) < kRankTol) {
    throw FitError(describe_null_directions(cols, svd.matrixV(), s));
  }

  const Eigen::VectorXd coef = svd.solve(y);
  const Eigen::VectorXd resid = y - x * coef;
  const double rss = resid.squaredNorm();
  const auto n = static_cast<double>(x.rows());
  const auto p = static_cast<double>(x.cols());

  FitReport rep;
  rep.S_hat = coef(0);
  rep.B_hat = coef(1);
  rep.residual_rms = std::sqrt(rss / n);
  if (n > p) {
    // (X^T X)^-1 = V S^-2 V^T
    const Eigen::MatrixXd v = svd.matrixV();
    const Eigen::MatrixXd cov =
        (rss / (n - p)) * v * s.array().square().inverse().matrix().asDiagonal() * v.transpose();
    rep.S_stderr = std::sqrt(cov(0, 0));
    rep.B_stderr = std::sqrt(cov(1, 1));
  }
  rep.bell_S = kTsirelson * rep.S_hat;
  rep.violates_bell = std::abs(rep.bell_S) > 2.0;
  return rep;
}

std::pair<PolarizerAxis, PolarizerAxis> null_background_axes(const BackgroundSpec& spec) {
  return {spec.axis1.rotated(kPi / 4.0), spec.axis2.rotated(kPi / 4.0)};
}

std::pair<double, double> scenario2_coefficients(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentConfig masked = cfg;
  masked.scenario = Scenario::II;
  const PathAmplitudeSet amps = scenario_amplitudes(masked);
  const double f = cfg.entangled_fraction;
  const double sig = f * entangled_pair_weight(amps);
  const double bg = (1.0 - f) * background_total_rate(cfg.background, amps);
  const double sign = cfg.bell_kind == 1 ? 1.0 : -1.0;
  const double p1 = cfg.background.alpha1 / (1.0 + cfg.background.alpha1);
  const double p2 = cfg.background.alpha2 / (1.0 + cfg.background.alpha2);
  return {sign * sig / (sig + bg), p1 * p2 * bg / (sig + bg)};
}

double chsh_with_background(const ExperimentConfig& cfg, const ChshConfiguration& c) {
  cfg.validate();
  const PathAmplitudeSet amps = scenario_amplitudes(cfg);
  auto e = [&](PolarizerAxis a, PolarizerAxis b) { return mixture_correlator(cfg, amps, a, b).E; };
  return e(c.a, c.b) + e(c.a_prime, c.b) + e(c.a, c.b_prime) - e(c.a_prime, c.b_prime);
}

std::optional<double> critical_fraction(ExperimentConfig cfg, const ChshConfiguration& chsh_cfg, double tol) {
  auto violates = [&](double f) {
    cfg.entangled_fraction = f;
    return std::abs(chsh_with_background(cfg, chsh_cfg)) > 2.0;
  };
  if (!violates(1.0)) return std::nullopt;
  if (violates(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (violates(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace skypol
