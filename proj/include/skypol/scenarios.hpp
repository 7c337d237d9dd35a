#pragma once

// Signal + background composition for the two detection geometries.
//
// Scenario I: both sources are seen by both detectors, so the crossed paths
// interfere. Scenario II: source 1 is seen only by A and source 2 only by B,
// which is modelled by zeroing D2A and D1B.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skypol/background.hpp"
#include "skypol/polarization.hpp"
#include "skypol/propagation.hpp"

namespace skypol {

enum class Scenario { I, II };

std::string to_string(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::II;
  int bell_kind = 1;
  /// Fraction of pairs drawn from the entangled population.
  double entangled_fraction = 1.0;
  BackgroundSpec background;
  Geometry geometry;
  Normalization normalization = Normalization::phase_only;
  /// Source phases used by the analytic model. They cancel from every rate.
  double phi1 = 0.0;
  double phi2 = 0.0;

  void validate() const;
};

/// Amplitudes for the configured geometry and phases, masked in Scenario II.
PathAmplitudeSet scenario_amplitudes(const ExperimentConfig& cfg, double phi1, double phi2);
PathAmplitudeSet scenario_amplitudes(const ExperimentConfig& cfg);

struct CorrelatorParts {
  double E = 0.0;
  double E_signal = 0.0;
  double E_background = 0.0;
  double w_signal = 0.0;
  double w_background = 0.0;
};

/// Mixed correlator at a single setting, evaluated from explicit amplitudes.
CorrelatorParts mixture_correlator(const ExperimentConfig& cfg, const PathAmplitudeSet& amps, PolarizerAxis a,
                                   PolarizerAxis b);

/// E = [f w_sig E_sig + (1-f) w_bg E_bg] / [f w_sig + (1-f) w_bg].
CorrelatorParts coincidence_correlator(const ExperimentConfig& cfg, PolarizerAxis a, PolarizerAxis b);

struct ScanRow {
  double theta_a = 0.0;
  double theta_b = 0.0;
  double E = 0.0;
  double E_signal = 0.0;
  double E_background = 0.0;
  double w_signal = 0.0;
  double w_background = 0.0;
};

struct ScanResult {
  Scenario scenario = Scenario::II;
  std::vector<ScanRow> rows;
};

/// Row-major scan: grid_a is the outer index.
ScanResult angular_scan(const ExperimentConfig& cfg, std::span<const double> grid_a,
                        std::span<const double> grid_b);

/// Raised when the fit's design matrix is rank deficient.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitReport {
  /// Coefficient of cos 2(tA - tB).
  double S_hat = 0.0;
  /// Coefficient of cos 2(tA - b1) cos 2(tB - b2).
  double B_hat = 0.0;
  double residual_rms = 0.0;
  /// Ordinary least-squares standard error of S_hat from the residuals.
  double S_stderr = 0.0;
  double B_stderr = 0.0;
  /// 2 sqrt2 S_hat.
  double bell_S = 0.0;
  bool violates_bell = false;
};

/// Singular values of the fit design matrix, largest first.
std::vector<double> design_singular_values(const ScanResult& scan, double beta1, double beta2);

/// Threshold on the smallest singular value below which the fit is refused.
inline constexpr double kRankTol = 1e-10;

/// Least-squares separation of the cos 2(tA - tB) signal from the product
/// background. In Scenario I the basis also carries the interference
/// background, whose leading shape is cos 2(tA - tB) as well; that design is
/// always rank deficient and FitError is thrown.
FitReport extract_signal(const ScanResult& scan, double beta1, double beta2);

/// Polarizer axes at 45 degrees to each source axis, where the product
/// background term vanishes.
std::pair<PolarizerAxis, PolarizerAxis> null_background_axes(const BackgroundSpec& spec);

/// Scenario II forward-model coefficients (S, B) of the fit basis.
std::pair<double, double> scenario2_coefficients(const ExperimentConfig& cfg);

/// CHSH combination of coincidence correlators.
double chsh_with_background(const ExperimentConfig& cfg, const ChshConfiguration& chsh_cfg);

/// Smallest entangled fraction for which |CHSH| exceeds 2, found by bisection.
/// nullopt when even f = 1 does not violate.
std::optional<double> critical_fraction(ExperimentConfig cfg, const ChshConfiguration& chsh_cfg,
                                        double tol = 1e-12);

}  // namespace skypol
