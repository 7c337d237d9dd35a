#pragma once

// Two-photon polarization algebra on the linear basis (e1, e2).
//
// Every axis (polarizer or source polarization) lives in one shared transverse
// plane and is measured from the common e1 reference direction. Two-photon
// amplitudes use the ordered basis (e1e1, e1e2, e2e1, e2e2); the first slot is
// the photon registered at detector A.

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace skypol {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2d;
using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Vec4c = Eigen::Vector4cd;

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

/// Tolerance for exact-algebra identities.
inline constexpr double kExactTol = 1e-12;

/// A polarizer (or source polarization) axis. An axis is a line, so the
/// angle is stored modulo pi in [0, pi).
class PolarizerAxis {
 public:
  PolarizerAxis() = default;
  explicit PolarizerAxis(double radians);

  static PolarizerAxis from_degrees(double degrees);

  double radians() const { return angle_; }
  double degrees() const { return angle_ * 180.0 / kPi; }

  /// Axis rotated by `radians` (result renormalized).
  PolarizerAxis rotated(double radians) const { return PolarizerAxis(angle_ + radians); }

  /// Unit vector along the axis, (cos t, sin t).
  Eigen::Vector2d direction() const;
  /// Unit vector perpendicular to the axis, (-sin t, cos t).
  Eigen::Vector2d perpendicular() const;

 private:
  double angle_ = 0.0;
};

/// Wraps an angle into [0, pi).
double normalize_axis_angle(double radians);

/// Measurement outcome registered by a polarizer.
enum class Outcome : int { plus = 1, minus = -1 };

inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::plus, Outcome::minus};

inline int sign(Outcome o) { return static_cast<int>(o); }

/// The +/-1-valued polarizer observable |n><n| - |n_perp><n_perp|.
class Projector {
 public:
  const Mat2& matrix() const { return m_; }
  PolarizerAxis axis() const { return axis_; }

 private:
  friend Projector projector_from_axis(PolarizerAxis axis);
  Projector(PolarizerAxis axis, const Mat2& m) : axis_(axis), m_(m) {}

  PolarizerAxis axis_;
  Mat2 m_;
};

/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]] for the axis angle t.
Projector projector_from_axis(PolarizerAxis axis);

/// Rank-1 outcome projector: |n><n| for plus, |n_perp><n_perp| for minus.
Mat2 outcome_projector(PolarizerAxis axis, Outcome outcome);

/// Normalized two-photon pure polarization state.
class TwoPhotonPureState {
 public:
  /// Throws DomainError unless sum |amp|^2 = 1 within 1e-12.
  explicit TwoPhotonPureState(const Vec4c& amplitudes);

  /// Rescales a nonzero vector to unit norm.
  static TwoPhotonPureState normalized(const Vec4c& amplitudes);

  const Vec4c& amplitudes() const { return amp_; }
  cplx operator[](int k) const { return amp_(k); }

  /// |psi><psi| as a 4x4 matrix.
  Mat4c density() const;

 private:
  Vec4c amp_;
};

bool is_normalized(const Vec4c& amplitudes, double tol = kExactTol);

/// Bell state of the given kind: 1 -> (e1e1 + e2e2)/sqrt2, 2 -> (e1e2 - e2e1)/sqrt2.
TwoPhotonPureState bell_state(int kind);

/// Single-photon helicity eigenstate (e1 + i h e2)/sqrt2 for h = +1 or -1.
Eigen::Vector2cd helicity_state(int helicity);

/// Tensor product of two helicity eigenstates.
TwoPhotonPureState product_helicity_state(int h1, int h2);

/// Kronecker product of two 2x2 operators, first factor acting on slot A.
Mat4c kron(const Mat2c& a, const Mat2c& b);
Vec4c kron(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b);

/// <psi| Pi_a (x) Pi_b |psi>.
double correlator(const TwoPhotonPureState& state, PolarizerAxis a, PolarizerAxis b);

/// Settings of the four-term CHSH combination.
struct ChshConfiguration {
  PolarizerAxis a;
  PolarizerAxis a_prime;
  PolarizerAxis b;
  PolarizerAxis b_prime;

  /// a = 0, a' = pi/4, b = pi/8, b' = -pi/8: theta_AB = theta_AB' = theta_A'B = pi/8
  /// and theta_A'B' = 3pi/8, which saturates 2 sqrt2 for both Bell kinds.
  static ChshConfiguration bell_optimal();
};

/// E(a,b) + E(a',b) + E(a,b') - E(a',b').
double chsh_expectation(const TwoPhotonPureState& state, const ChshConfiguration& cfg);

/// The CHSH observable as a 4x4 matrix.
Mat4c chsh_operator(const ChshConfiguration& cfg);

/// C * C, built explicitly from the tensor products.
Mat4c chsh_operator_square(const ChshConfiguration& cfg);

/// 4 (1 + sin 2|t_AA'| sin 2|t_BB'|) with t the line angles folded into [0, pi/2].
/// Equals the largest eigenvalue of C^2, hence the Tsirelson bound when maximal.
double chsh_square_scalar(const ChshConfiguration& cfg);

/// Partially polarized single-photon density matrix
/// [(1 + 2 alpha)|n><n| + |n_perp><n_perp|] / (2 + 2 alpha).
struct SourceDensityMatrix {
  Mat2c rho;
  PolarizerAxis axis;
  double alpha = 0.0;

  /// Degree of polarization alpha / (1 + alpha).
  double degree_of_polarization() const { return alpha / (1.0 + alpha); }
};

SourceDensityMatrix source_density(PolarizerAxis axis, double alpha);

/// Throws DomainError unless `rho4` is Hermitian, positive semidefinite and
/// has unit trace (all within 1e-12).
void validate_density(const Mat4c& rho4);

/// Born-rule probability Tr[rho4 (P_a(oa) (x) P_b(ob))].
double joint_outcome_probability(const Mat4c& rho4, PolarizerAxis a, PolarizerAxis b,
                                 Outcome oa, Outcome ob);

/// Same as above for a pure state, |<n_a(oa) n_b(ob)|psi>|^2.
double joint_outcome_probability(const TwoPhotonPureState& state, PolarizerAxis a,
                                 PolarizerAxis b, Outcome oa, Outcome ob);

/// Reduced single-photon state at detector A (slot 0) or B (slot 1).
Mat2c reduced_density(const Mat4c& rho4, int slot);

}  // namespace skypol
