#include "skypol/polarization.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace skypol {

double normalize_axis_angle(double radians) {
  if (!std::isfinite(radians)) throw DomainError("axis angle must be finite");
  double t = std::fmod(radians, kPi);
  if (t < 0.0) t += kPi;
  // fmod can return exactly pi after the shift for tiny negative inputs
  if (t >= kPi) t -= kPi;
  return t;
}

PolarizerAxis::PolarizerAxis(double radians) : angle_(normalize_axis_angle(radians)) {}

PolarizerAxis PolarizerAxis::from_degrees(double degrees) {
  return PolarizerAxis(degrees * kPi / 180.0);
}

Eigen::Vector2d PolarizerAxis::direction() const {
  return {std::cos(angle_), std::sin(angle_)};
}

Eigen::Vector2d PolarizerAxis::perpendicular() const {
  return {-std::sin(angle_), std::cos(angle_)};
}

Projector projector_from_axis(PolarizerAxis axis) {
  const double c = std::cos(2.0 * axis.radians());
  const double s = std::sin(2.0 * axis.radians());
  Mat2 m;
  m << c, s, s, -c;
  return Projector(axis, m);
}

Mat2 outcome_projector(PolarizerAxis axis, Outcome outcome) {
  const Eigen::Vector2d v = outcome == Outcome::plus ? axis.direction() : axis.perpendicular();
  return v * v.transpose();
}

bool is_normalized(const Vec4c& amplitudes, double tol) {
  return std::abs(amplitudes.squaredNorm() - 1.0) <= tol;
}

TwoPhotonPureState::TwoPhotonPureState(const Vec4c& amplitudes) : amp_(amplitudes) {
  if (!amp_.allFinite()) throw DomainError("two-photon amplitudes must be finite");
  if (!is_normalized(amp_)) {
    throw DomainError("two-photon state is not normalized (norm^2 = " +
                      std::to_string(amp_.squaredNorm()) + ")");
  }
}

TwoPhotonPureState TwoPhotonPureState::normalized(const Vec4c& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite state");
  return TwoPhotonPureState(amplitudes / n);
}

Mat4c TwoPhotonPureState::density() const { return amp_ * amp_.adjoint(); }

TwoPhotonPureState bell_state(int kind) {
  const double h = 1.0 / std::numbers::sqrt2;
  Vec4c amp = Vec4c::Zero();
  switch (kind) {
    case 1:
      amp(0) = h;
      amp(3) = h;
      break;
    case 2:
      amp(1) = h;
      amp(2) = -h;
      break;
    default:
      throw DomainError("bell_state kind must be 1 or 2, got " + std::to_string(kind));
  }
  return TwoPhotonPureState(amp);
}

Eigen::Vector2cd helicity_state(int helicity) {
  if (helicity != 1 && helicity != -1) {
    throw DomainError("helicity must be +1 or -1, got " + std::to_string(helicity));
  }
  const double h = 1.0 / std::numbers::sqrt2;
  return {cplx(h, 0.0), cplx(0.0, helicity * h)};
}

Vec4c kron(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  Vec4c out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

Mat4c kron(const Mat2c& a, const Mat2c& b) {
  Mat4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

TwoPhotonPureState product_helicity_state(int h1, int h2) {
  return TwoPhotonPureState::normalized(kron(helicity_state(h1), helicity_state(h2)));
}

namespace {

// <psi| A (x) B |psi> for real symmetric 2x2 A, B without forming the 4x4.
double product_expectation(const Vec4c& psi, const Mat2& a, const Mat2& b) {
  cplx acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          acc += std::conj(psi(2 * i + j)) * (a(i, k) * b(j, l)) * psi(2 * k + l);
  return acc.real();
}

double fold_line_angle(double d) {
  const double t = normalize_axis_angle(d);
  return std::min(t, kPi - t);
}

}  // namespace

double correlator(const TwoPhotonPureState& state, PolarizerAxis a, PolarizerAxis b) {
  if (!is_normalized(state.amplitudes())) throw DomainError("correlator requires a normalized state");
  return product_expectation(state.amplitudes(), projector_from_axis(a).matrix(),
                             projector_from_axis(b).matrix());
}

ChshConfiguration ChshConfiguration::bell_optimal() {
  return {PolarizerAxis(0.0), PolarizerAxis(kPi / 4.0), PolarizerAxis(kPi / 8.0),
          PolarizerAxis(-kPi / 8.0)};
}

double chsh_expectation(const TwoPhotonPureState& state, const ChshConfiguration& cfg) {
  return correlator(state, cfg.a, cfg.b) + correlator(state, cfg.a_prime, cfg.b) +
         correlator(state, cfg.a, cfg.b_prime) - correlator(state, cfg.a_prime, cfg.b_prime);
}

Mat4c chsh_operator(const ChshConfiguration& cfg) {
  auto pi = [](PolarizerAxis x) -> Mat2c {
    return projector_from_axis(x).matrix().cast<cplx>();
  };
  return kron(pi(cfg.a), pi(cfg.b)) + kron(pi(cfg.a_prime), pi(cfg.b)) +
         kron(pi(cfg.a), pi(cfg.b_prime)) - kron(pi(cfg.a_prime), pi(cfg.b_prime));
}

Mat4c chsh_operator_square(const ChshConfiguration& cfg) {
  const Mat4c c = chsh_operator(cfg);
  return c * c;
}

double chsh_square_scalar(const ChshConfiguration& cfg) {
  const double taa = fold_line_angle(cfg.a.radians() - cfg.a_prime.radians());
  const double tbb = fold_line_angle(cfg.b.radians() - cfg.b_prime.radians());
  return 4.0 * (1.0 + std::sin(2.0 * taa) * std::sin(2.0 * tbb));
}

SourceDensityMatrix source_density(PolarizerAxis axis, double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw DomainError("net polarization alpha must be finite and >= 0, got " + std::to_string(alpha));
  }
  const Mat2 par = outcome_projector(axis, Outcome::plus);
  const Mat2 perp = outcome_projector(axis, Outcome::minus);
  const Mat2 rho = ((1.0 + 2.0 * alpha) * par + perp) / (2.0 + 2.0 * alpha);
  return {rho.cast<cplx>(), axis, alpha};
}

void validate_density(const Mat4c& rho4) {
  if (!rho4.allFinite()) throw DomainError("density matrix has non-finite entries");
  if ((rho4 - rho4.adjoint()).cwiseAbs().maxCoeff() > kExactTol) {
    throw DomainError("density matrix is not Hermitian");
  }
  if (std::abs(rho4.trace() - cplx(1.0, 0.0)) > kExactTol) {
    throw DomainError("density matrix trace is not one");
  }
  Eigen::SelfAdjointEigenSolver<Mat4c> es(rho4, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kExactTol) {
    throw DomainError("density matrix is not positive semidefinite");
  }
}

double joint_outcome_probability(const Mat4c& rho4, PolarizerAxis a, PolarizerAxis b, Outcome oa,
                                 Outcome ob) {
  validate_density(rho4);
  const Mat4c proj = kron(Mat2c(outcome_projector(a, oa).cast<cplx>()), Mat2c(outcome_projector(b, ob).cast<cplx>()));
  return (rho4 * proj).trace().real();
}

double joint_outcome_probability(const TwoPhotonPureState& state, PolarizerAxis a, PolarizerAxis b,
                                 Outcome oa, Outcome ob) {
  const Eigen::Vector2d va = oa == Outcome::plus ? a.direction() : a.perpendicular();
  const Eigen::Vector2d vb = ob == Outcome::plus ? b.direction() : b.perpendicular();
  const Vec4c bra = kron(Eigen::Vector2cd(va.cast<cplx>()), Eigen::Vector2cd(vb.cast<cplx>()));
  return std::norm(bra.dot(state.amplitudes()));
}

Mat2c reduced_density(const Mat4c& rho4, int slot) {
  if (slot != 0 && slot != 1) throw DomainError("slot must be 0 (A) or 1 (B)");
  Mat2c out = Mat2c::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        out(i, j) += slot == 0 ? rho4(2 * i + k, 2 * j + k) : rho4(2 * k + i, 2 * k + j);
  return out;
}

}  // namespace skypol
