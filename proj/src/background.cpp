#include "skypol/background.hpp"

#include <cmath>
#include <stdexcept>

namespace skypol {

PairingWeights PairingWeights::normalized() const {
  const std::array<double, 4> w{w12, w21, w11, w22};
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError("pairing weights must be finite and >= 0");
    sum += x;
  }
  if (!(sum > 0.0)) throw DomainError("pairing weights must not all be zero");
  return {w12 / sum, w21 / sum, w11 / sum, w22 / sum};
}

void BackgroundSpec::validate() const {
  if (!std::isfinite(alpha1) || alpha1 < 0.0) throw DomainError("background: alpha1 must be >= 0");
  if (!std::isfinite(alpha2) || alpha2 < 0.0) throw DomainError("background: alpha2 must be >= 0");
  (void)weights.normalized();
}

double polarizer_trace(const Projector& p, const SourceDensityMatrix& rho) {
  const double theta = p.axis().radians() - rho.axis.radians();
  return rho.alpha * std::cos(2.0 * theta) / (1.0 + rho.alpha);
}

cplx interference_trace(const Projector& pA, const SourceDensityMatrix& rho1, const Projector& pB,
                        const SourceDensityMatrix& rho2) {
  const Mat2c a = pA.matrix().cast<cplx>();
  const Mat2c b = pB.matrix().cast<cplx>();
  return (a * rho1.rho * b * rho2.rho).trace();
}

cplx pairing_rate(const Mat2c& opA, const Mat2c& opB, const Mat2c& rho_i, const Mat2c& rho_j, cplx d_iA,
                  cplx d_jA, cplx d_iB, cplx d_jB) {
  const cplx tAi = (opA * rho_i).trace();
  const cplx tAj = (opA * rho_j).trace();
  const cplx tBi = (opB * rho_i).trace();
  const cplx tBj = (opB * rho_j).trace();
  const cplx loop = d_iA * d_jB * std::conj(d_jA) * std::conj(d_iB);
  const cplx exchange_ij = (opA * rho_i * opB * rho_j).trace();
  const cplx exchange_ji = (opA * rho_j * opB * rho_i).trace();
  return tAi * tBj * std::norm(d_iA) * std::norm(d_jB) + tAj * tBi * std::norm(d_jA) * std::norm(d_iB) +
         exchange_ij * loop + exchange_ji * std::conj(loop);
}

namespace {

// Weighted sum over the four pairings for fixed outcome operators.
cplx weighted_rate(const BackgroundSpec& spec, const PathAmplitudeSet& amps, const Mat2c& opA,
                   const Mat2c& opB, const Mat2c& rho1, const Mat2c& rho2) {
  const PairingWeights w = spec.weights.normalized();
  cplx total = 0.0;
  if (w.w12 > 0.0) total += w.w12 * pairing_rate(opA, opB, rho1, rho2, amps.d1A, amps.d2A, amps.d1B, amps.d2B);
  if (w.w21 > 0.0) total += w.w21 * pairing_rate(opA, opB, rho2, rho1, amps.d2A, amps.d1A, amps.d2B, amps.d1B);
  if (w.w11 > 0.0) total += w.w11 * pairing_rate(opA, opB, rho1, rho1, amps.d1A, amps.d1A, amps.d1B, amps.d1B);
  if (w.w22 > 0.0) total += w.w22 * pairing_rate(opA, opB, rho2, rho2, amps.d2A, amps.d2A, amps.d2B, amps.d2B);
  return total;
}

double checked_rate(cplx rate) {
  if (rate.real() < -kExactTol) {
    throw std::logic_error("background rate is negative (" + std::to_string(rate.real()) +
                           "); amplitude/background-settings combination is inconsistent");
  }
  return std::max(rate.real(), 0.0);
}

}  // namespace

std::array<double, 4> background_outcome_rates(const BackgroundSpec& spec, const PathAmplitudeSet& amps,
                                               PolarizerAxis a, PolarizerAxis b) {
  spec.validate();
  const Mat2c rho1 = spec.source1().rho;
  const Mat2c rho2 = spec.source2().rho;
  std::array<double, 4> out{};
  int idx = 0;
  for (Outcome oa : kOutcomes) {
    const Mat2c opA = outcome_projector(a, oa).cast<cplx>();
    for (Outcome ob : kOutcomes) {
      const Mat2c opB = outcome_projector(b, ob).cast<cplx>();
      out[idx++] = checked_rate(weighted_rate(spec, amps, opA, opB, rho1, rho2));
    }
  }
  return out;
}

double background_probability(const BackgroundSpec& spec, const PathAmplitudeSet& amps, PolarizerAxis a,
                              PolarizerAxis b, Outcome oa, Outcome ob) {
  spec.validate();
  const Mat2c opA = outcome_projector(a, oa).cast<cplx>();
  const Mat2c opB = outcome_projector(b, ob).cast<cplx>();
  return checked_rate(weighted_rate(spec, amps, opA, opB, spec.source1().rho, spec.source2().rho));
}

double background_polarizer_term(const BackgroundSpec& spec, const PathAmplitudeSet& amps, PolarizerAxis a,
                                 PolarizerAxis b) {
  spec.validate();
  const Mat2c opA = projector_from_axis(a).matrix().cast<cplx>();
  const Mat2c opB = projector_from_axis(b).matrix().cast<cplx>();
  return weighted_rate(spec, amps, opA, opB, spec.source1().rho, spec.source2().rho).real();
}

double background_total_rate(const BackgroundSpec& spec, const PathAmplitudeSet& amps) {
  spec.validate();
  const Mat2c id = Mat2c::Identity();
  return checked_rate(weighted_rate(spec, amps, id, id, spec.source1().rho, spec.source2().rho));
}

double background_correlator(const BackgroundSpec& spec, const PathAmplitudeSet& amps, PolarizerAxis a,
                             PolarizerAxis b) {
  const auto r = background_outcome_rates(spec, amps, a, b);
  const double total = r[0] + r[1] + r[2] + r[3];
  if (!(total > 0.0)) throw DomainError("background total rate is zero; correlator undefined");
  return (r[0] - r[1] - r[2] + r[3]) / total;
}

}  // namespace skypol
