#include "skypol/propagation.hpp"

#include <cmath>

namespace skypol {

void Geometry::validate() const {
  if (!(std::isfinite(k) && k > 0.0)) throw DomainError("geometry: wavenumber k must be > 0");
  if (!(s1.allFinite() && s2.allFinite() && dA.allFinite() && dB.allFinite())) {
    throw DomainError("geometry: positions must be finite");
  }
  const struct {
    const char* name;
    double r;
  } legs[] = {{"r1A", r1A()}, {"r2A", r2A()}, {"r1B", r1B()}, {"r2B", r2B()}};
  for (const auto& leg : legs) {
    if (!(leg.r > 0.0)) {
      throw DomainError(std::string("geometry: source and detector coincide (") + leg.name + " = 0)");
    }
  }
}

double Geometry::loop_phase() const { return k * (r1A() + r2B() - r2A() - r1B()); }

PathAmplitudeSet path_amplitudes(const Geometry& geom, double phi1, double phi2,
                                 Normalization normalization) {
  geom.validate();
  auto leg = [&](double r, double phi) {
    // geometric and source phases enter as separate factors so the source
    // phase cancels exactly (to rounding) in loop products
    const cplx phase = std::polar(1.0, geom.k * r) * std::polar(1.0, phi);
    return normalization == Normalization::spherical ? phase / r : phase;
  };
  return {leg(geom.r1A(), phi1), leg(geom.r2A(), phi2), leg(geom.r1B(), phi1), leg(geom.r2B(), phi2)};
}

HbtIntensity hbt_intensity(const PathAmplitudeSet& amps) {
  const double direct = std::norm(amps.d1A) * std::norm(amps.d2B) + std::norm(amps.d2A) * std::norm(amps.d1B);
  const double interference =
      2.0 * (amps.d1A * amps.d2B * std::conj(amps.d2A) * std::conj(amps.d1B)).real();
  return {direct + interference, interference};
}

double entangled_pair_weight(const PathAmplitudeSet& amps) {
  return std::norm(amps.d1A * amps.d2B + amps.d2A * amps.d1B);
}

PathAmplitudeSet scenario2_mask(const PathAmplitudeSet& amps) {
  PathAmplitudeSet out = amps;
  out.d2A = 0.0;
  out.d1B = 0.0;
  return out;
}

Vec4c propagate_state(const TwoPhotonPureState& state, const PathAmplitudeSet& amps) {
  // path 1->A, 2->B followed by path 2->A, 1->B
  const Vec4c direct = amps.d1A * amps.d2B * state.amplitudes();
  const Vec4c crossed = amps.d2A * amps.d1B * state.amplitudes();
  return direct + crossed;
}

}  // namespace skypol
