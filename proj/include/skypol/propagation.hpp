#pragma once

// Scalar path amplitudes between two sources and two detectors.

#include <Eigen/Core>

#include "skypol/polarization.hpp"

namespace skypol {

using Vec3 = Eigen::Vector3d;

enum class Normalization { spherical, phase_only };

/// Positions of sources 1, 2 and detectors A, B, plus the wavenumber.
struct Geometry {
  Vec3 s1 = Vec3::Zero();
  Vec3 s2 = Vec3::Zero();
  Vec3 dA = Vec3::Zero();
  Vec3 dB = Vec3::Zero();
  double k = 1.0;

  /// Throws DomainError on coincident source/detector points or k <= 0.
  void validate() const;

  double r1A() const { return (dA - s1).norm(); }
  double r2A() const { return (dA - s2).norm(); }
  double r1B() const { return (dB - s1).norm(); }
  double r2B() const { return (dB - s2).norm(); }

  /// k (r1A + r2B - r2A - r1B): phase of D1A D2B D2A* D1B* for phase-only amplitudes.
  double loop_phase() const;
};

/// Propagators D_iX from source i to detector X.
struct PathAmplitudeSet {
  cplx d1A;
  cplx d2A;
  cplx d1B;
  cplx d2B;
};

/// D_iX = exp(i (k r_iX + phi_i)) / r_iX (spherical) or without the 1/r (phase-only).
PathAmplitudeSet path_amplitudes(const Geometry& geom, double phi1, double phi2,
                                 Normalization normalization);

struct HbtIntensity {
  double total = 0.0;
  double interference = 0.0;
};

/// |D1A|^2 |D2B|^2 + |D2A|^2 |D1B|^2 + 2 Re(D1A D2B D2A* D1B*).
HbtIntensity hbt_intensity(const PathAmplitudeSet& amps);

/// |D1A D2B + D2A D1B|^2.
double entangled_pair_weight(const PathAmplitudeSet& amps);

/// Removes the crossed paths: D2A = D1B = 0.
PathAmplitudeSet scenario2_mask(const PathAmplitudeSet& amps);

/// Unnormalized four-amplitude state after propagation along both path pairs.
/// Polarization is carried unchanged along each path; slot A holds whichever
/// photon reached detector A.
Vec4c propagate_state(const TwoPhotonPureState& state, const PathAmplitudeSet& amps);

}  // namespace skypol
