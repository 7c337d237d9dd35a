#pragma once

// Coincidence model for unentangled photon pairs drawn from two partially
// polarized sources.
//
// For a pair with photons from sources i and j, the rate of registering
// outcome operators O_A at A and O_B at B is
//
//   Tr(O_A p_i) Tr(O_B p_j) |D_iA|^2 |D_jB|^2
// + Tr(O_A p_j) Tr(O_B p_i) |D_jA|^2 |D_iB|^2
// + Tr(O_A p_i O_B p_j) D_iA D_jB D_jA* D_iB*
// + Tr(O_A p_j O_B p_i) D_iA* D_jB* D_jA D_iB
//
// Cross-source pairs use (i, j) = (1, 2) or (2, 1); same-source pairs use
// (1, 1) or (2, 2). With rank-1 outcome projectors the rate is a genuine
// nonnegative probability; the +/-1 polarizer operators give the signed
// combination (++) - (+-) - (-+) + (--).

#include <array>

#include "skypol/polarization.hpp"
#include "skypol/propagation.hpp"

namespace skypol {

/// Relative rates of the four source-index pairings.
struct PairingWeights {
  double w12 = 0.5;
  double w21 = 0.5;
  double w11 = 0.0;
  double w22 = 0.0;

  /// Throws DomainError if any weight is negative/non-finite or all are zero.
  PairingWeights normalized() const;
};

struct BackgroundSpec {
  PolarizerAxis axis1;
  PolarizerAxis axis2;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  PairingWeights weights;

  void validate() const;
  SourceDensityMatrix source1() const { return source_density(axis1, alpha1); }
  SourceDensityMatrix source2() const { return source_density(axis2, alpha2); }
};

/// Tr(Pi rho) in closed form: alpha cos 2(t_pi - t_rho) / (1 + alpha).
double polarizer_trace(const Projector& p, const SourceDensityMatrix& rho);

/// Tr(Pi_A rho_1 Pi_B rho_2), evaluated as an exact matrix trace.
cplx interference_trace(const Projector& pA, const SourceDensityMatrix& rho1, const Projector& pB,
                        const SourceDensityMatrix& rho2);

/// The four-term rate for one (i, j) pairing with arbitrary 2x2 outcome
/// operators. Returned as complex so callers can check the imaginary residue.
cplx pairing_rate(const Mat2c& opA, const Mat2c& opB, const Mat2c& rho_i, const Mat2c& rho_j,
                  cplx d_iA, cplx d_jA, cplx d_iB, cplx d_jB);

/// Outcome rates in the order (++, +-, -+, --), weighted over pairings.
std::array<double, 4> background_outcome_rates(const BackgroundSpec& spec, const PathAmplitudeSet& amps,
                                               PolarizerAxis a, PolarizerAxis b);

/// Rate of registering (oa, ob) at axes (a, b). Unnormalized; throws
/// std::logic_error if the result falls below -1e-12.
double background_probability(const BackgroundSpec& spec, const PathAmplitudeSet& amps, PolarizerAxis a,
                              PolarizerAxis b, Outcome oa = Outcome::plus, Outcome ob = Outcome::plus);

/// Weighted four-term rate evaluated with the +/-1 operators Pi_a, Pi_b.
double background_polarizer_term(const BackgroundSpec& spec, const PathAmplitudeSet& amps, PolarizerAxis a,
                                 PolarizerAxis b);

/// Total pair rate summed over the four outcomes. Independent of the axes.
double background_total_rate(const BackgroundSpec& spec, const PathAmplitudeSet& amps);

/// Correlator E_bg = sum_{oa,ob} oa ob P(oa, ob) / sum P. Throws DomainError
/// when the total rate is not positive.
double background_correlator(const BackgroundSpec& spec, const PathAmplitudeSet& amps, PolarizerAxis a,
                             PolarizerAxis b);

}  // namespace skypol
