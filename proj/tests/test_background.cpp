#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "oracles.hpp"
#include "skypol/background.hpp"

using namespace skypol;

namespace {

constexpr double kTol = 1e-12;

BackgroundSpec spec_with(double axis1, double axis2, double alpha1, double alpha2) {
  BackgroundSpec s;
  s.axis1 = PolarizerAxis(axis1);
  s.axis2 = PolarizerAxis(axis2);
  s.alpha1 = alpha1;
  s.alpha2 = alpha2;
  return s;
}

const PathAmplitudeSet kUnitMasked{1.0, 0.0, 0.0, 1.0};

PathAmplitudeSet random_amps(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> ph(0.0, 2 * kPi);
  std::uniform_real_distribution<double> mag(0.2, 2.0);
  return {std::polar(mag(gen), ph(gen)), std::polar(mag(gen), ph(gen)), std::polar(mag(gen), ph(gen)),
          std::polar(mag(gen), ph(gen))};
}

}  // namespace

TEST_CASE("pairing weights") {
  const PairingWeights w{1.0, 3.0, 0.0, 0.0};
  const auto n = w.normalized();
  CHECK(n.w12 == doctest::Approx(0.25));
  CHECK(n.w21 == doctest::Approx(0.75));
  CHECK(std::abs(n.w12 + n.w21 + n.w11 + n.w22 - 1.0) < kTol);
  CHECK_THROWS_AS((PairingWeights{0, 0, 0, 0}.normalized()), DomainError);
  CHECK_THROWS_AS((PairingWeights{-1, 2, 0, 0}.normalized()), DomainError);
  CHECK_THROWS_AS(spec_with(0, 0, -1, 0).validate(), DomainError);
}

TEST_CASE("polarizer_trace") {
  const auto p0 = projector_from_axis(PolarizerAxis(0.0));
  CHECK(polarizer_trace(p0, source_density(PolarizerAxis(0.2), 0.0)) == 0.0);
  CHECK(std::abs(polarizer_trace(p0, source_density(PolarizerAxis(0.0), 1.0)) - 0.5) < kTol);
  for (double alpha : {0.1, 1.0, 7.0}) {
    const auto rho = source_density(PolarizerAxis(0.3), alpha);
    CHECK(std::abs(polarizer_trace(projector_from_axis(PolarizerAxis(0.3 + kPi / 4)), rho)) < kTol);
  }

  SUBCASE("closed form equals the direct matrix trace") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    std::uniform_real_distribution<double> al(0.0, 10.0);
    for (int t = 0; t < 1000; ++t) {
      const double tp = ang(gen);
      const double tr = ang(gen);
      const double a = al(gen);
      const double closed = polarizer_trace(projector_from_axis(PolarizerAxis(tp)), source_density(PolarizerAxis(tr), a));
      const double direct = oracle::trace(oracle::mul(oracle::polarizer(tp), oracle::source(tr, a))).real();
      CHECK(std::abs(closed - direct) < kTol);
      CHECK(std::abs(closed) < 1.0);
    }
  }
}

TEST_CASE("interference_trace") {
  auto at = [](double ta, double tb, double a1, double a2, double n1 = 0.4, double n2 = 1.2) {
    return interference_trace(projector_from_axis(PolarizerAxis(ta)), source_density(PolarizerAxis(n1), a1),
                              projector_from_axis(PolarizerAxis(tb)), source_density(PolarizerAxis(n2), a2));
  };
  // oracle: Tr(Pi_A Pi_B / 4) with outer-product projectors
  const double ref0 = oracle::trace(oracle::scale(oracle::mul(oracle::polarizer(0.0), oracle::polarizer(0.0)), 0.25)).real();
  const double ref45 =
      oracle::trace(oracle::scale(oracle::mul(oracle::polarizer(0.0), oracle::polarizer(kPi / 4)), 0.25)).real();
  CHECK(std::abs(ref0 - 0.5) < kTol);
  CHECK(std::abs(at(0.0, 0.0, 0.0, 0.0) - ref0) < kTol);
  CHECK(std::abs(at(0.0, kPi / 4, 0.0, 0.0) - ref45) < kTol);
  CHECK(std::abs(ref45) < kTol);

  SUBCASE("swapped ordering is the complex conjugate, so the pair sums to a real number") {
    std::mt19937_64 gen(32);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    std::uniform_real_distribution<double> al(0.0, 5.0);
    for (int t = 0; t < 200; ++t) {
      const auto pa = projector_from_axis(PolarizerAxis(ang(gen)));
      const auto pb = projector_from_axis(PolarizerAxis(ang(gen)));
      const auto r1 = source_density(PolarizerAxis(ang(gen)), al(gen));
      const auto r2 = source_density(PolarizerAxis(ang(gen)), al(gen));
      const cplx t12 = interference_trace(pa, r1, pb, r2);
      const cplx t21 = interference_trace(pa, r2, pb, r1);
      CHECK(std::abs(t21 - std::conj(t12)) < kTol);
      const auto amps = random_amps(gen);
      const cplx loop = amps.d1A * amps.d2B * std::conj(amps.d2A) * std::conj(amps.d1B);
      CHECK(std::abs((t12 * loop + t21 * std::conj(loop)).imag()) < 1e-14 * std::max(1.0, std::abs(loop)));
    }
  }

  SUBCASE("unpolarized sources give cos 2 theta_AB / 2, with O(alpha) corrections") {
    std::mt19937_64 gen(33);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    double worst_ratio = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const double ta = ang(gen);
      const double tb = ang(gen);
      CHECK(std::abs(at(ta, tb, 0.0, 0.0, ang(gen), ang(gen)) - 0.5 * std::cos(2 * (ta - tb))) < kTol);
      for (double alpha : {1e-3, 1e-2, 0.05, 0.1}) {
        const double dev = std::abs(at(ta, tb, alpha, alpha, ang(gen), ang(gen)) - 0.5 * std::cos(2 * (ta - tb)));
        worst_ratio = std::max(worst_ratio, dev / alpha);
      }
    }
    CHECK(std::isfinite(worst_ratio));
    CHECK(worst_ratio < 1.0);
  }
}

TEST_CASE("pairing_rate is a nonnegative probability for rank-1 outcomes") {
  std::mt19937_64 gen(34);
  std::uniform_real_distribution<double> ang(0.0, kPi);
  std::uniform_real_distribution<double> al(0.0, 20.0);
  for (int t = 0; t < 500; ++t) {
    const auto amps = random_amps(gen);
    const Mat2c pa = outcome_projector(PolarizerAxis(ang(gen)), Outcome::plus).cast<cplx>();
    const Mat2c pb = outcome_projector(PolarizerAxis(ang(gen)), Outcome::minus).cast<cplx>();
    const Mat2c r1 = source_density(PolarizerAxis(ang(gen)), al(gen)).rho;
    const Mat2c r2 = source_density(PolarizerAxis(ang(gen)), al(gen)).rho;
    const cplx rate = pairing_rate(pa, pb, r1, r2, amps.d1A, amps.d2A, amps.d1B, amps.d2B);
    CHECK(rate.real() >= -kTol);
    CHECK(std::abs(rate.imag()) < 1e-14 * std::max(1.0, std::abs(rate)));
  }
}

TEST_CASE("background_probability and the polarizer-weighted term") {
  SUBCASE("scenario II mask leaves the product of single-photon traces") {
    std::mt19937_64 gen(35);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    std::uniform_real_distribution<double> al(0.0, 5.0);
    for (int t = 0; t < 100; ++t) {
      const auto spec = spec_with(ang(gen), ang(gen), al(gen), al(gen));
      const PolarizerAxis a(ang(gen));
      const PolarizerAxis b(ang(gen));
      const double expect = polarizer_trace(projector_from_axis(a), spec.source1()) *
                            polarizer_trace(projector_from_axis(b), spec.source2());
      CHECK(std::abs(background_polarizer_term(spec, kUnitMasked, a, b) - expect) < kTol);
      // same-source pairings contribute nothing once the crossed legs are masked
      BackgroundSpec with_same = spec;
      with_same.weights = {0.25, 0.25, 0.25, 0.25};
      CHECK(std::abs(background_polarizer_term(with_same, kUnitMasked, a, b) - 0.5 * expect) < kTol);
    }
  }
  SUBCASE("unpolarized sources, masked: no angular dependence") {
    const auto spec = spec_with(0.3, 1.0, 0.0, 0.0);
    for (double ta : {0.0, 0.4, 1.3})
      for (double tb : {0.1, 0.9, 2.5}) {
        CHECK(std::abs(background_probability(spec, kUnitMasked, PolarizerAxis(ta), PolarizerAxis(tb)) - 0.25) < kTol);
        CHECK(std::abs(background_polarizer_term(spec, kUnitMasked, PolarizerAxis(ta), PolarizerAxis(tb))) < kTol);
      }
  }
  SUBCASE("full amplitudes, unpolarized, equal weights: angular part follows cos 2 theta_AB") {
    // oracle: with alpha = 0 only the exchange terms depend on angle, each
    // contributing Tr(Pi_A Pi_B)/4 * loop; the pair sums to cos 2 theta_AB Re(loop).
    const auto spec = spec_with(0.0, 0.0, 0.0, 0.0);
    const PathAmplitudeSet amps{std::polar(1.0, 0.3), std::polar(1.0, 1.1), std::polar(1.0, -0.4), std::polar(1.0, 2.0)};
    const cplx loop = amps.d1A * amps.d2B * std::conj(amps.d2A) * std::conj(amps.d1B);
    for (double ta : {0.0, 0.3, 1.0})
      for (double tb : {0.2, 0.7, 2.9}) {
        const double v = background_polarizer_term(spec, amps, PolarizerAxis(ta), PolarizerAxis(tb));
        CHECK(std::abs(v - std::cos(2 * (ta - tb)) * loop.real()) < kTol);
      }
  }
  SUBCASE("the polarizer term is the signed combination of rank-1 outcome rates") {
    std::mt19937_64 gen(36);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    std::uniform_real_distribution<double> al(0.0, 5.0);
    for (int t = 0; t < 100; ++t) {
      auto spec = spec_with(ang(gen), ang(gen), al(gen), al(gen));
      spec.weights = {0.4, 0.3, 0.2, 0.1};
      const auto amps = random_amps(gen);
      const PolarizerAxis a(ang(gen));
      const PolarizerAxis b(ang(gen));
      const auto r = background_outcome_rates(spec, amps, a, b);
      CHECK(std::abs((r[0] - r[1] - r[2] + r[3]) - background_polarizer_term(spec, amps, a, b)) < kTol);
      CHECK(std::abs((r[0] + r[1] + r[2] + r[3]) - background_total_rate(spec, amps)) < kTol);
      CHECK(std::abs(r[0] - background_probability(spec, amps, a, b, Outcome::plus, Outcome::plus)) < kTol);
      CHECK(std::abs(r[3] - background_probability(spec, amps, a, b, Outcome::minus, Outcome::minus)) < kTol);
      for (double x : r) CHECK(x >= 0.0);
    }
  }
}

TEST_CASE("background_correlator") {
  const auto spec = spec_with(0.0, 0.0, 1.0, 1.0);
  CHECK(std::abs(background_correlator(spec, kUnitMasked, PolarizerAxis(0.0), PolarizerAxis(0.0)) - 0.25) < kTol);
  for (double tb : {0.0, 0.5, 1.7}) {
    CHECK(std::abs(background_correlator(spec, kUnitMasked, PolarizerAxis(kPi / 4), PolarizerAxis(tb))) < kTol);
    CHECK(std::abs(background_correlator(spec_with(0.0, 0.3, 0.0, 4.0), kUnitMasked, PolarizerAxis(0.2),
                                         PolarizerAxis(tb))) < kTol);
  }
  CHECK_THROWS_AS(background_correlator(spec, PathAmplitudeSet{0.0, 0.0, 0.0, 0.0}, PolarizerAxis(0), PolarizerAxis(0)),
                  DomainError);

  SUBCASE("masked correlator scan is separable (rank 1)") {
    std::mt19937_64 gen(37);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    std::uniform_real_distribution<double> al(0.1, 5.0);
    for (int t = 0; t < 10; ++t) {
      const auto s = spec_with(ang(gen), ang(gen), al(gen), al(gen));
      Eigen::MatrixXd m(12, 12);
      for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
          m(i, j) = background_correlator(s, kUnitMasked, PolarizerAxis(i * kPi / 12), PolarizerAxis(j * kPi / 12));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
      CHECK(svd.singularValues()(1) < 1e-10);
    }
  }
}
