#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "skypol/propagation.hpp"

using namespace skypol;

namespace {

constexpr double kTol = 1e-12;

// Mirror-symmetric layout: r1A = r2B and r2A = r1B.
Geometry mirrored_geometry(double k) {
  Geometry g;
  g.s1 = Vec3(-30.0, 0.0, 500.0);
  g.s2 = Vec3(30.0, 0.0, 500.0);
  g.dA = Vec3(-4.0, 0.0, 0.0);
  g.dB = Vec3(4.0, 0.0, 0.0);
  g.k = k;
  return g;
}

Geometry random_geometry(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_real_distribution<double> z(200.0, 800.0);
  std::uniform_real_distribution<double> kk(0.1, 5.0);
  Geometry g;
  g.s1 = Vec3(u(gen), u(gen), z(gen));
  g.s2 = Vec3(u(gen), u(gen), z(gen));
  g.dA = Vec3(u(gen), u(gen), 0.0);
  g.dB = Vec3(u(gen), u(gen), 0.0);
  g.k = kk(gen);
  return g;
}

}  // namespace

TEST_CASE("geometry validation") {
  Geometry g = mirrored_geometry(1.0);
  CHECK_NOTHROW(g.validate());
  g.dA = g.s1;
  CHECK_THROWS_AS(g.validate(), DomainError);
  CHECK_THROWS_AS(path_amplitudes(g, 0, 0, Normalization::phase_only), DomainError);
  g = mirrored_geometry(0.0);
  CHECK_THROWS_AS(g.validate(), DomainError);
}

TEST_CASE("path_amplitudes") {
  SUBCASE("all distances equal gives equal phase-only amplitudes") {
    Geometry g;
    g.s1 = Vec3(0, 0, 10);
    g.s2 = Vec3(0, 0, -10);
    g.dA = Vec3(10, 0, 0);
    g.dB = Vec3(-10, 0, 0);
    g.k = 2.3;
    const auto d = path_amplitudes(g, 0.0, 0.0, Normalization::phase_only);
    CHECK(std::abs(d.d1A - d.d2A) < kTol);
    CHECK(std::abs(d.d1A - d.d1B) < kTol);
    CHECK(std::abs(d.d1A - d.d2B) < kTol);
  }
  SUBCASE("1/r law") {
    Geometry g = mirrored_geometry(1.0);
    const auto near = path_amplitudes(g, 0.0, 0.0, Normalization::spherical);
    Geometry far = g;
    far.s1 = g.dA + 2.0 * (g.s1 - g.dA);
    const auto d = path_amplitudes(far, 0.0, 0.0, Normalization::spherical);
    CHECK(std::abs(std::abs(d.d1A) - 0.5 * std::abs(near.d1A)) < kTol);
    CHECK(std::abs(std::abs(near.d1A) - 1.0 / g.r1A()) < kTol);
  }
  SUBCASE("half-wave path difference flips the sign") {
    Geometry g;
    g.s1 = Vec3(0, 0, 0);
    g.s2 = Vec3(0, 0, 0.5);
    g.dA = Vec3(0, 0, 10);
    g.dB = Vec3(5, 0, 0);
    g.k = kPi / (g.r1A() - g.r2A());
    const auto d = path_amplitudes(g, 0.4, 0.4, Normalization::phase_only);
    CHECK(std::abs(d.d1A + d.d2A) < 1e-12);
  }
  SUBCASE("source phase rides on every leg leaving that source") {
    const Geometry g = mirrored_geometry(1.3);
    const auto d0 = path_amplitudes(g, 0.0, 0.0, Normalization::phase_only);
    const auto d = path_amplitudes(g, 0.7, -1.1, Normalization::phase_only);
    CHECK(std::abs(d.d1A - d0.d1A * std::polar(1.0, 0.7)) < kTol);
    CHECK(std::abs(d.d1B - d0.d1B * std::polar(1.0, 0.7)) < kTol);
    CHECK(std::abs(d.d2A - d0.d2A * std::polar(1.0, -1.1)) < kTol);
    CHECK(std::abs(d.d2B - d0.d2B * std::polar(1.0, -1.1)) < kTol);
  }
}

TEST_CASE("hbt_intensity") {
  SUBCASE("symmetric geometry") {
    const PathAmplitudeSet ones{1.0, 1.0, 1.0, 1.0};
    const auto h = hbt_intensity(ones);
    CHECK(h.total == doctest::Approx(4.0));
    CHECK(h.interference == doctest::Approx(2.0));
  }
  SUBCASE("random phases cancel from the interference term") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> ph(0.0, 2 * kPi);
    for (int geo = 0; geo < 10; ++geo) {
      const Geometry g = random_geometry(gen);
      for (Normalization n : {Normalization::phase_only, Normalization::spherical}) {
        const auto d0 = path_amplitudes(g, 0.0, 0.0, n);
        const double ref = hbt_intensity(d0).interference;
        const double scale = std::abs(d0.d1A * d0.d2B * d0.d2A * d0.d1B);
        for (int t = 0; t < 100; ++t) {
          const auto h = hbt_intensity(path_amplitudes(g, ph(gen), ph(gen), n));
          CHECK(std::abs(h.interference - ref) < kTol * scale);
          CHECK(h.total >= -kTol);
        }
      }
    }
  }
  SUBCASE("quarter-period loop phase gives zero interference") {
    const PathAmplitudeSet d{std::polar(1.0, kPi / 2), 1.0, 1.0, 1.0};
    CHECK(std::abs(hbt_intensity(d).interference) < kTol);
  }
  SUBCASE("loop phase matches the geometry") {
    std::mt19937_64 gen(22);
    for (int t = 0; t < 20; ++t) {
      const Geometry g = random_geometry(gen);
      const auto h = hbt_intensity(path_amplitudes(g, 0.0, 0.0, Normalization::phase_only));
      CHECK(std::abs(h.interference - 2.0 * std::cos(g.loop_phase())) < 1e-9);
    }
  }
}

TEST_CASE("entangled_pair_weight and the scenario II mask") {
  CHECK(entangled_pair_weight({1.0, 1.0, 1.0, 1.0}) == doctest::Approx(4.0));

  const PathAmplitudeSet d{cplx(0.3, 0.4), cplx(-0.2, 0.9), cplx(0.5, -0.1), cplx(1.1, 0.2)};
  const auto m = scenario2_mask(d);
  CHECK(m.d2A == cplx(0.0));
  CHECK(m.d1B == cplx(0.0));
  CHECK(m.d1A == d.d1A);
  CHECK(m.d2B == d.d2B);
  CHECK(std::abs(entangled_pair_weight(m) - std::norm(d.d1A * d.d2B)) < kTol);
  CHECK(hbt_intensity(m).interference == 0.0);

  // destructive interference when the two paths differ by a loop phase of pi
  const PathAmplitudeSet opposite{std::polar(1.0, kPi), 1.0, 1.0, 1.0};
  CHECK(entangled_pair_weight(opposite) < kTol);
}

TEST_CASE("propagated state factorizes into spin state times path weight") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> ang(0.0, kPi);
  for (int t = 0; t < 50; ++t) {
    const Geometry g = random_geometry(gen);
    const auto amps = path_amplitudes(g, ang(gen), ang(gen), Normalization::spherical);
    for (int kind : {1, 2}) {
      const auto psi = bell_state(kind);
      const Vec4c big = propagate_state(psi, amps);
      CHECK(std::abs(big.squaredNorm() - entangled_pair_weight(amps)) < 1e-12 * entangled_pair_weight(amps) + 1e-18);
      const ChshConfiguration c{PolarizerAxis(ang(gen)), PolarizerAxis(ang(gen)), PolarizerAxis(ang(gen)),
                                PolarizerAxis(ang(gen))};
      oracle::V4 v{};
      for (int k = 0; k < 4; ++k) v[static_cast<std::size_t>(k)] = big(k);
      const double lhs = oracle::sandwich(v, oracle::chsh(c.a.radians(), c.a_prime.radians(), c.b.radians(),
                                                          c.b_prime.radians()),
                                          v)
                             .real();
      const double rhs = chsh_expectation(psi, c) * entangled_pair_weight(amps);
      CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("fringe phase advances monotonically with baseline") {
  // Sources far off along z; detectors symmetric on the x axis. The loop
  // phase grows with separation, so its unwrapped value is monotone.
  Geometry g;
  g.s1 = Vec3(-100.0, 0.0, 2000.0);
  g.s2 = Vec3(100.0, 0.0, 2000.0);
  g.k = 3.0;
  std::vector<double> phases;
  for (int i = 1; i <= 400; ++i) {
    const double L = 0.25 * i;
    g.dA = Vec3(-L / 2, 0, 0);
    g.dB = Vec3(L / 2, 0, 0);
    phases.push_back(g.loop_phase());
  }
  for (std::size_t i = 1; i < phases.size(); ++i) CHECK(std::abs(phases[i]) > std::abs(phases[i - 1]));
  // fringe spacing: d(loop phase)/dL ~ 2 k sin(half-angle between sources)
  const double slope = (phases.back() - phases.front()) / (0.25 * 399);
  const double half_angle = std::atan(100.0 / 2000.0);
  CHECK(std::abs(std::abs(slope) - 2.0 * g.k * std::sin(half_angle)) < 1e-3);
}
