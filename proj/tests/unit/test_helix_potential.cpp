#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helixqd/errors.hpp"
#include "helixqd/helix_potential.hpp"

using namespace helixqd;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 50-digit mpmath evaluations (tests/oracles/potential_oracle.py).
struct OraclePoint {
  double s;
  double v;
  double dv;
};
constexpr OraclePoint oracle_58_4[] = {
    {0.5, 2.0011741881360862279, -3.9976498112628275882},
    {3.0, 0.34047467433038873557, -0.10866395816447443361},
    {13.0, 0.11741555492287348937, -0.00090523497132553153917},
    {41.0, 0.083314816658947713567, 3.5727086968506849736e-6},
    {100.0, 0.044076641920567187155, -0.00019993058944238958256},
};

}  // namespace

TEST_CASE("beta limits and oracle value") {
  CHECK(beta_of(0.0, 5.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(beta_of(2.0 * pi, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel(beta_of(5.8, 4.0), 4.1051322943885816574) < 1e-15);
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS(HelixParams::make(-1.0, 4.0), InvalidArgument);
  CHECK_THROWS_AS(HelixParams::make(5.8, 0.0), InvalidArgument);
  CHECK_THROWS_AS(HelixParams::make(5.8, 4.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(HelixParams::make(std::nan(""), 4.0), InvalidArgument);
  const HelixParams p = HelixParams::make(5.8, 4.0, 10.0);
  CHECK(p.ratio() == doctest::Approx(1.45));
  CHECK(p.mass == 10.0);
}

TEST_CASE("potential and derivative against the high-precision oracle") {
  const HelixParams p = HelixParams::make(5.8, 4.0);
  for (const auto& o : oracle_58_4) {
    CAPTURE(o.s);
    CHECK(rel(potential_value(p, o.s), o.v) < 1e-13);
    CHECK(rel(potential_derivative(p, o.s), o.dv) < 1e-9);
  }
}

TEST_CASE("singular at the origin") {
  const HelixParams p = HelixParams::make(5.8, 4.0);
  CHECK_THROWS_AS(potential_value(p, 0.0), SingularInput);
  CHECK_THROWS_AS(potential_derivative(p, 0.0), SingularInput);
  CHECK_THROWS_AS(scaled_potential_value(1.45, 0.0), SingularInput);
}

TEST_CASE("same-side points reduce to the axial distance") {
  for (double h : {5.8, 10.0, 3.0}) {
    const HelixParams p = HelixParams::make(h, 4.0);
    const double b = p.beta();
    for (int k = 1; k <= 20; ++k) {
      const double s = 2.0 * pi * b * k;
      CAPTURE(h);
      CAPTURE(k);
      CHECK(std::abs(potential_value(p, s) - 1.0 / (h * k)) <= 1e-12);
      const double expected = -1.0 / (2.0 * pi * b * h * k * k);
      CHECK(rel(potential_derivative(p, s), expected) < 1e-9);
    }
  }
  CHECK(rel(potential_value(HelixParams::make(5.8, 4.0), 2.0 * pi * beta_of(5.8, 4.0)),
            0.17241379310344827586) < 1e-13);
}

TEST_CASE("evenness and odd derivative") {
  const HelixParams p = HelixParams::make(5.8, 4.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(1e-3, 100.0 * p.beta());
  for (int i = 0; i < 10000; ++i) {
    const double s = dist(rng);
    const double v = potential_value(p, s);
    REQUIRE(std::abs(v - potential_value(p, -s)) <= 1e-14 * v);
    REQUIRE(potential_derivative(p, -s) == -potential_derivative(p, s));
  }
}

TEST_CASE("derivative matches central differences") {
  const HelixParams p = HelixParams::make(10.0, 10.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(2.0, 300.0);
  for (int i = 0; i < 500; ++i) {
    const double s = dist(rng);
    const double d = 1e-4;
    const double fd = (potential_value(p, s + d) - potential_value(p, s - d)) / (2 * d);
    const double exact = potential_derivative(p, s);
    CAPTURE(s);
    // Near stationary points the relative error is measured against |V|/s.
    CHECK(std::abs(fd - exact) <= 1e-7 * std::max(std::abs(exact), potential_value(p, s) / s));
  }
}

TEST_CASE("Coulomb tail") {
  const HelixParams p = HelixParams::make(5.8, 4.0);
  const double s = 1e7;
  CHECK(rel(potential_value(p, s) * s, 2.0 * pi * p.beta() / p.pitch) < 1e-6);
}

TEST_CASE("scale invariance through the ratio") {
  const HelixParams a = HelixParams::make(1.0, 4.0);
  const HelixParams b = HelixParams::make(2.0, 8.0);
  for (double sp : {0.5, 3.0, 10.0}) {
    const double fa = a.beta() * potential_value(a, a.beta() * sp);
    const double fb = b.beta() * potential_value(b, b.beta() * sp);
    CHECK(rel(fa, fb) <= 1e-12);
    CHECK(rel(scaled_potential_value(0.25, sp), fa) <= 1e-12);
  }
  for (double radius : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const HelixParams p = HelixParams::make(0.25 * radius, radius);
    CHECK(rel(p.beta() * potential_value(p, p.beta() * 7.0), scaled_potential_value(0.25, 7.0)) <=
          1e-12);
  }
}

TEST_CASE("scaled same-side identity") {
  const double r = 1.45;
  const double q = r / (2.0 * pi);
  for (int k = 1; k <= 5; ++k) {
    const double expected = std::sqrt(1.0 + q * q) / (q * 2.0 * pi * k);
    CHECK(rel(scaled_potential_value(r, 2.0 * pi * k), expected) < 1e-13);
  }
}

TEST_CASE("helix embedding") {
  const HelixParams p = HelixParams::make(5.8, 4.0);
  const HelixPoint origin = cartesian_point(p, 0.0);
  CHECK(origin.xyz[0] == doctest::Approx(4.0));
  CHECK(origin.xyz[1] == doctest::Approx(0.0));
  CHECK(origin.arc_length == 0.0);
  const HelixPoint turn = cartesian_point(p, p.pitch);
  CHECK(turn.xyz[0] == doctest::Approx(4.0));
  CHECK(std::abs(turn.xyz[1]) < 1e-12);
  CHECK(turn.xyz[2] == doctest::Approx(5.8));
  CHECK(turn.arc_length == doctest::Approx(2.0 * pi * p.beta()));

  // V is the inverse chord between points separated by arc length s.
  for (double t : {0.3, 1.7, 9.1}) {
    const HelixPoint a = cartesian_point(p, 0.0);
    const HelixPoint b = cartesian_point(p, t);
    const double chord = std::hypot(b.xyz[0] - a.xyz[0], b.xyz[1] - a.xyz[1], b.xyz[2] - a.xyz[2]);
    CHECK(rel(potential_value(p, b.arc_length), 1.0 / chord) < 1e-12);
  }
}

TEST_CASE("regularized potential") {
  const HelixParams p = HelixParams::make(5.8, 4.0);
  const RegularizedPotential reg(p);
  CHECK(reg.cutoff() == 1.0);
  CHECK(reg(0.0) == reg.cap());
  CHECK(reg(0.5) == reg.cap());
  CHECK(reg(-0.99) == reg.cap());
  CHECK(reg(1.0) == potential_value(p, 1.0));
  CHECK(reg(2.0) == potential_value(p, 2.0));
  CHECK(regularized_value(reg, -3.0) == potential_value(p, 3.0));
  CHECK(reg.cap() == doctest::Approx(1.0024).epsilon(1e-3));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(1.0, 2000.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = reg(dist(rng));
    REQUIRE(v > 0.0);
    REQUIRE(v <= reg.cap());
  }
  CHECK_THROWS_AS(RegularizedPotential(p, 0.0), InvalidArgument);
}

TEST_CASE("coulomb reference") {
  const RegularizedPotential reg(HelixParams::make(5.8, 4.0), 1.0, InteractionKind::coulomb);
  CHECK(reg(4.0) == doctest::Approx(0.25));
  CHECK(reg(-8.0) == doctest::Approx(0.125));
  CHECK(reg(0.0) == doctest::Approx(1.0));
}
