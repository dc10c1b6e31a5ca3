#include <cmath>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "kslab/measures.hpp"
#include "kslab/snapshot_io.hpp"
#include "support.hpp"

using namespace kslab;
using testsupport::grid2;

TEST_CASE("mollified Dirac has the atom's mass") {
  const Grid g = grid2(128, 128);
  const GridField u = mollify(dirac({0.5, 0.5, 0.0}, 1.0), 0.04, g);
  CHECK(std::abs(integrate(u) - 1.0) <= 1e-12);
  CHECK(u.min() > 0.0);
}

TEST_CASE("mollifying a uniform density leaves it constant") {
  const Grid g = grid2(32, 16, 2.0, 1.0);
  for (double eps : {0.01, 0.1, 1.0}) {
    const GridField u = mollify(uniform_measure(g, 3.0), eps, g);
    CHECK(u.max() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(u.min() == doctest::Approx(1.5).epsilon(1e-14));
  }
}

TEST_CASE("two atoms: half-domain masses approach the weights") {
  const Grid g = grid2(128, 128);
  const RadonMeasure mu({Atom{{0.25, 0.5, 0.0}, 1.0}, Atom{{0.75, 0.5, 0.0}, 2.0}});
  double prev = 1.0;
  for (double eps : {0.04, 0.01, 0.0025}) {
    const GridField u = mollify(mu, eps, g);
    double left = 0.0, right = 0.0;
    for (int j = 0; j < 128; ++j) {
      for (int i = 0; i < 128; ++i) (i < 64 ? left : right) += u[g.index(i, j)] * g.cell_volume();
    }
    const double err = std::abs(left - 1.0) + std::abs(right - 2.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-9);
}

TEST_CASE("mollifier resolution and input checks") {
  const Grid g = grid2(16, 16);
  CHECK_THROWS_AS(mollify(dirac({0.5, 0.5, 0.0}, 1.0), 1e-3, g), UnderResolvedMollifier);
  CHECK_THROWS_AS(RadonMeasure({Atom{{0.5, 0.5, 0.0}, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RadonMeasure({}), std::invalid_argument);
  CHECK_THROWS_AS(dirac({1.5, 0.5, 0.0}, 1.0).check_fits(g), std::invalid_argument);
  // Boundary atoms are pulled inside; mass is kept.
  const GridField u = mollify(dirac({0.0, 0.5, 0.0}, 2.0), 0.04, g);
  CHECK(integrate(u) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("scaled_to_mass") {
  const RadonMeasure mu({Atom{{0.2, 0.2, 0.0}, 1.0}, Atom{{0.7, 0.4, 0.0}, 3.0}});
  const RadonMeasure s = mu.scaled_to_mass(10.0);
  CHECK(s.mass() == doctest::Approx(10.0));
  CHECK(s.atoms()[1].weight == doctest::Approx(7.5));
}

TEST_CASE("cosine dictionary") {
  const Grid g = grid2(16, 16);
  const TestDictionary d = TestDictionary::cosines(g, 4);
  CHECK(d.size() == 25);
  CHECK(d.modes()[0] == std::array<int, 3>{0, 0, 0});
  const std::array<double, 3> x{0.3, 0.8, 0.0};
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto m = d.modes()[k];
    const double want = std::cos(m[0] * std::numbers::pi * x[0]) * std::cos(m[1] * std::numbers::pi * x[1]);
    REQUIRE(d.evaluate(k, x) == doctest::Approx(want).epsilon(1e-14));
  }
  CHECK(TestDictionary::cosines(testsupport::grid3(8, 8, 8), 2).size() == 27);
}

TEST_CASE("vague distance") {
  const Grid g = grid2(64, 64);
  const TestDictionary d = TestDictionary::cosines(g, 4);
  CHECK(vague_distance(GridField(g, 2.0), uniform_measure(g, 2.0), d) <= 1e-12);

  const RadonMeasure delta = dirac({0.5, 0.5, 0.0}, 1.0);
  double prev = 1e300;
  for (double eps : {0.1, 0.05, 0.025}) {
    const double dist = vague_distance(mollify(delta, eps, g), delta, d);
    CHECK(dist < prev);
    prev = dist;
  }

  const TestDictionary c = TestDictionary::constant_only(g);
  for (double eps : {0.1, 0.01}) {
    CHECK(vague_distance(mollify(delta, eps, g), delta, c) <= 1e-12);
  }
  CHECK_THROWS_AS(vague_distance(GridField(grid2(8, 8), 1.0), delta, d), std::invalid_argument);
}

TEST_CASE("density files") {
  const auto dir = testsupport::scratch("measures");
  const Grid g = grid2(16, 16);
  write_snapshot(dir / "two.ksl", GridField(g, 2.0));
  CHECK(load_density(dir / "two.ksl", g, 2.0).mass() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(load_density(dir / "two.ksl", g, 2.0).lp_exponent() == 2.0);

  GridField neg(g, 1.0);
  neg[17] = -1.0;
  write_snapshot(dir / "neg.ksl", neg);
  CHECK_THROWS(load_density(dir / "neg.ksl", g, 2.0));
  CHECK_THROWS(load_density(dir / "two.ksl", grid2(8, 8), 2.0));

  // x^{-1/2} on [0,1]^2; mass is the midpoint sum, evaluated here along x only.
  const Grid f = grid2(200, 50);
  write_snapshot(dir / "spike.ksl", sample(f, [](const std::array<double, 3>& x) {
                   return 1.0 / std::sqrt(x[0]);
                 }));
  double oracle = 0.0;
  for (int i = 0; i < 200; ++i) oracle += 1.0 / std::sqrt((i + 0.5) / 200.0) / 200.0;
  CHECK(std::abs(load_density(dir / "spike.ksl", f, 1.5).mass() - oracle) <= 1e-10);
}

TEST_CASE("density component is copied by the mollifier") {
  const Grid g = grid2(16, 16);
  const GridField f = sample(g, [](const std::array<double, 3>& x) { return 1.0 + x[0] * x[1]; });
  const RadonMeasure mu({}, f);
  const GridField u = mollify(mu, 0.5, g);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(u[i] == doctest::Approx(f[i]).epsilon(1e-14));
}
