#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "kslab/grid.hpp"
#include "kslab/summation.hpp"
#include "support.hpp"

using namespace kslab;
using testsupport::grid2;
using testsupport::grid3;

TEST_CASE("grid construction arithmetic") {
  const Grid a = grid2(4, 4);
  CHECK(a.size() == 16);
  CHECK(a.cell_volume() == doctest::Approx(1.0 / 16));
  const Grid b = grid3(8, 4, 4, 2.0, 1.0, 1.0);
  CHECK(b.size() == 128);
  for (int ax = 0; ax < 3; ++ax) CHECK(b.h(ax) == 0.25);
  CHECK(b.domain_volume() == doctest::Approx(2.0));
}

TEST_CASE("grid rejects bad shapes") {
  CHECK_THROWS_AS(grid2(2, 2), std::invalid_argument);
  CHECK_THROWS_AS(grid2(8, 8, -1.0, 1.0), std::invalid_argument);
  const std::vector<double> l{1, 1, 1, 1};
  const std::vector<int> c{4, 4, 4, 4};
  CHECK_THROWS_AS(Grid::build(4, l, c), std::invalid_argument);
  CHECK_THROWS_AS(Grid::build(1, std::span(l).first(1), std::span(c).first(1)),
                  std::invalid_argument);
}

TEST_CASE("index and coords are inverse, x fastest") {
  const Grid g = grid3(5, 4, 6);
  CHECK(g.index(1, 0, 0) == 1);
  CHECK(g.index(0, 1, 0) == 5);
  CHECK(g.index(0, 0, 1) == 20);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto ijk = g.coords(c);
    REQUIRE(g.index(ijk[0], ijk[1], ijk[2]) == c);
  }
  CHECK(g.center(0, 0) == doctest::Approx(0.1));
}

TEST_CASE("integrate") {
  const Grid g = grid2(4, 4);
  CHECK(integrate(GridField(g, 3.0)) == doctest::Approx(3.0).epsilon(1e-15));
  GridField one(g);
  one[g.index(2, 1)] = 1.0;
  CHECK(integrate(one) == doctest::Approx(1.0 / 16).epsilon(1e-15));
  one[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(integrate(one), std::domain_error);
}

TEST_CASE("lp norms") {
  const Grid g = grid2(8, 4, 2.0, 1.0);
  const GridField c(g, 3.0);
  CHECK(lp_norm(c, 2.0) == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lp_integral(c, 2.0) == doctest::Approx(18.0).epsilon(1e-14));
  GridField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::sin(0.37 * i);
  CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) == f.max_abs());
  CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("L2 norm of a mollified Dirac matches direct summation") {
  const Grid g = grid2(128, 128);
  const auto cells = testsupport::gaussian_cells(g, 0.5, 0.5, 0.01, 1.0);
  GridField u(g, cells);
  long double s = 0.0L;
  for (double v : cells) s += static_cast<long double>(v) * v;
  const double oracle = std::sqrt(static_cast<double>(s) * g.cell_volume());
  CHECK(std::abs(lp_norm(u, 2.0) - oracle) <= 1e-12 * oracle);
}

TEST_CASE("gradient energy") {
  CHECK(gradient_energy(GridField(grid2(16, 16), 2.5), 2.0) == 0.0);

  // f = 1 + cos(pi x / L): int |grad f|^2 = (pi/L)^2 L Ly / 2, error O(h^2).
  const double L = 2.0, Ly = 1.0;
  const double exact = std::pow(std::numbers::pi / L, 2) * L * Ly / 2.0;
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const Grid g = grid2(2 * n, n, L, Ly);
    const GridField f = sample(g, [&](const std::array<double, 3>& x) {
      return 1.0 + std::cos(std::numbers::pi * x[0] / L);
    });
    err.push_back(std::abs(gradient_energy(f, 2.0) - exact));
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.1));

  // Unit-mass single-cell spike: four faces, each (1/h^2 / h)^2 * h^2.
  double previous = 0.0;
  for (int n : {8, 16, 32}) {
    const Grid g = grid2(n, n);
    GridField spike(g);
    spike[g.index(n / 2, n / 2)] = 1.0 / g.cell_volume();
    const double h = g.h(0);
    const double e = gradient_energy(spike, 2.0);
    CHECK(e == doctest::Approx(4.0 / std::pow(h, 4)).epsilon(1e-12));
    CHECK(e > previous);
    previous = e;
  }
}

TEST_CASE("relative negativity") {
  GridField f(grid2(4, 4), 1.0);
  CHECK(relative_negativity(f) == 0.0);
  f[3] = -0.25;
  CHECK(relative_negativity(f) == doctest::Approx(0.25));
}

TEST_CASE("field arithmetic") {
  const Grid g = grid2(4, 4);
  GridField a(g, 1.0), b(g, 2.0);
  const GridField c = a + 2.0 * b - a;
  CHECK(c.min() == 4.0);
  CHECK(c.max() == 4.0);
  CHECK_THROWS(a += GridField(grid2(4, 5), 1.0));
}

TEST_CASE("compensated summation keeps small terms") {
  CompensatedSum s;
  s += 1e16;
  s += 1.0;
  s += -1e16;
  CHECK(s.value() == 1.0);
}
