#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kslab/elliptic.hpp"
#include "kslab/measures.hpp"
#include "support.hpp"

using namespace kslab;
using testsupport::grid2;
using testsupport::grid3;

namespace {

const double kPi = std::numbers::pi;
const EllipticMethod kMethods[] = {EllipticMethod::transform, EllipticMethod::conjugate_gradient};

GridField random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  GridField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = U(rng);
  if (U(rng) < 0.5) f[static_cast<std::size_t>(U(rng) * (g.size() - 1))] += 500.0;
  return f;
}

}  // namespace

TEST_CASE("constant sources give constant signals") {
  for (auto m : kMethods) {
    const auto [v, rep] = solve_helmholtz_neumann(GridField(grid2(24, 16, 1.0, 0.5), 2.5), 1e-10, m);
    CHECK(std::abs(v.max() - 2.5) <= 1e-12);
    CHECK(std::abs(v.min() - 2.5) <= 1e-12);
    CHECK(rep.residual_l2 <= 1e-10);
  }
}

TEST_CASE("cosine modes are solved to the discrete eigenvalue") {
  // lambda_h = (2/h^2)(1 - cos(pi h / L)) for the first mode along x.
  const Grid g = grid2(48, 20, 1.7, 0.6);
  const double L = 1.7, h = L / 48;
  const double lam = 2.0 / (h * h) * (1.0 - std::cos(kPi * h / L));
  const GridField src = sample(g, [&](const std::array<double, 3>& x) { return 1.0 + std::cos(kPi * x[0] / L); });
  const GridField want = sample(g, [&](const std::array<double, 3>& x) {
    return 1.0 + std::cos(kPi * x[0] / L) / (1.0 + lam);
  });
  CHECK((solve_helmholtz_neumann(src, 1e-10).first - want).max_abs() <= 1e-10);
  CHECK((solve_helmholtz_neumann(src, 1e-11, EllipticMethod::conjugate_gradient).first - want).max_abs() <= 1e-10);
  CHECK(discrete_eigenvalue(g, {1, 0, 0}) == doctest::Approx(lam).epsilon(1e-14));
  CHECK(lam == doctest::Approx(std::pow(kPi / L, 2)).epsilon(1e-3));

  // Mixed 3D mode (1, 2, 3) through the Laplacian stencil directly.
  const Grid g3 = grid3(12, 10, 8, 1.0, 2.0, 0.5);
  const auto mode = [&](const std::array<double, 3>& x) {
    return std::cos(kPi * x[0]) * std::cos(2 * kPi * x[1] / 2.0) * std::cos(3 * kPi * x[2] / 0.5);
  };
  const GridField phi = sample(g3, mode);
  double lam3 = 0.0;
  for (auto [k, n, L3] : {std::tuple{1, 12, 1.0}, {2, 10, 2.0}, {3, 8, 0.5}}) {
    const double hh = L3 / n;
    lam3 += 2.0 / (hh * hh) * (1.0 - std::cos(kPi * k / n));
  }
  CHECK((apply_laplacian(phi) + lam3 * phi).max_abs() <= 1e-10 * lam3);
}

TEST_CASE("signal of a mollified Dirac is strictly positive") {
  const Grid g = grid2(64, 64);
  const GridField src = mollify(dirac({0.3, 0.6, 0.0}, 1.0), 0.01, g);
  for (auto m : kMethods) {
    const GridField v = solve_helmholtz_neumann(src, 1e-10, m).first;
    CHECK(v.min() > 0.0);
    CHECK(v.max() <= src.max());
  }
}

TEST_CASE("contraction in L^r") {
  const Grid g = grid2(32, 32);
  for (double r : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    const GridField c(g, 4.0);
    const auto chk = contraction_check(solve_helmholtz_neumann(c).first, c, r);
    CHECK(chk.ok);
    CHECK(chk.lhs == doctest::Approx(chk.rhs).epsilon(1e-12));
  }
  const GridField cosine = sample(g, [](const std::array<double, 3>& x) { return 1.0 + std::cos(kPi * x[0]); });
  const auto strict = contraction_check(solve_helmholtz_neumann(cosine).first, cosine,
                                        std::numeric_limits<double>::infinity());
  CHECK(strict.ok);
  CHECK(strict.lhs < strict.rhs);

  std::mt19937_64 rng(7);
  for (int draw = 0; draw < 100; ++draw) {
    const Grid& gg = draw % 5 == 4 ? grid3(10, 8, 6) : g;
    const GridField src = random_field(gg, rng);
    const GridField v = solve_helmholtz_neumann(src).first;
    for (double r : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
      REQUIRE(contraction_check(v, src, r).ok);
    }
  }
}

TEST_CASE("transform and conjugate-gradient routes agree") {
  std::mt19937_64 rng(11);
  for (const Grid& g : {grid2(40, 24, 1.0, 0.6), grid3(12, 10, 14)}) {
    for (int draw = 0; draw < 5; ++draw) {
      const GridField src = random_field(g, rng);
      const GridField a = solve_helmholtz_neumann(src, 1e-12, EllipticMethod::transform).first;
      const GridField b = solve_helmholtz_neumann(src, 1e-12, EllipticMethod::conjugate_gradient).first;
      REQUIRE((a - b).max_abs() <= 1e-10 * a.max_abs());
    }
  }
}

TEST_CASE("shifted diffusion solve satisfies its equation") {
  const Grid g = grid2(32, 20);
  std::mt19937_64 rng(3);
  const GridField b = random_field(g, rng);
  for (auto m : kMethods) {
    NeumannSolver solver(g, m, 1e-12);
    const double dt = 0.003;
    EllipticSolveReport rep;
    const GridField x = solver.solve(b, 1.0, dt, &rep);
    const GridField resid = x - dt * apply_laplacian(x) - b;
    CHECK(resid.max_abs() <= 1e-10 * b.max_abs());
    CHECK(rep.method == m);
  }
}

TEST_CASE("solver preconditions and failure reporting") {
  const Grid g = grid2(16, 16);
  GridField neg(g, 1.0);
  neg[5] = -0.1;
  CHECK_THROWS_AS(solve_helmholtz_neumann(neg), std::invalid_argument);
  CHECK_THROWS_AS(solve_helmholtz_neumann(GridField(g, 1.0), 1e-3), std::invalid_argument);

  std::mt19937_64 rng(5);
  NeumannSolver capped(g, EllipticMethod::conjugate_gradient, 1e-12, 1);
  CHECK_THROWS_AS(capped.solve(random_field(g, rng), 1.0, 1.0), EllipticNonConvergence);
}

TEST_CASE("face gradient") {
  const Grid g = grid2(16, 12);
  const FaceGradient zero = gradient(GridField(g, 3.0));
  CHECK(zero.max_abs(0) == 0.0);
  CHECK(zero.max_abs(1) == 0.0);

  std::mt19937_64 rng(9);
  const FaceGradient any = gradient(random_field(g, rng));
  CHECK(any.face_count(0) == 17u * 12u);
  for (int j = 0; j < 12; ++j) {
    CHECK(any.at(0, any.face_index(0, 0, j, 0)) == 0.0);
    CHECK(any.at(0, any.face_index(0, 16, j, 0)) == 0.0);
  }
  for (int i = 0; i < 16; ++i) {
    CHECK(any.at(1, any.face_index(1, i, 0, 0)) == 0.0);
    CHECK(any.at(1, any.face_index(1, i, 12, 0)) == 0.0);
  }

  // d/dx cos(pi x / L) = -(pi/L) sin(pi x / L) at interior faces, O(h^2).
  const double L = 2.0;
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const Grid gg = grid2(n, 4, L, 1.0);
    const FaceGradient fg = gradient(sample(gg, [&](const std::array<double, 3>& x) {
      return std::cos(kPi * x[0] / L);
    }));
    double e = 0.0;
    for (int i = 1; i < n; ++i) {
      const double xf = i * L / n;
      e = std::max(e, std::abs(fg.at(0, fg.face_index(0, i, 1, 0)) + kPi / L * std::sin(kPi * xf / L)));
    }
    err.push_back(e);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.05));
}
