#include <cmath>
#include <limits>

#include "doctest.h"
#include "kslab/measures.hpp"
#include "kslab/runner.hpp"
#include "kslab/stepper.hpp"
#include "kslab/verification.hpp"
#include "support.hpp"

using namespace kslab;
using testsupport::grid2;

namespace {

// Neumann heat flow of exp(-(x-c)^2/eps) on [0, L] by the method of images.
double images(double x, double c, double eps, double t, double L) {
  const double w = eps + 4.0 * t;
  double s = 0.0;
  for (int j = -3; j <= 3; ++j) {
    s += std::exp(-std::pow(x - c - 2 * j * L, 2) / w) + std::exp(-std::pow(x + c - 2 * j * L, 2) / w);
  }
  return std::sqrt(eps / w) * s;
}

SimState advance(ChemotaxisStepper& stepper, SimState s, int steps) {
  for (int k = 0; k < steps; ++k) s = stepper.step(s, s.dt_stable);
  return s;
}

}  // namespace

TEST_CASE("regularized source") {
  const Grid g = grid2(4, 4);
  CHECK(regularized_source(GridField(g, 0.0), 0.1).max_abs() == 0.0);
  const GridField half = regularized_source(GridField(g, 10.0), 0.1);
  CHECK(half.max() == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(regularized_source(GridField(g, 1e6), 0.1).max() <= 10.0);
}

TEST_CASE("stable step size") {
  const Grid g = grid2(100, 100);
  const GridField u(g, 1.0);
  const GridField ramp = sample(g, [](const std::array<double, 3>& x) { return x[0]; });
  SimState s{0.0, u, ramp, 0.01, 0.0, 0, 0.0};
  CHECK(stable_dt(s, 0.5, 1e-3) == 1e-3);
  s.chi = 1.0;
  CHECK(stable_dt(s, 0.5, 1.0) == doctest::Approx(0.0025).epsilon(1e-10));
  s.v = 2.0 * ramp;
  CHECK(stable_dt(s, 0.5, 1.0) == doctest::Approx(0.00125).epsilon(1e-10));
  s.chi = -1.0;
  CHECK(stable_dt(s, 0.5, 1.0) == doctest::Approx(0.00125).epsilon(1e-10));
}

TEST_CASE("constant state is a fixed point") {
  const Grid g = grid2(16, 12, 1.0, 0.75);
  const double c = 2.0 / 0.75, eps = 0.05;
  for (double chi : {-1.0, 0.0, 3.0}) {
    ChemotaxisStepper stepper(g, StepperOptions{});
    const SimState s = advance(stepper, stepper.initialize(GridField(g, c), eps, chi), 40);
    CHECK(std::abs(s.u.max() - c) <= 1e-12);
    CHECK(std::abs(s.u.min() - c) <= 1e-12);
    CHECK(std::abs(s.v.max() - c / (1 + eps * c)) <= 1e-12);
    CHECK(std::abs(s.v.min() - c / (1 + eps * c)) <= 1e-12);
  }
}

TEST_CASE("chi = 0 reproduces Neumann heat flow") {
  const Grid g = grid2(64, 64);
  const double eps = 0.01, T = 0.05;
  StepperOptions opt;
  opt.dt_max = 1e-4;
  ChemotaxisStepper stepper(g, opt);
  SimState s = stepper.initialize(mollify(dirac({0.5, 0.5, 0.0}, 1.0), eps, g), eps, 0.0);
  while (s.t < T - 1e-14) s = stepper.step(s, std::min(s.dt_stable, T - s.t));
  // Cell (31,31) sits at distance h/2 from the centre along both axes.
  const auto g0 = testsupport::gaussian_cells(g, 0.5, 0.5, eps, 1.0);
  const double amp = g0[g.index(31, 31)] / std::exp(-2.0 * std::pow(0.5 / 64, 2) / eps);
  const GridField oracle = sample(g, [&](const std::array<double, 3>& x) {
    return amp * images(x[0], 0.5, eps, T, 1.0) * images(x[1], 0.5, eps, T, 1.0);
  });
  CHECK(lp_norm(s.u - oracle, 2.0) / lp_norm(oracle, 2.0) <= 2e-3);
}

TEST_CASE("library series oracle agrees with the image construction") {
  const Grid g = grid2(48, 40, 1.0, 1.2);
  const double eps = 0.005, t = 0.03;
  const GridField series = heat_series_oracle(g, 0.45, 0.6, eps, 1.0, t);
  double z = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.center(i);
    z += std::exp(-(std::pow(x[0] - 0.45, 2) + std::pow(x[1] - 0.6, 2)) / eps);
  }
  const double amp = 1.0 / (z * g.cell_volume());
  const GridField im = sample(g, [&](const std::array<double, 3>& x) {
    return amp * images(x[0], 0.45, eps, t, 1.0) * images(x[1], 0.6, eps, t, 1.2);
  });
  CHECK((series - im).max_abs() <= 1e-9 * im.max_abs());
}

TEST_CASE("every step conserves mass") {
  const Grid g = grid2(32, 32);
  for (double chi : {-1.0, 1.0}) {
    ChemotaxisStepper stepper(g, StepperOptions{});
    const RadonMeasure mu({Atom{{0.3, 0.4, 0.0}, 3.0}, Atom{{0.7, 0.7, 0.0}, 5.0}});
    SimState s = stepper.initialize(mollify(mu, 0.01, g), 0.01, chi);
    const double m0 = integrate(s.u);
    for (int k = 0; k < 300; ++k) {
      const double before = integrate(s.u);
      s = stepper.step(s, s.dt_stable);
      REQUIRE(std::abs(integrate(s.u) - before) <= 1e-12 * m0);
    }
    CHECK(std::abs(integrate(s.u) - m0) <= 1e-12 * m0);
  }
}

TEST_CASE("positivity and CFL guard") {
  const Grid g = grid2(32, 32);
  StepperOptions opt;
  opt.cfl = 0.5;
  ChemotaxisStepper stepper(g, opt);
  SimState s = stepper.initialize(mollify(dirac({0.5, 0.5, 0.0}, 20.0), 0.01, g), 1e-8, 1.0);
  const GridField moved = stepper.advect(s.u, s.v, s.chi, s.dt_stable);
  CHECK(moved.min() >= 0.0);
  CHECK(integrate(moved) == doctest::Approx(integrate(s.u)).epsilon(1e-13));
  s = advance(stepper, s, 100);
  CHECK(s.u.min() >= 0.0);
  const double cfl_bound = stable_dt(s, opt.cfl, std::numeric_limits<double>::infinity());
  CHECK_NOTHROW(stepper.step(s, cfl_bound));
  CHECK_THROWS_AS(stepper.step(s, 2.0 * cfl_bound), std::invalid_argument);
}

TEST_CASE("symmetric data stay symmetric") {
  const Grid g = grid2(32, 32);
  ChemotaxisStepper stepper(g, StepperOptions{});
  const SimState s = advance(stepper, stepper.initialize(mollify(dirac({0.5, 0.5, 0.0}, 2.0), 0.01, g), 0.01, -1.0), 100);
  double asym = 0.0;
  for (int j = 0; j < 32; ++j) {
    for (int i = 0; i < 32; ++i) {
      asym = std::max(asym, std::abs(s.u[g.index(i, j)] - s.u[g.index(31 - i, j)]));
      asym = std::max(asym, std::abs(s.u[g.index(i, j)] - s.u[g.index(j, i)]));
    }
  }
  CHECK(asym <= 1e-12 * s.u.max());
}

TEST_CASE("blow-up detection triggers") {
  const Grid g = grid2(16, 16);
  const GridField v(g, 1.0);
  BlowupThresholds th;
  SimState calm{0.0, GridField(g, 1.0), v, 0.01, 1.0, 0, 1e-3};
  CHECK_FALSE(detect_blowup(calm, th).triggered);

  SimState neg = calm;
  neg.u[3] = -1e-6;
  CHECK(detect_blowup(neg, th).reason == BlowupReason::positivity_loss);

  SimState nan = calm;
  nan.u[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK(detect_blowup(nan, th).triggered);

  SimState slow = calm;
  slow.dt_stable = 1e-12;
  CHECK(detect_blowup(slow, th).reason == BlowupReason::cfl_collapse);

  // One cell holds at most the whole mass, so 16^2 cells cap the ratio at 256.
  SimState spike = calm;
  spike.u[7] = 1e5;
  CHECK_FALSE(detect_blowup(spike, th).triggered);
  BlowupThresholds low = th;
  low.linf_factor = 200.0;
  CHECK(detect_blowup(spike, low).reason == BlowupReason::linf_threshold);

  SimState lump = calm;
  lump.u[7] = 100.0;  // the cell holds 100/256 of the mass
  CHECK_FALSE(detect_blowup(lump, th).triggered);
  th.cell_mass_fraction = 0.2;
  const BlowupReport r = detect_blowup(lump, th);
  CHECK(r.triggered);
  CHECK(r.linf_at_detect == 100.0);
  CHECK(std::string(to_string(r.reason)) == "linf_threshold");
}

TEST_CASE("repulsive Dirac never blows up") {
  SimConfig c = standard_s1();
  c.domain.cells = {32, 32};
  c.time.T = 10.0;
  c.time.dt_max = 1e-2;
  c.time.record_every = 50;
  const RunResult r = run(c, RunOptions{false, {}});
  CHECK(r.exit_code == kExitComplete);
  CHECK_FALSE(r.manifest.blowup.triggered);
  CHECK(r.manifest.final_t == 10.0);
}

TEST_CASE("supercritical attractive data blow up, earlier on finer grids") {
  std::vector<double> t_detect;
  for (int n : {64, 128}) {
    SimConfig c = standard_sweep(n);
    c.initial_measure.total_mass = 80.0;
    const RunResult r = run(c, RunOptions{false, {}});
    REQUIRE(r.exit_code == kExitBlowup);
    t_detect.push_back(r.manifest.blowup.t_detect);
  }
  CHECK(t_detect[1] < t_detect[0]);
}
