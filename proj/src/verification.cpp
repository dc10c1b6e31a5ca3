#include "kslab/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/elliptic.hpp"
#include "kslab/ode_bounds.hpp"
#include "kslab/runner.hpp"
#include "kslab/snapshot_io.hpp"

namespace kslab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Accumulates "key=value" pairs for the measured column.
class Measured {
 public:
  Measured& add(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return add(key, std::string(buf));
  }
  Measured& add(const std::string& key, const std::string& value) {
    if (!text_.empty()) text_ += ' ';
    text_ += key + '=' + value;
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

struct Outcome {
  bool passed = false;
  std::string measured;
};

// Runs shared between criteria (the S1 run feeds five of them).
class Session {
 public:
  explicit Session(const VerifyOptions& options) : options_(options) {}

  const VerifyOptions& options() const { return options_; }

  std::filesystem::path dir(const std::string& name) const {
    return resolve_output_dir(options_.work_dir) / name;
  }

  const RunResult& run_once(const std::string& name, const std::function<SimConfig()>& make) {
    auto it = runs_.find(name);
    if (it != runs_.end()) return it->second;
    SimConfig c = make();
    c.output.directory = dir(name);
    return runs_.emplace(name, run(c)).first->second;
  }

  const RunResult& s1() { return run_once("s1", standard_s1); }
  const RunResult& heat_accuracy() {
    return run_once("heat_accuracy", [] { return standard_heat(0.01, 0.1, 1e-4); });
  }
  const RunResult& heat_rate() {
    return run_once("heat_rate", [] { return standard_heat(1e-3, 0.1, 1e-3); });
  }

 private:
  VerifyOptions options_;
  std::map<std::string, RunResult> runs_;
};

bool runtime_ok(double wall, double limit, Measured& m) {
  m.add("runtime_s", wall);
  return wall < limit;
}

// ---------------------------------------------------------------- unit

Outcome unit_grid(Session&) {
  const std::vector<double> l2{1, 1}, l3{2, 1, 1};
  const std::vector<int> c2{4, 4}, c3{8, 4, 4}, coarse{2, 2};
  const Grid a = Grid::build(2, l2, c2);
  const Grid b = Grid::build(3, l3, c3);
  bool rejected = false;
  try {
    Grid::build(2, l2, coarse);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  const bool ok = a.size() == 16 && a.cell_volume() == 1.0 / 16 && b.size() == 128 &&
                  b.h(0) == 0.25 && b.h(1) == 0.25 && b.h(2) == 0.25 && rejected;
  return {ok, Measured().add("cells", std::to_string(a.size()) + "," + std::to_string(b.size()))
                  .add("coarse_rejected", rejected ? "yes" : "no")
                  .str()};
}

Outcome unit_ode_oracles(Session&) {
  const auto tanh_run = integrate_ode({1.0, 1.0, 2.0, 0.0}, 1.0, 0.01);
  const auto decay_run = integrate_ode({1.0, 0.0, 2.0, 100.0}, 1.0, 0.01);
  const auto flat_run = integrate_ode({2.0, 8.0, 2.0, 2.0}, 1.0, 0.01);
  const double e1 = std::abs(tanh_run.back().y - std::tanh(1.0));
  const double e2 = std::abs(decay_run.back().y - 1.0 / (1.0 + 1.0 / 100.0));
  double e3 = 0.0;
  for (const auto& s : flat_run) e3 = std::max(e3, std::abs(s.y - 2.0));
  return {e1 <= 1e-6 && e2 <= 1e-6 && e3 <= 1e-12,
          Measured().add("tanh_err", e1).add("decay_err", e2).add("equilibrium_drift", e3).str()};
}

Outcome unit_solver_agreement(Session& s) {
  const std::vector<double> l{1.0, 0.7};
  const std::vector<int> c{40, 28};
  const Grid g = Grid::build(2, l, c);
  std::mt19937_64 rng(s.options().seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  GridField src(g);
  for (std::size_t i = 0; i < g.size(); ++i) src[i] = U(rng);
  const auto [vt, rt] = solve_helmholtz_neumann(src, 1e-12, EllipticMethod::transform);
  const auto [vc, rc] = solve_helmholtz_neumann(src, 1e-12, EllipticMethod::conjugate_gradient);
  const double diff = (vt - vc).max_abs() / vt.max_abs();
  return {diff <= 1e-10, Measured().add("max_rel_diff", diff).add("cg_iterations", rc.iterations).str()};
}

Outcome unit_steady_state(Session&) {
  const std::vector<double> l{1, 1};
  const std::vector<int> c{16, 16};
  const Grid g = Grid::build(2, l, c);
  const double m = 3.0, eps = 0.1;
  ChemotaxisStepper stepper(g, StepperOptions{});
  SimState st = stepper.initialize(GridField(g, m), eps, 1.0);
  for (int k = 0; k < 50; ++k) st = stepper.step(st, st.dt_stable);
  double du = 0.0, dv = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    du = std::max(du, std::abs(st.u[i] - m));
    dv = std::max(dv, std::abs(st.v[i] - m / (1.0 + eps * m)));
  }
  return {du <= 1e-12 && dv <= 1e-12, Measured().add("u_drift", du).add("v_err", dv).str()};
}

Outcome unit_short_run(Session& s) {
  SimConfig c = standard_s1();
  c.domain.cells = {32, 32};
  c.time.T = 0.2;
  c.output.directory = s.dir("unit_short");
  const RunResult r = run(c);
  return {r.exit_code == kExitComplete && r.manifest.mass_check_ok,
          Measured().add("exit", r.exit_code).add("steps", r.manifest.steps)
              .add("mass_drift", r.manifest.mass_max_rel_drift).str()};
}

Outcome unit_snapshot_roundtrip(Session&) {
  const std::vector<double> l{1.0, 2.0, 0.5};
  const std::vector<int> c{5, 4, 6};
  const Grid g = Grid::build(3, l, c);
  const GridField f = sample(g, [](const std::array<double, 3>& x) {
    return std::exp(x[0]) / 3.0 + std::sin(x[1] * x[2]);
  });
  std::stringstream ss;
  write_snapshot(ss, f);
  const GridField back = read_snapshot(ss);
  bool same = back.grid().same_shape(g);
  for (std::size_t i = 0; same && i < g.size(); ++i) same = back[i] == f[i];
  return {same, Measured().add("bitwise", same ? "yes" : "no").str()};
}

Outcome unit_config_scope(Session&) {
  const std::string text =
      R"({"scenario": "free", "domain": {"dim": 4, "lengths": [1,1,1,1], "cells": [8,8,8,8]},
          "physics": {"chi": 0}, "initial_measure": {"uniform_mass": 1}, "time": {"T": 1}})";
  std::string field = "none";
  try {
    parse_config(text).validate();
  } catch (const ConfigError& e) {
    field = e.field();
  }
  return {field == "domain.dim", Measured().add("rejected_field", field).str()};
}

// ------------------------------------------------------------ estimates

Outcome ode_domination(Session& s) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(s.options().seed);
  std::uniform_real_distribution<double> uA(0.1, 5.0), uB(0.0, 5.0), ua(1.2, 4.0), uy(0.0, 20.0);
  int failures = 0;
  double worst = 0.0;
  for (int draw = 0; draw < 200; ++draw) {
    const OdeBoundParams prm{uA(rng), uB(rng), ua(rng), uy(rng)};
    try {
      for (const auto& smp : integrate_ode(prm, 10.0, 0.01)) {
        if (smp.t <= 0.0) continue;
        const double ratio = smp.y / bound_value(prm.A, prm.B, prm.alpha, smp.t);
        worst = std::max(worst, ratio);
        if (ratio > 1.0 + 1e-6) ++failures;
      }
    } catch (const OdeIntegrationError&) {
      ++failures;
    }
  }
  const auto tanh_run = integrate_ode({1.0, 1.0, 2.0, 0.0}, 1.0, 0.01);
  const double tanh_err = std::abs(tanh_run.back().y - std::tanh(1.0));
  Measured m;
  m.add("draws", 200).add("failures", failures).add("max_ratio", worst).add("tanh_err", tanh_err);
  const bool fast = runtime_ok(seconds_since(t0), 10.0, m);
  return {failures == 0 && tanh_err <= 1e-6 && fast, m.str()};
}

GridField random_source(const Grid& g, std::mt19937_64& rng, int kind) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  GridField f(g);
  switch (kind % 3) {
    case 0:
      for (std::size_t i = 0; i < g.size(); ++i) f[i] = U(rng);
      break;
    case 1: {  // sparse spikes
      std::uniform_int_distribution<std::size_t> cell(0, g.size() - 1);
      for (int k = 0; k < 5; ++k) f[cell(rng)] += 1e3 * U(rng);
      break;
    }
    default:  // smooth bump plus noise
      const double cx = U(rng), cy = U(rng), w = 0.01 + 0.1 * U(rng);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.center(i);
        const double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
        f[i] = 50.0 * std::exp(-r2 / w) + 0.01 * U(rng);
      }
  }
  return f;
}

Outcome elliptic_contraction(Session& s) {
  const auto t0 = Clock::now();
  const std::vector<double> l2{1.0, 1.0}, l3{1.0, 1.0, 1.0};
  const std::vector<int> c2{64, 64}, c3{16, 16, 16};
  const Grid g2 = Grid::build(2, l2, c2);
  const Grid g3 = Grid::build(3, l3, c3);
  std::mt19937_64 rng(s.options().seed + 1);
  int failures = 0;
  double worst = 0.0;  // largest lhs / rhs
  for (int draw = 0; draw < 100; ++draw) {
    const Grid& g = draw % 4 == 3 ? g3 : g2;
    const GridField src = random_source(g, rng, draw);
    const GridField v = solve_helmholtz_neumann(src).first;
    for (double r : {1.0, 2.0, kInf}) {
      const ContractionCheck c = contraction_check(v, src, r);
      worst = std::max(worst, c.lhs / c.rhs);
      if (!c.ok) ++failures;
    }
  }

  // Cosine mode on a non-square box; the eigenvalue is written out here.
  const std::vector<double> le{2.0, 1.0};
  const std::vector<int> ce{64, 32};
  const Grid ge = Grid::build(2, le, ce);
  const double h = ge.h(0), L = ge.length(0);
  const double lam = 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * h / L));
  const auto mode = [&](const std::array<double, 3>& x) {
    return std::cos(std::numbers::pi * x[0] / L);
  };
  const GridField src = sample(ge, [&](const std::array<double, 3>& x) { return 1.0 + mode(x); });
  const GridField want =
      sample(ge, [&](const std::array<double, 3>& x) { return 1.0 + mode(x) / (1.0 + lam); });
  const double err_t = (solve_helmholtz_neumann(src, 1e-10).first - want).max_abs();
  const double err_c =
      (solve_helmholtz_neumann(src, 1e-11, EllipticMethod::conjugate_gradient).first - want)
          .max_abs();
  Measured m;
  m.add("draws", 100).add("failures", failures).add("max_lhs_over_rhs", worst)
      .add("eigen_err_transform", err_t).add("eigen_err_cg", err_c);
  const bool fast = runtime_ok(seconds_since(t0), 30.0, m);
  return {failures == 0 && err_t <= 1e-10 && err_c <= 1e-10 && fast, m.str()};
}

Outcome smoothing_rate(Session& s) {
  const RunResult& heat = s.heat_rate();
  const RunResult& s1 = s.s1();
  const double slope_heat = smoothing_rate_fit(heat.series, 2.0, {2e-3, 2e-2});
  const double slope_s1 = smoothing_rate_fit(s1.series, 2.0, {2e-3, 2e-2});
  Measured m;
  m.add("heat_slope", slope_heat).add("s1_slope", slope_s1);
  const bool fast = runtime_ok(std::max(heat.manifest.wall_time, s1.manifest.wall_time), 120.0, m);
  return {std::abs(slope_heat + 1.0) <= 0.1 && slope_s1 >= -1.5 && fast, m.str()};
}

Outcome central_inequality(Session& s) {
  const RunResult& r = s.s1();
  Measured m;
  bool ok = r.exit_code == kExitComplete;
  for (double p : {2.5, 8.0}) {
    const InequalityReport q = central_inequality_check(r.series, p, 2, {0.0, kInf});
    const std::string tag = p == 2.5 ? "p2.5_" : "p8_";
    m.add(tag + "violations", q.violation_count).add(tag + "C", q.decay_coefficient)
        .add(tag + "bound_ratio_max", q.bound_ratio_max);
    ok = ok && q.violation_count == 0 && q.bound_holds;
  }
  const bool fast = runtime_ok(r.manifest.wall_time, 120.0, m);
  return {ok && fast, m.str()};
}

Outcome ugradv_integrability(Session& s) {
  const RunResult& r = s.s1();
  const auto cum = cumulative_ugradv(r.series);
  std::vector<double> t, y;
  for (std::size_t i = 0; i < cum.size(); ++i) {
    const double ti = r.series.rows[i].t;
    if (ti >= 1e-4 && ti <= 1e-2 && cum[i] > 0.0) {
      t.push_back(ti);
      y.push_back(cum[i]);
    }
  }
  const double slope = loglog_slope(t, y);
  Measured m;
  m.add("exponent", slope).add("records", static_cast<double>(t.size()))
      .add("integral_at_1e-2", y.empty() ? 0.0 : y.back());
  return {slope >= 0.4 - 0.05, m.str()};
}

// ------------------------------------------------------------ scenarios

Outcome mass_conservation(Session& s) {
  Measured m;
  bool ok = true;
  for (const auto& [name, r] : {std::pair<std::string, const RunResult*>{"s1", &s.s1()},
                                {"heat", &s.heat_accuracy()}}) {
    // Re-read from disk so the check sees exactly what was written.
    const TimeSeries csv = read_csv(r->output_dir / "timeseries.csv");
    double drift = 0.0;
    const double m0 = csv.rows.front().mass;
    for (const auto& row : csv.rows) drift = std::max(drift, std::abs(row.mass - m0) / m0);
    m.add(name + "_steps", r->manifest.steps).add(name + "_drift", drift);
    ok = ok && drift <= 1e-12 && r->manifest.steps >= 1000;
    ok = runtime_ok(r->manifest.wall_time, 120.0, m) && ok;
  }
  return {ok, m.str()};
}

Outcome heat_accuracy(Session& s) {
  const RunResult& r = s.heat_accuracy();
  const GridField& u = r.final_state->u;
  const GridField oracle = heat_series_oracle(u.grid(), 0.5, 0.5, 0.01, 1.0, r.final_state->t);
  const double err = lp_norm(u - oracle, 2.0) / lp_norm(oracle, 2.0);
  Measured m;
  m.add("t", r.final_state->t).add("rel_l2_err", err).add("steps", r.manifest.steps);
  const bool fast = runtime_ok(r.manifest.wall_time, 60.0, m);
  return {err <= 1e-3 && std::abs(r.final_state->t - 0.1) < 1e-12 && fast, m.str()};
}

Outcome vague_continuity(Session& s) {
  const RunResult& r = s.s1();
  const double d0 = r.manifest.initial_vague_distance;
  const TimeWindow window{std::nextafter(1e-4, 1.0), 1e-2};
  const VagueContinuityTable v =
      vague_continuity_check(r.series, {1e-3, 1e-2, 1e-1}, 2.0 * d0, window, 0.05);
  Measured m;
  m.add("d0", d0).add("earliest_t", v.earliest_time).add("earliest_d", v.earliest_distance)
      .add("max_ripple", v.max_ripple);
  const bool fast = runtime_ok(r.manifest.wall_time, 120.0, m);
  return {v.passed && fast, m.str()};
}

Outcome eps_uniformity(Session& s) {
  SimConfig c = standard_s1();
  c.physics.eps_ladder = {0.04, 0.02, 0.01};
  c.ladder.t0 = 0.25;
  c.ladder.uniformity_p = 2.5;
  c.ladder.uniformity_lo = 0.1;
  c.ladder.uniformity_hi = 1.0;
  c.output.directory = s.dir("eps_ladder");
  const auto t0 = Clock::now();
  const LadderReport rep = eps_ladder(c, s.options().jobs);
  bool complete = true;
  for (const auto& l : rep.levels) complete = complete && l.exit_code == kExitComplete;
  Measured m;
  m.add("lp_spread", rep.lp_spread);
  for (std::size_t i = 0; i < rep.adjacent_diffs.size(); ++i) {
    m.add("diff" + std::to_string(i), rep.adjacent_diffs[i]);
  }
  const bool fast = runtime_ok(seconds_since(t0), 300.0, m);
  return {complete && rep.lp_spread < 0.2 && rep.strictly_decreasing && fast, m.str()};
}

Outcome mass_dichotomy(Session& s) {
  const auto t0 = Clock::now();
  Measured m;
  bool ok = true;
  std::vector<double> centres;
  for (int cells : {64, 128}) {
    SimConfig c = standard_sweep(cells);
    c.output.directory = s.dir("sweep_" + std::to_string(cells));
    SweepOptions opt;
    opt.jobs = s.options().jobs;
    const SweepReport rep = mass_sweep(c, standard_sweep_masses(), opt);
    const std::string tag = "n" + std::to_string(cells) + "_";
    if (!rep.bracketed) {
      m.add(tag + "bracket", "none");
      ok = false;
      continue;
    }
    m.add(tag + "complete", *rep.largest_complete).add(tag + "blowup", *rep.smallest_blowup)
        .add(tag + "ratio", rep.ratio);
    ok = ok && rep.ratio <= 2.0 && rep.monotone;
    centres.push_back(std::sqrt(*rep.largest_complete * *rep.smallest_blowup));
  }
  if (centres.size() == 2) {
    const double spread = std::max(centres[0], centres[1]) / std::min(centres[0], centres[1]);
    m.add("grid_factor", spread);
    ok = ok && spread <= 2.0;
  }
  ok = runtime_ok(seconds_since(t0), 900.0, m) && ok;
  return {ok, m.str()};
}

Outcome scenario_s3(Session& s) {
  const int cells = 64;
  const auto density = s.dir("s3") / "density_inv_r.ksl";
  std::filesystem::create_directories(density.parent_path());
  write_inverse_distance_density(density, cells);
  const RunResult& r = s.run_once("s3", [&] { return standard_s3(density, cells); });
  const TimeSeries& ts = r.series;
  const std::size_t ip = ts.p_index(kInf);
  // Bounded after t0: finite, and never above its value at t0.
  double at_t0 = kInf, sup_after = 0.0;
  for (const auto& row : ts.rows) {
    if (row.t < 0.05) continue;
    if (at_t0 == kInf) at_t0 = row.lp_norms[ip];
    sup_after = std::max(sup_after, row.lp_norms[ip]);
  }
  const bool bounded = std::isfinite(sup_after) && sup_after <= at_t0 * (1.0 + 1e-9);
  const double mass = ts.rows.front().mass;
  const double d0 = r.manifest.initial_vague_distance;
  const double acceptance = std::max(2.0 * d0, 0.01 * mass);
  const VagueContinuityTable v = vague_continuity_check(
      ts, {1e-3, 1e-2, 1e-1}, acceptance, {std::nextafter(1e-4, 1.0), 1e-2}, 0.05);
  Measured m;
  m.add("exit", r.exit_code).add("final_t", r.manifest.final_t).add("linf_t0", at_t0)
      .add("linf_sup_after", sup_after).add("d0", d0).add("earliest_d", v.earliest_distance)
      .add("acceptance", acceptance).add("max_ripple", v.max_ripple);
  const bool fast = runtime_ok(r.manifest.wall_time, 600.0, m);
  const bool complete = r.exit_code == kExitComplete && std::abs(r.manifest.final_t - 0.5) < 1e-12;
  return {complete && bounded && v.passed && fast, m.str()};
}

struct Criterion {
  const char* id;
  const char* suite;
  Outcome (*fn)(Session&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"grid_arithmetic", "unit", unit_grid},
      {"ode_closed_forms", "unit", unit_ode_oracles},
      {"solver_agreement", "unit", unit_solver_agreement},
      {"constant_steady_state", "unit", unit_steady_state},
      {"short_run_contract", "unit", unit_short_run},
      {"snapshot_roundtrip", "unit", unit_snapshot_roundtrip},
      {"config_dimension_scope", "unit", unit_config_scope},
      {"mass_conservation", "scenarios", mass_conservation},
      {"ode_bound_domination", "estimates", ode_domination},
      {"elliptic_contraction", "estimates", elliptic_contraction},
      {"heat_reduction_accuracy", "scenarios", heat_accuracy},
      {"smoothing_rate", "estimates", smoothing_rate},
      {"central_inequality", "estimates", central_inequality},
      {"vague_continuity", "scenarios", vague_continuity},
      {"ugradv_integrability", "estimates", ugradv_integrability},
      {"eps_uniformity", "scenarios", eps_uniformity},
      {"mass_dichotomy", "scenarios", mass_dichotomy},
      {"scenario_s3", "scenarios", scenario_s3},
  };
  return all;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const CriterionResult& r) { return r.passed; });
}

std::string VerifyReport::to_json() const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& c : criteria) {
    items.push_back({{"id", c.id},
                     {"suite", c.suite},
                     {"passed", c.passed},
                     {"measured", c.measured},
                     {"seconds", c.seconds}});
  }
  return nlohmann::json{{"suite", suite}, {"passed", passed()}, {"criteria", items}}.dump(2);
}

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = {"unit", "estimates", "scenarios", "all"};
  return names;
}

std::vector<std::string> acceptance_ids() {
  std::vector<std::string> ids;
  for (const auto& c : criteria()) {
    if (std::string(c.suite) != "unit") ids.push_back(c.id);
  }
  return ids;
}

std::string format_result(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "(%.1f s)", r.seconds);
  return std::string(r.passed ? "PASS " : "FAIL ") + r.id + "  " + r.measured + "  " + secs;
}

VerifyReport verify(const std::string& suite, const VerifyOptions& options) {
  const auto& names = verify_suites();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw std::invalid_argument("unknown suite '" + suite +
                                "' (expected unit, estimates, scenarios or all)");
  }
  Session session(options);
  VerifyReport report;
  report.suite = suite;
  for (const auto& c : criteria()) {
    if (suite != "all" && suite != c.suite) continue;
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
      continue;
    }
    CriterionResult res;
    res.id = c.id;
    res.suite = c.suite;
    const auto t0 = Clock::now();
    try {
      const Outcome o = c.fn(session);
      res.passed = o.passed;
      res.measured = o.measured;
    } catch (const std::exception& e) {
      res.passed = false;
      res.measured = std::string("error=\"") + e.what() + '"';
    }
    res.seconds = seconds_since(t0);
    if (options.on_result) options.on_result(res);
    report.criteria.push_back(std::move(res));
  }
  return report;
}

SimConfig standard_s1() {
  SimConfig c;
  c.scenario = Scenario::S1;
  c.domain = {2, {1.0, 1.0}, {128, 128}};
  c.physics.chi = -1.0;
  c.physics.eps = 0.01;
  c.initial_measure.atoms = {Atom{{0.5, 0.5, 0.0}, 1.0}};
  c.time.T = 1.0;
  c.output.directory = "s1";
  return c;
}

SimConfig standard_heat(double mollifier_eps, double T, double dt_max) {
  SimConfig c = standard_s1();
  c.scenario = Scenario::free;
  c.physics.chi = 0.0;
  c.physics.mollifier_eps = mollifier_eps;
  c.time.T = T;
  c.time.dt_max = dt_max;
  c.output.directory = "heat";
  return c;
}

SimConfig standard_sweep(int cells) {
  SimConfig c;
  c.scenario = Scenario::S2;
  c.domain = {2, {1.0, 1.0}, {cells, cells}};
  c.physics.chi = 1.0;
  // A tiny regularization lets the discrete solution actually concentrate;
  // the mollifier width is kept at the resolved value 0.01.
  c.physics.eps = 1e-8;
  c.physics.mollifier_eps = 0.01;
  c.initial_measure.atoms = {Atom{{0.5, 0.5, 0.0}, 1.0}};
  c.time.T = 0.1;
  c.time.record_every = 20;
  c.blowup.cell_mass_fraction = 0.1;
  c.output.directory = "sweep";
  return c;
}

std::vector<double> standard_sweep_masses() { return {5.0, 10.0, 20.0, 40.0, 80.0}; }

void write_inverse_distance_density(const std::filesystem::path& path, int cells) {
  const std::vector<double> l{1.0, 1.0, 1.0};
  const std::vector<int> c{cells, cells, cells};
  const Grid g = Grid::build(3, l, c);
  write_snapshot(path, sample(g, [](const std::array<double, 3>& x) {
                   const double dx = x[0] - 0.5, dy = x[1] - 0.5, dz = x[2] - 0.5;
                   return 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
                 }));
}

SimConfig standard_s3(const std::filesystem::path& density_file, int cells) {
  SimConfig c;
  c.scenario = Scenario::S3;
  c.domain = {3, {1.0, 1.0, 1.0}, {cells, cells, cells}};
  c.physics.chi = -1.0;
  c.physics.eps = 0.01;
  c.initial_measure.density_file = density_file;
  c.initial_measure.density_p = 2.0;
  c.initial_measure.total_mass = 1.0;
  c.time.T = 0.5;
  c.output.directory = "s3";
  return c;
}

GridField heat_series_oracle(const Grid& grid, double cx, double cy, double eps, double mass,
                             double t) {
  if (grid.dim() != 2) throw std::invalid_argument("heat oracle: 2D grids only");
  const double pi = std::numbers::pi;
  const auto gauss = [&](double x, double c) { return std::exp(-(x - c) * (x - c) / eps); };

  // One axis: series coefficients by composite Simpson, then the series at
  // every cell centre.
  const auto axis_profile = [&](int axis, double c) {
    const double L = grid.length(axis);
    const int K = std::min(4000, static_cast<int>(L * std::sqrt(45.0 / (t + eps / 4.0)) / pi) + 2);
    const int q = 20000;
    const double dq = L / q;
    std::vector<double> coef(K + 1);
    for (int k = 0; k <= K; ++k) {
      double s = 0.0;
      for (int i = 0; i <= q; ++i) {
        const double x = i * dq;
        const double w = (i == 0 || i == q) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * gauss(x, c) * std::cos(k * pi * x / L);
      }
      coef[k] = (k == 0 ? 1.0 : 2.0) / L * s * dq / 3.0;
    }
    std::vector<double> out(grid.cells(axis));
    for (int i = 0; i < grid.cells(axis); ++i) {
      const double x = (i + 0.5) * grid.h(axis);
      double s = 0.0;
      for (int k = 0; k <= K; ++k) {
        const double kk = k * pi / L;
        s += coef[k] * std::exp(-kk * kk * t) * std::cos(kk * x);
      }
      out[i] = s;
    }
    return out;
  };

  // Amplitude fixed by the mass of the sampled initial Gaussian.
  double z = 0.0;
  for (int j = 0; j < grid.cells(1); ++j) {
    for (int i = 0; i < grid.cells(0); ++i) {
      z += gauss((i + 0.5) * grid.h(0), cx) * gauss((j + 0.5) * grid.h(1), cy);
    }
  }
  const double amp = mass / (z * grid.cell_volume());
  const auto px = axis_profile(0, cx);
  const auto py = axis_profile(1, cy);
  GridField out(grid);
  for (int j = 0; j < grid.cells(1); ++j) {
    for (int i = 0; i < grid.cells(0); ++i) out[grid.index(i, j)] = amp * px[i] * py[j];
  }
  return out;
}

}  // namespace kslab
