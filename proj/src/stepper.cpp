#include "kslab/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kslab {

GridField regularized_source(const GridField& u, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("regularization eps must be positive");
  GridField out(u.grid());
  for (std::size_t c = 0; c < u.size(); ++c) {
    const double x = std::max(u[c], 0.0);
    out[c] = x / (1.0 + eps * x);
  }
  return out;
}

double stable_dt(const SimState& state, double cfl, double dt_max) {
  if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("cfl must lie in (0, 1)");
  constexpr double kDelta = 1e-14;
  if (state.chi == 0.0) return dt_max;
  const Grid& g = state.v.grid();
  const FaceGradient grad = gradient(state.v);
  double dt = dt_max;
  for (int a = 0; a < g.dim(); ++a) {
    const double speed = g.dim() * std::abs(state.chi) * grad.max_abs(a) + kDelta;
    dt = std::min(dt, cfl * g.h(a) / speed);
  }
  return dt;
}

ChemotaxisStepper::ChemotaxisStepper(const Grid& grid, StepperOptions options)
    : grid_(grid),
      options_(options),
      diffusion_solver_(grid, options.method, options.elliptic_tol),
      elliptic_solver_(grid, options.method, options.elliptic_tol) {
  if (!(options_.cfl > 0.0 && options_.cfl < 1.0)) {
    throw std::invalid_argument("cfl must lie in (0, 1)");
  }
  if (!(options_.dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
}

GridField ChemotaxisStepper::solve_signal(const GridField& u, double eps) {
  return elliptic_solver_.solve(regularized_source(u, eps), 1.0, 1.0, &last_report_);
}

SimState ChemotaxisStepper::initialize(GridField u0, double eps, double chi, double t0) {
  if (!u0.grid().same_shape(grid_)) {
    throw std::invalid_argument("initial density grid does not match stepper grid");
  }
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  if (!u0.all_finite()) throw std::invalid_argument("initial density must be finite");
  GridField v = solve_signal(u0, eps);
  SimState state{t0, std::move(u0), std::move(v), eps, chi, 0, 0.0};
  state.dt_stable = stable_dt(state, options_.cfl, options_.dt_max);
  return state;
}

GridField ChemotaxisStepper::advect(const GridField& u, const GridField& v, double chi,
                                    double dt) const {
  GridField out = u;
  if (chi == 0.0) return out;
  const Grid& g = u.grid();
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const double inv_h = 1.0 / g.h(a);
    const double lambda = dt * inv_h;
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (g.coords(c)[a] == 0) continue;
      // Face between c - s (left) and c (right); drift velocity chi dv/dx.
      const double w = chi * (v[c] - v[c - s]) * inv_h;
      const double flux = w * (w > 0.0 ? u[c - s] : u[c]);
      out[c - s] -= lambda * flux;
      out[c] += lambda * flux;
    }
  }
  return out;
}

SimState ChemotaxisStepper::step(const SimState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  const double cfl_limit =
      stable_dt(state, options_.cfl, std::numeric_limits<double>::infinity());
  if (dt > cfl_limit * (1.0 + 1e-12)) {
    throw std::invalid_argument("step size " + std::to_string(dt) +
                                " exceeds the CFL bound " + std::to_string(cfl_limit));
  }
  const GridField transported = advect(state.u, state.v, state.chi, dt);
  GridField u = diffusion_solver_.solve(transported, 1.0, dt);
  GridField v = solve_signal(u, state.eps);
  SimState next{state.t + dt, std::move(u), std::move(v), state.eps, state.chi,
                state.step_count + 1, 0.0};
  next.dt_stable = stable_dt(next, options_.cfl, options_.dt_max);
  return next;
}

const char* to_string(BlowupReason r) {
  switch (r) {
    case BlowupReason::none: return "none";
    case BlowupReason::linf_threshold: return "linf_threshold";
    case BlowupReason::positivity_loss: return "positivity_loss";
    case BlowupReason::cfl_collapse: return "cfl_collapse";
    case BlowupReason::elliptic_failure: return "elliptic_failure";
  }
  return "unknown";
}

BlowupReport detect_blowup(const SimState& state, const BlowupThresholds& thresholds) {
  BlowupReport rep;
  const Grid& g = state.u.grid();
  const double linf = state.u.max_abs();
  const auto fire = [&](BlowupReason why) {
    rep.triggered = true;
    rep.reason = why;
    rep.t_detect = state.t;
    rep.linf_at_detect = linf;
    return rep;
  };
  if (!state.u.all_finite()) return fire(BlowupReason::positivity_loss);
  const double mass = integrate(state.u);
  if (linf > thresholds.linf_factor * mass / g.domain_volume()) {
    return fire(BlowupReason::linf_threshold);
  }
  if (thresholds.cell_mass_fraction &&
      linf * g.cell_volume() > *thresholds.cell_mass_fraction * mass) {
    return fire(BlowupReason::linf_threshold);
  }
  if (relative_negativity(state.u) > thresholds.positivity_tol) {
    return fire(BlowupReason::positivity_loss);
  }
  if (state.dt_stable < thresholds.dt_min) {
    return fire(BlowupReason::cfl_collapse);
  }
  return rep;
}

}  // namespace kslab
