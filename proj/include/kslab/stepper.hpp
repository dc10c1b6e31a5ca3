#pragma once

#include <optional>
#include <string>

#include "kslab/elliptic.hpp"
#include "kslab/grid.hpp"

namespace kslab {

/// Pointwise u / (1 + eps u): the saturated signal production term.
GridField regularized_source(const GridField& u, double eps);

struct SimState {
  double t = 0.0;
  GridField u;
  GridField v;
  double eps = 0.01;
  double chi = 0.0;
  long step_count = 0;
  /// stable_dt of this state: the largest step it may take next.
  double dt_stable = 0.0;
};

struct StepperOptions {
  double cfl = 0.4;
  double dt_max = 1e-3;
  EllipticMethod method = EllipticMethod::transform;
  double elliptic_tol = 1e-10;
};

/// cfl * min_a h_a / (n |chi| max|d_a v| + 1e-14), capped at dt_max.
double stable_dt(const SimState& state, double cfl, double dt_max);

/// Operator-split IMEX stepping of
///   u_t = Delta u - chi div(u grad v),  0 = Delta v - v + u / (1 + eps u)
/// on a box with no-flux boundaries. Each step runs conservative first-order
/// upwind advection, then implicit Euler diffusion, then the elliptic solve.
/// Positivity holds for cfl <= 1/2.
class ChemotaxisStepper {
 public:
  ChemotaxisStepper(const Grid& grid, StepperOptions options);

  /// Builds a consistent state: v solves the elliptic problem for u0.
  SimState initialize(GridField u0, double eps, double chi, double t0 = 0.0);

  /// Throws std::invalid_argument if dt exceeds the CFL bound (beyond
  /// roundoff) and EllipticNonConvergence if a solve fails.
  SimState step(const SimState& state, double dt);

  /// Explicit upwind transport stage alone (exposed for tests).
  GridField advect(const GridField& u, const GridField& v, double chi, double dt) const;

  const StepperOptions& options() const { return options_; }
  const EllipticSolveReport& last_elliptic_report() const { return last_report_; }

 private:
  GridField solve_signal(const GridField& u, double eps);

  Grid grid_;
  StepperOptions options_;
  NeumannSolver diffusion_solver_;
  NeumannSolver elliptic_solver_;
  EllipticSolveReport last_report_;
};

enum class BlowupReason { none, linf_threshold, positivity_loss, cfl_collapse, elliptic_failure };

const char* to_string(BlowupReason r);

struct BlowupThresholds {
  /// Trigger when ||u||_inf > linf_factor * m / |Omega|.
  double linf_factor = 1e6;
  double dt_min = 1e-10;
  /// Trigger when min(u) < -positivity_tol * max(u).
  double positivity_tol = 1e-13;
  /// Optional grid-aware trigger: the densest cell holds more than this
  /// fraction of the total mass.
  std::optional<double> cell_mass_fraction;
};

struct BlowupReport {
  bool triggered = false;
  BlowupReason reason = BlowupReason::none;
  double t_detect = 0.0;
  double linf_at_detect = 0.0;
};

BlowupReport detect_blowup(const SimState& state, const BlowupThresholds& thresholds);

}  // namespace kslab
