#pragma once

#include <stdexcept>
#include <vector>

namespace kslab {

// Comparison problem  y' = -A y^alpha + B,  y(0) = y0,
// with A > 0, B >= 0, alpha > 1, y0 >= 0. Every solution obeys
//   y(t) <= C t^(1/(1-alpha)) + C,
//   C = max((A(alpha-1))^(1/(1-alpha)), (B/A)^(1/alpha)),
// whatever y0 is.

struct OdeBoundParams {
  double A = 1.0;
  double B = 0.0;
  double alpha = 2.0;
  double y0 = 0.0;

  /// Throws std::invalid_argument if any constraint is violated.
  void validate() const;
  double equilibrium() const;
};

double bound_constant(double A, double B, double alpha);

/// C t^(1/(1-alpha)) + C. Throws std::invalid_argument for t <= 0.
double bound_value(double A, double B, double alpha, double t);

/// Exact solution of w' = -A w^alpha, w(0) = z0:
///   (A(alpha-1) t + z0^(1-alpha))^(1/(1-alpha)).
double power_decay_solution(double z0, double A, double alpha, double t);

struct OdeSample {
  double t = 0.0;
  double y = 0.0;
};

class OdeIntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Classical RK4 sampled every dt on [0, T] (dt <= T/100). Internally each
/// sample interval is split into substeps no longer than 0.05 / (A alpha
/// y^(alpha-1)), which keeps RK4 inside its stability region while the
/// solution is large. A substep whose result leaves [0, y0 + B T + 1] is
/// retried at half size, up to 10 times, before OdeIntegrationError.
std::vector<OdeSample> integrate_ode(const OdeBoundParams& params, double T, double dt);

}  // namespace kslab
