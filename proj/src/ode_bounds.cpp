#include "kslab/ode_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kslab {

namespace {

void check_coefficients(double A, double B, double alpha) {
  if (!(A > 0.0) || !std::isfinite(A)) throw std::invalid_argument("ODE bound needs A > 0");
  if (!(B >= 0.0) || !std::isfinite(B)) throw std::invalid_argument("ODE bound needs B >= 0");
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("ODE bound needs alpha > 1");
  }
}

}  // namespace

void OdeBoundParams::validate() const {
  check_coefficients(A, B, alpha);
  if (!(y0 >= 0.0) || !std::isfinite(y0)) throw std::invalid_argument("ODE needs y0 >= 0");
}

double OdeBoundParams::equilibrium() const { return std::pow(B / A, 1.0 / alpha); }

double bound_constant(double A, double B, double alpha) {
  check_coefficients(A, B, alpha);
  const double decay_part = std::pow(A * (alpha - 1.0), 1.0 / (1.0 - alpha));
  const double offset_part = std::pow(B / A, 1.0 / alpha);
  return std::max(decay_part, offset_part);
}

double bound_value(double A, double B, double alpha, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("bound_value needs t > 0");
  const double C = bound_constant(A, B, alpha);
  return C * std::pow(t, 1.0 / (1.0 - alpha)) + C;
}

double power_decay_solution(double z0, double A, double alpha, double t) {
  if (!(z0 > 0.0)) throw std::invalid_argument("power_decay_solution needs z0 > 0");
  if (!(A > 0.0) || !(alpha > 1.0)) {
    throw std::invalid_argument("power_decay_solution needs A > 0 and alpha > 1");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("power_decay_solution needs t >= 0");
  if (t == 0.0) return z0;
  return std::pow(A * (alpha - 1.0) * t + std::pow(z0, 1.0 - alpha), 1.0 / (1.0 - alpha));
}

std::vector<OdeSample> integrate_ode(const OdeBoundParams& params, double T, double dt) {
  params.validate();
  if (!(T > 0.0)) throw std::invalid_argument("integrate_ode needs T > 0");
  if (!(dt > 0.0) || dt > T / 100.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("integrate_ode needs 0 < dt <= T/100");
  }
  const double A = params.A;
  const double B = params.B;
  const double alpha = params.alpha;
  const double upper = params.y0 + B * T + 1.0;
  const auto rhs = [&](double y) { return -A * std::pow(std::max(y, 0.0), alpha) + B; };
  constexpr double kStiffnessFraction = 0.05;
  constexpr int kMaxHalvings = 10;

  const auto samples = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  std::vector<OdeSample> out;
  out.reserve(samples + 1);
  double y = params.y0;
  out.push_back({0.0, y});
  for (std::size_t k = 1; k <= samples; ++k) {
    const double t_start = static_cast<double>(k - 1) * dt;
    const double t_end = std::min(T, static_cast<double>(k) * dt);
    double t = t_start;
    while (t < t_end) {
      const double stiffness = A * alpha * std::pow(std::max(y, 0.0), alpha - 1.0);
      double h = t_end - t;
      if (stiffness > 0.0) h = std::min(h, kStiffnessFraction / stiffness);
      int halvings = 0;
      for (;;) {
        const double k1 = rhs(y);
        const double k2 = rhs(y + 0.5 * h * k1);
        const double k3 = rhs(y + 0.5 * h * k2);
        const double k4 = rhs(y + h * k3);
        const double next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::isfinite(next) && next >= 0.0 && next <= upper) {
          y = next;
          break;
        }
        if (++halvings > kMaxHalvings) {
          throw OdeIntegrationError("RK4 step left [0, " + std::to_string(upper) +
                                    "] at t = " + std::to_string(t) +
                                    " after 10 halvings");
        }
        h *= 0.5;
      }
      t = (t_end - t <= h * (1.0 + 1e-12)) ? t_end : t + h;
    }
    out.push_back({t_end, y});
  }
  return out;
}

}  // namespace kslab
