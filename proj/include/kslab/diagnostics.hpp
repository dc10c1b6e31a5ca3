#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kslab/measures.hpp"
#include "kslab/stepper.hpp"

namespace kslab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One row of the per-step diagnostics table.
struct TimeSeriesRecord {
  double t = 0.0;
  long step = 0;
  double dt = 0.0;
  double mass = 0.0;
  std::vector<double> lp_norms;  // aligned with TimeSeries::p_list
  double grad_energy_u = 0.0;    // int |grad u|^2
  double v_linf = 0.0;
  double source_linf = 0.0;      // ||u / (1 + eps u)||_inf
  double v_w1p = 0.0;            // ||v||_{r*} + || |grad v| ||_{r*}
  double vague_distance = 0.0;
  double ugradv_l1 = 0.0;        // int |u grad v|
  bool blowup = false;
};

struct TimeSeries {
  std::vector<double> p_list;
  double r_star = 2.0;
  int dim = 2;
  double domain_volume = 1.0;
  std::vector<TimeSeriesRecord> rows;

  /// Index of p in p_list; throws std::invalid_argument if absent.
  std::size_t p_index(double p) const;
  /// int u^p for every row (finite p only).
  std::vector<double> lp_integrals(double p) const;
  std::vector<double> times() const;
};

/// Computes all diagnostics of one state. `probe` fixes the measure and the
/// test dictionary for the vague distance.
class Recorder {
 public:
  Recorder(std::vector<double> p_list, double r_star, const VagueProbe& probe);

  TimeSeriesRecord record(const SimState& state, double dt, bool blowup) const;
  TimeSeries empty_series(const Grid& grid) const;

 private:
  std::vector<double> p_list_;
  double r_star_;
  const VagueProbe& probe_;
};

TimeSeriesRecord record(const SimState& state, const RadonMeasure& measure,
                        const TestDictionary& dictionary, const std::vector<double>& p_list,
                        double r_star = 2.0);

/// Column names in output order.
std::vector<std::string> csv_header(const std::vector<double>& p_list);
void write_csv(std::ostream& out, const TimeSeries& series);
void write_csv(const std::filesystem::path& path, const TimeSeries& series);
/// Reads a table written by write_csv. Domain metadata (dim, volume, r*) is
/// not stored in the CSV and must be supplied by the caller.
TimeSeries read_csv(std::istream& in);
TimeSeries read_csv(const std::filesystem::path& path);

struct TimeWindow {
  double t_lo = 0.0;
  double t_hi = kInf;
  bool contains(double t) const { return t >= t_lo && t <= t_hi; }
};

/// Empirical check of  d/dt Y <= -C Y^a + C,  a = 1 + 2/(n(p-1)),
/// where Y = int u^p / (m^p |Omega|^(1-p)) is normalized by its smallest
/// possible value (the constant state), so that the equilibrium sits at 1.
struct InequalityReport {
  double p = 0.0;
  int n = 2;
  double exponent_expected = 0.0;
  /// Largest C compatible with every record above the equilibrium band
  /// (smallest of the per-record ratios -Y'/(Y^a - 1)).
  double decay_coefficient = 0.0;
  /// Smallest B with Y' <= -C Y^a + B over the whole window.
  double offset = 0.0;
  double scale = 1.0;          // m^p |Omega|^(1-p)
  int records_used = 0;
  int violation_count = 0;     // Y > 2 but Y' >= 0
  double max_violation = 0.0;  // largest Y'/Y among violations
  bool constrained = false;    // false when Y never leaves the band
  /// max over the window of Y(t) / bound_value(C, C, a, t).
  double bound_ratio_max = 0.0;
  bool bound_holds = false;
};

/// Throws std::invalid_argument when the window holds fewer than 10
/// records or p is not a recorded finite exponent.
InequalityReport central_inequality_check(const TimeSeries& series, double p, int n,
                                          TimeWindow window);

/// Least-squares slope of log y against log t.
double loglog_slope(const std::vector<double>& t, const std::vector<double>& y);

/// Slope of log(int u^p) against log t over the window. Throws
/// std::invalid_argument on nonpositive values or fewer than 2 records.
double smoothing_rate_fit(const TimeSeries& series, double p, TimeWindow window);

struct VagueContinuityRow {
  double delta = 0.0;
  std::optional<double> first_exceed_time;
};

struct VagueContinuityTable {
  std::vector<VagueContinuityRow> rows;
  double earliest_time = 0.0;
  double earliest_distance = 0.0;
  double acceptance_value = 0.0;
  /// Largest d(t) / min_{t' >= t} d(t') - 1 over the monotonicity window.
  double max_ripple = 0.0;
  bool monotone = false;
  bool passed = false;
};

/// For every delta: the first recorded t > 0 with vague distance > delta.
/// Passes when the distance at the earliest positive record is at most
/// `acceptance_value` and, inside `monotone_window`, d(t) <= (1 + ripple)
/// d(t') for all recorded t <= t'.
VagueContinuityTable vague_continuity_check(const TimeSeries& series,
                                            const std::vector<double>& delta_grid,
                                            double acceptance_value,
                                            TimeWindow monotone_window,
                                            double ripple = 0.05);

struct FluxIntegrals {
  double int_grad_u_sq = 0.0;
  double int_ugradv_l1 = 0.0;
};

/// Trapezoid time integrals over records with t in [t0, t1].
FluxIntegrals grad_flux_time_integrals(const TimeSeries& series, double t0, double t1);

/// Running trapezoid integral of ugradv_l1 from the first record.
std::vector<double> cumulative_ugradv(const TimeSeries& series);

}  // namespace kslab
