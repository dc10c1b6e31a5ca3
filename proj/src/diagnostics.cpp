#include "kslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "kslab/ode_bounds.hpp"

namespace kslab {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string p_label(double p) {
  if (std::isinf(p)) return "lp_inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "lp_%g", p);
  return buf;
}

double parse_p_label(const std::string& name) {
  const std::string tail = name.substr(3);
  if (tail == "inf") return kInf;
  return std::stod(tail);
}

}  // namespace

std::size_t TimeSeries::p_index(double p) const {
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    if (p_list[i] == p) return i;
  }
  throw std::invalid_argument("exponent " + fmt(p) + " was not recorded");
}

std::vector<double> TimeSeries::lp_integrals(double p) const {
  if (std::isinf(p)) throw std::invalid_argument("lp_integrals needs a finite exponent");
  const std::size_t i = p_index(p);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(std::pow(r.lp_norms[i], p));
  return out;
}

std::vector<double> TimeSeries::times() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.t);
  return out;
}

Recorder::Recorder(std::vector<double> p_list, double r_star, const VagueProbe& probe)
    : p_list_(std::move(p_list)), r_star_(r_star), probe_(probe) {
  for (double p : p_list_) {
    if (!(p >= 1.0)) throw std::invalid_argument("recorded exponents must be >= 1");
  }
  if (!(r_star >= 1.0)) throw std::invalid_argument("r* must be >= 1");
}

TimeSeries Recorder::empty_series(const Grid& grid) const {
  TimeSeries s;
  s.p_list = p_list_;
  s.r_star = r_star_;
  s.dim = grid.dim();
  s.domain_volume = grid.domain_volume();
  return s;
}

TimeSeriesRecord Recorder::record(const SimState& state, double dt, bool blowup) const {
  TimeSeriesRecord r;
  r.t = state.t;
  r.step = state.step_count;
  r.dt = dt;
  r.mass = integrate(state.u);
  for (double p : p_list_) r.lp_norms.push_back(lp_norm(state.u, p));
  r.grad_energy_u = gradient_energy(state.u, 2.0);
  r.v_linf = state.v.max_abs();
  r.source_linf = regularized_source(state.u, state.eps).max_abs();
  const GridField grad_mag = gradient(state.v).cell_magnitude();
  r.v_w1p = lp_norm(state.v, r_star_) + lp_norm(grad_mag, r_star_);
  r.vague_distance = probe_.distance(state.u);
  GridField flux = grad_mag;
  for (std::size_t c = 0; c < flux.size(); ++c) flux[c] *= std::abs(state.u[c]);
  r.ugradv_l1 = integrate(flux);
  r.blowup = blowup;
  return r;
}

TimeSeriesRecord record(const SimState& state, const RadonMeasure& measure,
                        const TestDictionary& dictionary, const std::vector<double>& p_list,
                        double r_star) {
  const VagueProbe probe(measure, dictionary);
  return Recorder(p_list, r_star, probe).record(state, 0.0, false);
}

std::vector<std::string> csv_header(const std::vector<double>& p_list) {
  std::vector<std::string> h{"t", "step", "dt", "mass"};
  for (double p : p_list) h.push_back(p_label(p));
  for (const char* name : {"grad_energy_u", "v_linf", "source_linf", "v_w1p",
                           "vague_distance", "ugradv_l1", "blowup"}) {
    h.emplace_back(name);
  }
  return h;
}

void write_csv(std::ostream& out, const TimeSeries& series) {
  const auto header = csv_header(series.p_list);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : series.rows) {
    out << fmt(r.t) << ',' << r.step << ',' << fmt(r.dt) << ',' << fmt(r.mass);
    for (double x : r.lp_norms) out << ',' << fmt(x);
    out << ',' << fmt(r.grad_energy_u) << ',' << fmt(r.v_linf) << ','
        << fmt(r.source_linf) << ',' << fmt(r.v_w1p) << ',' << fmt(r.vague_distance)
        << ',' << fmt(r.ugradv_l1) << ',' << (r.blowup ? 1 : 0) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_csv(out, series);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

TimeSeries read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("time-series CSV is empty");
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  TimeSeries s;
  for (const auto& n : names) {
    if (n.rfind("lp_", 0) == 0) s.p_list.push_back(parse_p_label(n));
  }
  if (names != csv_header(s.p_list)) {
    throw std::runtime_error("time-series CSV header does not match the expected columns");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("time-series CSV line " + std::to_string(line_no) +
                                 ": bad number '" + cell + "'");
      }
    }
    if (v.size() != names.size()) {
      throw std::runtime_error("time-series CSV line " + std::to_string(line_no) +
                               ": wrong column count");
    }
    TimeSeriesRecord r;
    std::size_t i = 0;
    r.t = v[i++];
    r.step = static_cast<long>(v[i++]);
    r.dt = v[i++];
    r.mass = v[i++];
    for (std::size_t k = 0; k < s.p_list.size(); ++k) r.lp_norms.push_back(v[i++]);
    r.grad_energy_u = v[i++];
    r.v_linf = v[i++];
    r.source_linf = v[i++];
    r.v_w1p = v[i++];
    r.vague_distance = v[i++];
    r.ugradv_l1 = v[i++];
    r.blowup = v[i++] != 0.0;
    s.rows.push_back(std::move(r));
  }
  return s;
}

TimeSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

InequalityReport central_inequality_check(const TimeSeries& series, double p, int n,
                                          TimeWindow window) {
  if (!(p > 1.0) || std::isinf(p)) {
    throw std::invalid_argument("central inequality needs a finite p > 1");
  }
  if (n != 2 && n != 3) throw std::invalid_argument("central inequality needs n in {2,3}");
  InequalityReport rep;
  rep.p = p;
  rep.n = n;
  rep.exponent_expected = 1.0 + 2.0 / (n * (p - 1.0));

  std::vector<double> t;
  std::vector<double> y;
  const auto all_y = series.lp_integrals(p);
  double mass = 0.0;
  for (std::size_t k = 0; k < series.rows.size(); ++k) {
    if (!window.contains(series.rows[k].t)) continue;
    t.push_back(series.rows[k].t);
    y.push_back(all_y[k]);
    mass = series.rows[k].mass;
  }
  if (t.size() < 10) {
    throw std::invalid_argument("central inequality window holds fewer than 10 records");
  }
  rep.scale = std::pow(mass, p) * std::pow(series.domain_volume, 1.0 - p);
  for (double& x : y) x /= rep.scale;

  const double a = rep.exponent_expected;
  constexpr double kBand = 1e-3;  // Y within 1 + kBand counts as equilibrium
  std::vector<double> deriv(t.size(), 0.0);
  double c_hat = kInf;
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    const double hm = t[k] - t[k - 1];
    const double hp = t[k + 1] - t[k];
    if (!(hm > 0.0 && hp > 0.0)) continue;
    // Second-order centered difference on a nonuniform record grid.
    const double d = (hm * hm * (y[k + 1] - y[k]) + hp * hp * (y[k] - y[k - 1])) /
                     (hm * hp * (hm + hp));
    deriv[k] = d;
    ++rep.records_used;
    if (y[k] > 2.0 && d >= 0.0) {
      ++rep.violation_count;
      rep.max_violation = std::max(rep.max_violation, d / y[k]);
    }
    if (y[k] > 1.0 + kBand && d < 0.0) {
      c_hat = std::min(c_hat, -d / (std::pow(y[k], a) - 1.0));
    }
  }
  rep.constrained = std::isfinite(c_hat);
  // With Y pinned at the constant state every C satisfies the inequality.
  rep.decay_coefficient = rep.constrained ? c_hat : 1.0;
  const double C = rep.decay_coefficient;

  rep.offset = -kInf;
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    rep.offset = std::max(rep.offset, deriv[k] + C * std::pow(y[k], a));
  }
  rep.bound_ratio_max = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0)) continue;
    rep.bound_ratio_max = std::max(rep.bound_ratio_max, y[k] / bound_value(C, C, a, t[k]));
  }
  rep.bound_holds = rep.bound_ratio_max <= 1.0;
  return rep;
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) {
    throw std::invalid_argument("slope fit needs at least two matching points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("log-log fit needs positive values");
    }
    const double x = std::log(t[i]);
    const double z = std::log(y[i]);
    sx += x;
    sy += z;
    sxx += x * x;
    sxy += x * z;
  }
  const double m = static_cast<double>(t.size());
  const double denom = m * sxx - sx * sx;
  if (!(denom > 0.0)) throw std::invalid_argument("slope fit needs distinct times");
  return (m * sxy - sx * sy) / denom;
}

double smoothing_rate_fit(const TimeSeries& series, double p, TimeWindow window) {
  const auto all_y = series.lp_integrals(p);
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t k = 0; k < series.rows.size(); ++k) {
    if (!window.contains(series.rows[k].t)) continue;
    t.push_back(series.rows[k].t);
    y.push_back(all_y[k]);
  }
  return loglog_slope(t, y);
}

VagueContinuityTable vague_continuity_check(const TimeSeries& series,
                                            const std::vector<double>& delta_grid,
                                            double acceptance_value,
                                            TimeWindow monotone_window, double ripple) {
  VagueContinuityTable table;
  table.acceptance_value = acceptance_value;
  for (double delta : delta_grid) {
    VagueContinuityRow row{delta, std::nullopt};
    for (const auto& r : series.rows) {
      if (r.t > 0.0 && r.vague_distance > delta) {
        row.first_exceed_time = r.t;
        break;
      }
    }
    table.rows.push_back(row);
  }
  const auto first = std::find_if(series.rows.begin(), series.rows.end(),
                                  [](const TimeSeriesRecord& r) { return r.t > 0.0; });
  if (first == series.rows.end()) return table;
  table.earliest_time = first->t;
  table.earliest_distance = first->vague_distance;

  // Scan backwards keeping the running minimum over later times.
  double later_min = kInf;
  table.max_ripple = 0.0;
  for (auto it = series.rows.rbegin(); it != series.rows.rend(); ++it) {
    if (!(it->t > 0.0) || !monotone_window.contains(it->t)) continue;
    if (std::isfinite(later_min)) {
      const double excess = later_min > 0.0 ? it->vague_distance / later_min - 1.0
                                            : (it->vague_distance > 0.0 ? kInf : 0.0);
      table.max_ripple = std::max(table.max_ripple, excess);
    }
    later_min = std::min(later_min, it->vague_distance);
  }
  table.monotone = table.max_ripple <= ripple;
  table.passed = table.monotone && table.earliest_distance <= acceptance_value;
  return table;
}

FluxIntegrals grad_flux_time_integrals(const TimeSeries& series, double t0, double t1) {
  if (!(t0 < t1)) throw std::invalid_argument("time integral needs t0 < t1");
  FluxIntegrals out;
  const TimeSeriesRecord* prev = nullptr;
  for (const auto& r : series.rows) {
    if (r.t < t0 || r.t > t1) continue;
    if (prev) {
      const double h = r.t - prev->t;
      out.int_grad_u_sq += 0.5 * h * (r.grad_energy_u + prev->grad_energy_u);
      out.int_ugradv_l1 += 0.5 * h * (r.ugradv_l1 + prev->ugradv_l1);
    }
    prev = &r;
  }
  return out;
}

std::vector<double> cumulative_ugradv(const TimeSeries& series) {
  std::vector<double> out;
  out.reserve(series.rows.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < series.rows.size(); ++k) {
    if (k > 0) {
      const auto& a = series.rows[k - 1];
      const auto& b = series.rows[k];
      acc += 0.5 * (b.t - a.t) * (a.ugradv_l1 + b.ugradv_l1);
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace kslab
