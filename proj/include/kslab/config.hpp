#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kslab/elliptic.hpp"
#include "kslab/grid.hpp"
#include "kslab/measures.hpp"
#include "kslab/stepper.hpp"

namespace kslab {

/// Admissible cases of the existence theory; `free` skips the check (used
/// for the chi = 0 heat-flow reductions and other controls).
enum class Scenario { S1, S2, S3, free };

const char* to_string(Scenario s);

/// Raised for malformed or inconsistent configuration. `field` is the
/// dotted key path (e.g. "domain.dim"); `line` is set for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, std::optional<int> line = {});
  const std::string& field() const { return field_; }
  std::optional<int> line() const { return line_; }

 private:
  std::string field_;
  std::optional<int> line_;
};

struct DomainConfig {
  int dim = 2;
  std::vector<double> lengths{1.0, 1.0};
  std::vector<int> cells{128, 128};
};

struct PhysicsConfig {
  double chi = -1.0;
  double eps = 0.01;
  /// Mollifier width; tied to eps when unset.
  std::optional<double> mollifier_eps;
  std::vector<double> eps_ladder;
  /// Critical-mass estimate used only for the S2 warning.
  std::optional<double> estimated_critical_mass;

  double effective_mollifier_eps() const { return mollifier_eps.value_or(eps); }
};

struct MeasureConfig {
  std::vector<Atom> atoms;
  std::optional<std::filesystem::path> density_file;
  double density_p = 2.0;
  std::optional<double> uniform_mass;
  /// Optional rescaling of the whole measure to this total mass.
  std::optional<double> total_mass;
};

struct TimeConfig {
  double T = 1.0;
  double cfl = 0.4;
  double dt_max = 1e-3;
  /// Geometric landmarks record_start * 2^k are hit exactly.
  double record_start = 1e-4;
  /// Uniform landmarks k * record_interval (defaults to T / 100).
  std::optional<double> record_interval;
  /// Record every n-th step (landmarks are always recorded).
  int record_every = 1;
};

struct DiagnosticsConfig {
  std::vector<double> p_list{1.5, 2.0, 2.5, 8.0, std::numeric_limits<double>::infinity()};
  int dictionary_order = 4;
  std::vector<double> delta_grid{1e-3, 1e-2, 1e-1};
  double r_star = 2.0;
  /// Vague-continuity acceptance: max(factor * d(u0, mu), floor).
  double vague_acceptance_factor = 2.0;
  double vague_acceptance_floor = 0.0;
  double vague_window_lo = 1e-4;
  double vague_window_hi = 1e-2;
};

struct SolverConfig {
  EllipticMethod method = EllipticMethod::transform;
  double tol = 1e-10;
};

struct OutputConfig {
  std::filesystem::path directory = "kslab_out";
  std::vector<double> snapshot_times;
};

struct LadderConfig {
  double t0 = 0.25;
  double uniformity_p = 2.5;
  double uniformity_lo = 0.1;
  std::optional<double> uniformity_hi;
};

struct SimConfig {
  Scenario scenario = Scenario::free;
  DomainConfig domain;
  PhysicsConfig physics;
  MeasureConfig initial_measure;
  TimeConfig time;
  DiagnosticsConfig diagnostics;
  BlowupThresholds blowup;
  SolverConfig solver;
  OutputConfig output;
  LadderConfig ladder;
  unsigned long seed = 0;
  /// Directory relative paths inside the file are resolved against.
  std::filesystem::path base_dir = ".";

  Grid grid() const;
  /// Builds the initial measure (loads density files, applies total_mass).
  RadonMeasure measure() const;
  /// Canonical JSON text; identical configs give identical text.
  std::string canonical_json() const;
  /// Scenario and range checks. Throws ConfigError. Returns warnings.
  std::vector<std::string> validate() const;
};

SimConfig parse_config(const std::string& text,
                       const std::filesystem::path& base_dir = ".");
SimConfig load_config(const std::filesystem::path& path);

}  // namespace kslab
