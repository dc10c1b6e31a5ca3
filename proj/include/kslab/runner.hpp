#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kslab/config.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/stepper.hpp"

namespace kslab {

inline constexpr int kExitComplete = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBlowup = 3;
inline constexpr int kExitMassCheck = 4;

inline constexpr const char* kOutputRootEnv = "KSLAB_OUTPUT_ROOT";
inline constexpr const char* kCodeVersion = "kslab 0.1.0";

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t h);
std::string file_checksum(const std::filesystem::path& path);

struct FileEntry {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string checksum;
};

struct RunManifest {
  std::string config_hash;
  std::string code_version = kCodeVersion;
  std::string scenario;
  double wall_time = 0.0;
  double final_t = 0.0;
  long steps = 0;
  double final_mass = 0.0;
  double final_linf_u = 0.0;
  double final_linf_v = 0.0;
  double initial_vague_distance = 0.0;
  double final_vague_distance = 0.0;
  BlowupReport blowup;
  /// Largest |mass_k - mass_0| / mass_0 read back from the written CSV.
  double mass_max_rel_drift = 0.0;
  bool mass_check_ok = false;
  EllipticSolveReport last_elliptic;
  std::vector<std::string> warnings;
  std::vector<FileEntry> files;
  int exit_code = kExitComplete;

  std::string to_json() const;
};

struct RunOptions {
  bool write_files = true;
  /// Times at which u is kept in memory (in addition to snapshot_times).
  std::vector<double> capture_times;
};

struct RunResult {
  RunManifest manifest;
  TimeSeries series;
  std::optional<SimState> final_state;
  std::map<double, GridField> captured_u;
  std::filesystem::path output_dir;
  int exit_code = kExitComplete;
};

/// Resolves output.directory against $KSLAB_OUTPUT_ROOT when it is relative.
std::filesystem::path resolve_output_dir(const std::filesystem::path& dir);

/// Times the stepper lands on exactly: record_start * 2^k, uniform records,
/// snapshot and capture times, and T.
std::vector<double> landmark_times(const SimConfig& config,
                                   const std::vector<double>& extra = {});

/// Mollifies the initial measure, steps to T or blow-up, writes CSV,
/// snapshots and manifest (when enabled), and re-validates the CSV mass
/// column. Config errors and solver failures before the first step throw.
RunResult run(const SimConfig& config, const RunOptions& options = {});

struct LadderLevel {
  double eps = 0.0;
  int exit_code = 0;
  double lp_sup = 0.0;  // sup over the uniformity window of int u^p
};

struct LadderReport {
  double t0 = 0.0;
  std::vector<LadderLevel> levels;
  /// ||u_eps(t0) - u_next(t0)||_inf for consecutive ladder entries.
  std::vector<double> adjacent_diffs;
  bool strictly_decreasing = false;
  double lp_spread = 0.0;  // (max - min) / min of lp_sup across levels

  std::string to_json() const;
};

/// Runs the config once per eps in physics.eps_ladder (at least 3 levels).
LadderReport eps_ladder(const SimConfig& config, unsigned jobs = 0);

struct SweepRun {
  double mass = 0.0;
  bool blowup = false;
  double t_detect = 0.0;
  std::string reason;
  int exit_code = 0;
};

struct SweepReport {
  std::vector<SweepRun> runs;  // sorted by mass
  std::optional<double> largest_complete;
  std::optional<double> smallest_blowup;
  bool bracketed = false;
  double ratio = 0.0;
  bool monotone = true;  // no completing run above a blow-up run
  std::string grid;
  std::string caveat;

  std::string to_json() const;
};

struct SweepOptions {
  double target_ratio = 1.5;
  int max_bisections = 12;
  unsigned jobs = 0;
};

/// Scans the given masses (at least 4) for the 2D attractive case, then
/// bisects geometrically until smallest_blowup / largest_complete is at most
/// target_ratio. Throws ConfigError unless dim = 2 and chi > 0.
SweepReport mass_sweep(const SimConfig& config, const std::vector<double>& masses,
                       const SweepOptions& options = {});

}  // namespace kslab
