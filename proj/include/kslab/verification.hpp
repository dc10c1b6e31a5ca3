#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kslab/config.hpp"

namespace kslab {

struct CriterionResult {
  std::string id;
  std::string suite;
  bool passed = false;
  std::string measured;  // key=value pairs
  double seconds = 0.0;
};

struct VerifyReport {
  std::string suite;
  std::vector<CriterionResult> criteria;

  bool passed() const;
  std::string to_json() const;
};

struct VerifyOptions {
  /// Runs write their outputs below this directory.
  std::filesystem::path work_dir = "kslab_verify";
  unsigned jobs = 1;
  unsigned long seed = 20240611;
  /// When non-empty, only criteria with these ids run.
  std::vector<std::string> only;
  /// Called after every criterion (progress printing).
  void (*on_result)(const CriterionResult&) = nullptr;
};

/// "unit", "estimates", "scenarios" and "all".
const std::vector<std::string>& verify_suites();

/// Runs every criterion of the suite. Failures are report entries; only an
/// unknown suite name throws (std::invalid_argument).
VerifyReport verify(const std::string& suite, const VerifyOptions& options = {});

/// Ids of the acceptance criteria, in suite order.
std::vector<std::string> acceptance_ids();

/// One line per criterion: "PASS id  measured  (secs)".
std::string format_result(const CriterionResult& r);

// Standard experiments shared by the verification suite and configs/.

/// 2D, chi = -1, unit-mass Dirac at the centre of the unit square, 128^2, T = 1.
SimConfig standard_s1();
/// chi = 0 counterpart of the S1 run on [0, T].
SimConfig standard_heat(double mollifier_eps, double T, double dt_max);
/// 2D, chi = 1 attractive Dirac used by the mass sweep.
SimConfig standard_sweep(int cells);
std::vector<double> standard_sweep_masses();
/// Writes the 3D density |x - c|^-1 (in L^2) sampled on a cells^3 grid.
void write_inverse_distance_density(const std::filesystem::path& path, int cells);
/// 3D, chi = -1, density data normalized to unit mass, T = 0.5.
SimConfig standard_s3(const std::filesystem::path& density_file, int cells);

/// Continuum Neumann heat flow on [0,1]^2 started from the Gaussian
/// exp(-|x - c|^2 / eps) rescaled to the given mass on `grid`, evaluated at
/// cell centres by a cosine series with quadrature coefficients.
GridField heat_series_oracle(const Grid& grid, double cx, double cy, double eps, double mass,
                             double t);

}  // namespace kslab
