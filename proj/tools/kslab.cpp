// Command-line front end: run, sweep, ladder, verify and s3-density.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kslab/config.hpp"
#include "kslab/runner.hpp"
#include "kslab/verification.hpp"

namespace {

using namespace kslab;

void print_warnings(const SimConfig& config) {
  for (const auto& w : config.validate()) std::cerr << "warning: " << w << '\n';
}

int do_run(const std::string& path) {
  const SimConfig config = load_config(path);
  print_warnings(config);
  const RunResult r = run(config);
  std::cout << "output: " << r.output_dir.string() << '\n'
            << "final t: " << r.manifest.final_t << "  steps: " << r.manifest.steps << '\n'
            << "mass drift: " << r.manifest.mass_max_rel_drift << '\n';
  if (r.manifest.blowup.triggered) {
    std::cout << "blow-up: " << to_string(r.manifest.blowup.reason)
              << " at t = " << r.manifest.blowup.t_detect << '\n';
  }
  return r.exit_code;
}

int do_sweep(const std::string& path, const std::vector<double>& masses, double target_ratio,
             unsigned jobs) {
  const SimConfig config = load_config(path);
  SweepOptions opt;
  opt.target_ratio = target_ratio;
  opt.jobs = jobs;
  const SweepReport rep = mass_sweep(config, masses, opt);
  std::cout << rep.to_json() << '\n';
  return kExitComplete;
}

int do_ladder(const std::string& path, unsigned jobs) {
  const SimConfig config = load_config(path);
  print_warnings(config);
  const LadderReport rep = eps_ladder(config, jobs);
  std::cout << rep.to_json() << '\n';
  return kExitComplete;
}

int do_verify(const std::string& suite, const std::string& work_dir, unsigned jobs) {
  VerifyOptions opt;
  opt.work_dir = work_dir;
  opt.jobs = jobs;
  opt.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
  const VerifyReport rep = verify(suite, opt);
  const auto dir = resolve_output_dir(opt.work_dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / ("verify_" + suite + ".json")) << rep.to_json() << '\n';
  std::cout << (rep.passed() ? "suite passed" : "suite FAILED") << '\n';
  return rep.passed() ? kExitComplete : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keller-Segel numerical laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<double> masses;
  double target_ratio = 1.5;
  unsigned jobs = 0;
  std::string suite;
  std::string work_dir = "kslab_verify";

  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("config", config_path, "Config file (JSON)")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Mass sweep for the 2D attractive case");
  sweep_cmd->add_option("config", config_path, "Config file (JSON)")->required();
  sweep_cmd->add_option("--masses", masses, "Initial masses (at least 4)")->required();
  sweep_cmd->add_option("--target-ratio", target_ratio, "Bisect until the bracket ratio is below this")
      ->check(CLI::Range(1.0001, 100.0));
  sweep_cmd->add_option("--jobs", jobs, "Concurrent runs (0 = hardware threads)");

  auto* ladder_cmd = app.add_subcommand("ladder", "Runs one config at every eps in physics.eps_ladder");
  ladder_cmd->add_option("config", config_path, "Config file (JSON)")->required();
  ladder_cmd->add_option("--jobs", jobs, "Concurrent runs (0 = hardware threads)");

  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("suite", suite, "unit, estimates, scenarios or all")->required();
  verify_cmd->add_option("--work-dir", work_dir, "Directory for run outputs");
  verify_cmd->add_option("--jobs", jobs, "Concurrent runs inside ladders and sweeps");

  std::string density_path;
  int density_cells = 64;
  auto* density_cmd =
      app.add_subcommand("s3-density", "Write the |x - c|^-1 density used by configs/s3_inverse_distance.json");
  density_cmd->add_option("path", density_path, "Output file")->required();
  density_cmd->add_option("--cells", density_cells, "Cells per axis")->check(CLI::Range(2, 1024));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return do_run(config_path);
    if (*sweep_cmd) return do_sweep(config_path, masses, target_ratio, jobs);
    if (*ladder_cmd) return do_ladder(config_path, jobs);
    if (*density_cmd) {
      write_inverse_distance_density(density_path, density_cells);
      std::cout << "wrote " << density_path << '\n';
      return kExitComplete;
    }
    if (*verify_cmd) {
      const auto& names = verify_suites();
      if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::cerr << "error: unknown suite '" << suite
                  << "' (expected unit, estimates, scenarios or all)\n";
        return kExitUsage;
      }
      return do_verify(suite, work_dir, jobs == 0 ? 1 : jobs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
