// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Usage: kslab_acceptance [work_dir] [jobs]

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "kslab/verification.hpp"

int main(int argc, char** argv) {
  kslab::VerifyOptions opt;
  opt.work_dir = argc > 1 ? argv[1] : "acceptance_runs";
  opt.jobs = argc > 2 ? static_cast<unsigned>(std::strtoul(argv[2], nullptr, 10)) : 1;
  if (opt.jobs == 0) opt.jobs = 1;
  opt.only = kslab::acceptance_ids();
  opt.on_result = [](const kslab::CriterionResult& r) {
    std::cout << kslab::format_result(r) << std::endl;
  };

  kslab::VerifyReport report;
  try {
    report = kslab::verify("all", opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  std::size_t passed = 0;
  for (const auto& c : report.criteria) passed += c.passed ? 1 : 0;
  std::filesystem::create_directories(opt.work_dir);
  std::ofstream(opt.work_dir / "acceptance.json") << report.to_json() << '\n';
  std::cout << passed << "/" << report.criteria.size() << " acceptance criteria passed\n";
  return report.criteria.size() == opt.only.size() && report.passed() ? 0 : 1;
}
