#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "kslab/config.hpp"
#include "support.hpp"

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(KSLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("command-line exit codes") {
  const auto dir = testsupport::scratch("cli");
  CHECK(cli("") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("verify") == 2);
  CHECK(cli("verify everything") == 2);
  CHECK(cli("sweep " + (dir / "x.json").string()) == 2);

  write(dir / "bad.json", R"({"scenario": "S1", "domain": {"dim": 4}})");
  CHECK(cli("run " + (dir / "bad.json").string()) == 1);
  CHECK(cli("run " + (dir / "absent.json").string()) == 1);

  write(dir / "ok.json", R"({"scenario": "S1",
    "domain": {"dim": 2, "lengths": [1, 1], "cells": [16, 16]},
    "physics": {"chi": -1, "eps": 0.04},
    "initial_measure": {"atoms": [{"position": [0.5, 0.5], "weight": 1}]},
    "time": {"T": 0.05},
    "output": {"directory": ")" + (dir / "ok_out").string() + R"("}})");
  CHECK(cli("run " + (dir / "ok.json").string()) == 0);
  CHECK(std::filesystem::exists(dir / "ok_out" / "manifest.json"));

  write(dir / "boom.json", R"({"scenario": "S2",
    "domain": {"dim": 2, "lengths": [1, 1], "cells": [32, 32]},
    "physics": {"chi": 1, "eps": 1e-8, "mollifier_eps": 0.01},
    "initial_measure": {"atoms": [{"position": [0.5, 0.5], "weight": 500}]},
    "time": {"T": 0.1},
    "blowup": {"cell_mass_fraction": 0.1},
    "output": {"directory": "boom_out"}})");
  const std::string env = "KSLAB_OUTPUT_ROOT=" + dir.string() + " ";
  const std::string cmd = env + KSLAB_CLI_PATH + " run " + (dir / "boom.json").string() + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 3);
  CHECK(std::filesystem::exists(dir / "boom_out" / "manifest.json"));

  CHECK(cli("sweep " + (dir / "ok.json").string() + " --masses 1 2 3 4") == 1);
}

TEST_CASE("shipped configs load and the S3 density can be generated") {
  const auto dir = testsupport::scratch("cli_configs");
  for (const auto& entry : std::filesystem::directory_iterator(KSLAB_CONFIG_DIR)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(kslab::load_config(entry.path()));
  }
  std::filesystem::copy_file(std::filesystem::path(KSLAB_CONFIG_DIR) / "s3_inverse_distance.json",
                             dir / "s3.json", std::filesystem::copy_options::overwrite_existing);
  const kslab::SimConfig s3 = kslab::load_config(dir / "s3.json");
  CHECK_THROWS(s3.measure());

  // The shipped config expects 64^3 cells; an 8^3 file must be rejected.
  CHECK(cli("s3-density " + (dir / "s3_density.txt").string() + " --cells 8") == 0);
  CHECK_THROWS(s3.measure());
  CHECK(cli("s3-density " + (dir / "s3_density.txt").string()) == 0);
  CHECK(s3.measure().mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cli("s3-density") == 2);
}
