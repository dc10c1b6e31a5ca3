#include <sstream>

#include "doctest.h"
#include "kslab/snapshot_io.hpp"
#include "support.hpp"

using namespace kslab;

TEST_CASE("snapshot round trip is bitwise") {
  for (const Grid& g : {testsupport::grid2(6, 5, 1.5, 0.75), testsupport::grid3(4, 5, 6)}) {
    const GridField f = sample(g, [](const std::array<double, 3>& x) {
      return std::exp(3.0 * x[0]) / 7.0 - x[1] * x[2] + 1e-300;
    });
    std::stringstream ss;
    write_snapshot(ss, f);
    const GridField back = read_snapshot(ss);
    REQUIRE(back.grid().same_shape(g));
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(back[i] == f[i]);
  }
}

TEST_CASE("snapshot header layout") {
  std::stringstream ss;
  write_snapshot(ss, GridField(testsupport::grid2(4, 4), 1.0));
  std::string magic;
  int dim = 0, nx = 0, ny = 0;
  ss >> magic >> dim >> nx >> ny;
  CHECK(magic == "KSLAB1");
  CHECK(dim == 2);
  CHECK(nx == 4);
}

TEST_CASE("malformed snapshots are rejected") {
  const auto bad = [](const std::string& text) {
    std::stringstream ss(text);
    return read_snapshot(ss);
  };
  CHECK_THROWS(bad("NOTKSL 2 4 4 1 1\n"));
  CHECK_THROWS(bad("KSLAB1 2 4 4 1 1\n1 2 3\n"));
  std::string full = "KSLAB1 2 4 4 1 1\n";
  for (int i = 0; i < 16; ++i) full += "1 ";
  CHECK_NOTHROW(bad(full));
  CHECK_THROWS(bad(full + "7\n"));
  std::string word = "KSLAB1 2 4 4 1 1\n";
  for (int i = 0; i < 15; ++i) word += "1 ";
  CHECK_THROWS(bad(word + "abc"));
}
