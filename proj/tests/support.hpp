#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "kslab/grid.hpp"

namespace testsupport {

inline kslab::Grid grid2(int nx, int ny, double lx = 1.0, double ly = 1.0) {
  const std::vector<double> l{lx, ly};
  const std::vector<int> c{nx, ny};
  return kslab::Grid::build(2, l, c);
}

inline kslab::Grid grid3(int nx, int ny, int nz, double lx = 1.0, double ly = 1.0,
                         double lz = 1.0) {
  const std::vector<double> l{lx, ly, lz};
  const std::vector<int> c{nx, ny, nz};
  return kslab::Grid::build(3, l, c);
}

// Fresh scratch directory below the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::path(KSLAB_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Centred Gaussian exp(-|x-c|^2/eps) on a 2D grid, normalized to `mass`
// by direct summation.
inline std::vector<double> gaussian_cells(const kslab::Grid& g, double cx, double cy, double eps,
                                          double mass) {
  std::vector<double> out(g.size());
  double total = 0.0;
  for (int j = 0; j < g.cells(1); ++j) {
    for (int i = 0; i < g.cells(0); ++i) {
      const double x = (i + 0.5) * g.h(0) - cx, y = (j + 0.5) * g.h(1) - cy;
      out[i + j * g.cells(0)] = std::exp(-(x * x + y * y) / eps);
      total += out[i + j * g.cells(0)];
    }
  }
  for (double& v : out) v *= mass / (total * g.h(0) * g.h(1));
  return out;
}

}  // namespace testsupport
