#include "kslab/snapshot_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kslab {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_snapshot(std::ostream& out, const GridField& field) {
  const Grid& g = field.grid();
  out << "KSLAB1 " << g.dim();
  for (int a = 0; a < g.dim(); ++a) out << ' ' << g.cells(a);
  for (int a = 0; a < g.dim(); ++a) out << ' ' << format_double(g.length(a));
  out << '\n';
  const int nx = g.cells(0);
  for (std::size_t c = 0; c < field.size(); ++c) {
    out << format_double(field[c]);
    out << (((c + 1) % static_cast<std::size_t>(nx)) == 0 ? '\n' : ' ');
  }
}

void write_snapshot(const std::filesystem::path& path, const GridField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
  write_snapshot(out, field);
  if (!out) throw std::runtime_error("failed writing snapshot: " + path.string());
}

GridField read_snapshot(std::istream& in) {
  std::string magic;
  if (!(in >> magic) || magic != "KSLAB1") {
    throw std::runtime_error("snapshot: missing KSLAB1 header");
  }
  int dim = 0;
  if (!(in >> dim) || (dim != 2 && dim != 3)) {
    throw std::runtime_error("snapshot: header dimension must be 2 or 3");
  }
  std::vector<int> cells(dim);
  std::vector<double> lengths(dim);
  for (int& n : cells) {
    if (!(in >> n)) throw std::runtime_error("snapshot: bad cell count in header");
  }
  for (double& l : lengths) {
    if (!(in >> l)) throw std::runtime_error("snapshot: bad length in header");
  }
  Grid grid = Grid::build(dim, lengths, cells);
  std::vector<double> values(grid.size());
  for (std::size_t c = 0; c < values.size(); ++c) {
    std::string tok;
    if (!(in >> tok)) {
      throw std::runtime_error("snapshot: expected " + std::to_string(values.size()) +
                               " values, found " + std::to_string(c));
    }
    std::size_t used = 0;
    try {
      values[c] = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw std::runtime_error("snapshot: non-numeric value '" + tok + "' at index " +
                               std::to_string(c));
    }
  }
  std::string extra;
  if (in >> extra) throw std::runtime_error("snapshot: trailing data after values");
  return GridField(std::move(grid), std::move(values));
}

GridField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
  return read_snapshot(in);
}

}  // namespace kslab
