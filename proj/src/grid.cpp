#include "kslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kslab/summation.hpp"

namespace kslab {

Grid Grid::build(int dim, std::span<const double> lengths,
                 std::span<const int> cells) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("grid dimension must be 2 or 3, got " +
                                std::to_string(dim));
  }
  if (lengths.size() != static_cast<std::size_t>(dim) ||
      cells.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("grid needs exactly one length and one cell count per axis");
  }
  Grid g;
  g.dim_ = dim;
  g.size_ = 1;
  g.cell_volume_ = 1.0;
  for (int a = 0; a < dim; ++a) {
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw std::invalid_argument("grid lengths must be positive and finite");
    }
    if (cells[a] < kMinCells) {
      throw std::invalid_argument("grid too coarse: need at least " +
                                  std::to_string(kMinCells) + " cells per axis, axis " +
                                  std::to_string(a) + " has " + std::to_string(cells[a]));
    }
    g.lengths_[a] = lengths[a];
    g.cells_[a] = cells[a];
    g.h_[a] = lengths[a] / cells[a];
    g.size_ *= static_cast<std::size_t>(cells[a]);
    g.cell_volume_ *= g.h_[a];
  }
  return g;
}

double Grid::max_h() const {
  double m = 0.0;
  for (int a = 0; a < dim_; ++a) m = std::max(m, h_[a]);
  return m;
}

double Grid::domain_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= lengths_[a];
  return v;
}

std::array<int, 3> Grid::coords(std::size_t idx) const {
  const auto nx = static_cast<std::size_t>(cells_[0]);
  const auto ny = static_cast<std::size_t>(cells_[1]);
  return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
          static_cast<int>(idx / (nx * ny))};
}

std::array<double, 3> Grid::center(std::size_t idx) const {
  const auto c = coords(idx);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = center(a, c[a]);
  return x;
}

std::size_t Grid::stride(int axis) const {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(cells_[a]);
  return s;
}

bool Grid::contains(const std::array<double, 3>& x) const {
  for (int a = 0; a < dim_; ++a) {
    if (!(x[a] >= 0.0 && x[a] <= lengths_[a])) return false;
  }
  return true;
}

bool Grid::same_shape(const Grid& other) const {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (cells_[a] != other.cells_[a]) return false;
    if (std::abs(lengths_[a] - other.lengths_[a]) > 1e-12 * lengths_[a]) return false;
  }
  return true;
}

GridField::GridField(Grid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.size(), fill) {}

GridField::GridField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field size " + std::to_string(values_.size()) +
                                " does not match grid size " +
                                std::to_string(grid_.size()));
  }
}

double GridField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double GridField::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

bool GridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return std::isfinite(x); });
}

namespace {
void require_same_shape(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("field arithmetic on different grids");
}
}  // namespace

GridField& GridField::operator+=(const GridField& other) {
  require_same_shape(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  require_same_shape(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

double integrate(const GridField& field) {
  CompensatedSum sum;
  for (double x : field.values()) {
    if (!std::isfinite(x)) throw std::domain_error("integrate: field contains NaN or Inf");
    sum += x;
  }
  return sum.value() * field.grid().cell_volume();
}

double lp_integral(const GridField& field, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp exponent must be >= 1");
  if (std::isinf(p)) throw std::invalid_argument("lp_integral needs a finite exponent");
  CompensatedSum sum;
  for (double x : field.values()) sum += std::pow(std::abs(x), p);
  return sum.value() * field.grid().cell_volume();
}

double lp_norm(const GridField& field, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp exponent must be >= 1");
  if (std::isinf(p)) return field.max_abs();
  if (p == 1.0) return lp_integral(field, 1.0);
  return std::pow(lp_integral(field, p), 1.0 / p);
}

double gradient_energy(const GridField& field, double p) {
  if (!(p > 1.0) || std::isinf(p)) {
    throw std::invalid_argument("gradient_energy exponent must lie in (1, inf)");
  }
  const Grid& g = field.grid();
  std::vector<double> w(field.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    w[c] = std::pow(std::max(field[c], 0.0), 0.5 * p);
  }
  CompensatedSum sum;
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const double inv_h = 1.0 / g.h(a);
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (g.coords(c)[a] == g.cells(a) - 1) continue;
      const double d = (w[c + s] - w[c]) * inv_h;
      sum += d * d;
    }
  }
  return sum.value() * g.cell_volume();
}

double relative_negativity(const GridField& field) {
  const double mn = field.min();
  if (mn >= 0.0) return 0.0;
  const double scale = std::max(field.max_abs(), std::numeric_limits<double>::min());
  return -mn / scale;
}

}  // namespace kslab
