#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace kslab {

/// Cell-centered structured mesh on the box [0,L_x] x [0,L_y] (x [0,L_z]).
///
/// Cells are indexed lexicographically with x fastest:
///   index = i + n_x * (j + n_y * k).
/// A 2D grid carries a single dummy cell along z (n_z = 1, h_z = 1) so the
/// same loops serve both dimensions; the dummy axis never enters a stencil.
class Grid {
 public:
  static constexpr int kMinCells = 4;

  /// Throws std::invalid_argument for dim outside {2,3}, nonpositive
  /// lengths, or fewer than kMinCells cells along any axis.
  static Grid build(int dim, std::span<const double> lengths,
                    std::span<const int> cells);

  int dim() const { return dim_; }
  double length(int axis) const { return lengths_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  double h(int axis) const { return h_[axis]; }
  double max_h() const;
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  double domain_volume() const;

  std::size_t index(int i, int j, int k = 0) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(cells_[0]) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(cells_[1]) * static_cast<std::size_t>(k));
  }
  std::array<int, 3> coords(std::size_t idx) const;
  /// Cell-center coordinate along one axis.
  double center(int axis, int i) const { return (i + 0.5) * h_[axis]; }
  std::array<double, 3> center(std::size_t idx) const;
  /// Index stride between neighbours along an axis.
  std::size_t stride(int axis) const;

  bool contains(const std::array<double, 3>& x) const;
  bool same_shape(const Grid& other) const;

 private:
  Grid() = default;

  int dim_ = 2;
  std::array<double, 3> lengths_{1.0, 1.0, 1.0};
  std::array<int, 3> cells_{1, 1, 1};
  std::array<double, 3> h_{1.0, 1.0, 1.0};
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Scalar field sampled at cell centers.
class GridField {
 public:
  explicit GridField(Grid grid, double fill = 0.0);
  GridField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double max() const;
  double min() const;
  double max_abs() const;
  bool all_finite() const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);

/// Sample a closed-form function at cell centers.
template <class F>
GridField sample(const Grid& grid, F&& f) {
  GridField out(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) out[c] = f(grid.center(c));
  return out;
}

/// Midpoint-rule integral. Throws std::domain_error if the field holds
/// NaN or Inf.
double integrate(const GridField& field);

/// (int |f|^p)^(1/p) by the midpoint rule; p = infinity gives max |f|.
/// Throws std::invalid_argument for p < 1.
double lp_norm(const GridField& field, double p);

/// int |f|^p, the quantity the smoothing estimates are stated for.
double lp_integral(const GridField& field, double p);

/// int |grad(f^(p/2))|^2 using face differences between neighbouring cell
/// centers. Boundary faces carry zero flux (mirrored ghost cells).
double gradient_energy(const GridField& field, double p);

/// Largest |value| by which `field` dips below zero relative to its max,
/// i.e. max(0, -min) / max(max, tiny).
double relative_negativity(const GridField& field);

}  // namespace kslab
