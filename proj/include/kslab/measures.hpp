#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

struct Atom {
  std::array<double, 3> position{0.0, 0.0, 0.0};
  double weight = 0.0;
};

/// Finite positive measure on the closed box: point atoms plus an optional
/// density sampled on a grid.
class RadonMeasure {
 public:
  /// Throws std::invalid_argument if a weight is not positive, the density
  /// holds negative or non-finite values, or the total mass is zero.
  explicit RadonMeasure(std::vector<Atom> atoms,
                        std::optional<GridField> density = std::nullopt);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<GridField>& density() const { return density_; }
  double mass() const { return mass_; }

  /// Integrability exponent recorded for density-type data (input L^p data).
  std::optional<double> lp_exponent() const { return lp_exponent_; }
  void set_lp_exponent(double p) { lp_exponent_ = p; }

  /// Same shape, total mass rescaled to `new_mass`.
  RadonMeasure scaled_to_mass(double new_mass) const;

  /// Throws std::invalid_argument if an atom lies outside the closed box or
  /// the density grid does not match `grid`.
  void check_fits(const Grid& grid) const;

 private:
  std::vector<Atom> atoms_;
  std::optional<GridField> density_;
  std::optional<double> lp_exponent_;
  double mass_ = 0.0;
};

RadonMeasure dirac(std::array<double, 3> position, double weight);
RadonMeasure uniform_measure(const Grid& grid, double mass);

/// Thrown when sqrt(eps) < 2 * max cell width.
class UnderResolvedMollifier : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gaussian smoothing of the measure at scale eps: every atom becomes
/// C exp(-|x - y|^2 / eps) truncated to the box, with C chosen so that the
/// discrete integral equals the atom weight. A density component is copied
/// and rescaled to its own mass. Atoms sitting exactly on the boundary are
/// moved one cell width inward (with a warning on std::clog).
GridField mollify(const RadonMeasure& measure, double eps, const Grid& grid);

/// Neumann-compatible test functions: products cos(k_a pi x_a / L_a) for
/// 0 <= k_a <= order on every axis. Entry 0 is the constant function.
class TestDictionary {
 public:
  static TestDictionary cosines(const Grid& grid, int order);
  static TestDictionary constant_only(const Grid& grid);

  std::size_t size() const { return modes_.size(); }
  bool empty() const { return modes_.empty(); }
  const std::vector<std::array<int, 3>>& modes() const { return modes_; }
  const Grid& grid() const { return grid_; }

  double evaluate(std::size_t k, const std::array<double, 3>& x) const;
  /// Values of function k at cell centers (precomputed).
  std::span<const double> sampled(std::size_t k) const { return samples_[k]; }

 private:
  TestDictionary(Grid grid, std::vector<std::array<int, 3>> modes);

  Grid grid_;
  std::vector<std::array<int, 3>> modes_;
  std::vector<std::vector<double>> samples_;
};

/// Integral of dictionary function k against the measure: atoms evaluated
/// pointwise, density by the midpoint rule.
double integrate_against(const RadonMeasure& measure, const TestDictionary& dict,
                         std::size_t k);

/// max_k | int field phi_k - int phi_k dmu |. Throws std::invalid_argument
/// for an empty dictionary or a field on a different grid.
double vague_distance(const GridField& field, const RadonMeasure& measure,
                      const TestDictionary& dict);

/// Precomputed right-hand sides for repeated distance evaluations against a
/// fixed measure.
class VagueProbe {
 public:
  VagueProbe(const RadonMeasure& measure, TestDictionary dict);
  double distance(const GridField& field) const;
  const TestDictionary& dictionary() const { return dict_; }

 private:
  TestDictionary dict_;
  std::vector<double> targets_;
};

/// Reads a density in snapshot format. Throws std::runtime_error on
/// negative or non-finite values and on a shape mismatch with `grid`.
RadonMeasure load_density(const std::filesystem::path& path, const Grid& grid, double p);

}  // namespace kslab
