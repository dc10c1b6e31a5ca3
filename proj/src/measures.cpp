#include "kslab/measures.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

#include "kslab/snapshot_io.hpp"
#include "kslab/summation.hpp"

namespace kslab {

RadonMeasure::RadonMeasure(std::vector<Atom> atoms, std::optional<GridField> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
  for (const Atom& a : atoms_) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw std::invalid_argument("measure atoms need positive finite weights");
    }
    mass_ += a.weight;
  }
  if (density_) {
    for (double x : density_->values()) {
      if (!std::isfinite(x) || x < 0.0) {
        throw std::invalid_argument("measure density must be nonnegative and finite");
      }
    }
    mass_ += integrate(*density_);
  }
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) {
    throw std::invalid_argument("measure must have positive finite total mass");
  }
}

RadonMeasure RadonMeasure::scaled_to_mass(double new_mass) const {
  if (!(new_mass > 0.0)) throw std::invalid_argument("target mass must be positive");
  const double s = new_mass / mass_;
  std::vector<Atom> atoms = atoms_;
  for (Atom& a : atoms) a.weight *= s;
  std::optional<GridField> density = density_;
  if (density) *density *= s;
  RadonMeasure out(std::move(atoms), std::move(density));
  out.lp_exponent_ = lp_exponent_;
  return out;
}

void RadonMeasure::check_fits(const Grid& grid) const {
  for (const Atom& a : atoms_) {
    if (!grid.contains(a.position)) {
      throw std::invalid_argument("measure atom lies outside the closed box");
    }
  }
  if (density_ && !density_->grid().same_shape(grid)) {
    throw std::invalid_argument("measure density grid does not match simulation grid");
  }
}

RadonMeasure dirac(std::array<double, 3> position, double weight) {
  return RadonMeasure({Atom{position, weight}});
}

RadonMeasure uniform_measure(const Grid& grid, double mass) {
  return RadonMeasure({}, GridField(grid, mass / grid.domain_volume()));
}

namespace {

Atom nudge_inside(const Atom& atom, const Grid& grid) {
  Atom out = atom;
  bool moved = false;
  for (int a = 0; a < grid.dim(); ++a) {
    if (out.position[a] <= 0.0) {
      out.position[a] = grid.h(a);
      moved = true;
    } else if (out.position[a] >= grid.length(a)) {
      out.position[a] = grid.length(a) - grid.h(a);
      moved = true;
    }
  }
  if (moved) {
    std::clog << "warning: boundary atom moved one cell width inward\n";
  }
  return out;
}

}  // namespace

GridField mollify(const RadonMeasure& measure, double eps, const Grid& grid) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("mollifier eps must lie in (0, 1]");
  }
  measure.check_fits(grid);
  GridField out(grid, 0.0);
  if (!measure.atoms().empty() && std::sqrt(eps) < 2.0 * grid.max_h()) {
    throw UnderResolvedMollifier("under-resolved mollifier: sqrt(eps) = " +
                                 std::to_string(std::sqrt(eps)) +
                                 " is below twice the cell width " +
                                 std::to_string(grid.max_h()));
  }

  std::array<std::vector<double>, 3> profile;
  for (const Atom& raw : measure.atoms()) {
    const Atom atom = nudge_inside(raw, grid);
    // The kernel factorizes across axes.
    for (int a = 0; a < 3; ++a) {
      profile[a].assign(static_cast<std::size_t>(grid.cells(a)), 1.0);
      if (a >= grid.dim()) continue;
      for (int i = 0; i < grid.cells(a); ++i) {
        const double d = grid.center(a, i) - atom.position[a];
        profile[a][i] = std::exp(-d * d / eps);
      }
    }
    CompensatedSum total;
    std::vector<double> bump(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const auto ijk = grid.coords(c);
      bump[c] = profile[0][ijk[0]] * profile[1][ijk[1]] * profile[2][ijk[2]];
      total += bump[c];
    }
    const double scale = atom.weight / (total.value() * grid.cell_volume());
    for (std::size_t c = 0; c < grid.size(); ++c) out[c] += scale * bump[c];
  }

  // Densities live on the simulation grid already (check_fits), so sampling
  // is the identity and the discrete mass is unchanged.
  if (const auto& density = measure.density()) out += *density;
  return out;
}

TestDictionary::TestDictionary(Grid grid, std::vector<std::array<int, 3>> modes)
    : grid_(std::move(grid)), modes_(std::move(modes)) {
  samples_.reserve(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    std::vector<double> s(grid_.size());
    for (std::size_t c = 0; c < grid_.size(); ++c) s[c] = evaluate(k, grid_.center(c));
    samples_.push_back(std::move(s));
  }
}

TestDictionary TestDictionary::cosines(const Grid& grid, int order) {
  if (order < 0) throw std::invalid_argument("dictionary order must be >= 0");
  std::vector<std::array<int, 3>> modes;
  const int kz_max = grid.dim() == 3 ? order : 0;
  for (int kz = 0; kz <= kz_max; ++kz) {
    for (int ky = 0; ky <= order; ++ky) {
      for (int kx = 0; kx <= order; ++kx) modes.push_back({kx, ky, kz});
    }
  }
  return TestDictionary(grid, std::move(modes));
}

TestDictionary TestDictionary::constant_only(const Grid& grid) {
  return TestDictionary(grid, {{0, 0, 0}});
}

double TestDictionary::evaluate(std::size_t k, const std::array<double, 3>& x) const {
  double v = 1.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    if (modes_[k][a] != 0) {
      v *= std::cos(modes_[k][a] * std::numbers::pi * x[a] / grid_.length(a));
    }
  }
  return v;
}

double integrate_against(const RadonMeasure& measure, const TestDictionary& dict,
                         std::size_t k) {
  CompensatedSum sum;
  for (const Atom& a : measure.atoms()) sum += a.weight * dict.evaluate(k, a.position);
  if (const auto& density = measure.density()) {
    const auto phi = dict.sampled(k);
    CompensatedSum q;
    for (std::size_t c = 0; c < density->size(); ++c) q += (*density)[c] * phi[c];
    sum += q.value() * density->grid().cell_volume();
  }
  return sum.value();
}

VagueProbe::VagueProbe(const RadonMeasure& measure, TestDictionary dict)
    : dict_(std::move(dict)) {
  if (dict_.empty()) throw std::invalid_argument("vague distance needs a nonempty dictionary");
  measure.check_fits(dict_.grid());
  targets_.reserve(dict_.size());
  for (std::size_t k = 0; k < dict_.size(); ++k) {
    targets_.push_back(integrate_against(measure, dict_, k));
  }
}

double VagueProbe::distance(const GridField& field) const {
  if (!field.grid().same_shape(dict_.grid())) {
    throw std::invalid_argument("vague distance: field grid differs from dictionary grid");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < dict_.size(); ++k) {
    const auto phi = dict_.sampled(k);
    CompensatedSum s;
    for (std::size_t c = 0; c < field.size(); ++c) s += field[c] * phi[c];
    const double lhs = s.value() * field.grid().cell_volume();
    worst = std::max(worst, std::abs(lhs - targets_[k]));
  }
  return worst;
}

double vague_distance(const GridField& field, const RadonMeasure& measure,
                      const TestDictionary& dict) {
  return VagueProbe(measure, dict).distance(field);
}

RadonMeasure load_density(const std::filesystem::path& path, const Grid& grid, double p) {
  GridField f = read_snapshot(path);
  if (!f.grid().same_shape(grid)) {
    throw std::runtime_error("density file " + path.string() +
                             " does not match the simulation grid shape");
  }
  for (std::size_t c = 0; c < f.size(); ++c) {
    if (!std::isfinite(f[c]) || f[c] < 0.0) {
      throw std::runtime_error("density file " + path.string() +
                               " has a negative or non-finite value at cell " +
                               std::to_string(c));
    }
  }
  if (!(p >= 1.0)) throw std::invalid_argument("density integrability exponent must be >= 1");
  RadonMeasure m({}, GridField(grid, std::vector<double>(f.values().begin(), f.values().end())));
  m.set_lp_exponent(p);
  return m;
}

}  // namespace kslab
