#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

enum class EllipticMethod { transform, conjugate_gradient };

const char* to_string(EllipticMethod m);

struct EllipticSolveReport {
  EllipticMethod method = EllipticMethod::transform;
  int iterations = 0;
  /// ||A x - b||_2 / ||b||_2 of the returned solution.
  double residual_l2 = 0.0;
  double wall_time = 0.0;  // seconds
};

class EllipticNonConvergence : public std::runtime_error {
 public:
  EllipticNonConvergence(const std::string& what, EllipticSolveReport report)
      : std::runtime_error(what), report_(report) {}
  const EllipticSolveReport& report() const { return report_; }

 private:
  EllipticSolveReport report_;
};

/// Standard 5/7-point Laplacian with mirrored ghost cells.
GridField apply_laplacian(const GridField& f);

/// Eigenvalue of -Delta_h for the discrete cosine mode k on `grid`:
/// sum_a (2/h_a^2)(1 - cos(pi k_a / n_a)).
double discrete_eigenvalue(const Grid& grid, const std::array<int, 3>& k);

/// Solves (shift I - diffusion Delta_h) x = rhs with homogeneous Neumann
/// conditions. Owns its transform plans and scratch buffers, so one instance
/// must not be shared between threads; separate instances are independent.
class NeumannSolver {
 public:
  NeumannSolver(const Grid& grid, EllipticMethod method, double tol = 1e-10,
                int max_iterations = 20000);
  ~NeumannSolver();
  NeumannSolver(NeumannSolver&&) noexcept;
  NeumannSolver& operator=(NeumannSolver&&) noexcept;
  NeumannSolver(const NeumannSolver&) = delete;
  NeumannSolver& operator=(const NeumannSolver&) = delete;

  /// Throws EllipticNonConvergence when the iterative path hits its cap or
  /// the final relative residual exceeds the tolerance.
  GridField solve(const GridField& rhs, double shift, double diffusion,
                  EllipticSolveReport* report = nullptr);

  const Grid& grid() const { return grid_; }
  EllipticMethod method() const { return method_; }
  double tolerance() const { return tol_; }

 private:
  GridField solve_transform(const GridField& rhs, double shift, double diffusion);
  GridField solve_cg(const GridField& rhs, double shift, double diffusion, int* iterations);

  struct Transform;
  Grid grid_;
  EllipticMethod method_;
  double tol_;
  int max_iterations_;
  std::unique_ptr<Transform> transform_;
};

/// v solving 0 = Delta_h v - v + source with homogeneous Neumann conditions.
/// Requires tol in (0, 1e-6] and a nonnegative finite source.
std::pair<GridField, EllipticSolveReport> solve_helmholtz_neumann(
    const GridField& source, double tol = 1e-10,
    EllipticMethod method = EllipticMethod::transform);

struct ContractionCheck {
  double lhs = 0.0;  // ||v||_r
  double rhs = 0.0;  // ||source||_r
  bool ok = false;   // lhs <= rhs (1 + 1e-8)
};

ContractionCheck contraction_check(const GridField& v, const GridField& source, double r);

/// Face-centered gradient. Axis a stores (n_a + 1) faces along a; face i
/// sits between cells i-1 and i. Boundary faces are exactly zero.
class FaceGradient {
 public:
  explicit FaceGradient(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t face_count(int axis) const { return faces_[axis].size(); }
  std::size_t face_index(int axis, int i, int j, int k) const;
  double& at(int axis, std::size_t f) { return faces_[axis][f]; }
  double at(int axis, std::size_t f) const { return faces_[axis][f]; }
  std::span<const double> faces(int axis) const { return faces_[axis]; }

  double max_abs(int axis) const;
  /// Average of the two faces bounding each cell, per axis.
  GridField cell_component(int axis) const;
  GridField cell_magnitude() const;

 private:
  Grid grid_;
  std::array<std::vector<double>, 3> faces_;
};

FaceGradient gradient(const GridField& v);

}  // namespace kslab
