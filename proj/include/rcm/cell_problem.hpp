#pragma once

// The operator L^ω, the periodic corrector problem, harmonic coordinates,
// the effective covariance and Dirichlet problems on boxes.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

/// Periodic lattice (Z / L Z)^d with vertices stored first coordinate fastest.
class Torus {
 public:
  Torus(int dim, Coord side);

  int dim() const { return dim_; }
  Coord side() const { return side_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int direction) const { return strides_[static_cast<std::size_t>(direction)]; }

  /// Index of x mod L.
  std::size_t index(const Vertex& x) const;
  /// Representative in [0, L)^d.
  Vertex vertex(std::size_t index) const;

 private:
  int dim_;
  Coord side_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

/// Scalar field on a torus, read periodically at any vertex of Z^d.
class PeriodicField {
 public:
  PeriodicField(const Torus& torus, std::vector<double> values);
  explicit PeriodicField(const Torus& torus, double fill = 0.0);

  const Torus& torus() const { return torus_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator()(const Vertex& x) const { return values_[torus_.index(x)]; }

 private:
  Torus torus_;
  std::vector<double> values_;
};

/// Conductances of a torus, materialised per (vertex, direction). As a Medium
/// it is the periodic extension of the torus to Z^d.
class TorusConductances final : public Medium {
 public:
  TorusConductances(const Torus& torus, std::vector<double> values);

  /// Samples the bonds {x, x + e_i}, x in [0, L)^d, from a field. A torus
  /// field must have the same side.
  static TorusConductances sample(const ConductanceField& field, Coord side);

  const Torus& torus() const { return torus_; }
  int dim() const override { return torus_.dim(); }
  double conductance(const Vertex& lower, int direction) const override;

  double at(std::size_t index, int direction) const {
    return values_[index * static_cast<std::size_t>(torus_.dim()) + static_cast<std::size_t>(direction)];
  }
  std::span<const double> values() const { return values_; }

  /// max ω / min ω.
  double contrast() const;
  /// Torus average of μ^ω.
  double mean_mu() const;

 private:
  Torus torus_;
  std::vector<double> values_;
};

struct SolverOptions {
  double tol = 1e-10;
  int threads = 1;
  /// Overrides the default cap 50 · sqrt(unknowns) · sqrt(contrast).
  std::optional<int> max_iterations;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// L^ω u(x) = Σ_y ω(x, y)(u(y) - u(x)) on the vertices of B(c, n - 1).
ScalarField apply_operator(const Medium& medium, const ScalarField& u);
/// Same on every torus vertex.
PeriodicField apply_operator(const TorusConductances& omega, const PeriodicField& u, int threads = 1);

/// max_{x in region} |L^ω u(x)|; `region` must sit strictly inside u's box.
double max_harmonic_residual(const Medium& medium, const ScalarField& u, const Box& region);

struct CorrectorSolution {
  PeriodicField chi;
  SolveStats stats;
};

/// Solves ∇*(ω∇χ_j) = ∇*(ω∇Π_j) on the torus with Σ_x χ_j(x) = 0, by
/// Jacobi-preconditioned conjugate gradients with mean-zero projection.
/// Throws ConvergenceError at the iteration cap.
CorrectorSolution solve_corrector(const TorusConductances& omega, int direction, const SolverOptions& options = {});

struct CorrectorBundle {
  std::vector<PeriodicField> chi;
  std::vector<SolveStats> stats;
  Eigen::MatrixXd sigma2;
  double tol = 0.0;
};

/// All d correctors plus the effective covariance estimate.
CorrectorBundle solve_correctors(const TorusConductances& omega, const SolverOptions& options = {});

/// Φ_j(x) = x_j - χ_j(x mod L) + χ_j(0) on `region`, so that Φ_j(0) = 0.
ScalarField harmonic_coordinate(const PeriodicField& chi, int direction, const Box& region);

/// Σ̂²_ij = L^{-d} Σ_z Σ_{|x|=1} ω(z, z+x) DΦ_i(z; x) DΦ_j(z; x).
Eigen::MatrixXd effective_covariance(const TorusConductances& omega, const std::vector<PeriodicField>& chi);
/// 2 L^{-d} Σ_bonds ω ∇Φ_i ∇Φ_j, the bond-wise form of the same quantity.
Eigen::MatrixXd energy_covariance(const TorusConductances& omega, const std::vector<PeriodicField>& chi);

void write_corrector_csv(std::ostream& os, const CorrectorBundle& bundle);

struct DirichletSolution {
  ScalarField u;
  SolveStats stats;
  double max_interior_residual = 0.0;
  double residual_scale = 0.0;  // max ω · max |g|
};

/// Solves L^ω u = 0 in the interior of `boundary_data.box()` with u = g on
/// its boundary. Stops once max |L^ω u| <= tol · max ω · max |g|.
DirichletSolution solve_dirichlet(const Medium& medium, const ScalarField& boundary_data,
                                  const SolverOptions& options = {});

/// Amount by which an interior value exceeds the boundary max (or falls
/// below the boundary min); zero when the maximum principle holds.
double max_principle_violation(const ScalarField& u);

}  // namespace rcm
