#pragma once

// Experiments tying the modules together: corrector sublinearity curves,
// the multiscale covering bound, the planar ι-measure and Monte Carlo
// tests of the invariance principle.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rcm/cell_problem.hpp"
#include "rcm/environment.hpp"
#include "rcm/estimates.hpp"
#include "rcm/walker.hpp"

namespace rcm {

struct SublinearityPoint {
  Coord n = 0;
  std::vector<double> linf;  // (1/n) max_{B(n)} |χ_j|, per j
  std::vector<double> l1;    // (1/n) ||χ_j||_{L̲¹(B(n))}, per j
};

using SublinearityCurve = std::vector<SublinearityPoint>;

/// Both normalised norms of the periodised (mean-zero) correctors over
/// B(0, n). Radii must be positive, increasing and at most L/2.
SublinearityCurve sublinearity_curve(const std::vector<PeriodicField>& chi, const std::vector<Coord>& radii);

/// max_{B(n)}|χ_j| against
/// (m^d ||χ_j||_{L̲¹(B(2n))} + ⌊n/m⌋) sup_{z ∈ B(m)} Λ(B(⌊n/m⌋z, 2⌊n/m⌋))^{p'(1+1/δ)} + ⌊n/m⌋.
/// Needs m >= 1 and n >= m(m+1).
BoundReport multiscale_bound_estimate(const Medium& omega, const PeriodicField& chi, Coord n, Coord m,
                                      const MomentProfile& profile, double constant = kNoConstant);

/// ι_j(x) = Σ_{y~x} ω(x,y)(Φ_j(y) - Φ_j(x))², d = 2.
double iota_measure(const TorusConductances& omega, const std::vector<PeriodicField>& chi, const Vertex& x, int j);
/// Torus average of ι_j.
double iota_average(const TorusConductances& omega, const std::vector<PeriodicField>& chi, int j);

struct QfcltOptions {
  Coord n = 16;
  double horizon = 1.0;  // T
  std::size_t replicas = 5000;
  std::uint64_t seed = 1;
  WalkMode mode = WalkMode::kVariableSpeed;
  int threads = 1;
  double diagonal_tolerance = 0.10;     // relative
  double offdiagonal_tolerance = 5.0;   // standard errors
  double ks_threshold = kNoConstant;    // on sqrt(N) · D
};

/// Empirical second moments of N samples against a target matrix.
struct CovarianceComparison {
  Eigen::MatrixXd empirical;
  Eigen::MatrixXd target;
  Eigen::MatrixXd standard_error;  // sd(x_i x_j) / sqrt(N)
  Eigen::MatrixXd relative_error;  // |emp - target| / |target| (diagonal meaningful)
  double min_eigenvalue = 0.0;
  bool diagonal_ok = false;
  bool offdiagonal_ok = false;

  bool ok() const { return diagonal_ok && offdiagonal_ok; }
};

CovarianceComparison compare_covariance(const std::vector<std::vector<double>>& samples, const Eigen::MatrixXd& target,
                                        double diagonal_tolerance, double offdiagonal_tolerance);

/// sqrt(N) · sup |F_N - G| for lattice-valued samples with spacing h, G the
/// N(0, variance) law evaluated with a half-spacing continuity correction.
double lattice_ks_statistic(std::vector<double> samples, double variance, double spacing);

struct QfcltReport {
  Coord n = 0;
  double horizon = 0.0;
  std::size_t replicas = 0;
  WalkMode mode = WalkMode::kVariableSpeed;
  double target_scale = 1.0;  // 1 (VSRW) or 1 / E[μ] estimated by the torus mean (CSRW)
  double mu_origin = 0.0;
  double mu_mean = 0.0;
  Eigen::MatrixXd sigma2;
  CovarianceComparison walk;
  CovarianceComparison martingale;
  std::vector<double> ks_walk;  // per coordinate, sqrt(N)-scaled
  bool gaussian_ok = true;      // vacuous without a threshold
  double remainder_mean = 0.0;  // mean over paths of sup_t |χ(X_t)| / n
  double remainder_max = 0.0;
  std::size_t dominance_violations = 0;
  std::uint64_t total_jumps = 0;

  bool passed() const { return walk.ok() && dominance_violations == 0; }
};

/// N independent walks on the periodised medium to time n²T, compared at
/// time T after rescaling with T Σ̂² (VSRW) or T Σ̂² / E[μ] (CSRW); the
/// martingale part is compared the same way. N < 100 is rejected.
QfcltReport qfclt_test(const TorusConductances& omega, const CorrectorBundle& bundle, const QfcltOptions& options);

}  // namespace rcm
