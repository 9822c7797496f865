#pragma once

// Numerical verification of the regularity estimates for L^ω-harmonic
// functions: local boundedness, the optimal radial cutoff, Sobolev and
// energy inequalities, scalar power inequalities and the planar bound.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

inline constexpr double kNoConstant = std::numeric_limits<double>::quiet_NaN();

/// Relative harmonic residual max|L^ω u| / (max ω · max |u|) accepted by the
/// checks that require harmonicity.
inline constexpr double kHarmonicTolerance = 1e-8;

/// One inequality lhs <= C · rhs. `components` holds every ingredient of lhs
/// and rhs so that recompute() can rebuild both from the breakdown alone.
struct BoundReport {
  std::string kind;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs; 0 when trivial
  double constant = kNoConstant;
  bool trivial = false;  // 0 <= 0, or lhs = 0
  bool passed = true;
  std::vector<std::pair<std::string, double>> components;

  bool calibrated() const { return !std::isnan(constant); }
  double component(const std::string& name) const;  // throws if absent
};

/// Rebuilds (lhs, rhs) of a report from its components.
std::pair<double, double> recompute(const BoundReport& report);

// ---------------------------------------------------------------------------
// Local boundedness

enum class BoundednessForm {
  kTheorem,    // Λ(B(y,2n))^{p'(δ+1)/δ} ||u||_{L̲^1(B(y,2n))}
  kCorollary,  // Λ(B(y,2n))^{(δ+1)/(2δγ)} ||u||_{L̲^{2p'γ}(B(y,2n))}
  kLargeBox,   // Λ(B(y,4n))^{(δ+1)/(2δ)} ||u||_{L̲^{2p'}(B(y,4n))}
};

/// max_{B(y,n)} |u| against the chosen right-hand side. u must be harmonic on
/// the outer box (so u's box must contain it with one extra layer); throws
/// PreconditionError otherwise. u ≡ 0 on the outer box is reported trivial.
BoundReport local_boundedness_ratio(const Medium& omega, const ScalarField& u, const Vertex& y, Coord n,
                                    const MomentProfile& profile, BoundednessForm form = BoundednessForm::kTheorem,
                                    double gamma = 1.0, double constant = kNoConstant);

// ---------------------------------------------------------------------------
// Optimal cutoff

/// f(k) = Σ_{e ∈ S(k)} ω(e) (|v|(e))².
double shell_energy(const Medium& omega, const ScalarField& v, const Vertex& center, Coord k);

/// Radial cutoff η(x) = η̂(|x - c|_∞) with η̂(r) = 1 for r <= ρ, 0 for r >= σ.
struct CutoffProfile {
  Coord rho = 0;
  Coord sigma = 1;
  std::vector<double> values;  // η̂(ρ), ..., η̂(σ)

  double radial(Coord r) const;
  double operator()(const Vertex& x, const Vertex& center) const { return radial((x - center).sup_norm()); }
  /// η on the vertices of a box.
  ScalarField field(const Box& box) const;
  /// η̂ = 1 on [0, ρ], 0 from σ on, nonnegative.
  bool admissible() const;
};

struct CutoffSolution {
  CutoffProfile profile;
  double energy = 0.0;              // J_1d
  std::vector<double> shell_energies;  // f(ρ), ..., f(σ - 1)
};

/// Closed-form minimiser of Σ_k f(k)(η̂(k+1) - η̂(k))² with η̂(ρ) = 1,
/// η̂(σ) = 0; `f` lists f(ρ), ..., f(σ - 1). A vanishing f(k) gives a step
/// through that shell and J = 0.
CutoffSolution optimal_cutoff(std::span<const double> f, Coord rho, Coord sigma);
CutoffSolution optimal_cutoff(const Medium& omega, const ScalarField& v, const Vertex& center, Coord rho, Coord sigma);

/// Σ_k f(k)(η̂(k+1) - η̂(k))².
double radial_energy(std::span<const double> f, const CutoffProfile& profile);

/// Σ_e ω(e)(|v|(e))²(∇η(e))² over the bonds of v's box.
double cutoff_energy(const Medium& omega, const ScalarField& v, const ScalarField& eta);

/// J(ρ,σ,v) <= C (σ-ρ)^{-2d/(d-1)} ||ω||_{L^p(A)} (||∇v||²_{L^{p*}(A)} + ρ^{-2}||v||²_{L^{p*}(A)})
/// on the annulus A = B(σ) \ B(ρ-1), with J from the optimal radial cutoff.
BoundReport cutoff_upper_bound_check(const Medium& omega, const ScalarField& v, const Vertex& center, Coord rho,
                                     Coord sigma, const MomentProfile& profile, double constant = kNoConstant);

// ---------------------------------------------------------------------------
// Sobolev inequalities (constants unknown; ratios are reported)

/// ||f - (f)_B||_{L^{s*}(B)} / ||∇f||_{L^s(B)}, B = B(c, n), s* = ds/(d-s).
BoundReport sobolev_bulk_check(const ScalarField& f, const Vertex& center, Coord n, double s,
                               double constant = kNoConstant);

/// ||f||_{L^{s*}(∂B)} / (||∇f||_{L^s(∂B)} + n^{-1}||f||_{L^s(∂B)}), s* = (d-1)s/(d-1-s),
/// gradients over bonds with both endpoints on ∂B.
BoundReport sobolev_sphere_check(const ScalarField& f, const Vertex& center, Coord n, double s,
                                 double constant = kNoConstant);

// ---------------------------------------------------------------------------
// Energy estimates

/// sign(u)|u|^α, with 0 ↦ 0.
double signed_power(double u, double alpha);

/// Σ η²(e) ω(e) (∇ũ_α(e))² <= 256α⁴/(2α-1)² Σ ω(e) (|u^α|(e))² (∇η(e))².
/// `eta` lives on u's box and must vanish on its boundary; u must be harmonic
/// inside. The constant is explicit, so the check is absolute.
BoundReport energy_estimate_check(const Medium& omega, const ScalarField& u, const ScalarField& eta, double alpha);

/// ||∇u||_{L̲^{2q/(q+1)}(B(ρ))} <= C Λ(B(2n))^{1/2} (σ-ρ)^{-1} ||u||_{L̲^{2p'}(B(σ))}
/// for u harmonic on B(σ), n <= ρ < σ <= 2n.
BoundReport gradient_bound_check(const Medium& omega, const ScalarField& u, const Vertex& center, Coord n,
                                 Coord rho, Coord sigma, const MomentProfile& profile, double constant = kNoConstant);

// ---------------------------------------------------------------------------
// Scalar power inequalities

enum class PowerInequality { kA1, kA2, kA3 };

struct PowerCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool passed = true;
};

inline constexpr double kPowerRelativeSlack = 1e-12;

/// A1: |ã_α - b̃_α| <= (1 ∨ |α/β|)|ã_β - b̃_β|(|a|^{α-β} + |b|^{α-β}),  α, β ≠ 0
/// A2: (ã_α - b̃_α)² <= α²/(2α-1) (a-b)(ã_{2α-1} - b̃_{2α-1}),      α > 1/2
/// A3: (|a|^{2α-1} + |b|^{2α-1})(a-b) <= 4|ã_α - b̃_α|(|a|^α + |b|^α), α >= 1/2
/// with ã_α = sign(a)|a|^α. Differences of powers are evaluated without
/// cancellation. Throws ValidationError outside the parameter ranges.
PowerCheck power_inequality_check(PowerInequality kind, double a, double b, double alpha, double beta = 1.0);

struct PowerAudit {
  PowerInequality kind = PowerInequality::kA1;
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double min_relative_slack = kInfinity;  // min (rhs - lhs)/max(|lhs|,|rhs|)
};

/// Random tuples with a, b uniform in [-10, 10] and exponents uniform in the
/// valid range up to 5 (|α|, |β| >= 0.05 for A1).
PowerAudit power_audit(PowerInequality kind, std::uint64_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Planar bound

struct PlanarBound {
  BoundReport full;        // max_{B(n)}|u| vs n||ω^{-1}||^{1/2}||ω(∇u)²||^{1/2} + ||u||, L̲¹ on B(2n)
  BoundReport pigeonhole;  // good layer vs the B(2n) average, constant 1, exact
  BoundReport sobolev_1d;  // max_{∂B(k̃)}|u| vs ||∇u||_{L¹(∂B(k̃))} + k̃^{-1}||u||_{L¹(∂B(k̃))}
  Coord good_layer = 0;
  /// max_{B(n)}|u| - max_{∂B(k̃)}|u|, <= 0 up to solver error.
  double max_principle_gap = 0.0;
};

/// d = 2 only; u harmonic on B(c, 2n).
PlanarBound bound_2d(const Medium& omega, const ScalarField& u, const Vertex& center, Coord n,
                     double full_constant = kNoConstant, double sobolev_constant = kNoConstant);

/// Throws PreconditionError unless max_{region}|L^ω u| <= tol · max ω · max |u|
/// (ω over the bonds touching region). Returns the relative residual.
double require_harmonic(const Medium& omega, const ScalarField& u, const Box& region,
                        double tol = kHarmonicTolerance);

}  // namespace rcm
