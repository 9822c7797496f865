#pragma once

// Random conductance fields and the quantities derived from them:
// the measures μ^ω, ν^ω, the contrast Λ^ω(S) and the moment profile.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rcm/lattice.hpp"

namespace rcm {

/// Anything that assigns a conductance to every bond of Z^d.
class Medium {
 public:
  virtual ~Medium() = default;
  virtual int dim() const = 0;
  virtual double conductance(const Vertex& lower, int direction) const = 0;

  double operator()(const Bond& e) const { return conductance(e.lower, e.direction); }
};

// ---------------------------------------------------------------------------
// Marginal laws

struct ConstantLaw {
  double value = 1.0;
};

/// Uniform on [λ, 1/λ].
struct UniformEllipticLaw {
  double lambda = 0.5;
};

/// ω = exp(σ Z), Z standard normal.
struct LogNormalLaw {
  double sigma = 0.5;
};

/// ω = B·P₊ + (1 - B)/P₋ with B a fair coin and P± Pareto(1, tail) laws.
/// E[ω^s] < ∞ iff s < p_bar and E[ω^{-s}] < ∞ iff s < q_bar.
struct TwoSidedParetoLaw {
  double p_bar = 8.0;
  double q_bar = 8.0;
};

using MarginalSpec = std::variant<ConstantLaw, UniformEllipticLaw, LogNormalLaw, TwoSidedParetoLaw>;

void validate(const MarginalSpec& spec);
std::string describe(const MarginalSpec& spec);

/// Quantile function of the marginal law, u in (0, 1).
double inverse_cdf(const MarginalSpec& spec, double u);

/// E[ω^s] for real s (negative s gives inverse moments); +∞ when divergent.
double analytic_moment(const MarginalSpec& spec, double s);

// ---------------------------------------------------------------------------
// Counter-based hashing

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Stateless hash of (seed, bond). Equal inputs give equal outputs regardless
/// of query order.
std::uint64_t bond_hash(std::uint64_t seed, const Vertex& lower, int direction);

/// Maps 64 random bits to the open interval (0, 1).
double hash_to_unit(std::uint64_t h);

inline constexpr double kMinConductance = 1e-300;
inline constexpr double kMaxConductance = 1e300;

struct BondSample {
  double value;
  bool clamped;
};

// ---------------------------------------------------------------------------
// Conductance fields

struct InfiniteLattice {};
struct TorusGeometry {
  Coord side = 16;
};
using Geometry = std::variant<InfiniteLattice, TorusGeometry>;

/// Hash-backed i.i.d. conductance field. On a torus of side L bond ids are
/// reduced modulo L, so the field is the periodic extension of the torus.
class ConductanceField final : public Medium {
 public:
  ConductanceField(int dim, std::uint64_t seed, MarginalSpec spec, Geometry geometry = InfiniteLattice{});

  int dim() const override { return dim_; }
  double conductance(const Vertex& lower, int direction) const override;

  BondSample sample(const Vertex& lower, int direction) const;

  /// Number of bonds of `box` whose raw draw hit the clamp interval ends.
  std::size_t clamp_events(const Box& box) const;

  std::uint64_t seed() const { return seed_; }
  const MarginalSpec& spec() const { return spec_; }
  const Geometry& geometry() const { return geometry_; }
  std::optional<Coord> torus_side() const;

 private:
  int dim_;
  std::uint64_t seed_;
  MarginalSpec spec_;
  Geometry geometry_;
};

/// Constant background with explicitly overridden bonds. Used for hand-built
/// configurations such as star weights around a vertex.
class TableMedium final : public Medium {
 public:
  TableMedium(int dim, double background) : dim_(dim), background_(background) {}

  int dim() const override { return dim_; }
  double conductance(const Vertex& lower, int direction) const override;

  void set(const Bond& e, double value);

 private:
  static std::string key(const Vertex& lower, int direction);

  int dim_;
  double background_;
  std::unordered_map<std::string, double> overrides_;
};

/// Writes `lower_1..lower_d,direction,value` rows for every bond of the box.
void write_conductance_csv(std::ostream& os, const Medium& medium, const Box& box);

// ---------------------------------------------------------------------------
// Measures and contrast

/// μ^ω(x) = Σ_{y~x} ω(x, y).
double mu(const Medium& medium, const Vertex& x);
/// ν^ω(x) = Σ_{y~x} 1 / ω(x, y).
double nu(const Medium& medium, const Vertex& x);

/// Exponents (p, q) in (1, ∞] with derived quantities, valid only when
/// 1/p + 1/q < 2/(d - 1).
struct MomentProfile {
  int dim = 3;
  double p = 4.0;
  double q = 4.0;
  double delta = 0.0;      // 1/(d-1) - 1/(2p) - 1/(2q)
  double p_prime = 0.0;    // p/(p-1)
  double p_star = 0.0;     // 1/p_* = 1/2 - 1/(2p) + 1/(d-1)
  double chi_exp = 0.0;    // 1 + δ

  /// Throws ValidationError unless the exponents are admissible.
  static MomentProfile make(int dim, double p, double q);
};

struct MomentCheck {
  bool admissible = false;
  std::string violation;  // empty when admissible
  MomentProfile profile;  // derived exponents are filled in either way
};

/// Rejects p <= 1, q <= 1 and d < 3 with ValidationError; otherwise reports
/// whether 1/p + 1/q < 2/(d - 1).
MomentCheck check_moment_condition(int dim, double p, double q);

/// Λ^ω(S) = ||ω||_{L̲^p(S)} ||ω^{-1}||_{L̲^q(S)} over the bonds of `box`.
double lambda_contrast(const Medium& medium, const Box& box, double p, double q);
double lambda_contrast(const Medium& medium, const Box& box, const MomentProfile& profile);

// ---------------------------------------------------------------------------
// Ergodic averages

enum class Observable { kMuPower, kNuPower };

struct AveragePoint {
  Coord n;
  double value;
};

/// For each n, the L̲¹ average of `observable` over B(n z, n).
std::vector<AveragePoint> ergodic_average_curve(const ConductanceField& field,
                                                const std::function<double(const Vertex&)>& observable,
                                                const Vertex& direction, const std::vector<Coord>& radii);

/// μ^p or ν^q as the observable, with `exponent` the power applied.
std::vector<AveragePoint> ergodic_average_curve(const ConductanceField& field, Observable observable,
                                                double exponent, const Vertex& direction,
                                                const std::vector<Coord>& radii);

}  // namespace rcm
