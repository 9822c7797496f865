#pragma once

// Event-driven simulation of the variable speed (VSRW) and constant speed
// (CSRW) random walks among conductances, diffusive rescaling and the
// martingale part X_t - χ(X_t).

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rcm/cell_problem.hpp"
#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

enum class WalkMode { kVariableSpeed, kConstantSpeed };

/// Right-continuous step path: the walk sits at vertices[k] on
/// [times[k], times[k+1]), with times[0] = 0 and vertices[0] the start.
struct WalkPath {
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<Vertex> vertices;

  const Vertex& start() const { return vertices.front(); }
  std::size_t jumps() const { return vertices.size() - 1; }
  /// Position at time t ∈ [0, horizon].
  const Vertex& position_at(double t) const;
  const Vertex& final_position() const { return vertices.back(); }
};

struct WalkOptions {
  std::uint64_t max_events = 1'000'000'000;
};

/// Holding times are exponential with rate μ^ω(x) (VSRW) or 1 (CSRW); the
/// next vertex is y with probability ω(x, y)/μ^ω(x). Jump choices and
/// holding times come from two separate streams derived from `seed`, so both
/// modes share the same jump chain for equal seeds. Throws SimulationError
/// when more than max_events jumps would be needed.
WalkPath simulate_walk(const Medium& omega, const Vertex& start, double horizon, std::uint64_t seed, WalkMode mode,
                       const WalkOptions& options = {});

inline WalkPath simulate_vsrw(const Medium& omega, const Vertex& start, double horizon, std::uint64_t seed,
                              const WalkOptions& options = {}) {
  return simulate_walk(omega, start, horizon, seed, WalkMode::kVariableSpeed, options);
}
inline WalkPath simulate_csrw(const Medium& omega, const Vertex& start, double horizon, std::uint64_t seed,
                              const WalkOptions& options = {}) {
  return simulate_walk(omega, start, horizon, seed, WalkMode::kConstantSpeed, options);
}

/// Independent, individually reproducible seed for replica `index`.
std::uint64_t replica_seed(std::uint64_t master, std::uint64_t index);

/// t ↦ X^{(n)}_t = X_{n² t} / n on [0, horizon].
class RescaledPath {
 public:
  /// Throws ValidationError if the path does not reach time n² · horizon.
  RescaledPath(const WalkPath& path, Coord n, double horizon);

  Coord scale() const { return n_; }
  double horizon() const { return horizon_; }
  std::vector<double> operator()(double t) const;

 private:
  const WalkPath* path_;
  Coord n_;
  double horizon_;
};

inline RescaledPath rescale(const WalkPath& path, Coord n, double horizon) { return RescaledPath(path, n, horizon); }

/// M_t = X_t - χ(X_t) along a path, with χ(0) = 0, together with the
/// remainder χ(X_t). Values are per path segment.
struct MartingalePath {
  std::vector<std::vector<double>> martingale;
  std::vector<std::vector<double>> remainder;
  /// sup_t max_j |χ_j(X_t)| over the path.
  double sup_remainder = 0.0;

  const std::vector<double>& final_martingale() const { return martingale.back(); }
};

/// Periodic correctors (walk on the periodised medium).
MartingalePath martingale_part(const WalkPath& path, const std::vector<PeriodicField>& chi);
/// Correctors known on a box only; throws RegionError if the path leaves it.
MartingalePath martingale_part(const WalkPath& path, const std::vector<ScalarField>& chi);

/// Rows `time,x_1..x_d`, one per segment.
void write_path_csv(std::ostream& os, const WalkPath& path);

}  // namespace rcm
