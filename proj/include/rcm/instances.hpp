#pragma once

// Random test inputs shared by the calibration tool, the acceptance suite
// and the CLI: Dirichlet-harmonic functions with random boundary data and
// random admissible cutoffs.

#include <cstdint>

#include "rcm/cell_problem.hpp"
#include "rcm/environment.hpp"
#include "rcm/estimates.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

/// Seed bases. Calibration and acceptance draw from disjoint ranges.
inline constexpr std::uint64_t kCalibrationSeedBase = 0x1000'0000ULL;
inline constexpr std::uint64_t kAcceptanceSeedBase = 0x2000'0000ULL;

/// Boundary data mixing a constant, a random affine part, a harmonic-ish
/// quadratic part and bounded noise, all O(1).
ScalarField random_boundary_data(const Box& box, std::uint64_t seed);

struct HarmonicInstance {
  ConductanceField field;
  DirichletSolution solution;
};

/// Dirichlet-harmonic function on `box` for the environment (spec, env_seed)
/// with random_boundary_data(box, data_seed).
HarmonicInstance make_harmonic_instance(int dim, const MarginalSpec& spec, std::uint64_t env_seed,
                                        std::uint64_t data_seed, const Box& box, double tol = 1e-11);

/// Random nonnegative cutoff on `box` vanishing on its boundary: either a
/// random monotone radial profile or i.i.d. values on the interior.
ScalarField random_cutoff(const Box& box, std::uint64_t seed);

/// Random function of moderate size on a box (for Sobolev and cutoff checks).
ScalarField random_field(const Box& box, std::uint64_t seed);

}  // namespace rcm
