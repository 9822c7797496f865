#include "rcm/instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace rcm {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double symmetric(std::mt19937_64& rng) { return 2.0 * unit(rng) - 1.0; }

}  // namespace

ScalarField random_boundary_data(const Box& box, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed ^ 0xB0B0ULL));
  const int d = box.dim();
  const double r = static_cast<double>(std::max<Coord>(box.radius(), 1));
  const double c0 = symmetric(rng);
  std::vector<double> slope(static_cast<std::size_t>(d));
  for (double& s : slope) s = symmetric(rng);
  const double quad = symmetric(rng);
  const double noise = unit(rng);
  ScalarField g(box);
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Vertex x = box.vertex(k);
    if (!box.on_boundary(x)) continue;
    const Vertex rel = x - box.center();
    double v = c0;
    for (int i = 0; i < d; ++i) v += slope[static_cast<std::size_t>(i)] * static_cast<double>(rel[i]) / r;
    if (d >= 2) v += quad * (static_cast<double>(rel[0] * rel[0] - rel[1] * rel[1])) / (r * r);
    v += noise * symmetric(rng);
    g.values()[k] = v;
  }
  return g;
}

HarmonicInstance make_harmonic_instance(int dim, const MarginalSpec& spec, std::uint64_t env_seed,
                                        std::uint64_t data_seed, const Box& box, double tol) {
  ConductanceField field(dim, env_seed, spec);
  SolverOptions opts;
  opts.tol = tol;
  DirichletSolution sol = solve_dirichlet(field, random_boundary_data(box, data_seed), opts);
  return {std::move(field), std::move(sol)};
}

ScalarField random_cutoff(const Box& box, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed ^ 0xC0FFULL));
  const Coord R = box.radius();
  ScalarField eta(box);
  if (R < 1) return eta;
  if (rng() & 1U) {
    // Radial, nonincreasing, 1 inside rho, 0 from sigma <= R on.
    const Coord sigma = 1 + static_cast<Coord>(rng() % static_cast<std::uint64_t>(R));
    const Coord rho = static_cast<Coord>(rng() % static_cast<std::uint64_t>(sigma));
    std::vector<double> drops(static_cast<std::size_t>(sigma - rho));
    double total = 0.0;
    for (double& v : drops) total += (v = unit(rng) + 1e-3);
    CutoffProfile prof;
    prof.rho = rho;
    prof.sigma = sigma;
    prof.values.push_back(1.0);
    double level = 1.0;
    for (std::size_t k = 0; k + 1 < drops.size(); ++k) {
      level -= drops[k] / total;
      prof.values.push_back(std::max(level, 0.0));
    }
    prof.values.push_back(0.0);
    return prof.field(box);
  }
  for (std::size_t k = 0; k < box.size(); ++k) {
    if (!box.on_boundary(box.vertex(k))) eta.values()[k] = unit(rng);
  }
  return eta;
}

ScalarField random_field(const Box& box, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed ^ 0xF1E1DULL));
  const int d = box.dim();
  const double r = static_cast<double>(std::max<Coord>(box.radius(), 1));
  std::vector<double> slope(static_cast<std::size_t>(d));
  for (double& s : slope) s = symmetric(rng);
  const double noise = unit(rng);
  return ScalarField::from_function(box, [&](const Vertex& x) {
    const Vertex rel = x - box.center();
    double v = 0.0;
    for (int i = 0; i < d; ++i) v += slope[static_cast<std::size_t>(i)] * static_cast<double>(rel[i]) / r;
    return v + noise * symmetric(rng);
  });
}

}  // namespace rcm
