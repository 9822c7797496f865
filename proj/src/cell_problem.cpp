#include "rcm/cell_problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "rcm/errors.hpp"
#include "rcm/parallel.hpp"

namespace rcm {

namespace {

Coord wrap(Coord x, Coord side) {
  const Coord r = x % side;
  return r < 0 ? r + side : r;
}

// Structured index arithmetic for a (2n+1)^d box or an L^d torus: for
// direction i, index j in [0, size / stride_i) addresses a contiguous run of
// stride_i vertices sharing the same coordinate x_i.
struct Grid {
  int dim;
  std::size_t side;
  std::size_t size;
  std::vector<std::size_t> strides;

  Grid(int d, std::size_t s) : dim(d), side(s), size(1) {
    for (int i = 0; i < d; ++i) {
      strides.push_back(size);
      size *= s;
    }
  }
};

double dot(std::span<const double> a, std::span<const double> b, int threads) {
  return blocked_sum(a.size(), threads, [&](std::size_t i) { return a[i] * b[i]; });
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// out = -L^ω u on a periodic grid (A = ∇*ω∇, symmetric positive semidefinite).
// w is stored direction-major: w[i * size + idx]. One pass over rows along
// direction 0, so every array streams contiguously.
void torus_apply(const Grid& g, std::span<const double> w, std::span<const double> u, std::span<double> out,
                 int threads) {
  const std::size_t L = g.side;
  const std::size_t n = g.size;
  const int d = g.dim;
  parallel_for(n / L, threads, [&](std::size_t r0, std::size_t r1) {
    std::array<std::ptrdiff_t, kMaxDim> up{};
    std::array<std::ptrdiff_t, kMaxDim> dn{};
    for (std::size_t r = r0; r < r1; ++r) {
      const std::size_t base = r * L;
      for (int i = 1; i < d; ++i) {
        const std::size_t s = g.strides[static_cast<std::size_t>(i)];
        const std::size_t xi = (base / s) % L;
        const auto span = static_cast<std::ptrdiff_t>((L - 1) * s);
        up[static_cast<std::size_t>(i)] = xi + 1 == L ? -span : static_cast<std::ptrdiff_t>(s);
        dn[static_cast<std::size_t>(i)] = xi == 0 ? span : -static_cast<std::ptrdiff_t>(s);
      }
      const double* w0 = w.data();
      for (std::size_t a = 0; a < L; ++a) {
        const std::size_t idx = base + a;
        const std::size_t u0 = a + 1 == L ? base : idx + 1;
        const std::size_t d0 = a == 0 ? base + L - 1 : idx - 1;
        const double ux = u[idx];
        double acc = w0[idx] * (ux - u[u0]) + w0[d0] * (ux - u[d0]);
        for (int i = 1; i < d; ++i) {
          const double* wi = w0 + static_cast<std::size_t>(i) * n;
          const auto iu = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + up[static_cast<std::size_t>(i)]);
          const auto id = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + dn[static_cast<std::size_t>(i)]);
          acc += wi[idx] * (ux - u[iu]) + wi[id] * (ux - u[id]);
        }
        out[idx] = acc;
      }
    }
  }, 16);
}

// Direction-major copy of a torus conductance table.
std::vector<double> direction_major(const TorusConductances& omega) {
  const std::size_t n = omega.torus().size();
  const auto d = static_cast<std::size_t>(omega.dim());
  std::vector<double> w(n * d);
  for (std::size_t idx = 0; idx < n; ++idx) {
    for (std::size_t i = 0; i < d; ++i) w[i * n + idx] = omega.values()[idx * d + i];
  }
  return w;
}

// out = A u restricted to interior vertices of a box grid; boundary rows are
// zeroed. Bonds leaving the box are absent.
void box_apply(const Grid& g, std::span<const double> w, std::span<const unsigned char> interior,
               std::span<const double> u, std::span<double> out, int threads) {
  const auto d = static_cast<std::size_t>(g.dim);
  const std::size_t S = g.side;
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < g.dim; ++i) {
    const std::size_t s = g.strides[static_cast<std::size_t>(i)];
    const std::size_t runs = g.size / s;
    parallel_for(runs, threads, [&](std::size_t j0, std::size_t j1) {
      for (std::size_t j = j0; j < j1; ++j) {
        const std::size_t xi = j % S;
        const std::size_t start = (j / S) * s * S + xi * s;
        const bool has_up = xi + 1 < S;
        const bool has_dn = xi > 0;
        for (std::size_t a = 0; a < s; ++a) {
          const std::size_t idx = start + a;
          double acc = 0.0;
          if (has_up) acc += w[idx * d + static_cast<std::size_t>(i)] * (u[idx] - u[idx + s]);
          if (has_dn) acc += w[(idx - s) * d + static_cast<std::size_t>(i)] * (u[idx] - u[idx - s]);
          out[idx] += acc;
        }
      }
    }, 64);
  }
  for (std::size_t k = 0; k < g.size; ++k) {
    if (!interior[k]) out[k] = 0.0;
  }
}

enum class StopRule { kRelativeTwoNorm, kAbsoluteMaxNorm };

struct PcgProblem {
  std::function<void(std::span<const double>, std::span<double>)> apply;
  std::vector<double> inv_diag;  // zero on frozen entries
  bool project_mean = false;
  StopRule rule = StopRule::kRelativeTwoNorm;
  double threshold = 0.0;  // relative (two-norm rule) or absolute (max-norm rule)
  int max_iterations = 0;
  int threads = 1;
};

void project_mean_zero(std::span<double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  const double m = acc / static_cast<double>(x.size());
  for (double& v : x) v -= m;
}

// Preconditioned conjugate gradients from x = 0. Returns iterations used and
// the final residual measure (relative two-norm or absolute max-norm).
std::pair<int, double> pcg(const PcgProblem& prob, std::span<const double> b, std::span<double> x) {
  const std::size_t n = b.size();
  const int threads = prob.threads;
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> q(n);
  const double b_norm = std::sqrt(dot(b, b, threads));

  const auto measure = [&](std::span<const double> res) {
    if (prob.rule == StopRule::kAbsoluteMaxNorm) return max_abs(res);
    return std::sqrt(dot(res, res, threads)) / b_norm;
  };
  const auto precondition = [&] {
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] * prob.inv_diag[k];
  };

  // x += αp, r -= αq, z = D^{-1} r in one sweep, returning r·r, r·z, max|r|
  // and Σx from fixed-order block partials.
  struct Sums {
    double rr = 0.0, rz = 0.0, rmax = 0.0, xsum = 0.0;
  };
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<Sums> partial(blocks);
  const auto sweep = [&](double alpha) {
    parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
      for (std::size_t blk = b0; blk < b1; ++blk) {
        const std::size_t lo = blk * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        Sums acc;
        for (std::size_t k = lo; k < hi; ++k) {
          x[k] += alpha * p[k];
          r[k] -= alpha * q[k];
          z[k] = r[k] * prob.inv_diag[k];
          acc.rr += r[k] * r[k];
          acc.rz += r[k] * z[k];
          acc.rmax = std::max(acc.rmax, std::abs(r[k]));
          acc.xsum += x[k];
        }
        partial[blk] = acc;
      }
    }, 2);
    Sums total;
    for (const Sums& part : partial) {
      total.rr += part.rr;
      total.rz += part.rz;
      total.rmax = std::max(total.rmax, part.rmax);
      total.xsum += part.xsum;
    }
    return total;
  };
  const auto measure_sums = [&](const Sums& sums) {
    return prob.rule == StopRule::kAbsoluteMaxNorm ? sums.rmax : std::sqrt(sums.rr) / b_norm;
  };

  double current = measure(r);
  if (current <= prob.threshold) return {0, current};

  precondition();
  p = z;
  double rz = dot(r, z, threads);
  int it = 0;
  while (it < prob.max_iterations) {
    ++it;
    prob.apply(p, q);
    const double pq = dot(p, q, threads);
    if (!(pq > 0.0)) break;
    const Sums sums = sweep(rz / pq);
    const double shift = prob.project_mean ? sums.xsum / static_cast<double>(n) : 0.0;
    current = measure_sums(sums);
    if (current <= prob.threshold) {
      if (shift != 0.0) {
        for (double& v : x) v -= shift;
      }
      // Guard against drift of the recursive residual.
      prob.apply(x, q);
      for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
      current = measure(r);
      if (current <= prob.threshold) return {it, current};
      precondition();
      p = z;
      rz = dot(r, z, threads);
      continue;
    }
    const double beta = sums.rz / rz;
    rz = sums.rz;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] -= shift;
      p[k] = z[k] + beta * p[k];
    }
  }
  prob.apply(x, q);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
  current = measure(r);
  if (current <= prob.threshold) return {it, current};
  throw ConvergenceError("conjugate gradients did not converge in " + std::to_string(it) +
                             " iterations (residual " + std::to_string(current) + ")",
                         it, current);
}

int default_cap(std::size_t unknowns, double contrast) {
  const double cap = 50.0 * std::sqrt(static_cast<double>(unknowns)) * std::sqrt(contrast);
  return static_cast<int>(std::clamp(cap, 100.0, 2.0e9));
}

}  // namespace

// ---------------------------------------------------------------------------

Torus::Torus(int dim, Coord side) : dim_(dim), side_(side), size_(1) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("torus dimension out of range");
  if (side < 2) throw ValidationError("torus side must be at least 2");
  for (int i = 0; i < dim; ++i) {
    strides_.push_back(size_);
    size_ *= static_cast<std::size_t>(side);
  }
}

std::size_t Torus::index(const Vertex& x) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim_; ++i) idx += static_cast<std::size_t>(wrap(x[i], side_)) * strides_[static_cast<std::size_t>(i)];
  return idx;
}

Vertex Torus::vertex(std::size_t index) const {
  Vertex x(dim_);
  for (int i = 0; i < dim_; ++i) {
    x[i] = static_cast<Coord>(index % static_cast<std::size_t>(side_));
    index /= static_cast<std::size_t>(side_);
  }
  return x;
}

PeriodicField::PeriodicField(const Torus& torus, std::vector<double> values)
    : torus_(torus), values_(std::move(values)) {
  if (values_.size() != torus_.size()) throw ValidationError("periodic field size does not match torus");
}

PeriodicField::PeriodicField(const Torus& torus, double fill) : torus_(torus), values_(torus.size(), fill) {}

TorusConductances::TorusConductances(const Torus& torus, std::vector<double> values)
    : torus_(torus), values_(std::move(values)) {
  if (values_.size() != torus_.size() * static_cast<std::size_t>(torus_.dim())) {
    throw ValidationError("torus conductance table has the wrong size");
  }
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("conductances must be positive and finite");
  }
}

TorusConductances TorusConductances::sample(const ConductanceField& field, Coord side) {
  if (auto s = field.torus_side(); s && *s != side) {
    throw ValidationError("torus field side " + std::to_string(*s) + " differs from requested " + std::to_string(side));
  }
  const Torus torus(field.dim(), side);
  std::vector<double> values(torus.size() * static_cast<std::size_t>(torus.dim()));
  for (std::size_t idx = 0; idx < torus.size(); ++idx) {
    const Vertex x = torus.vertex(idx);
    for (int i = 0; i < torus.dim(); ++i) {
      values[idx * static_cast<std::size_t>(torus.dim()) + static_cast<std::size_t>(i)] = field.conductance(x, i);
    }
  }
  return TorusConductances(torus, std::move(values));
}

double TorusConductances::conductance(const Vertex& lower, int direction) const {
  return at(torus_.index(lower), direction);
}

double TorusConductances::contrast() const {
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  return *hi / *lo;
}

double TorusConductances::mean_mu() const {
  double acc = 0.0;
  for (double v : values_) acc += v;
  // each bond contributes to μ at both endpoints
  return 2.0 * acc / static_cast<double>(torus_.size());
}

// ---------------------------------------------------------------------------

ScalarField apply_operator(const Medium& medium, const ScalarField& u) {
  const Box& outer = u.box();
  if (outer.radius() < 1) throw RegionError("operator needs a field on a box of radius >= 1");
  const Box inner(outer.center(), outer.radius() - 1);
  return ScalarField::from_function(inner, [&](const Vertex& x) {
    const double ux = u(x);
    double acc = 0.0;
    for (int i = 0; i < x.dim; ++i) {
      acc += medium.conductance(x, i) * (u(x.shifted(i, 1)) - ux);
      acc += medium.conductance(x.shifted(i, -1), i) * (u(x.shifted(i, -1)) - ux);
    }
    return acc;
  });
}

PeriodicField apply_operator(const TorusConductances& omega, const PeriodicField& u, int threads) {
  const Torus& t = omega.torus();
  const Grid g(t.dim(), static_cast<std::size_t>(t.side()));
  PeriodicField out(t);
  torus_apply(g, direction_major(omega), u.values(), out.values(), threads);
  for (double& v : out.values()) v = -v;
  return out;
}

double max_harmonic_residual(const Medium& medium, const ScalarField& u, const Box& region) {
  double worst = 0.0;
  region.for_each_vertex([&](const Vertex& x) {
    const double ux = u(x);
    double acc = 0.0;
    for (int i = 0; i < x.dim; ++i) {
      acc += medium.conductance(x, i) * (u(x.shifted(i, 1)) - ux);
      acc += medium.conductance(x.shifted(i, -1), i) * (u(x.shifted(i, -1)) - ux);
    }
    worst = std::max(worst, std::abs(acc));
  });
  return worst;
}

CorrectorSolution solve_corrector(const TorusConductances& omega, int direction, const SolverOptions& options) {
  const Torus& t = omega.torus();
  if (direction < 0 || direction >= t.dim()) throw ValidationError("corrector direction out of range");
  if (!(options.tol > 0.0)) throw ValidationError("solver tolerance must be positive");
  const std::size_t n = t.size();
  const auto d = static_cast<std::size_t>(t.dim());
  const std::size_t s = t.stride(direction);
  const std::size_t L = static_cast<std::size_t>(t.side());

  // b(x) = ∇*(ω∇Π_j)(x) = ω(x - e_j, x) - ω(x, x + e_j)
  std::vector<double> b(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::size_t xj = (idx / s) % L;
    const std::size_t dn = xj == 0 ? idx + (L - 1) * s : idx - s;
    b[idx] = omega.values()[dn * d + static_cast<std::size_t>(direction)] -
             omega.values()[idx * d + static_cast<std::size_t>(direction)];
  }

  CorrectorSolution out{PeriodicField(t), {}};
  if (max_abs(b) == 0.0) return out;

  const Grid g(t.dim(), L);
  const std::vector<double> w = direction_major(omega);
  PcgProblem prob;
  prob.apply = [&](std::span<const double> u, std::span<double> res) {
    torus_apply(g, w, u, res, options.threads);
  };
  prob.inv_diag.resize(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    double deg = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t xi = (idx / t.stride(static_cast<int>(i))) % L;
      const std::size_t dn = xi == 0 ? idx + (L - 1) * t.stride(static_cast<int>(i)) : idx - t.stride(static_cast<int>(i));
      deg += omega.values()[idx * d + i] + omega.values()[dn * d + i];
    }
    prob.inv_diag[idx] = 1.0 / deg;
  }
  prob.project_mean = true;
  prob.rule = StopRule::kRelativeTwoNorm;
  prob.threshold = options.tol;
  prob.max_iterations = options.max_iterations.value_or(default_cap(n, omega.contrast()));
  prob.threads = options.threads;

  const auto [iterations, residual] = pcg(prob, b, out.chi.values());
  project_mean_zero(out.chi.values());
  out.stats = {iterations, residual};
  return out;
}

CorrectorBundle solve_correctors(const TorusConductances& omega, const SolverOptions& options) {
  CorrectorBundle bundle;
  bundle.tol = options.tol;
  for (int j = 0; j < omega.dim(); ++j) {
    CorrectorSolution sol = solve_corrector(omega, j, options);
    bundle.chi.push_back(std::move(sol.chi));
    bundle.stats.push_back(sol.stats);
  }
  bundle.sigma2 = effective_covariance(omega, bundle.chi);
  return bundle;
}

ScalarField harmonic_coordinate(const PeriodicField& chi, int direction, const Box& region) {
  const double at_origin = chi(Vertex::origin(chi.torus().dim()));
  return ScalarField::from_function(region, [&](const Vertex& x) {
    return static_cast<double>(x[direction]) - chi(x) + at_origin;
  });
}

Eigen::MatrixXd effective_covariance(const TorusConductances& omega, const std::vector<PeriodicField>& chi) {
  const Torus& t = omega.torus();
  const int d = t.dim();
  if (static_cast<int>(chi.size()) != d) throw ValidationError("need one corrector per direction");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> dphi(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    const Vertex z = t.vertex(idx);
    for (int i = 0; i < d; ++i) {
      for (int sign : {1, -1}) {
        const Vertex y = z.shifted(i, sign);
        const double w = sign > 0 ? omega.conductance(z, i) : omega.conductance(y, i);
        for (int k = 0; k < d; ++k) {
          dphi[static_cast<std::size_t>(k)] = (k == i ? sign : 0) - (chi[static_cast<std::size_t>(k)](y) - chi[static_cast<std::size_t>(k)](z));
        }
        for (int a = 0; a < d; ++a) {
          for (int c = 0; c < d; ++c) sigma(a, c) += w * dphi[static_cast<std::size_t>(a)] * dphi[static_cast<std::size_t>(c)];
        }
      }
    }
  }
  return sigma / static_cast<double>(t.size());
}

Eigen::MatrixXd energy_covariance(const TorusConductances& omega, const std::vector<PeriodicField>& chi) {
  const Torus& t = omega.torus();
  const int d = t.dim();
  if (static_cast<int>(chi.size()) != d) throw ValidationError("need one corrector per direction");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> grad(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    const Vertex z = t.vertex(idx);
    for (int i = 0; i < d; ++i) {
      const Vertex up = z.shifted(i, 1);
      const double w = omega.at(idx, i);
      for (int k = 0; k < d; ++k) {
        grad[static_cast<std::size_t>(k)] = (k == i ? 1.0 : 0.0) - (chi[static_cast<std::size_t>(k)](up) - chi[static_cast<std::size_t>(k)](z));
      }
      for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) sigma(a, c) += w * grad[static_cast<std::size_t>(a)] * grad[static_cast<std::size_t>(c)];
      }
    }
  }
  return 2.0 * sigma / static_cast<double>(t.size());
}

void write_corrector_csv(std::ostream& os, const CorrectorBundle& bundle) {
  if (bundle.chi.empty()) return;
  const Torus& t = bundle.chi.front().torus();
  const int d = t.dim();
  for (int i = 0; i < d; ++i) os << "x_" << (i + 1) << ',';
  for (int j = 0; j < d; ++j) os << "chi_" << (j + 1) << (j + 1 < d ? "," : "\n");
  char buf[32];
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    const Vertex x = t.vertex(idx);
    for (int i = 0; i < d; ++i) os << x[i] << ',';
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", bundle.chi[static_cast<std::size_t>(j)].values()[idx]);
      os << buf << (j + 1 < d ? "," : "\n");
    }
  }
}

// ---------------------------------------------------------------------------

DirichletSolution solve_dirichlet(const Medium& medium, const ScalarField& boundary_data, const SolverOptions& options) {
  const Box& box = boundary_data.box();
  if (medium.dim() != box.dim()) throw ValidationError("medium and box dimensions differ");
  if (!(options.tol > 0.0)) throw ValidationError("solver tolerance must be positive");
  const int d = box.dim();
  const Grid g(d, static_cast<std::size_t>(box.side()));
  const std::size_t n = g.size;

  std::vector<double> w(n * static_cast<std::size_t>(d), 0.0);
  double w_max = 0.0;
  double w_min = kInfinity;
  box.for_each_bond([&](const Bond& e) {
    const double v = medium(e);
    if (!(v > 0.0)) throw ValidationError("conductances must be positive");
    w[box.bond_slot(e)] = v;
    w_max = std::max(w_max, v);
    w_min = std::min(w_min, v);
  });

  std::vector<unsigned char> interior(n);
  std::vector<double> g_bnd(n, 0.0);
  double g_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vertex x = box.vertex(k);
    interior[k] = box.on_boundary(x) ? 0 : 1;
    if (!interior[k]) {
      const double gv = boundary_data.value(k);
      if (!std::isfinite(gv)) throw ValidationError("boundary data must be finite");
      g_bnd[k] = gv;
      g_max = std::max(g_max, std::abs(gv));
    }
  }

  DirichletSolution out{ScalarField(box, g_bnd), {}, 0.0, w_max * g_max};
  if (box.radius() < 1 || g_max == 0.0) return out;

  const auto apply = [&](std::span<const double> u, std::span<double> res) {
    box_apply(g, w, interior, u, res, options.threads);
  };
  // b = -A g restricted to the interior
  std::vector<double> b(n);
  {
    std::vector<double> tmp(n);
    const Grid& gg = g;
    const auto dd = static_cast<std::size_t>(d);
    // A applied to the boundary-only vector, keeping interior rows.
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (int i = 0; i < d; ++i) {
      const std::size_t s = gg.strides[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t xi = (k / s) % gg.side;
        if (xi + 1 < gg.side) tmp[k] += w[k * dd + static_cast<std::size_t>(i)] * (g_bnd[k] - g_bnd[k + s]);
        if (xi > 0) tmp[k] += w[(k - s) * dd + static_cast<std::size_t>(i)] * (g_bnd[k] - g_bnd[k - s]);
      }
    }
    for (std::size_t k = 0; k < n; ++k) b[k] = interior[k] ? -tmp[k] : 0.0;
  }

  PcgProblem prob;
  prob.apply = apply;
  prob.inv_diag.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!interior[k]) continue;
    double deg = 0.0;
    for (int i = 0; i < d; ++i) {
      const std::size_t s = g.strides[static_cast<std::size_t>(i)];
      deg += w[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] +
             w[(k - s) * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    }
    prob.inv_diag[k] = 1.0 / deg;
  }
  prob.rule = StopRule::kAbsoluteMaxNorm;
  prob.threshold = options.tol * out.residual_scale;
  prob.max_iterations = options.max_iterations.value_or(default_cap(n, w_max / w_min));
  prob.threads = options.threads;

  std::vector<double> v(n);
  const auto [iterations, residual] = pcg(prob, b, v);
  std::span<double> u = out.u.values();
  for (std::size_t k = 0; k < n; ++k) u[k] = g_bnd[k] + v[k];
  out.stats = {iterations, residual / out.residual_scale};
  out.max_interior_residual = max_harmonic_residual(medium, out.u, Box(box.center(), box.radius() - 1));
  return out;
}

double max_principle_violation(const ScalarField& u) {
  const Box& box = u.box();
  double bmax = -kInfinity;
  double bmin = kInfinity;
  double imax = -kInfinity;
  double imin = kInfinity;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const double v = u.value(k);
    if (box.on_boundary(box.vertex(k))) {
      bmax = std::max(bmax, v);
      bmin = std::min(bmin, v);
    } else {
      imax = std::max(imax, v);
      imin = std::min(imin, v);
    }
  }
  if (imax == -kInfinity) return 0.0;
  return std::max({0.0, imax - bmax, bmin - imin});
}

}  // namespace rcm
