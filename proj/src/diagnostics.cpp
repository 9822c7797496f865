#include "rcm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "rcm/errors.hpp"
#include "rcm/parallel.hpp"

namespace rcm {

SublinearityCurve sublinearity_curve(const std::vector<PeriodicField>& chi, const std::vector<Coord>& radii) {
  if (chi.empty()) throw ValidationError("no correctors given");
  const Torus& t = chi.front().torus();
  const int d = t.dim();
  SublinearityCurve curve;
  Coord previous = 0;
  for (Coord n : radii) {
    if (n <= previous) throw ValidationError("radii must be positive and increasing");
    if (2 * n > t.side()) {
      throw ValidationError("radius " + std::to_string(n) + " exceeds half the torus side " + std::to_string(t.side()));
    }
    previous = n;
    const Box box = Box::centered(d, n);
    SublinearityPoint pt;
    pt.n = n;
    for (const PeriodicField& c : chi) {
      double mx = 0.0;
      double sum = 0.0;
      box.for_each_vertex([&](const Vertex& x) {
        const double v = std::abs(c(x));
        mx = std::max(mx, v);
        sum += v;
      });
      pt.linf.push_back(mx / static_cast<double>(n));
      pt.l1.push_back(sum / static_cast<double>(box.size()) / static_cast<double>(n));
    }
    curve.push_back(std::move(pt));
  }
  return curve;
}

BoundReport multiscale_bound_estimate(const Medium& omega, const PeriodicField& chi, Coord n, Coord m,
                                      const MomentProfile& profile, double constant) {
  if (m < 1) throw ValidationError("multiscale bound needs m >= 1");
  if (n < m * (m + 1)) throw ValidationError("multiscale bound needs n >= m(m+1)");
  const int d = omega.dim();
  const Coord q = n / m;
  double max_chi = 0.0;
  Box::centered(d, n).for_each_vertex([&](const Vertex& x) { max_chi = std::max(max_chi, std::abs(chi(x))); });
  double l1 = 0.0;
  const Box big = Box::centered(d, 2 * n);
  big.for_each_vertex([&](const Vertex& x) { l1 += std::abs(chi(x)); });
  l1 /= static_cast<double>(big.size());
  double sup_lambda = 0.0;
  Box::centered(d, m).for_each_vertex([&](const Vertex& z) {
    sup_lambda = std::max(sup_lambda, lambda_contrast(omega, Box(z.scaled(q), 2 * q), profile));
  });
  const double exponent = profile.p_prime * (1.0 + 1.0 / profile.delta);
  const double m_power = std::pow(static_cast<double>(m), d);
  const double qq = static_cast<double>(q);
  const double rhs = (m_power * l1 + qq) * std::pow(sup_lambda, exponent) + qq;
  BoundReport r;
  r.kind = "multiscale";
  r.lhs = max_chi;
  r.rhs = rhs;
  r.constant = constant;
  r.components = {{"max_abs_chi", max_chi}, {"m_power", m_power},       {"chi_l1", l1},
                  {"coarse", qq},           {"sup_lambda", sup_lambda}, {"lambda_exponent", exponent},
                  {"n", static_cast<double>(n)}, {"m", static_cast<double>(m)}};
  r.trivial = max_chi == 0.0;
  r.ratio = r.trivial ? 0.0 : max_chi / rhs;
  r.passed = r.trivial || !r.calibrated() || r.ratio <= constant;
  return r;
}

double iota_measure(const TorusConductances& omega, const std::vector<PeriodicField>& chi, const Vertex& x, int j) {
  if (omega.dim() != 2) throw ValidationError("the iota measure is defined for d = 2");
  if (chi.size() != 2 || j < 0 || j > 1) throw ValidationError("need both correctors and j in {0, 1}");
  const PeriodicField& c = chi[static_cast<std::size_t>(j)];
  double acc = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int sign : {1, -1}) {
      const Vertex y = x.shifted(i, sign);
      const double w = sign > 0 ? omega.conductance(x, i) : omega.conductance(y, i);
      const double dphi = (i == j ? sign : 0) - (c(y) - c(x));
      acc += w * dphi * dphi;
    }
  }
  return acc;
}

double iota_average(const TorusConductances& omega, const std::vector<PeriodicField>& chi, int j) {
  const Torus& t = omega.torus();
  double acc = 0.0;
  for (std::size_t idx = 0; idx < t.size(); ++idx) acc += iota_measure(omega, chi, t.vertex(idx), j);
  return acc / static_cast<double>(t.size());
}

CovarianceComparison compare_covariance(const std::vector<std::vector<double>>& samples, const Eigen::MatrixXd& target,
                                        double diagonal_tolerance, double offdiagonal_tolerance) {
  const auto d = target.rows();
  const auto n = static_cast<double>(samples.size());
  CovarianceComparison c;
  c.target = target;
  c.empirical = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  for (const auto& x : samples) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double v = x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        c.empirical(i, j) += v;
        second(i, j) += v * v;
      }
    }
  }
  c.empirical /= n;
  second /= n;
  c.standard_error = Eigen::MatrixXd::Zero(d, d);
  c.relative_error = Eigen::MatrixXd::Zero(d, d);
  c.diagonal_ok = true;
  c.offdiagonal_ok = true;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double var = std::max(0.0, second(i, j) - c.empirical(i, j) * c.empirical(i, j)) * n / (n - 1.0);
      c.standard_error(i, j) = std::sqrt(var / n);
      const double diff = std::abs(c.empirical(i, j) - target(i, j));
      c.relative_error(i, j) = target(i, j) != 0.0 ? diff / std::abs(target(i, j)) : kInfinity;
      if (i == j) {
        c.diagonal_ok = c.diagonal_ok && c.relative_error(i, j) <= diagonal_tolerance;
      } else {
        c.offdiagonal_ok = c.offdiagonal_ok && diff <= offdiagonal_tolerance * c.standard_error(i, j);
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.empirical);
  c.min_eigenvalue = eig.eigenvalues().minCoeff();
  return c;
}

double lattice_ks_statistic(std::vector<double> samples, double variance, double spacing) {
  if (samples.empty()) throw ValidationError("no samples");
  if (!(variance > 0.0)) throw ValidationError("variance must be positive");
  std::sort(samples.begin(), samples.end());
  const boost::math::normal_distribution<double> law(0.0, std::sqrt(variance));
  const double n = static_cast<double>(samples.size());
  const double half = 0.5 * spacing;
  double worst = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double below = static_cast<double>(i) / n;  // F(v-)
    const double upto = static_cast<double>(j) / n;   // F(v)
    worst = std::max(worst, std::abs(below - boost::math::cdf(law, samples[i] - half)));
    worst = std::max(worst, std::abs(upto - boost::math::cdf(law, samples[i] + half)));
    i = j;
  }
  return std::sqrt(n) * worst;
}

namespace {

struct ReplicaResult {
  std::vector<double> walk;
  std::vector<double> martingale;
  double remainder = 0.0;  // sup_t |χ(X_t)| / n
  bool dominated = true;
  std::uint64_t jumps = 0;
};

// max_j |χ_j(x) - χ_j(0)| over the bounding box of a path, clipped to one
// period per axis.
double max_over_visited(const std::vector<PeriodicField>& chi, const WalkPath& path) {
  const int d = path.start().dim;
  const Torus& t = chi.front().torus();
  Vertex lo = path.start();
  Vertex hi = path.start();
  for (const Vertex& x : path.vertices) {
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  }
  for (int i = 0; i < d; ++i) hi[i] = std::min(hi[i], lo[i] + t.side() - 1);
  std::vector<double> origin;
  for (const PeriodicField& c : chi) origin.push_back(c(Vertex::origin(d)));
  double best = 0.0;
  Vertex x = lo;
  for (;;) {
    for (std::size_t j = 0; j < chi.size(); ++j) best = std::max(best, std::abs(chi[j](x) - origin[j]));
    int i = 0;
    while (i < d) {
      if (x[i] < hi[i]) {
        ++x[i];
        break;
      }
      x[i] = lo[i];
      ++i;
    }
    if (i == d) break;
  }
  return best;
}

}  // namespace

QfcltReport qfclt_test(const TorusConductances& omega, const CorrectorBundle& bundle, const QfcltOptions& options) {
  if (options.replicas < 100) throw ValidationError("at least 100 replicas are needed");
  if (options.n < 1) throw ValidationError("scale n must be at least 1");
  if (!(options.horizon > 0.0)) throw ValidationError("horizon T must be positive");
  const int d = omega.dim();
  if (static_cast<int>(bundle.chi.size()) != d) throw ValidationError("corrector bundle does not match the medium");
  if (bundle.chi.front().torus().side() != omega.torus().side()) {
    throw ValidationError("correctors were solved on a different torus");
  }

  QfcltReport rep;
  rep.n = options.n;
  rep.horizon = options.horizon;
  rep.replicas = options.replicas;
  rep.mode = options.mode;
  rep.sigma2 = bundle.sigma2;
  rep.mu_origin = mu(omega, Vertex::origin(d));
  rep.mu_mean = omega.mean_mu();
  rep.target_scale = options.mode == WalkMode::kVariableSpeed ? 1.0 : 1.0 / rep.mu_mean;

  const double nn = static_cast<double>(options.n);
  const double walk_time = nn * nn * options.horizon;
  std::vector<ReplicaResult> results(options.replicas);
  parallel_for(options.replicas, options.threads, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      const WalkPath path = simulate_walk(omega, Vertex::origin(d), walk_time, replica_seed(options.seed, r),
                                          options.mode);
      const MartingalePath mart = martingale_part(path, bundle.chi);
      ReplicaResult& out = results[r];
      const Vertex& x = path.final_position();
      const std::vector<double>& m = mart.final_martingale();
      for (int i = 0; i < d; ++i) {
        out.walk.push_back(static_cast<double>(x[i]) / nn);
        out.martingale.push_back(m[static_cast<std::size_t>(i)] / nn);
      }
      out.remainder = mart.sup_remainder / nn;
      out.dominated = mart.sup_remainder <= max_over_visited(bundle.chi, path);
      out.jumps = path.jumps();
    }
  }, 2);

  std::vector<std::vector<double>> walk;
  std::vector<std::vector<double>> martingale;
  walk.reserve(results.size());
  martingale.reserve(results.size());
  for (const ReplicaResult& r : results) {
    walk.push_back(r.walk);
    martingale.push_back(r.martingale);
    rep.remainder_mean += r.remainder;
    rep.remainder_max = std::max(rep.remainder_max, r.remainder);
    rep.dominance_violations += r.dominated ? 0 : 1;
    rep.total_jumps += r.jumps;
  }
  rep.remainder_mean /= static_cast<double>(results.size());

  const Eigen::MatrixXd target = options.horizon * rep.target_scale * bundle.sigma2;
  rep.walk = compare_covariance(walk, target, options.diagonal_tolerance, options.offdiagonal_tolerance);
  rep.martingale = compare_covariance(martingale, target, options.diagonal_tolerance, options.offdiagonal_tolerance);
  for (int i = 0; i < d; ++i) {
    std::vector<double> coord;
    coord.reserve(walk.size());
    for (const auto& w : walk) coord.push_back(w[static_cast<std::size_t>(i)]);
    rep.ks_walk.push_back(lattice_ks_statistic(std::move(coord), target(i, i), 1.0 / nn));
  }
  if (!std::isnan(options.ks_threshold)) {
    rep.gaussian_ok = std::all_of(rep.ks_walk.begin(), rep.ks_walk.end(),
                                  [&](double k) { return k <= options.ks_threshold; });
  }
  return rep;
}

}  // namespace rcm
