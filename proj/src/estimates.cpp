#include "rcm/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "rcm/cell_problem.hpp"
#include "rcm/errors.hpp"

namespace rcm {

namespace {

using Components = std::vector<std::pair<std::string, double>>;

BoundReport finish(std::string kind, double lhs, double rhs, double constant, Components components) {
  BoundReport r;
  r.kind = std::move(kind);
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = constant;
  r.components = std::move(components);
  if (lhs == 0.0) {
    r.trivial = true;
    r.ratio = 0.0;
  } else {
    r.ratio = rhs > 0.0 ? lhs / rhs : kInfinity;
  }
  r.passed = r.trivial || !r.calibrated() || r.ratio <= constant;
  return r;
}

double max_abs_on(const ScalarField& u, const Box& region) { return norm(u, region, kInfinity, Averaging::kSum); }

// Bond-wise gradient norm over an explicit bond list.
double gradient_norm(const ScalarField& u, std::span<const Bond> bonds, double s, Averaging avg) {
  std::vector<double> g;
  g.reserve(bonds.size());
  for (const Bond& e : bonds) g.push_back(u(e.upper()) - u(e.lower));
  return lp_norm(g, s, avg);
}

double gradient_norm(const ScalarField& u, const Box& region, double s, Averaging avg) {
  return gradient_norm(u, region.bonds(), s, avg);
}

// ã_α - b̃_α without cancellation when a and b share a sign.
double power_difference(double a, double b, double alpha) {
  if (a == b) return 0.0;
  if (a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0)) return signed_power(a, alpha) - signed_power(b, alpha);
  const double sign = a > 0.0 ? 1.0 : -1.0;
  const double x = std::abs(a);
  const double y = std::abs(b);
  // x^α - y^α = y^α (exp(α log(x/y)) - 1), with x/y = 1 + (x - y)/y exactly split.
  return sign * std::pow(y, alpha) * std::expm1(alpha * std::log1p((x - y) / y));
}

const std::map<std::string, std::function<std::pair<double, double>(const BoundReport&)>>& recomposers() {
  static const std::map<std::string, std::function<std::pair<double, double>(const BoundReport&)>> table = {
      {"local_boundedness",
       [](const BoundReport& r) {
         return std::pair{r.component("max_abs_u"),
                          std::pow(r.component("lambda"), r.component("lambda_exponent")) * r.component("u_norm")};
       }},
      {"cutoff",
       [](const BoundReport& r) {
         const double rho = r.component("rho");
         const double g = r.component("grad_v_norm");
         const double v = r.component("v_norm");
         return std::pair{r.component("j_1d"),
                          r.component("width_factor") * r.component("omega_norm") * (g * g + v * v / (rho * rho))};
       }},
      {"sobolev_bulk",
       [](const BoundReport& r) { return std::pair{r.component("deviation_norm"), r.component("gradient_norm")}; }},
      {"sobolev_sphere",
       [](const BoundReport& r) {
         return std::pair{r.component("f_star_norm"),
                          r.component("gradient_norm") + r.component("f_norm") / r.component("n")};
       }},
      {"energy",
       [](const BoundReport& r) {
         return std::pair{r.component("weighted_gradient_energy"),
                          r.component("factor") * r.component("cutoff_energy")};
       }},
      {"gradient",
       [](const BoundReport& r) {
         return std::pair{r.component("gradient_norm"),
                          std::sqrt(r.component("lambda")) / r.component("width") * r.component("u_norm")};
       }},
      {"bound2d",
       [](const BoundReport& r) {
         return std::pair{r.component("max_abs_u"),
                          r.component("n") * std::sqrt(r.component("inverse_omega_mean")) *
                                  std::sqrt(r.component("energy_mean")) +
                              r.component("u_mean")};
       }},
      {"pigeonhole",
       [](const BoundReport& r) {
         const double n = r.component("n");
         return std::pair{r.component("layer_gradient") + r.component("layer_u") / n,
                          (r.component("total_gradient") + r.component("total_u") / n) / n};
       }},
      {"sobolev_1d",
       [](const BoundReport& r) {
         return std::pair{r.component("layer_max"),
                          r.component("layer_gradient") + r.component("layer_u") / r.component("k")};
       }},
      {"multiscale",
       [](const BoundReport& r) {
         const double q = r.component("coarse");
         return std::pair{r.component("max_abs_chi"),
                          (r.component("m_power") * r.component("chi_l1") + q) *
                                  std::pow(r.component("sup_lambda"), r.component("lambda_exponent")) +
                              q};
       }},
  };
  return table;
}

}  // namespace

double BoundReport::component(const std::string& name) const {
  for (const auto& [key, value] : components) {
    if (key == name) return value;
  }
  throw ValidationError("report '" + kind + "' has no component '" + name + "'");
}

std::pair<double, double> recompute(const BoundReport& report) {
  const auto& table = recomposers();
  const auto it = table.find(report.kind);
  if (it == table.end()) throw ValidationError("no recomposition rule for report kind '" + report.kind + "'");
  return it->second(report);
}

double require_harmonic(const Medium& omega, const ScalarField& u, const Box& region, double tol) {
  const Box outer(region.center(), region.radius() + 1);
  if (!u.box().contains(outer)) {
    throw RegionError("harmonicity on " + region.center().str() + "+B(" + std::to_string(region.radius()) +
                      ") needs values one layer further out");
  }
  double w_max = 0.0;
  region.for_each_vertex([&](const Vertex& x) {
    for (int i = 0; i < x.dim; ++i) {
      w_max = std::max({w_max, omega.conductance(x, i), omega.conductance(x.shifted(i, -1), i)});
    }
  });
  const double u_max = max_abs_on(u, outer);
  if (u_max == 0.0) return 0.0;
  const double residual = max_harmonic_residual(omega, u, region) / (w_max * u_max);
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << "function is not harmonic on the required region: relative residual " << residual << " > " << tol;
    throw PreconditionError(os.str(), residual);
  }
  return residual;
}

// ---------------------------------------------------------------------------

BoundReport local_boundedness_ratio(const Medium& omega, const ScalarField& u, const Vertex& y, Coord n,
                                    const MomentProfile& profile, BoundednessForm form, double gamma,
                                    double constant) {
  if (n < 1) throw ValidationError("local boundedness needs n >= 1");
  if (form == BoundednessForm::kCorollary && !(gamma > 0.0 && gamma <= 1.0)) {
    throw ValidationError("gamma must lie in (0, 1]");
  }
  const double delta = profile.delta;
  const double pp = profile.p_prime;
  Coord outer_radius = 2 * n;
  double exponent = 0.0;
  double s = 1.0;
  switch (form) {
    case BoundednessForm::kTheorem:
      exponent = pp * (delta + 1.0) / delta;
      s = 1.0;
      break;
    case BoundednessForm::kCorollary:
      exponent = (delta + 1.0) / (2.0 * delta * gamma);
      s = 2.0 * pp * gamma;
      break;
    case BoundednessForm::kLargeBox:
      outer_radius = 4 * n;
      exponent = (delta + 1.0) / (2.0 * delta);
      s = 2.0 * pp;
      break;
  }
  const Box outer(y, outer_radius);
  const double residual = require_harmonic(omega, u, outer);
  const double lhs = max_abs_on(u, Box(y, n));
  const double lambda = lambda_contrast(omega, outer, profile);
  const double u_norm = norm(u, outer, s, Averaging::kMean);
  const double rhs = std::pow(lambda, exponent) * u_norm;
  return finish("local_boundedness", lhs, rhs, constant,
                {{"max_abs_u", lhs},
                 {"lambda", lambda},
                 {"lambda_exponent", exponent},
                 {"u_norm", u_norm},
                 {"norm_exponent", s},
                 {"outer_radius", static_cast<double>(outer_radius)},
                 {"delta", delta},
                 {"p_prime", pp},
                 {"harmonic_residual", residual}});
}

// ---------------------------------------------------------------------------

double shell_energy(const Medium& omega, const ScalarField& v, const Vertex& center, Coord k) {
  double acc = 0.0;
  for (const Bond& e : shell_bonds(center, k)) {
    const double avg = 0.5 * (std::abs(v(e.lower)) + std::abs(v(e.upper())));
    acc += omega(e) * avg * avg;
  }
  return acc;
}

double CutoffProfile::radial(Coord r) const {
  if (r <= rho) return 1.0;
  if (r >= sigma) return 0.0;
  return values[static_cast<std::size_t>(r - rho)];
}

ScalarField CutoffProfile::field(const Box& box) const {
  return ScalarField::from_function(box, [&](const Vertex& x) { return (*this)(x, box.center()); });
}

bool CutoffProfile::admissible() const {
  if (rho < 0 || sigma <= rho) return false;
  if (values.size() != static_cast<std::size_t>(sigma - rho + 1)) return false;
  if (values.front() != 1.0 || values.back() != 0.0) return false;
  return std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0 && std::isfinite(v); });
}

CutoffSolution optimal_cutoff(std::span<const double> f, Coord rho, Coord sigma) {
  if (rho < 0 || sigma <= rho) throw ValidationError("optimal cutoff needs 0 <= rho < sigma");
  const auto width = static_cast<std::size_t>(sigma - rho);
  if (f.size() != width) throw ValidationError("need one shell energy per shell rho..sigma-1");
  CutoffSolution out;
  out.shell_energies.assign(f.begin(), f.end());
  out.profile.rho = rho;
  out.profile.sigma = sigma;
  out.profile.values.assign(width + 1, 0.0);
  for (double v : f) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("shell energies must be finite and nonnegative");
  }
  const auto zero = std::find(f.begin(), f.end(), 0.0);
  if (zero != f.end()) {
    // Drop from 1 to 0 across the first free shell.
    const auto k = static_cast<std::size_t>(zero - f.begin());
    for (std::size_t i = 0; i <= k; ++i) out.profile.values[i] = 1.0;
    out.energy = 0.0;
    return out;
  }
  double resistance = 0.0;
  for (double v : f) resistance += 1.0 / v;
  double partial = 0.0;
  out.profile.values[0] = 1.0;
  for (std::size_t i = 1; i < width; ++i) {
    partial += 1.0 / f[i - 1];
    out.profile.values[i] = 1.0 - partial / resistance;
  }
  out.profile.values[width] = 0.0;
  out.energy = 1.0 / resistance;
  return out;
}

CutoffSolution optimal_cutoff(const Medium& omega, const ScalarField& v, const Vertex& center, Coord rho,
                              Coord sigma) {
  if (rho < 0 || sigma <= rho) throw ValidationError("optimal cutoff needs 0 <= rho < sigma");
  std::vector<double> f;
  for (Coord k = rho; k < sigma; ++k) f.push_back(shell_energy(omega, v, center, k));
  return optimal_cutoff(f, rho, sigma);
}

double radial_energy(std::span<const double> f, const CutoffProfile& profile) {
  if (f.size() != static_cast<std::size_t>(profile.sigma - profile.rho)) {
    throw ValidationError("need one shell energy per shell rho..sigma-1");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double step = profile.values[k + 1] - profile.values[k];
    acc += f[k] * step * step;
  }
  return acc;
}

double cutoff_energy(const Medium& omega, const ScalarField& v, const ScalarField& eta) {
  const Box& box = eta.box();
  double acc = 0.0;
  box.for_each_bond([&](const Bond& e) {
    const double grad = eta(e.upper()) - eta(e.lower);
    if (grad == 0.0) return;
    const double avg = 0.5 * (std::abs(v(e.lower)) + std::abs(v(e.upper())));
    acc += omega(e) * avg * avg * grad * grad;
  });
  return acc;
}

BoundReport cutoff_upper_bound_check(const Medium& omega, const ScalarField& v, const Vertex& center, Coord rho,
                                     Coord sigma, const MomentProfile& profile, double constant) {
  if (rho < 1 || sigma <= rho) throw ValidationError("cutoff check needs 1 <= rho < sigma");
  const int d = profile.dim;
  if (v.box().dim() != d) throw ValidationError("profile dimension differs from the field");
  const CutoffSolution cut = optimal_cutoff(omega, v, center, rho, sigma);
  const std::vector<Vertex> verts = annulus_vertices(center, rho, sigma);
  const std::vector<Bond> bonds = annulus_bonds(center, rho, sigma);
  std::vector<double> w;
  w.reserve(bonds.size());
  for (const Bond& e : bonds) w.push_back(omega(e));
  const double omega_norm = lp_norm(w, profile.p, Averaging::kSum);
  const double grad_norm = gradient_norm(v, bonds, profile.p_star, Averaging::kSum);
  const double v_norm = norm(v, verts, profile.p_star, Averaging::kSum);
  const double width_factor =
      std::pow(static_cast<double>(sigma - rho), -2.0 * d / static_cast<double>(d - 1));
  const double r = static_cast<double>(rho);
  const double rhs = width_factor * omega_norm * (grad_norm * grad_norm + v_norm * v_norm / (r * r));
  return finish("cutoff", cut.energy, rhs, constant,
                {{"j_1d", cut.energy},
                 {"width_factor", width_factor},
                 {"omega_norm", omega_norm},
                 {"grad_v_norm", grad_norm},
                 {"v_norm", v_norm},
                 {"rho", r},
                 {"sigma", static_cast<double>(sigma)},
                 {"p", profile.p},
                 {"p_star", profile.p_star}});
}

// ---------------------------------------------------------------------------

BoundReport sobolev_bulk_check(const ScalarField& f, const Vertex& center, Coord n, double s, double constant) {
  const int d = f.box().dim();
  if (!(s >= 1.0 && s < d)) throw ValidationError("bulk Sobolev check needs 1 <= s < d");
  if (n < 1) throw ValidationError("bulk Sobolev check needs n >= 1");
  const Box box(center, n);
  const double s_star = d * s / (d - s);
  const double avg = mean(f, box);
  std::vector<double> dev;
  dev.reserve(box.size());
  box.for_each_vertex([&](const Vertex& x) { dev.push_back(f(x) - avg); });
  const double lhs = lp_norm(dev, s_star, Averaging::kSum);
  const double rhs = gradient_norm(f, box, s, Averaging::kSum);
  return finish("sobolev_bulk", lhs, rhs, constant,
                {{"deviation_norm", lhs}, {"gradient_norm", rhs}, {"s", s}, {"s_star", s_star}, {"n", static_cast<double>(n)}});
}

BoundReport sobolev_sphere_check(const ScalarField& f, const Vertex& center, Coord n, double s, double constant) {
  const int d = f.box().dim();
  if (!(s >= 1.0 && s < d - 1)) throw ValidationError("sphere Sobolev check needs 1 <= s < d - 1");
  if (n < 1) throw ValidationError("sphere Sobolev check needs n >= 1");
  const Box box(center, n);
  const double s_star = (d - 1) * s / (d - 1 - s);
  const std::vector<Vertex> sphere = boundary(box);
  const std::vector<Bond> bonds = bonds_where(box, [&](const Vertex& x) { return box.on_boundary(x); });
  const double lhs = norm(f, sphere, s_star, Averaging::kSum);
  const double grad = gradient_norm(f, bonds, s, Averaging::kSum);
  const double f_norm = norm(f, sphere, s, Averaging::kSum);
  const double nn = static_cast<double>(n);
  return finish("sobolev_sphere", lhs, grad + f_norm / nn, constant,
                {{"f_star_norm", lhs}, {"gradient_norm", grad}, {"f_norm", f_norm}, {"n", nn}, {"s", s}, {"s_star", s_star}});
}

// ---------------------------------------------------------------------------

double signed_power(double u, double alpha) {
  if (u == 0.0) return 0.0;
  const double mag = std::exp(alpha * std::log(std::abs(u)));
  return u > 0.0 ? mag : -mag;
}

BoundReport energy_estimate_check(const Medium& omega, const ScalarField& u, const ScalarField& eta, double alpha) {
  if (!(alpha >= 1.0)) throw ValidationError("energy estimate needs alpha >= 1");
  const Box& box = u.box();
  if (!(eta.box().center() == box.center()) || eta.box().radius() != box.radius()) {
    throw ValidationError("cutoff must live on the same box as u");
  }
  if (box.radius() < 1) throw ValidationError("energy estimate needs a box of radius >= 1");
  for (std::size_t k = 0; k < box.size(); ++k) {
    const double e = eta.value(k);
    if (!(e >= 0.0) || !std::isfinite(e)) throw ValidationError("cutoff must be finite and nonnegative");
    if (e != 0.0 && box.on_boundary(box.vertex(k))) throw ValidationError("cutoff must vanish on the boundary");
  }
  const double residual = require_harmonic(omega, u, Box(box.center(), box.radius() - 1));

  double lhs = 0.0;
  double cut = 0.0;
  box.for_each_bond([&](const Bond& e) {
    const Vertex up = e.upper();
    const double w = omega(e);
    const double el = eta(e.lower);
    const double eu = eta(up);
    const double eta_sq = 0.5 * (el * el + eu * eu);
    if (eta_sq != 0.0) {
      const double g = power_difference(u(up), u(e.lower), alpha);
      lhs += eta_sq * w * g * g;
    }
    const double ge = eu - el;
    if (ge != 0.0) {
      const double avg = 0.5 * (std::pow(std::abs(u(up)), alpha) + std::pow(std::abs(u(e.lower)), alpha));
      cut += w * avg * avg * ge * ge;
    }
  });
  const double factor = 256.0 * std::pow(alpha, 4) / ((2.0 * alpha - 1.0) * (2.0 * alpha - 1.0));
  BoundReport r = finish("energy", lhs, factor * cut, 1.0,
                         {{"weighted_gradient_energy", lhs},
                          {"cutoff_energy", cut},
                          {"factor", factor},
                          {"alpha", alpha},
                          {"harmonic_residual", residual}});
  return r;
}

BoundReport gradient_bound_check(const Medium& omega, const ScalarField& u, const Vertex& center, Coord n, Coord rho,
                                 Coord sigma, const MomentProfile& profile, double constant) {
  if (!(n >= 1 && n <= rho && rho < sigma && sigma <= 2 * n)) {
    throw ValidationError("gradient bound needs n <= rho < sigma <= 2n");
  }
  const double residual = require_harmonic(omega, u, Box(center, sigma));
  const double s = std::isinf(profile.q) ? 2.0 : 2.0 * profile.q / (profile.q + 1.0);
  const double lhs = gradient_norm(u, Box(center, rho), s, Averaging::kMean);
  const double lambda = lambda_contrast(omega, Box(center, 2 * n), profile);
  const double u_norm = norm(u, Box(center, sigma), 2.0 * profile.p_prime, Averaging::kMean);
  const double width = static_cast<double>(sigma - rho);
  return finish("gradient", lhs, std::sqrt(lambda) / width * u_norm, constant,
                {{"gradient_norm", lhs},
                 {"lambda", lambda},
                 {"width", width},
                 {"u_norm", u_norm},
                 {"gradient_exponent", s},
                 {"harmonic_residual", residual}});
}

// ---------------------------------------------------------------------------

PowerCheck power_inequality_check(PowerInequality kind, double a, double b, double alpha, double beta) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("power inequality arguments must be finite");
  PowerCheck out;
  switch (kind) {
    case PowerInequality::kA1: {
      if (alpha == 0.0 || beta == 0.0) throw ValidationError("A1 needs alpha, beta != 0");
      if (a == b) break;
      out.lhs = std::abs(power_difference(a, b, alpha));
      const double k = std::max(1.0, std::abs(alpha / beta));
      const double e = alpha - beta;
      const double pa = e == 0.0 ? 1.0 : std::pow(std::abs(a), e);
      const double pb = e == 0.0 ? 1.0 : std::pow(std::abs(b), e);
      out.rhs = k * std::abs(power_difference(a, b, beta)) * (pa + pb);
      break;
    }
    case PowerInequality::kA2: {
      if (!(alpha > 0.5)) throw ValidationError("A2 needs alpha > 1/2");
      if (a == b) break;
      const double g = power_difference(a, b, alpha);
      out.lhs = g * g;
      out.rhs = alpha * alpha / (2.0 * alpha - 1.0) * (a - b) * power_difference(a, b, 2.0 * alpha - 1.0);
      break;
    }
    case PowerInequality::kA3: {
      if (!(alpha >= 0.5)) throw ValidationError("A3 needs alpha >= 1/2");
      if (a == b) break;
      const double e = 2.0 * alpha - 1.0;
      const double pa = e == 0.0 ? 1.0 : std::pow(std::abs(a), e);
      const double pb = e == 0.0 ? 1.0 : std::pow(std::abs(b), e);
      out.lhs = (pa + pb) * (a - b);
      out.rhs = 4.0 * std::abs(power_difference(a, b, alpha)) *
                (std::pow(std::abs(a), alpha) + std::pow(std::abs(b), alpha));
      break;
    }
  }
  out.slack = out.rhs - out.lhs;
  out.passed = out.lhs <= out.rhs + kPowerRelativeSlack * std::max(std::abs(out.lhs), std::abs(out.rhs));
  return out;
}

PowerAudit power_audit(PowerInequality kind, std::uint64_t samples, std::uint64_t seed) {
  PowerAudit audit;
  audit.kind = kind;
  std::mt19937_64 rng(mix64(seed));
  const auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  const auto nonzero_exponent = [&] {
    // |x| in [0.05, 5], random sign
    const double mag = uniform(0.05, 5.0);
    return (rng() & 1U) ? mag : -mag;
  };
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double a = uniform(-10.0, 10.0);
    const double b = uniform(-10.0, 10.0);
    double alpha = 1.0;
    double beta = 1.0;
    switch (kind) {
      case PowerInequality::kA1:
        alpha = nonzero_exponent();
        beta = nonzero_exponent();
        break;
      case PowerInequality::kA2:
        alpha = 5.0 - uniform(0.0, 4.5);  // (1/2, 5]
        break;
      case PowerInequality::kA3:
        alpha = uniform(0.5, 5.0);
        break;
    }
    const PowerCheck c = power_inequality_check(kind, a, b, alpha, beta);
    ++audit.samples;
    if (!c.passed) ++audit.violations;
    const double scale = std::max(std::abs(c.lhs), std::abs(c.rhs));
    if (scale > 0.0) audit.min_relative_slack = std::min(audit.min_relative_slack, c.slack / scale);
  }
  return audit;
}

// ---------------------------------------------------------------------------

PlanarBound bound_2d(const Medium& omega, const ScalarField& u, const Vertex& center, Coord n, double full_constant,
                     double sobolev_constant) {
  if (u.box().dim() != 2 || omega.dim() != 2) throw ValidationError("the planar bound is for d = 2 only");
  if (n < 1) throw ValidationError("planar bound needs n >= 1");
  const Box big(center, 2 * n);
  const double residual = require_harmonic(omega, u, big);
  const double nn = static_cast<double>(n);

  // Full bound.
  const double max_u = max_abs_on(u, Box(center, n));
  std::vector<double> inv;
  std::vector<double> energy;
  big.for_each_bond([&](const Bond& e) {
    const double w = omega(e);
    const double g = u(e.upper()) - u(e.lower);
    inv.push_back(1.0 / w);
    energy.push_back(w * g * g);
  });
  const double inv_mean = lp_norm(inv, 1.0, Averaging::kMean);
  const double energy_mean = lp_norm(energy, 1.0, Averaging::kMean);
  const double u_mean = norm(u, big, 1.0, Averaging::kMean);
  PlanarBound out;
  out.full = finish("bound2d", max_u, nn * std::sqrt(inv_mean) * std::sqrt(energy_mean) + u_mean, full_constant,
                    {{"max_abs_u", max_u},
                     {"n", nn},
                     {"inverse_omega_mean", inv_mean},
                     {"energy_mean", energy_mean},
                     {"u_mean", u_mean},
                     {"harmonic_residual", residual}});

  // Good layer: minimise ||∇u||_{L¹(∂B(k))} + n^{-1}||u||_{L¹(∂B(k))} over k ∈ {n, ..., 2n}.
  const double total_grad = gradient_norm(u, big, 1.0, Averaging::kSum);
  const double total_u = norm(u, big, 1.0, Averaging::kSum);
  double best = kInfinity;
  double best_grad = 0.0;
  double best_u = 0.0;
  for (Coord k = n; k <= 2 * n; ++k) {
    const Box layer(center, k);
    const std::vector<Bond> ring = bonds_where(layer, [&](const Vertex& x) { return layer.on_boundary(x); });
    const double g = gradient_norm(u, ring, 1.0, Averaging::kSum);
    const double v = norm(u, boundary(layer), 1.0, Averaging::kSum);
    if (g + v / nn < best) {
      best = g + v / nn;
      best_grad = g;
      best_u = v;
      out.good_layer = k;
    }
  }
  // Constant exactly 1, no slack.
  out.pigeonhole = finish("pigeonhole", best_grad + best_u / nn, (total_grad + total_u / nn) / nn, 1.0,
                          {{"layer_gradient", best_grad},
                           {"layer_u", best_u},
                           {"total_gradient", total_grad},
                           {"total_u", total_u},
                           {"n", nn},
                           {"k", static_cast<double>(out.good_layer)}});

  // One-dimensional Sobolev step on the good layer.
  const Box layer(center, out.good_layer);
  const std::vector<Vertex> ring_vertices = boundary(layer);
  const double layer_max = norm(u, ring_vertices, kInfinity, Averaging::kSum);
  const double kk = static_cast<double>(out.good_layer);
  out.sobolev_1d = finish("sobolev_1d", layer_max, best_grad + best_u / kk, sobolev_constant,
                          {{"layer_max", layer_max}, {"layer_gradient", best_grad}, {"layer_u", best_u}, {"k", kk}});
  out.max_principle_gap = max_u - layer_max;
  return out;
}

}  // namespace rcm
