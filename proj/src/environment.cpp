#include "rcm/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "rcm/errors.hpp"

namespace rcm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// E[P^r] for a Pareto law with scale 1 and tail index a.
double pareto_moment(double a, double r) { return r < a ? a / (a - r) : kInfinity; }

Coord wrap(Coord x, Coord side) {
  const Coord r = x % side;
  return r < 0 ? r + side : r;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void validate(const MarginalSpec& spec) {
  std::visit(Overloaded{
                 [](const ConstantLaw& law) {
                   if (!(law.value > 0.0) || !std::isfinite(law.value))
                     throw ValidationError("constant conductance must be positive and finite");
                 },
                 [](const UniformEllipticLaw& law) {
                   if (!(law.lambda > 0.0 && law.lambda <= 1.0))
                     throw ValidationError("uniform-elliptic lambda must lie in (0, 1]");
                 },
                 [](const LogNormalLaw& law) {
                   if (!(law.sigma > 0.0) || !std::isfinite(law.sigma))
                     throw ValidationError("log-normal sigma must be positive");
                 },
                 [](const TwoSidedParetoLaw& law) {
                   if (!(law.p_bar > 1.0) || !(law.q_bar > 1.0))
                     throw ValidationError("two-sided Pareto tail indices must exceed 1");
                 },
             },
             spec);
}

std::string describe(const MarginalSpec& spec) {
  return std::visit(Overloaded{
                        [](const ConstantLaw& law) { return "constant(" + fmt_double(law.value) + ")"; },
                        [](const UniformEllipticLaw& law) { return "uniform(" + fmt_double(law.lambda) + ")"; },
                        [](const LogNormalLaw& law) { return "lognormal(" + fmt_double(law.sigma) + ")"; },
                        [](const TwoSidedParetoLaw& law) {
                          return "pareto(" + fmt_double(law.p_bar) + "," + fmt_double(law.q_bar) + ")";
                        },
                    },
                    spec);
}

double inverse_cdf(const MarginalSpec& spec, double u) {
  return std::visit(Overloaded{
                        [](const ConstantLaw& law) { return law.value; },
                        [u](const UniformEllipticLaw& law) {
                          const double lo = law.lambda;
                          const double hi = 1.0 / law.lambda;
                          return lo + u * (hi - lo);
                        },
                        [u](const LogNormalLaw& law) {
                          const boost::math::normal_distribution<double> standard;
                          return std::exp(law.sigma * boost::math::quantile(standard, u));
                        },
                        [u](const TwoSidedParetoLaw& law) {
                          // Lower half of the mass is 1/P₋ on (0, 1], upper half is P₊ on [1, ∞).
                          if (u < 0.5) return std::pow(2.0 * u, 1.0 / law.q_bar);
                          return std::pow(2.0 * (1.0 - u), -1.0 / law.p_bar);
                        },
                    },
                    spec);
}

double analytic_moment(const MarginalSpec& spec, double s) {
  return std::visit(Overloaded{
                        [s](const ConstantLaw& law) { return std::pow(law.value, s); },
                        [s](const UniformEllipticLaw& law) {
                          const double lo = law.lambda;
                          const double hi = 1.0 / law.lambda;
                          if (hi == lo) return std::pow(lo, s);
                          if (s == -1.0) return (std::log(hi) - std::log(lo)) / (hi - lo);
                          return (std::pow(hi, s + 1.0) - std::pow(lo, s + 1.0)) / ((s + 1.0) * (hi - lo));
                        },
                        [s](const LogNormalLaw& law) { return std::exp(0.5 * s * s * law.sigma * law.sigma); },
                        [s](const TwoSidedParetoLaw& law) {
                          return 0.5 * pareto_moment(law.p_bar, s) + 0.5 * pareto_moment(law.q_bar, -s);
                        },
                    },
                    spec);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t bond_hash(std::uint64_t seed, const Vertex& lower, int direction) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(direction + 1));
  for (int i = 0; i < lower.dim; ++i) {
    h = mix64(h ^ (static_cast<std::uint64_t>(lower[i]) * 0xD6E8FEB86659FD93ULL + static_cast<std::uint64_t>(i)));
  }
  return h;
}

double hash_to_unit(std::uint64_t h) { return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53; }

ConductanceField::ConductanceField(int dim, std::uint64_t seed, MarginalSpec spec, Geometry geometry)
    : dim_(dim), seed_(seed), spec_(std::move(spec)), geometry_(geometry) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("conductance field dimension out of range");
  validate(spec_);
  if (const auto* torus = std::get_if<TorusGeometry>(&geometry_); torus && torus->side < 1) {
    throw ValidationError("torus side must be positive");
  }
}

std::optional<Coord> ConductanceField::torus_side() const {
  if (const auto* torus = std::get_if<TorusGeometry>(&geometry_)) return torus->side;
  return std::nullopt;
}

BondSample ConductanceField::sample(const Vertex& lower, int direction) const {
  Vertex id = lower;
  if (const auto* torus = std::get_if<TorusGeometry>(&geometry_)) {
    for (int i = 0; i < dim_; ++i) id[i] = wrap(id[i], torus->side);
  }
  const double raw = inverse_cdf(spec_, hash_to_unit(bond_hash(seed_, id, direction)));
  if (!(raw > kMinConductance)) return {kMinConductance, true};
  if (!(raw < kMaxConductance)) return {kMaxConductance, true};
  return {raw, false};
}

double ConductanceField::conductance(const Vertex& lower, int direction) const {
  return sample(lower, direction).value;
}

std::size_t ConductanceField::clamp_events(const Box& box) const {
  std::size_t count = 0;
  box.for_each_bond([&](const Bond& e) { count += sample(e.lower, e.direction).clamped ? 1 : 0; });
  return count;
}

std::string TableMedium::key(const Vertex& lower, int direction) { return lower.str() + "#" + std::to_string(direction); }

double TableMedium::conductance(const Vertex& lower, int direction) const {
  const auto it = overrides_.find(key(lower, direction));
  return it == overrides_.end() ? background_ : it->second;
}

void TableMedium::set(const Bond& e, double value) {
  if (!(value > 0.0)) throw ValidationError("conductances must be positive");
  overrides_[key(e.lower, e.direction)] = value;
}

void write_conductance_csv(std::ostream& os, const Medium& medium, const Box& box) {
  const int d = box.dim();
  for (int i = 0; i < d; ++i) os << "lower_" << (i + 1) << ',';
  os << "direction,value\n";
  box.for_each_bond([&](const Bond& e) {
    for (int i = 0; i < d; ++i) os << e.lower[i] << ',';
    os << (e.direction + 1) << ',' << fmt_double(medium(e)) << '\n';
  });
}

double mu(const Medium& medium, const Vertex& x) {
  double acc = 0.0;
  for (int i = 0; i < x.dim; ++i) {
    acc += medium.conductance(x, i);
    acc += medium.conductance(x.shifted(i, -1), i);
  }
  return acc;
}

double nu(const Medium& medium, const Vertex& x) {
  double acc = 0.0;
  for (int i = 0; i < x.dim; ++i) {
    acc += 1.0 / medium.conductance(x, i);
    acc += 1.0 / medium.conductance(x.shifted(i, -1), i);
  }
  return acc;
}

MomentCheck check_moment_condition(int dim, double p, double q) {
  if (dim < 3) throw ValidationError("moment condition requires d >= 3");
  if (!(p > 1.0)) throw ValidationError("moment exponent p must exceed 1");
  if (!(q > 1.0)) throw ValidationError("moment exponent q must exceed 1");
  MomentCheck out;
  MomentProfile& prof = out.profile;
  prof.dim = dim;
  prof.p = p;
  prof.q = q;
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  const double bound = 2.0 / (dim - 1);
  prof.delta = 1.0 / (dim - 1) - 0.5 * inv_p - 0.5 * inv_q;
  prof.p_prime = std::isinf(p) ? 1.0 : p / (p - 1.0);
  prof.p_star = 1.0 / (0.5 - 0.5 * inv_p + 1.0 / (dim - 1));
  prof.chi_exp = 1.0 + prof.delta;
  out.admissible = inv_p + inv_q < bound;
  if (!out.admissible) {
    std::ostringstream os;
    os << "moment condition 1/p + 1/q < 2/(d-1) violated: 1/p + 1/q = " << inv_p + inv_q
       << " >= " << bound << " (p=" << p << ", q=" << q << ", d=" << dim << ")";
    out.violation = os.str();
  }
  return out;
}

MomentProfile MomentProfile::make(int dim, double p, double q) {
  MomentCheck check = check_moment_condition(dim, p, q);
  if (!check.admissible) throw ValidationError(check.violation);
  return check.profile;
}

double lambda_contrast(const Medium& medium, const Box& box, double p, double q) {
  std::vector<double> w;
  std::vector<double> inv;
  w.reserve(box.bond_count());
  inv.reserve(box.bond_count());
  box.for_each_bond([&](const Bond& e) {
    const double v = medium(e);
    w.push_back(v);
    inv.push_back(1.0 / v);
  });
  if (w.empty()) throw RegionError("contrast over a box without interior bonds");
  return lp_norm(w, p, Averaging::kMean) * lp_norm(inv, q, Averaging::kMean);
}

double lambda_contrast(const Medium& medium, const Box& box, const MomentProfile& profile) {
  return lambda_contrast(medium, box, profile.p, profile.q);
}

std::vector<AveragePoint> ergodic_average_curve(const ConductanceField& field,
                                                const std::function<double(const Vertex&)>& observable,
                                                const Vertex& direction, const std::vector<Coord>& radii) {
  std::vector<AveragePoint> out;
  for (Coord n : radii) {
    if (n < 0) throw ValidationError("radii must be nonnegative");
    if (auto side = field.torus_side(); side && 2 * n > *side) {
      throw ValidationError("radius " + std::to_string(n) + " exceeds half the torus side");
    }
    const Box box(direction.scaled(n), n);
    double acc = 0.0;
    box.for_each_vertex([&](const Vertex& x) { acc += std::abs(observable(x)); });
    out.push_back({n, acc / static_cast<double>(box.size())});
  }
  return out;
}

std::vector<AveragePoint> ergodic_average_curve(const ConductanceField& field, Observable observable,
                                                double exponent, const Vertex& direction,
                                                const std::vector<Coord>& radii) {
  const auto f = [&](const Vertex& x) {
    const double base = observable == Observable::kMuPower ? mu(field, x) : nu(field, x);
    return std::pow(base, exponent);
  };
  return ergodic_average_curve(field, f, direction, radii);
}

}  // namespace rcm
