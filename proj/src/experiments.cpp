#include "rcm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rcm/calibration.hpp"
#include "rcm/errors.hpp"
#include "rcm/instances.hpp"
#include "rcm/parallel.hpp"

namespace rcm {

namespace {

// Cutoff competitors tried per instance against the optimal radial profile.
constexpr int kCutoffCompetitors = 20;
constexpr double kEnergyAlphas[] = {1.0, 1.5, 2.0};

BoundReport make_report(std::string kind, double lhs, double rhs, double constant,
                        std::vector<std::pair<std::string, double>> components) {
  BoundReport r;
  r.kind = std::move(kind);
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = constant;
  r.components = std::move(components);
  r.trivial = lhs == 0.0;
  r.ratio = r.trivial ? 0.0 : (rhs > 0.0 ? lhs / rhs : kInfinity);
  r.passed = r.trivial || !r.calibrated() || r.ratio <= constant;
  return r;
}

BoundednessForm parse_form(const std::string& form) {
  if (form == "corollary") return BoundednessForm::kCorollary;
  if (form == "large") return BoundednessForm::kLargeBox;
  return BoundednessForm::kTheorem;
}

MomentProfile require_profile(const ExperimentConfig& c, const std::string& what) {
  if (c.dim < 3) throw ValidationError(what + " needs environment.dimension >= 3");
  return MomentProfile::make(c.dim, c.p, c.q);
}

Json exponents_json(const ExperimentConfig& c) {
  Json j{{"p", c.p == kInfinity ? Json("inf") : Json(c.p)}, {"q", c.q == kInfinity ? Json("inf") : Json(c.q)}};
  if (c.dim >= 3) {
    const MomentCheck check = check_moment_condition(c.dim, c.p, c.q);
    j["admissible"] = check.admissible;
    j["condition"] = "1/p + 1/q < 2/(d-1)";
    j["delta"] = check.profile.delta;
    j["p_prime"] = check.profile.p_prime;
    j["p_star"] = check.profile.p_star;
  }
  return j;
}

std::string header(const std::string& prefix, int d) {
  std::string out;
  for (int i = 1; i <= d; ++i) out += "," + prefix + std::to_string(i);
  return out;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Random nonincreasing profile from 1 at rho to 0 at sigma.
CutoffProfile random_profile(Coord rho, Coord sigma, std::mt19937_64& rng) {
  std::vector<double> drops(static_cast<std::size_t>(sigma - rho));
  double total = 0.0;
  for (double& v : drops) total += (v = uniform01(rng) + 1e-3);
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
  return prof;
}

// ---------------------------------------------------------------------------

void run_env(const ExperimentConfig& c, ArtifactWriter& w, Json& summary) {
  const ConductanceField field(c.dim, c.seed, c.law, c.geometry());
  const int d = c.dim;
  std::vector<double> values;
  std::size_t clamped = 0;
  std::ostringstream csv;
  for (int i = 1; i <= d; ++i) csv << "lower_" << i << ',';
  csv << "direction,value\n";
  const auto emit = [&](const Vertex& x, int k) {
    const BondSample s = field.sample(x, k);
    values.push_back(s.value);
    clamped += s.clamped ? 1 : 0;
    for (int i = 0; i < d; ++i) csv << x[i] << ',';
    csv << (k + 1) << ',' << format_double(s.value) << '\n';
  };
  if (c.torus) {
    const Torus torus(d, c.side);
    for (std::size_t idx = 0; idx < torus.size(); ++idx) {
      const Vertex x = torus.vertex(idx);
      for (int k = 0; k < d; ++k) emit(x, k);
    }
    summary["region"] = "torus cell [0, " + std::to_string(c.side) + ")^" + std::to_string(d);
  } else {
    const Box box = Box::centered(d, c.radius);
    box.for_each_bond([&](const Bond& e) { emit(e.lower, e.direction); });
    summary["region"] = "B(" + std::to_string(c.radius) + ")";
  }
  w.write("environment.csv", csv.str());

  std::vector<double> inverse(values.size());
  std::transform(values.begin(), values.end(), inverse.begin(), [](double v) { return 1.0 / v; });
  const double omega_p = lp_norm(values, c.p, Averaging::kMean);
  const double inverse_q = lp_norm(inverse, c.q, Averaging::kMean);
  summary["law"] = describe(c.law);
  summary["bonds"] = values.size();
  summary["clamp_events"] = clamped;
  summary["min"] = *std::min_element(values.begin(), values.end());
  summary["max"] = *std::max_element(values.begin(), values.end());
  summary["mean"] = lp_norm(values, 1.0, Averaging::kMean);
  summary["omega_lp_norm"] = omega_p;
  summary["inverse_lq_norm"] = inverse_q;
  summary["lambda"] = omega_p * inverse_q;
  const auto moment = [&](double s) {
    const double m = analytic_moment(c.law, s);
    return std::isfinite(m) ? Json(m) : Json("inf");
  };
  summary["analytic_moment_p"] = std::isinf(c.p) ? Json("n/a") : moment(c.p);
  summary["analytic_moment_minus_q"] = std::isinf(c.q) ? Json("n/a") : moment(-c.q);
  summary["moments"] = exponents_json(c);
}

void run_corrector(const ExperimentConfig& c, ArtifactWriter& w, Json& summary) {
  const TorusConductances omega = torus_environment(c);
  const CorrectorBundle bundle = solve_correctors(omega, solver_options(c));
  std::ostringstream csv;
  write_corrector_csv(csv, bundle);
  w.write("corrector.csv", csv.str());
  Json solves = Json::array();
  for (const SolveStats& s : bundle.stats) solves.push_back(to_json(s));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bundle.sigma2);
  summary["sigma2"] = to_json(bundle.sigma2);
  summary["sigma2_energy"] = to_json(energy_covariance(omega, bundle.chi));
  summary["min_eigenvalue"] = eig.eigenvalues().minCoeff();
  summary["solves"] = solves;
  summary["tol"] = bundle.tol;
  summary["contrast"] = omega.contrast();
  summary["mean_mu"] = omega.mean_mu();
}

void run_walk(const ExperimentConfig& c, ArtifactWriter& w, Json& summary) {
  const ConductanceField field(c.dim, c.seed, c.law, c.geometry());
  const int d = c.dim;
  const double nn = static_cast<double>(c.walk_n);
  const double horizon = nn * nn * c.horizon;
  std::vector<Vertex> ends(c.replicas);
  std::vector<std::size_t> jumps(c.replicas);
  WalkPath first;
  parallel_for(c.replicas, c.threads, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      WalkPath path = simulate_walk(field, Vertex::origin(d), horizon, replica_seed(c.seed, r), c.mode);
      ends[r] = path.final_position();
      jumps[r] = path.jumps();
      if (r == 0) first = std::move(path);
    }
  }, 2);

  std::ostringstream csv;
  csv << "replica,jumps" << header("x_", d) << '\n';
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  double total_jumps = 0.0;
  for (std::size_t r = 0; r < c.replicas; ++r) {
    csv << r << ',' << jumps[r];
    for (int i = 0; i < d; ++i) csv << ',' << ends[r][i];
    csv << '\n';
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) second(i, j) += static_cast<double>(ends[r][i] * ends[r][j]) / (nn * nn);
    }
    total_jumps += static_cast<double>(jumps[r]);
  }
  second /= static_cast<double>(c.replicas);
  w.write("endpoints.csv", csv.str());
  std::ostringstream path_csv;
  write_path_csv(path_csv, first);
  w.write("path.csv", path_csv.str());
  summary["mode"] = to_string(c.mode);
  summary["n"] = c.walk_n;
  summary["horizon"] = c.horizon;
  summary["walk_time"] = horizon;
  summary["replicas"] = c.replicas;
  summary["mean_jumps"] = total_jumps / static_cast<double>(c.replicas);
  summary["rescaled_second_moment"] = to_json(second);
}

void write_verify(const VerifyResult& v, const ExperimentConfig& c, ArtifactWriter& w, Json& summary) {
  std::ostringstream csv;
  csv << "instance,n,kind,lhs,rhs,ratio,constant,trivial,passed\n";
  Json reports = Json::array();
  for (const VerifyResult::Entry& e : v.entries) {
    const BoundReport& r = e.report;
    csv << e.instance << ',' << e.n << ',' << r.kind << ',' << format_double(r.lhs) << ',' << format_double(r.rhs)
        << ',' << format_double(r.ratio) << ',' << format_double(r.constant) << ',' << (r.trivial ? 1 : 0) << ','
        << (r.passed ? 1 : 0) << '\n';
    reports.push_back(Json{{"instance", e.instance}, {"n", e.n}, {"report", to_json(r)}});
  }
  if (!v.entries.empty()) w.write("verify.csv", csv.str());
  Json kinds = Json::object();
  for (const auto& [kind, k] : v.kinds) {
    kinds[kind] = Json{{"count", k.count},
                       {"trivial", k.trivial},
                       {"failures", k.failures},
                       {"max_ratio", k.max_ratio},
                       {"constant", std::isnan(k.constant) ? Json("uncalibrated") : Json(k.constant)}};
  }
  Json audits = Json::array();
  for (const PowerAudit& a : v.audits) audits.push_back(to_json(a));
  summary["check"] = c.check;
  summary["instances"] = c.instances;
  summary["failures"] = v.failures;
  summary["kinds"] = kinds;
  if (!v.audits.empty()) summary["audits"] = audits;
  for (const auto& [key, value] : v.extra.items()) summary[key] = value;
  if (!v.entries.empty()) summary["reports"] = reports;
}

void run_sublin_command(const ExperimentConfig& c, ArtifactWriter& w, Json& summary, int& exit_code) {
  const SublinResult s = run_sublin(c);
  const int d = c.dim;
  std::ostringstream csv;
  csv << 'n' << header("linf_", d) << header("l1_", d) << '\n';
  for (const SublinearityPoint& p : s.curve) {
    csv << p.n;
    for (double v : p.linf) csv << ',' << format_double(v);
    for (double v : p.l1) csv << ',' << format_double(v);
    csv << '\n';
  }
  w.write("sublin.csv", csv.str());
  Json ms = Json::array();
  for (const BoundReport& r : s.multiscale) ms.push_back(to_json(r));
  summary["curve"] = to_json(s.curve);
  summary["trend_ratio"] = s.trend_ratio;
  summary["trend_note"] =
      "decreasing (1/n) max|chi| is an empirical stand-in for sublinearity; no rate is asserted";
  summary["sigma2"] = to_json(s.bundle.sigma2);
  summary["multiscale"] = ms;
  summary["failures"] = s.failures;
  if (s.failures > 0) exit_code = kExitCheckFailure;
}

void run_qfclt(const ExperimentConfig& c, ArtifactWriter& w, Json& summary, int& exit_code) {
  const TorusConductances omega = torus_environment(c);
  const CorrectorBundle bundle = solve_correctors(omega, solver_options(c));
  const QfcltReport rep = qfclt_test(omega, bundle, qfclt_options(c));
  std::ostringstream csv;
  csv << "process,i,j,empirical,target,standard_error\n";
  const auto rows = [&](const char* name, const CovarianceComparison& cmp) {
    for (Eigen::Index i = 0; i < cmp.empirical.rows(); ++i) {
      for (Eigen::Index j = 0; j < cmp.empirical.cols(); ++j) {
        csv << name << ',' << (i + 1) << ',' << (j + 1) << ',' << format_double(cmp.empirical(i, j)) << ','
            << format_double(cmp.target(i, j)) << ',' << format_double(cmp.standard_error(i, j)) << '\n';
      }
    }
  };
  rows("walk", rep.walk);
  rows("martingale", rep.martingale);
  w.write("covariance.csv", csv.str());
  summary["report"] = to_json(rep);
  Json solves = Json::array();
  for (const SolveStats& s : bundle.stats) solves.push_back(to_json(s));
  summary["solves"] = solves;
  if (!rep.passed()) exit_code = kExitCheckFailure;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> commands = {"env", "corrector", "walk", "verify", "sublin", "qfclt"};
  return commands;
}

std::uint64_t instance_seed(std::uint64_t master, std::size_t instance, int slot) {
  return replica_seed(master, 4 * static_cast<std::uint64_t>(instance) + static_cast<std::uint64_t>(slot));
}

void VerifyResult::add(std::size_t instance, Coord n, BoundReport report) {
  KindSummary& k = kinds[report.kind];
  ++k.count;
  k.constant = report.constant;
  if (report.trivial) ++k.trivial;
  if (!report.passed) {
    ++k.failures;
    ++failures;
  }
  if (!report.trivial) k.max_ratio = std::max(k.max_ratio, report.ratio);
  entries.push_back({instance, n, std::move(report)});
}

BoundReport max_principle_report(const ScalarField& u) {
  const Box& box = u.box();
  double scale = 0.0;
  for (std::size_t k = 0; k < box.size(); ++k) {
    if (box.on_boundary(box.vertex(k))) scale = std::max(scale, std::abs(u.value(k)));
  }
  const double violation = max_principle_violation(u);
  return make_report("max_principle", violation, kMaxPrincipleTolerance * scale, 1.0,
                     {{"violation", violation}, {"boundary_max_abs", scale}});
}

TorusConductances torus_environment(const ExperimentConfig& c) {
  if (!c.torus) throw ValidationError("this experiment needs environment.geometry = torus");
  const ConductanceField field(c.dim, c.seed, c.law, TorusGeometry{c.side});
  return TorusConductances::sample(field, c.side);
}

SolverOptions solver_options(const ExperimentConfig& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.threads = c.threads;
  if (c.max_iterations > 0) o.max_iterations = c.max_iterations;
  return o;
}

QfcltOptions qfclt_options(const ExperimentConfig& c) {
  QfcltOptions o;
  o.n = c.walk_n;
  o.horizon = c.horizon;
  o.replicas = c.replicas;
  o.seed = c.seed;
  o.mode = c.mode;
  o.threads = c.threads;
  o.ks_threshold = calibrated_constant("ks", c.dim);
  return o;
}

VerifyResult run_verify(const ExperimentConfig& c, bool use_calibration) {
  VerifyResult out;
  const int d = c.dim;
  const auto constant = [&](const std::string& kind, double s = 0.0) {
    return use_calibration ? calibrated_constant(kind, d, c.p, c.q, s) : kNoConstant;
  };
  const auto radius = [&](std::size_t i) { return c.verify_radii[i % c.verify_radii.size()]; };
  const auto harmonic = [&](std::size_t i, Coord R) {
    return make_harmonic_instance(d, c.law, instance_seed(c.seed, i, 0), instance_seed(c.seed, i, 1),
                                  Box::centered(d, R), c.tol);
  };
  const Vertex origin = Vertex::origin(d);

  if (c.check == "power") {
    for (PowerInequality kind : {PowerInequality::kA1, PowerInequality::kA2, PowerInequality::kA3}) {
      const PowerAudit a = power_audit(kind, c.samples, replica_seed(c.seed, static_cast<std::uint64_t>(kind)));
      out.failures += a.violations;
      out.audits.push_back(a);
    }
    return out;
  }

  if (c.check == "t1") {
    const MomentProfile profile = require_profile(c, "check t1");
    const BoundednessForm form = parse_form(c.form);
    const double cst = constant("local_boundedness/" + c.form);
    for (std::size_t i = 0; i < c.instances; ++i) {
      const Coord n = radius(i);
      const HarmonicInstance inst = harmonic(i, (form == BoundednessForm::kLargeBox ? 4 * n : 2 * n) + 1);
      out.add(i, n, local_boundedness_ratio(inst.field, inst.solution.u, origin, n, profile, form, c.gamma, cst));
      out.add(i, n, max_principle_report(inst.solution.u));
    }
    out.extra["form"] = c.form;
    return out;
  }

  if (c.check == "cutoff") {
    const MomentProfile profile = require_profile(c, "check cutoff");
    const double closed = optimal_cutoff(std::vector<double>{1.0, 4.0}, 1, 3).energy;
    out.extra["closed_form_energy"] = closed;
    out.extra["closed_form_expected"] = 0.8;
    if (std::abs(closed - 0.8) > 1e-12) ++out.failures;
    for (std::size_t i = 0; i < c.instances; ++i) {
      const Coord n = radius(i);
      const HarmonicInstance inst = harmonic(i, 2 * n + 1);
      const ScalarField& u = inst.solution.u;
      const CutoffSolution best = optimal_cutoff(inst.field, u, origin, n, 2 * n);
      std::mt19937_64 rng(instance_seed(c.seed, i, 2));
      double competitor = kInfinity;
      for (int k = 0; k < kCutoffCompetitors; ++k) {
        competitor = std::min(competitor, radial_energy(best.shell_energies, random_profile(n, 2 * n, rng)));
      }
      out.add(i, n, make_report("cutoff_optimality", best.energy, competitor, 1.0 + 1e-12,
                                {{"j_1d", best.energy}, {"best_competitor", competitor}}));
      out.add(i, n, cutoff_upper_bound_check(inst.field, u, origin, n, 2 * n, profile, constant("cutoff")));
      out.add(i, n, gradient_bound_check(inst.field, u, origin, n, n, 2 * n, profile, constant("gradient")));
      out.add(i, n, max_principle_report(u));
    }
    return out;
  }

  if (c.check == "sobolev") {
    const bool bulk = c.sobolev == "bulk";
    const std::string kind = bulk ? "sobolev_bulk" : "sobolev_sphere";
    const double cst = constant(kind, c.s);
    for (std::size_t i = 0; i < c.instances; ++i) {
      const Coord n = radius(i);
      const ScalarField f = random_field(Box::centered(d, n), instance_seed(c.seed, i, 2));
      out.add(i, n, bulk ? sobolev_bulk_check(f, origin, n, c.s, cst) : sobolev_sphere_check(f, origin, n, c.s, cst));
    }
    out.extra["s"] = c.s;
    return out;
  }

  if (c.check == "energy") {
    for (std::size_t i = 0; i < c.instances; ++i) {
      const Coord n = radius(i);
      const HarmonicInstance inst = harmonic(i, n);
      const ScalarField eta = random_cutoff(Box::centered(d, n), instance_seed(c.seed, i, 2));
      const double alpha = kEnergyAlphas[i % std::size(kEnergyAlphas)];
      out.add(i, n, energy_estimate_check(inst.field, inst.solution.u, eta, alpha));
      out.add(i, n, max_principle_report(inst.solution.u));
    }
    return out;
  }

  // bound2d
  if (d != 2) throw ValidationError("check bound2d needs environment.dimension = 2");
  for (std::size_t i = 0; i < c.instances; ++i) {
    const Coord n = radius(i);
    const HarmonicInstance inst = harmonic(i, 2 * n + 1);
    const ScalarField& u = inst.solution.u;
    PlanarBound b = bound_2d(inst.field, u, origin, n, constant("bound2d"), constant("sobolev_1d"));
    BoundReport mp = max_principle_report(u);
    const double gap = std::max(0.0, b.max_principle_gap);
    out.add(i, n, std::move(b.full));
    out.add(i, n, std::move(b.pigeonhole));
    out.add(i, n, std::move(b.sobolev_1d));
    out.add(i, n, make_report("layer_max_principle", gap, mp.rhs, 1.0,
                              {{"gap", b.max_principle_gap}, {"good_layer", static_cast<double>(b.good_layer)}}));
    out.add(i, n, std::move(mp));
  }
  return out;
}

SublinResult run_sublin(const ExperimentConfig& c, bool use_calibration) {
  SublinResult out;
  const TorusConductances omega = torus_environment(c);
  out.bundle = solve_correctors(omega, solver_options(c));
  out.curve = sublinearity_curve(out.bundle.chi, c.radii);
  double first = 0.0;
  double last = 0.0;
  for (int j = 0; j < c.dim; ++j) {
    first += out.curve.front().linf[static_cast<std::size_t>(j)];
    last += out.curve.back().linf[static_cast<std::size_t>(j)];
  }
  out.trend_ratio = first > 0.0 ? last / first : 0.0;
  if (c.dim >= 3) {
    const MomentProfile profile = MomentProfile::make(c.dim, c.p, c.q);
    const double cst = use_calibration ? calibrated_constant("multiscale", c.dim, c.p, c.q) : kNoConstant;
    for (const PeriodicField& chi : out.bundle.chi) {
      BoundReport r = multiscale_bound_estimate(omega, chi, c.sublin_n, c.sublin_m, profile, cst);
      if (!r.passed) ++out.failures;
      out.multiscale.push_back(std::move(r));
    }
  }
  return out;
}

RunResult run_experiment(const std::string& command, const ConfigMap& map, const std::filesystem::path& out) {
  const auto& commands = experiment_commands();
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    throw ValidationError("unknown subcommand '" + command + "'");
  }
  const ExperimentConfig c = parse_config(map);
  ArtifactWriter w(out);
  RunResult result;
  Json summary = Json::object();
  summary["command"] = command;
  if (command == "env") {
    run_env(c, w, summary);
  } else if (command == "corrector") {
    run_corrector(c, w, summary);
  } else if (command == "walk") {
    run_walk(c, w, summary);
  } else if (command == "verify") {
    const VerifyResult v = run_verify(c);
    write_verify(v, c, w, summary);
    if (v.failures > 0) result.exit_code = kExitCheckFailure;
  } else if (command == "sublin") {
    run_sublin_command(c, w, summary, result.exit_code);
  } else {
    run_qfclt(c, w, summary, result.exit_code);
  }
  summary["exit_code"] = result.exit_code;
  w.write_json(command + ".json", summary);

  Json manifest{{"version", RCM_VERSION},
                {"command", command},
                {"seed", c.seed},
                {"threads", c.threads},
                {"environment", describe(c.law)},
                {"exponents", exponents_json(c)},
                {"config", to_json(map)}};
  Json names = Json::array();
  for (const std::string& n : w.names()) names.push_back(n);
  manifest["artifacts"] = names;
  w.write_json("manifest.json", manifest);

  result.summary = std::move(summary);
  result.artifacts = w.names();
  return result;
}

}  // namespace rcm
