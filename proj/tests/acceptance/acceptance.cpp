// Acceptance suite: one function per criterion, each printing a single
// "criterion N: PASS|FAIL ..." line. Runs use seeds from kAcceptanceSeedBase,
// disjoint from the calibration runs that fixed the frozen constants.
//
//   rcm_acceptance --criterion N [--out DIR]     (N = 1..13, or 0 for all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "rcm/calibration.hpp"
#include "rcm/cell_problem.hpp"
#include "rcm/errors.hpp"
#include "rcm/experiments.hpp"
#include "rcm/instances.hpp"

namespace fs = std::filesystem;
using namespace rcm;

namespace {

fs::path g_out = "acceptance_out";

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [FAILED]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ConfigMap config_with(const std::vector<std::string>& overrides) {
  ConfigMap m = default_config_map();
  apply_overrides(m, overrides);
  return m;
}

// ---------------------------------------------------------------------------

Verdict adjointness() {
  Verdict v;
  std::mt19937_64 rng(kAcceptanceSeedBase + 1);
  double worst_adj = 0.0;
  double worst_prod = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = trial % 2 == 0 ? 2 : 3;
    const Box outer = Box::centered(d, 3);
    // f vanishes on ∂B(3) so every bond term is matched by a divergence term.
    const ScalarField f = ScalarField::from_function(outer, [&](const Vertex& x) {
      return outer.on_boundary(x) ? 0.0 : uniform(rng, -1.0, 1.0);
    });
    const ScalarField g = ScalarField::from_function(outer, [&](const Vertex&) { return uniform(rng, -1.0, 1.0); });
    const BondField F = BondField::from_function(outer, [&](const Bond&) { return uniform(rng, -1.0, 1.0); });
    const BondField gf = gradient(f);
    double lhs = 0.0;
    double scale = 0.0;
    F.for_each([&](const Bond& e, double w) {
      lhs += gf(e) * w;
      scale += std::abs(gf(e) * w);
    });
    const ScalarField div = divergence(F);
    double rhs = 0.0;
    div.box().for_each_vertex([&](const Vertex& x) {
      rhs += f(x) * div(x);
      scale += std::abs(f(x) * div(x));
    });
    worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / scale);

    const ScalarField fg = ScalarField::from_function(outer, [&](const Vertex& x) { return f(x) * g(x); });
    const BondField gfg = gradient(fg);
    const BondField gg = gradient(g);
    const BondField af = bond_average(f);
    const BondField ag = bond_average(g);
    gfg.for_each([&](const Bond& e, double w) {
      worst_prod = std::max(worst_prod, std::abs(w - (af(e) * gg(e) + ag(e) * gf(e))));
    });
  }
  v.require(worst_adj <= 1e-12, "max relative adjointness defect " + fmt("%.3g", worst_adj) + " <= 1e-12");
  v.require(worst_prod <= 1e-12, "max product-rule defect " + fmt("%.3g", worst_prod) + " <= 1e-12");
  return v;
}

Verdict constant_environment(const fs::path& dir) {
  Verdict v;
  const RunResult r =
      run_experiment("corrector", config_with({"--dimension", "3", "--law", "constant", "--value", "1", "--side", "16"}), dir);
  double sigma_err = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      sigma_err = std::max(sigma_err, std::abs(r.summary["sigma2"][i][j].get<double>() - (i == j ? 2.0 : 0.0)));
    }
  }
  // Max |χ| read back from the exported artifact.
  std::istringstream csv(slurp(dir / "corrector.csv"));
  std::string line;
  std::getline(csv, line);
  double chi_max = 0.0;
  while (std::getline(csv, line)) {
    std::stringstream row(line);
    std::string cell;
    for (int col = 0; std::getline(row, cell, ','); ++col) {
      if (col >= 3) chi_max = std::max(chi_max, std::abs(std::stod(cell)));
    }
  }
  v.require(chi_max <= 1e-10, "max |chi_j| = " + fmt("%.3g", chi_max) + " <= 1e-10");
  v.require(sigma_err <= 1e-9, "max |Sigma2 - 2I| = " + fmt("%.3g", sigma_err) + " <= 1e-9");
  return v;
}

Verdict one_dimensional() {
  Verdict v;
  const TorusConductances omega(Torus(1, 2), {1.0, 3.0});
  const CorrectorBundle b = solve_correctors(omega);
  const double err = std::abs(b.sigma2(0, 0) - 3.0);
  v.require(err <= 1e-12, "Sigma2 = " + fmt("%.17g", b.sigma2(0, 0)) + ", |Sigma2 - 3| = " + fmt("%.3g", err) + " <= 1e-12");
  return v;
}

Verdict dense_oracle() {
  Verdict v;
  const std::vector<MarginalSpec> laws = {LogNormalLaw{1.0}, TwoSidedParetoLaw{3.0, 3.0}, UniformEllipticLaw{0.1}};
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ConductanceField field(3, kAcceptanceSeedBase + 400 + static_cast<std::uint64_t>(k),
                                 laws[static_cast<std::size_t>(k) % laws.size()], TorusGeometry{4});
    const TorusConductances omega = TorusConductances::sample(field, 4);
    const Torus& t = omega.torus();
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
      const Vertex x = t.vertex(idx);
      for (int i = 0; i < 3; ++i) {
        const auto a = static_cast<Eigen::Index>(idx);
        const auto b = static_cast<Eigen::Index>(t.index(x.shifted(i, 1)));
        const double w = omega.at(idx, i);
        A(a, a) += w;
        A(b, b) += w;
        A(a, b) -= w;
        A(b, a) -= w;
      }
    }
    // Mean-zero solve: A + (1/n) 11ᵀ is invertible and agrees with A on mean-zero vectors.
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A + Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n)));
    SolverOptions opts;
    opts.tol = 1e-12;
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd rhs(n);
      for (Eigen::Index idx = 0; idx < n; ++idx) {
        const Vertex x = t.vertex(static_cast<std::size_t>(idx));
        rhs(idx) = omega.conductance(x.shifted(j, -1), j) - omega.conductance(x, j);
      }
      const Eigen::VectorXd oracle = lu.solve(rhs);
      const CorrectorSolution sol = solve_corrector(omega, j, opts);
      for (Eigen::Index idx = 0; idx < n; ++idx) {
        worst = std::max(worst, std::abs(sol.chi.values()[static_cast<std::size_t>(idx)] - oracle(idx)));
      }
    }
  }
  v.require(worst <= 1e-8, "max |chi_iter - chi_dense| over 10 environments = " + fmt("%.3g", worst) + " <= 1e-8");
  return v;
}

Verdict cutoff_optimality() {
  Verdict v;
  const std::vector<double> f = {1.0, 4.0};
  const CutoffSolution s = optimal_cutoff(f, 1, 3);
  v.require(std::abs(s.energy - 0.8) <= 1e-15, "J(rho=1, sigma=3, f=(1,4)) = " + fmt("%.17g", s.energy));
  double best = kInfinity;
  double arg = 0.0;
  constexpr int kGrid = 1'000'000;
  for (int k = 0; k <= kGrid; ++k) {
    CutoffProfile p = s.profile;
    p.values[1] = static_cast<double>(k) / kGrid;
    const double e = radial_energy(f, p);
    if (e < best) {
      best = e;
      arg = p.values[1];
    }
  }
  v.require(std::abs(best - s.energy) <= 1e-6, "grid minimum " + fmt("%.10g", best) + " at eta(2) = " + fmt("%.6g", arg));

  ExperimentConfig c = parse_config(config_with({"--law", "pareto", "--check", "cutoff"}));
  c.seed = kAcceptanceSeedBase + 5;
  c.instances = 20;
  c.verify_radii = {2, 3, 4, 6};
  const VerifyResult r = run_verify(c);
  const KindSummary& k = r.kinds.at("cutoff_optimality");
  v.require(k.failures == 0, std::to_string(k.count) + " random instances x 20 admissible competitors, " +
                                 std::to_string(k.failures) + " beat J_1d (max J/competitor " + fmt("%.6g", k.max_ratio) + ")");
  return v;
}

Verdict power_audit_all() {
  Verdict v;
  ExperimentConfig c = parse_config(config_with({"--check", "power", "--samples", "1000000"}));
  c.seed = kAcceptanceSeedBase + 6;
  const VerifyResult r = run_verify(c);
  for (const PowerAudit& a : r.audits) {
    v.require(a.violations == 0, to_string(a.kind) + ": " + std::to_string(a.violations) + " violations in " +
                                     std::to_string(a.samples) + " (min relative slack " + fmt("%.3g", a.min_relative_slack) + ")");
  }
  return v;
}

// 100 instances on B(8), four environment laws in blocks of 25, α cycling {1, 1.5, 2}.
std::vector<VerifyResult> energy_runs() {
  const std::vector<std::vector<std::string>> laws = {{"--law", "uniform", "--lambda", "0.2"},
                                                      {"--law", "lognormal", "--sigma", "1"},
                                                      {"--law", "pareto", "--p_bar", "8", "--q_bar", "8"},
                                                      {"--law", "pareto", "--p_bar", "3", "--q_bar", "3"}};
  std::vector<VerifyResult> out;
  for (std::size_t k = 0; k < laws.size(); ++k) {
    std::vector<std::string> args = laws[k];
    for (const char* a : {"--check", "energy", "--dimension", "3", "--verify.n", "8", "--instances", "25"}) args.push_back(a);
    ExperimentConfig c = parse_config(config_with(args));
    c.seed = kAcceptanceSeedBase + 70 + k;
    out.push_back(run_verify(c));
  }
  return out;
}

std::vector<VerifyResult> planar_runs() {
  std::vector<VerifyResult> out;
  const std::vector<std::vector<std::string>> laws = {{"--law", "pareto", "--p_bar", "8", "--q_bar", "8"},
                                                      {"--law", "lognormal", "--sigma", "1.5"}};
  for (std::size_t k = 0; k < laws.size(); ++k) {
    std::vector<std::string> args = laws[k];
    for (const char* a : {"--check", "bound2d", "--dimension", "2", "--verify.n", "4,8", "--instances", "50"}) args.push_back(a);
    ExperimentConfig c = parse_config(config_with(args));
    c.seed = kAcceptanceSeedBase + 80 + k;
    out.push_back(run_verify(c));
  }
  return out;
}

KindSummary total(const std::vector<VerifyResult>& runs, const std::string& kind) {
  KindSummary t;
  for (const VerifyResult& r : runs) {
    const auto it = r.kinds.find(kind);
    if (it == r.kinds.end()) continue;
    t.count += it->second.count;
    t.failures += it->second.failures;
    t.trivial += it->second.trivial;
    t.max_ratio = std::max(t.max_ratio, it->second.max_ratio);
  }
  return t;
}

Verdict energy_estimate() {
  Verdict v;
  const KindSummary k = total(energy_runs(), "energy");
  v.require(k.count == 100 && k.failures == 0,
            std::to_string(k.failures) + " violations in " + std::to_string(k.count) +
                " instances with factor 256 a^4/(2a-1)^2 (max lhs/rhs " + fmt("%.4g", k.max_ratio) + ")");
  return v;
}

Verdict pigeonhole() {
  Verdict v;
  const KindSummary k = total(planar_runs(), "pigeonhole");
  v.require(k.count == 100 && k.failures == 0,
            std::to_string(k.failures) + " of " + std::to_string(k.count) +
                " good layers exceed the layer average with constant 1 (max ratio " + fmt("%.4g", k.max_ratio) + ")");
  return v;
}

Verdict maximum_principle() {
  Verdict v;
  const std::vector<VerifyResult> energy = energy_runs();
  const std::vector<VerifyResult> planar = planar_runs();
  const KindSummary a = total(energy, "max_principle");
  const KindSummary b = total(planar, "max_principle");
  const KindSummary c = total(planar, "layer_max_principle");
  v.require(a.failures == 0, "energy instances: " + std::to_string(a.failures) + " of " + std::to_string(a.count) +
                                 " Dirichlet solves with an interior extremum beyond tolerance");
  v.require(b.failures == 0, "planar instances: " + std::to_string(b.failures) + " of " + std::to_string(b.count));
  v.require(c.failures == 0, "max over B(n) above max over the good layer: " + std::to_string(c.failures) + " of " +
                                 std::to_string(c.count));
  return v;
}

Verdict local_boundedness(const fs::path& dir) {
  Verdict v;
  const double constant = calibrated_constant("local_boundedness/theorem", 3, 4.0, 4.0);
  v.require(!std::isnan(constant), "C_cal = " + fmt("%.6g", constant));
  const ConfigMap map = config_with({"--dimension", "3", "--law", "pareto", "--p_bar", "8", "--q_bar", "8", "--p", "4",
                                     "--q", "4", "--check", "t1", "--instances", "100", "--verify.n", "4,8,16", "--seed",
                                     std::to_string(kAcceptanceSeedBase)});
  const RunResult r = run_experiment("verify", map, dir);
  const Json& k = r.summary["kinds"]["local_boundedness"];
  v.require(k["failures"] == 0, std::to_string(k["failures"].get<std::size_t>()) + " exceedances in " +
                                    std::to_string(k["count"].get<std::size_t>()) + " fresh instances (max ratio " +
                                    fmt("%.4g", k["max_ratio"].get<double>()) + ")");
  v.require(r.summary["kinds"]["max_principle"]["failures"] == 0, "maximum principle on every solve");
  return v;
}

Verdict sublinearity() {
  Verdict v;
  double at8 = 0.0;
  double at64 = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    ExperimentConfig c = parse_config(config_with({"--law", "uniform", "--lambda", "0.5", "--dimension", "3", "--side",
                                                   "128", "--radii", "8,16,32,64", "--tol", "1e-8"}));
    c.seed = kAcceptanceSeedBase + 1100 + k;
    const SublinResult r = run_sublin(c);
    for (int j = 0; j < 3; ++j) {
      at8 += r.curve.front().linf[static_cast<std::size_t>(j)];
      at64 += r.curve.back().linf[static_cast<std::size_t>(j)];
    }
  }
  at8 /= 30.0;
  at64 /= 30.0;
  v.require(at64 <= 0.7 * at8, "mean (1/n) max|chi| at n=64: " + fmt("%.5g", at64) + " vs 0.7 x n=8 value " +
                                   fmt("%.5g", 0.7 * at8) + " (ratio " + fmt("%.4f", at64 / at8) + ")");
  return v;
}

Verdict qfclt(const fs::path& dir) {
  Verdict v;
  for (const char* mode : {"vsrw", "csrw"}) {
    const ConfigMap map = config_with({"--dimension", "3", "--law", "lognormal", "--sigma", "0.5", "--side", "32", "--mode",
                                       mode, "--walk.n", "16", "--horizon", "1", "--replicas", "5000", "--seed",
                                       std::to_string(kAcceptanceSeedBase + 12)});
    const RunResult r = run_experiment("qfclt", map, dir / mode);
    const Json& rep = r.summary["report"];
    const Json& walk = rep["walk"];
    double worst_diag = 0.0;
    double worst_off = 0.0;
    for (int i = 0; i < 3; ++i) {
      worst_diag = std::max(worst_diag, walk["relative_error"][i][i].get<double>());
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        const double diff = std::abs(walk["empirical"][i][j].get<double>() - walk["target"][i][j].get<double>());
        worst_off = std::max(worst_off, diff / walk["standard_error"][i][j].get<double>());
      }
    }
    std::string what = std::string(mode) + ": max diagonal rel. error " + fmt("%.4f", worst_diag) +
                       " <= 0.10, max off-diagonal " + fmt("%.2f", worst_off) + " SE <= 5";
    if (std::string(mode) == "csrw") {
      what += " (target scale 1/mean mu = " + fmt("%.5g", rep["target_scale"].get<double>()) + ", 1/mu(0) = " +
              fmt("%.5g", 1.0 / rep["mu_origin"].get<double>()) + ")";
    }
    v.require(walk["diagonal_ok"].get<bool>() && walk["offdiagonal_ok"].get<bool>(), what);
    v.require(rep["dominance_violations"] == 0, std::string(mode) + ": remainder dominance exact on every path");
  }
  return v;
}

Verdict reproducibility() {
  Verdict v;
  const auto compare = [&](const std::string& label, const std::function<void(const fs::path&)>& run) {
    const fs::path a = g_out / ("criterion_13_" + label + "_a");
    const fs::path b = g_out / ("criterion_13_" + label + "_b");
    fs::remove_all(a);
    fs::remove_all(b);
    run(a);
    run(b);
    std::size_t files = 0;
    std::size_t differ = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
      if (!entry.is_regular_file()) continue;
      ++files;
      const fs::path other = b / fs::relative(entry.path(), a);
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differ;
    }
    v.require(files > 0 && differ == 0, label + ": " + std::to_string(files - differ) + "/" + std::to_string(files) +
                                            " artifacts byte-identical");
  };
  compare("criterion_2", [](const fs::path& d) { constant_environment(d); });
  compare("criterion_10", [](const fs::path& d) { local_boundedness(d); });
  compare("criterion_12", [](const fs::path& d) { qfclt(d); });
  return v;
}

struct Criterion {
  const char* name;
  double budget_seconds;  // 0: no runtime bound
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int which = 0;
  std::string out = g_out.string();
  app.add_option("--criterion", which, "Criterion number 1..13; 0 runs all")->check(CLI::Range(0, 13));
  app.add_option("--out", out, "Directory for artifacts written by criteria 2, 10, 12, 13");
  CLI11_PARSE(app, argc, argv);
  g_out = out;
  fs::create_directories(g_out);

  const std::vector<Criterion> criteria = {
      {"adjointness and product rule", 1.0, adjointness},
      {"constant environment", 5.0, [] { return constant_environment(g_out / "criterion_2"); }},
      {"one-dimensional closed form", 1.0, one_dimensional},
      {"dense oracle", 10.0, dense_oracle},
      {"cutoff optimality", 10.0, cutoff_optimality},
      {"power inequality audit", 30.0, power_audit_all},
      {"energy estimate, literal constant", 120.0, energy_estimate},
      {"pigeonhole exactness", 60.0, pigeonhole},
      {"maximum principle", 0.0, maximum_principle},
      {"local boundedness regression", 600.0, [] { return local_boundedness(g_out / "criterion_10"); }},
      {"sublinearity trend", 600.0, sublinearity},
      {"invariance principle consistency", 900.0, [] { return qfclt(g_out / "criterion_12"); }},
      {"reproducibility", 0.0, reproducibility},
  };

  bool all_pass = true;
  for (int i = 1; i <= 13; ++i) {
    if (which != 0 && which != i) continue;
    const Criterion& c = criteria[static_cast<std::size_t>(i - 1)];
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0) {
      v.require(secs < c.budget_seconds, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%g", c.budget_seconds) + " s");
    } else {
      v.detail += "; runtime " + fmt("%.2f", secs) + " s";
    }
    std::cout << "criterion " << i << " (" << c.name << "): " << (v.pass ? "PASS" : "FAIL") << " -- " << v.detail
              << std::endl;
    all_pass = all_pass && v.pass;
  }
  return all_pass ? 0 : 1;
}
