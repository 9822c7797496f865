#include "rcm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rcm/errors.hpp"

namespace rcm {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// JSON has no infinities or NaN; encode them as strings.
Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const BoundReport& r) {
  Json comp = Json::object();
  for (const auto& [k, v] : r.components) comp[k] = number(v);
  return Json{{"kind", r.kind},       {"lhs", number(r.lhs)},           {"rhs", number(r.rhs)},
              {"ratio", number(r.ratio)}, {"constant", number(r.constant)}, {"calibrated", r.calibrated()},
              {"trivial", r.trivial}, {"passed", r.passed},            {"components", comp}};
}

Json to_json(const SolveStats& s) {
  return Json{{"iterations", s.iterations}, {"relative_residual", number(s.relative_residual)}};
}

Json to_json(const CovarianceComparison& c) {
  return Json{{"empirical", to_json(c.empirical)},
              {"target", to_json(c.target)},
              {"standard_error", to_json(c.standard_error)},
              {"relative_error", to_json(c.relative_error)},
              {"min_eigenvalue", number(c.min_eigenvalue)},
              {"diagonal_ok", c.diagonal_ok},
              {"offdiagonal_ok", c.offdiagonal_ok}};
}

std::string to_string(WalkMode mode) { return mode == WalkMode::kVariableSpeed ? "vsrw" : "csrw"; }

std::string to_string(PowerInequality kind) {
  switch (kind) {
    case PowerInequality::kA1: return "A1";
    case PowerInequality::kA2: return "A2";
    case PowerInequality::kA3: return "A3";
  }
  return "?";
}

Json to_json(const QfcltReport& r) {
  Json ks = Json::array();
  for (double k : r.ks_walk) ks.push_back(number(k));
  return Json{{"mode", to_string(r.mode)},
              {"n", r.n},
              {"horizon", number(r.horizon)},
              {"replicas", r.replicas},
              {"target_scale", number(r.target_scale)},
              {"mu_origin", number(r.mu_origin)},
              {"mu_mean", number(r.mu_mean)},
              {"sigma2", to_json(r.sigma2)},
              {"walk", to_json(r.walk)},
              {"martingale", to_json(r.martingale)},
              {"ks_sqrt_n", ks},
              {"gaussian_ok", r.gaussian_ok},
              {"remainder_mean", number(r.remainder_mean)},
              {"remainder_max", number(r.remainder_max)},
              {"dominance_violations", r.dominance_violations},
              {"total_jumps", r.total_jumps},
              {"passed", r.passed()}};
}

Json to_json(const SublinearityCurve& curve) {
  Json out = Json::array();
  for (const SublinearityPoint& p : curve) {
    Json linf = Json::array();
    Json l1 = Json::array();
    for (double v : p.linf) linf.push_back(number(v));
    for (double v : p.l1) l1.push_back(number(v));
    out.push_back(Json{{"n", p.n}, {"linf", linf}, {"l1", l1}});
  }
  return out;
}

Json to_json(const PowerAudit& a) {
  return Json{{"inequality", to_string(a.kind)},
              {"samples", a.samples},
              {"violations", a.violations},
              {"min_relative_slack", number(a.min_relative_slack)}};
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  std::ofstream os(dir_ / name, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open " + (dir_ / name).string() + " for writing");
  os << content;
  if (!os) throw ValidationError("failed writing " + (dir_ / name).string());
  names_.push_back(name);
}

void ArtifactWriter::write_json(const std::string& name, const Json& value) { write(name, value.dump(2) + "\n"); }

}  // namespace rcm
