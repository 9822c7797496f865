#pragma once

// The batch experiments behind the `rcm` subcommands. Each run validates its
// config, writes CSV/JSON artifacts plus manifest.json into an output
// directory and returns an exit status (0 ok, 3 a check failed). Validation
// and numerical failures propagate as exceptions.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rcm/config.hpp"
#include "rcm/diagnostics.hpp"
#include "rcm/estimates.hpp"
#include "rcm/io.hpp"

namespace rcm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitCheckFailure = 3;

/// Interior values of a Dirichlet solution may exceed the boundary extremes
/// by at most this fraction of max |g|.
inline constexpr double kMaxPrincipleTolerance = 1e-8;

struct RunResult {
  int exit_code = kExitOk;
  Json summary;
  std::vector<std::string> artifacts;  // includes manifest.json
};

/// The subcommand names, in help order.
const std::vector<std::string>& experiment_commands();

/// Runs `command` (env, corrector, walk, verify, sublin, qfclt).
RunResult run_experiment(const std::string& command, const ConfigMap& map, const std::filesystem::path& out);

// ---------------------------------------------------------------------------
// Pieces shared with the calibration tool and the acceptance suite.

/// Per-instance seeds: instance i of a run with master seed s uses
/// replica_seed(s, 4i + slot) for slot 0 (environment), 1 (boundary data), 2 (auxiliary).
std::uint64_t instance_seed(std::uint64_t master, std::size_t instance, int slot);

struct KindSummary {
  std::size_t count = 0;
  std::size_t trivial = 0;
  std::size_t failures = 0;
  double max_ratio = 0.0;
  double constant = kNoConstant;
};

struct VerifyResult {
  struct Entry {
    std::size_t instance;
    Coord n;
    BoundReport report;
  };
  std::vector<Entry> entries;
  std::map<std::string, KindSummary> kinds;
  std::vector<PowerAudit> audits;
  Json extra = Json::object();
  std::size_t failures = 0;

  void add(std::size_t instance, Coord n, BoundReport report);
};

/// Runs verify.check over verify.instances instances. With
/// `use_calibration` false every calibrated constant is left unset (NaN), so
/// only the literal-constant inequalities can fail.
VerifyResult run_verify(const ExperimentConfig& config, bool use_calibration = true);

/// max over the interior minus max over the boundary (and the mirror for
/// minima) as a report with tolerance kMaxPrincipleTolerance · max|boundary|.
BoundReport max_principle_report(const ScalarField& u);

struct SublinResult {
  CorrectorBundle bundle;
  SublinearityCurve curve;
  std::vector<BoundReport> multiscale;  // one per direction; empty for d < 3
  double trend_ratio = 0.0;              // mean_j linf at the last radius / at the first
  std::size_t failures = 0;
};

SublinResult run_sublin(const ExperimentConfig& config, bool use_calibration = true);

/// The torus environment of a config (requires geometry = torus).
TorusConductances torus_environment(const ExperimentConfig& config);
SolverOptions solver_options(const ExperimentConfig& config);
QfcltOptions qfclt_options(const ExperimentConfig& config);

}  // namespace rcm
