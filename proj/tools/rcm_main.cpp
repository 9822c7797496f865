// rcm: batch experiments on random conductance models.
//
//   rcm <subcommand> [--config FILE] [--output DIR] [--section.key VALUE | --key VALUE]...
//
// Exit codes: 0 ok, 1 validation error, 2 numerical failure, 3 check failure.
// Failures print one JSON error record on stderr.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rcm/config.hpp"
#include "rcm/errors.hpp"
#include "rcm/experiments.hpp"

namespace {

const char* describe_command(const std::string& name) {
  if (name == "env") return "Generate an environment, export its conductances and moment diagnostics";
  if (name == "corrector") return "Solve the torus correctors and the effective covariance";
  if (name == "walk") return "Simulate VSRW/CSRW replicas and export endpoints and one path";
  if (name == "verify") return "Run an estimate check: t1, cutoff, sobolev, energy, power, bound2d";
  if (name == "sublin") return "Corrector sublinearity curves and the multiscale bound";
  return "Full invariance-principle pipeline: correctors, walks, covariance tests";
}

void error_record(const std::string& command, const std::string& type, int code, const std::string& message,
                  rcm::Json details = rcm::Json::object()) {
  rcm::Json rec{{"error", type}, {"exit_code", code}, {"command", command}, {"message", message}};
  if (!details.empty()) rec["details"] = std::move(details);
  std::cerr << rec.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random conductance model experiments"};
  app.set_version_flag("--version", std::string(RCM_VERSION));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string output;
  for (const std::string& name : rcm::experiment_commands()) {
    CLI::App* sub = app.add_subcommand(name, describe_command(name));
    sub->allow_extras();
    sub->add_option("--config,-c", config_path, "INI config file or a manifest.json to reproduce");
    sub->add_option("--output,-o", output, "Output directory (default: $RCM_OUTPUT_DIR/<subcommand> or rcm-out/<subcommand>)");
    sub->footer("Any config key can be overridden with --section.key VALUE, or --key VALUE when the key is unique.");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("", "validation", rcm::kExitValidation, e.what());
    return rcm::kExitValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    rcm::ConfigMap map = config_path.empty() ? rcm::default_config_map() : rcm::load_config_map(config_path);
    rcm::apply_overrides(map, sub->remaining());
    if (output.empty()) {
      const char* env = std::getenv("RCM_OUTPUT_DIR");
      output = (env != nullptr && *env != '\0' ? std::string(env) : std::string("rcm-out")) + "/" + command;
    }
    const rcm::RunResult result = rcm::run_experiment(command, map, output);
    rcm::Json done{{"command", command}, {"exit_code", result.exit_code}, {"output", output}, {"artifacts", result.artifacts}};
    std::cout << done.dump() << std::endl;
    if (result.exit_code == rcm::kExitCheckFailure) {
      rcm::Json details = rcm::Json::object();
      for (const char* key : {"failures", "kinds", "audits"}) {
        if (result.summary.contains(key)) details[key] = result.summary[key];
      }
      if (result.summary.contains("report")) details["report"] = result.summary["report"];
      error_record(command, "check_failure", result.exit_code, "an inequality or statistical check failed", details);
    }
    return result.exit_code;
  } catch (const rcm::ValidationError& e) {
    error_record(command, "validation", rcm::kExitValidation, e.what());
    return rcm::kExitValidation;
  } catch (const rcm::RegionError& e) {
    error_record(command, "validation", rcm::kExitValidation, e.what());
    return rcm::kExitValidation;
  } catch (const rcm::ConvergenceError& e) {
    error_record(command, "nonconvergence", rcm::kExitNumerical, e.what(),
                 {{"iterations", e.iterations()}, {"residual", e.residual()}});
    return rcm::kExitNumerical;
  } catch (const rcm::PreconditionError& e) {
    error_record(command, "precondition", rcm::kExitNumerical, e.what(), {{"residual", e.residual()}});
    return rcm::kExitNumerical;
  } catch (const rcm::SimulationError& e) {
    error_record(command, "simulation", rcm::kExitNumerical, e.what(), {{"events", e.events()}});
    return rcm::kExitNumerical;
  } catch (const std::exception& e) {
    error_record(command, "internal", rcm::kExitNumerical, e.what());
    return rcm::kExitNumerical;
  }
}
