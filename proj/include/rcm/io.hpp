#pragma once

// Serialisation of results: JSON via nlohmann::json, CSV with 17 significant
// digits, and the manifest written next to every experiment's artifacts.

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rcm/cell_problem.hpp"
#include "rcm/diagnostics.hpp"
#include "rcm/estimates.hpp"

namespace rcm {

using Json = nlohmann::ordered_json;

/// printf("%.17g").
std::string format_double(double v);

Json to_json(const Eigen::MatrixXd& m);
Json to_json(const BoundReport& report);
Json to_json(const SolveStats& stats);
Json to_json(const CovarianceComparison& c);
Json to_json(const QfcltReport& report);
Json to_json(const SublinearityCurve& curve);
Json to_json(const PowerAudit& audit);

std::string to_string(PowerInequality kind);
std::string to_string(WalkMode mode);

/// Writes `content` to dir/name (creating dir) and records the name.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const Json& value);
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

}  // namespace rcm
