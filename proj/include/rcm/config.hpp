#pragma once

// Experiment configuration: an INI file with fixed sections and keys,
// `--section.key value` (or `--key value` for unambiguous keys) overrides,
// and a round trip through the manifest JSON.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/io.hpp"
#include "rcm/walker.hpp"

namespace rcm {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int threads = 1;

  int dim = 3;
  MarginalSpec law = UniformEllipticLaw{0.5};
  bool torus = true;
  Coord side = 16;
  Coord radius = 8;  // export box for infinite-lattice environments

  double p = 4.0;
  double q = 4.0;

  double tol = 1e-10;
  int max_iterations = 0;  // 0: default cap

  WalkMode mode = WalkMode::kVariableSpeed;
  Coord walk_n = 16;
  double horizon = 1.0;
  std::size_t replicas = 5000;

  std::vector<Coord> radii = {2, 4, 8};
  Coord sublin_n = 6;
  Coord sublin_m = 2;

  std::string check = "power";
  std::uint64_t samples = 1'000'000;
  std::size_t instances = 20;
  std::vector<Coord> verify_radii = {4};  // cycled over instances
  double gamma = 1.0;
  std::string form = "theorem";
  double s = 1.0;
  std::string sobolev = "bulk";

  Geometry geometry() const;
};

/// Flat view: "section.key" -> text value. Every key of the schema appears.
using ConfigMap = std::map<std::string, std::string>;

/// Defaults for every key.
ConfigMap default_config_map();

/// Reads an INI file (or a manifest JSON, detected by a leading '{') on top
/// of the defaults. Unknown sections/keys are rejected.
ConfigMap load_config_map(const std::string& path);

/// Applies `--key value` pairs; keys may be "section.key" or a bare key that
/// names exactly one schema entry.
void apply_overrides(ConfigMap& map, const std::vector<std::string>& args);

/// Parses and validates, including admissibility 1/p + 1/q < 2/(d-1) for d >= 3.
/// Throws ValidationError.
ExperimentConfig parse_config(const ConfigMap& map);

/// INI text and JSON object ({section: {key: value}}) for a map.
std::string to_ini(const ConfigMap& map);
Json to_json(const ConfigMap& map);

}  // namespace rcm
