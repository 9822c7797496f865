#include "rcm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rcm/errors.hpp"

namespace rcm {

namespace {

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ValidationError("config key " + key + ": '" + text + "' is not a number");
  return v;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("config key " + key + ": '" + text + "' is not an integer");
  }
  return v;
}

std::vector<Coord> to_list(const std::string& key, const std::string& text) {
  std::vector<Coord> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (!item.empty()) out.push_back(to_integer<Coord>(key, item));
  }
  if (out.empty()) throw ValidationError("config key " + key + " needs at least one value");
  return out;
}

const std::string& get(const ConfigMap& map, const std::string& key) {
  const auto it = map.find(key);
  if (it == map.end()) throw ValidationError("missing config key " + key);
  return it->second;
}

void set_known(ConfigMap& map, const std::string& key, const std::string& value) {
  const auto it = map.find(key);
  if (it == map.end()) throw ValidationError("unknown config key '" + key + "'");
  it->second = value;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

}  // namespace

Geometry ExperimentConfig::geometry() const {
  if (torus) return TorusGeometry{side};
  return InfiniteLattice{};
}

ConfigMap default_config_map() {
  return {
      {"experiment.seed", "1"},
      {"experiment.threads", "1"},
      {"environment.dimension", "3"},
      {"environment.law", "uniform"},
      {"environment.value", "1"},
      {"environment.lambda", "0.5"},
      {"environment.sigma", "0.5"},
      {"environment.p_bar", "8"},
      {"environment.q_bar", "8"},
      {"environment.geometry", "torus"},
      {"environment.side", "16"},
      {"environment.radius", "8"},
      {"moments.p", "4"},
      {"moments.q", "4"},
      {"solver.tol", "1e-10"},
      {"solver.max_iterations", "0"},
      {"walk.mode", "vsrw"},
      {"walk.n", "16"},
      {"walk.horizon", "1"},
      {"walk.replicas", "5000"},
      {"sublin.radii", "2,4,8"},
      {"sublin.n", "6"},
      {"sublin.m", "2"},
      {"verify.check", "power"},
      {"verify.samples", "1000000"},
      {"verify.instances", "20"},
      {"verify.n", "4"},
      {"verify.gamma", "1"},
      {"verify.form", "theorem"},
      {"verify.s", "1"},
      {"verify.sobolev", "bulk"},
  };
}

ConfigMap load_config_map(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config file " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();
  ConfigMap map = default_config_map();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const std::exception& e) {
      throw ValidationError("cannot parse manifest " + path + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) throw ValidationError("manifest " + path + " has no config");
    for (const auto& [section, entries] : j["config"].items()) {
      if (!entries.is_object()) throw ValidationError("manifest section " + section + " is not an object");
      for (const auto& [key, value] : entries.items()) {
        set_known(map, section + "." + key, value.is_string() ? value.get<std::string>() : value.dump());
      }
    }
    return map;
  }
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError("cannot parse config " + path + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, entries] : tree) {
    if (entries.empty()) throw ValidationError("config entry '" + section + "' must sit inside a section");
    for (const auto& [key, value] : entries) set_known(map, section + "." + key, trim(value.data()));
  }
  return map;
}

void apply_overrides(ConfigMap& map, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& flag = args[i];
    if (flag.rfind("--", 0) != 0 || flag.size() <= 2) throw ValidationError("unexpected argument '" + flag + "'");
    std::string key = flag.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size()) throw ValidationError("override " + flag + " needs a value");
      value = args[++i];
    }
    if (key.find('.') == std::string::npos) {
      std::vector<std::string> hits;
      for (const auto& [full, unused] : map) {
        if (full.substr(full.find('.') + 1) == key) hits.push_back(full);
      }
      if (hits.empty()) throw ValidationError("unknown config key '" + key + "'");
      if (hits.size() > 1) {
        std::string list;
        for (const auto& h : hits) list += (list.empty() ? "" : ", ") + h;
        throw ValidationError("ambiguous key '" + key + "', use one of: " + list);
      }
      key = hits.front();
    }
    set_known(map, key, value);
  }
}

ExperimentConfig parse_config(const ConfigMap& map) {
  ExperimentConfig c;
  const auto num = [&](const std::string& k) { return to_double(k, get(map, k)); };
  const auto u64 = [&](const std::string& k) { return to_integer<std::uint64_t>(k, get(map, k)); };
  const auto i64 = [&](const std::string& k) { return to_integer<Coord>(k, get(map, k)); };

  c.seed = u64("experiment.seed");
  c.threads = static_cast<int>(i64("experiment.threads"));
  if (c.threads < 1) throw ValidationError("experiment.threads must be at least 1");

  c.dim = static_cast<int>(i64("environment.dimension"));
  if (c.dim < 1 || c.dim > kMaxDim) throw ValidationError("environment.dimension must lie in 1.." + std::to_string(kMaxDim));
  const std::string& law = get(map, "environment.law");
  if (law == "constant") {
    c.law = ConstantLaw{num("environment.value")};
  } else if (law == "uniform") {
    c.law = UniformEllipticLaw{num("environment.lambda")};
  } else if (law == "lognormal") {
    c.law = LogNormalLaw{num("environment.sigma")};
  } else if (law == "pareto") {
    c.law = TwoSidedParetoLaw{num("environment.p_bar"), num("environment.q_bar")};
  } else {
    throw ValidationError("environment.law must be constant, uniform, lognormal or pareto, got '" + law + "'");
  }
  validate(c.law);
  const std::string& geo = get(map, "environment.geometry");
  if (geo != "torus" && geo != "lattice") throw ValidationError("environment.geometry must be torus or lattice");
  c.torus = geo == "torus";
  c.side = i64("environment.side");
  if (c.side < 2) throw ValidationError("environment.side must be at least 2");
  c.radius = i64("environment.radius");
  if (c.radius < 0) throw ValidationError("environment.radius must be nonnegative");

  const auto exponent = [&](const std::string& k) {
    const std::string& t = get(map, k);
    if (t == "inf" || t == "infinity") return kInfinity;
    return to_double(k, t);
  };
  c.p = exponent("moments.p");
  c.q = exponent("moments.q");
  if (!(c.p > 1.0)) throw ValidationError("moments.p must exceed 1");
  if (!(c.q > 1.0)) throw ValidationError("moments.q must exceed 1");
  if (c.dim >= 3) {
    const MomentCheck check = check_moment_condition(c.dim, c.p, c.q);
    if (!check.admissible) throw ValidationError(check.violation);
  }

  c.tol = num("solver.tol");
  if (!(c.tol > 0.0)) throw ValidationError("solver.tol must be positive");
  c.max_iterations = static_cast<int>(i64("solver.max_iterations"));
  if (c.max_iterations < 0) throw ValidationError("solver.max_iterations must be nonnegative");

  const std::string& mode = get(map, "walk.mode");
  if (mode != "vsrw" && mode != "csrw") throw ValidationError("walk.mode must be vsrw or csrw");
  c.mode = mode == "vsrw" ? WalkMode::kVariableSpeed : WalkMode::kConstantSpeed;
  c.walk_n = i64("walk.n");
  if (c.walk_n < 1) throw ValidationError("walk.n must be at least 1");
  c.horizon = num("walk.horizon");
  if (!(c.horizon > 0.0)) throw ValidationError("walk.horizon must be positive");
  c.replicas = static_cast<std::size_t>(u64("walk.replicas"));
  if (c.replicas < 1) throw ValidationError("walk.replicas must be at least 1");

  c.radii = to_list("sublin.radii", get(map, "sublin.radii"));
  c.sublin_n = i64("sublin.n");
  c.sublin_m = i64("sublin.m");

  c.check = get(map, "verify.check");
  static const std::vector<std::string> checks = {"t1", "cutoff", "sobolev", "energy", "power", "bound2d"};
  if (std::find(checks.begin(), checks.end(), c.check) == checks.end()) {
    throw ValidationError("verify.check must be one of t1, cutoff, sobolev, energy, power, bound2d");
  }
  c.samples = u64("verify.samples");
  c.instances = static_cast<std::size_t>(u64("verify.instances"));
  c.verify_radii = to_list("verify.n", get(map, "verify.n"));
  for (Coord n : c.verify_radii) {
    if (n < 1) throw ValidationError("verify.n entries must be at least 1");
  }
  c.gamma = num("verify.gamma");
  c.form = get(map, "verify.form");
  if (c.form != "theorem" && c.form != "corollary" && c.form != "large") {
    throw ValidationError("verify.form must be theorem, corollary or large");
  }
  c.s = num("verify.s");
  c.sobolev = get(map, "verify.sobolev");
  if (c.sobolev != "bulk" && c.sobolev != "sphere") throw ValidationError("verify.sobolev must be bulk or sphere");
  return c;
}

std::string to_ini(const ConfigMap& map) {
  std::string out;
  std::string current;
  for (const auto& [full, value] : map) {
    const auto dot = full.find('.');
    const std::string section = full.substr(0, dot);
    if (section != current) {
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
      current = section;
    }
    out += full.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

Json to_json(const ConfigMap& map) {
  Json j = Json::object();
  for (const auto& [full, value] : map) {
    const auto dot = full.find('.');
    j[full.substr(0, dot)][full.substr(dot + 1)] = value;
  }
  return j;
}

}  // namespace rcm
