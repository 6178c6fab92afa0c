#include "finidist/cli.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace finidist::cli {

namespace {

Vec vec_of(const Json& a, const char* what) {
  if (!a.is_array() || a.empty()) throw ConfigError(std::string(what) + ": expected a non-empty array of numbers");
  Vec v(static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ConfigError(std::string(what) + ": expected numbers");
    v[static_cast<int>(i)] = a[i].get<double>();
  }
  return v;
}

Json json_of(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <class T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"constants",   "morrey",         "osc-log",  "boundary-control",
                                                 "degree",      "counterexample", "retraction", "loglog",
                                                 "extremal",    "jacobian",       "all"};
  return names;
}

CheckOptions ExperimentConfig::check_options() const {
  CheckOptions o;
  o.level = level;
  o.max_level = max_level;
  o.count = samples;
  o.seed = seed;
  o.tolerance = tolerance;
  return o;
}

Json ExperimentConfig::to_json() const {
  Json j{{"suite", suite},   {"n", n},           {"target", target},   {"level", level},
         {"max_level", max_level}, {"samples", samples}, {"seed", seed}, {"tolerance", tolerance},
         {"k_max", k_max},  {"budget", budget},  {"out", out}};
  j["maps"] = maps;
  Json s = Json::array();
  for (const auto& sp : spheres) s.push_back({{"x", json_of(sp.x)}, {"r", sp.r}});
  j["spheres"] = s;
  Json t = Json::array();
  for (const auto& tr : triples) t.push_back({{"x", json_of(tr.x)}, {"r", tr.r}, {"R", tr.R}});
  j["triples"] = t;
  return j;
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"suite", "n",      "target", "maps",    "spheres", "triples",
                                              "level", "max_level", "samples", "seed", "tolerance", "k_max",
                                              "budget", "threads", "out"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown config field '" + it.key() + "'");

  ExperimentConfig c;
  if (j.contains("suite")) c.suite = field<std::string>(j, "suite");
  if (j.contains("n")) c.n = field<int>(j, "n");
  if (j.contains("target")) c.target = field<std::string>(j, "target");
  if (j.contains("level")) c.level = field<int>(j, "level");
  if (j.contains("max_level")) c.max_level = field<int>(j, "max_level");
  if (j.contains("samples")) c.samples = field<std::size_t>(j, "samples");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("tolerance")) c.tolerance = field<double>(j, "tolerance");
  if (j.contains("k_max")) c.k_max = field<int>(j, "k_max");
  if (j.contains("budget")) c.budget = field<std::size_t>(j, "budget");
  if (j.contains("threads")) c.threads = field<unsigned>(j, "threads");
  if (j.contains("out")) c.out = field<std::string>(j, "out");
  if (j.contains("maps")) {
    if (!j["maps"].is_array()) throw ConfigError("'maps' must be an array of map descriptors");
    for (const auto& m : j["maps"]) c.maps.push_back(m);
  }
  if (j.contains("spheres")) {
    if (!j["spheres"].is_array()) throw ConfigError("'spheres' must be an array");
    for (const auto& s : j["spheres"]) {
      if (!s.is_object() || !s.contains("x") || !s.contains("r")) throw ConfigError("each sphere needs 'x' and 'r'");
      c.spheres.push_back({vec_of(s["x"], "sphere centre"), field<double>(s, "r")});
    }
  }
  if (j.contains("triples")) {
    if (!j["triples"].is_array()) throw ConfigError("'triples' must be an array");
    for (const auto& t : j["triples"]) {
      if (!t.is_object() || !t.contains("x") || !t.contains("r") || !t.contains("R"))
        throw ConfigError("each triple needs 'x', 'r' and 'R'");
      c.triples.push_back({vec_of(t["x"], "triple centre"), field<double>(t, "r"), field<double>(t, "R")});
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

void validate(const ExperimentConfig& c) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), c.suite) == names.end())
    throw ConfigError("unknown suite '" + c.suite + "'");
  if (c.n < 2 || c.n > 8) throw ConfigError("n must lie in [2, 8]");
  if ((c.suite == "counterexample" || c.suite == "all") && c.n > 3)
    throw ConfigError("the counterexample audit supports n = 2, 3");
  if (c.target != "sphere" && c.target != "euclidean") throw ConfigError("target must be 'sphere' or 'euclidean'");
  if (c.level < 1 || c.level > 16) throw ConfigError("level must lie in [1, 16]");
  if (c.max_level < c.level || c.max_level > 16) throw ConfigError("max_level must lie in [level, 16]");
  if (c.samples < 2) throw ConfigError("samples must be at least 2");
  if (!(c.tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
  if (c.k_max < 2 || c.k_max > 6) throw ConfigError("k_max must lie in [2, 6]");
  if (c.budget < 3) throw ConfigError("budget must be at least 3");
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  for (const Json& m : c.maps) {
    try {
      (void)make_map(m);
    } catch (const Error& e) {
      throw ConfigError(std::string("bad map descriptor: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad map descriptor: ") + e.what());
    }
  }
  for (const auto& s : c.spheres)
    if (!(s.r > 0.0)) throw ConfigError("sphere radii must be positive");
  for (const auto& t : c.triples)
    if (!(t.r > 0.0 && t.r < t.R)) throw ConfigError("triples need 0 < r < R");
}

}  // namespace finidist::cli
