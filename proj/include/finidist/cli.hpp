#pragma once

// Experiment runner: configuration, suites and report files.

#include "finidist/errors.hpp"
#include "finidist/estimates.hpp"
#include "finidist/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace finidist::cli {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ConfigError : public Error {
 public:
  using Error::Error;
};

const std::vector<std::string>& suite_names();

struct SphereSpec {
  Vec x;
  double r = 0.0;
};

struct ExperimentConfig {
  std::string suite;
  int n = 2;
  std::string target = "sphere";   // constants suite: "sphere" or "euclidean"
  std::vector<Json> maps;          // descriptors; empty selects the built-in corpus
  std::vector<SphereSpec> spheres; // morrey grid; empty selects generated spheres
  std::vector<OscLogTriple> triples;
  int level = 3;
  int max_level = 10;
  std::size_t samples = 2048;
  std::uint64_t seed = 1;
  double tolerance = 1e-3;
  int k_max = 6;
  std::size_t budget = 120;
  unsigned threads = 1;
  std::string out = "finidist_out";

  CheckOptions check_options() const;
  Json to_json() const;
};

/// Throws ConfigError on unknown fields, bad values or unknown map families.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& c);

struct SuiteOutput {
  std::vector<VerificationReport> reports;
  Json constants = Json::object();
};

SuiteOutput run_suite(const ExperimentConfig& c);

/// Built-in corpora. Every map has a Euclidean domain; sphere-valued maps
/// are read through exponential charts.
std::vector<MapField> morrey_corpus();
std::vector<SphereSpec> morrey_spheres(const MapField& f, std::size_t count, std::uint64_t seed);
std::vector<MapField> osc_log_corpus();
std::vector<OscLogTriple> osc_log_grid(const MapField& f, std::size_t count, std::uint64_t seed);

Json report_to_json(const VerificationReport& r);
Json document(const ExperimentConfig& c, const SuiteOutput& out);
/// Header plus one row per report; numbers printed with %.17g.
std::string csv_table(const SuiteOutput& out);
std::string format_number(double v);

/// Exit status for a finished run: 1 when a report failed unexpectedly.
int exit_status(const SuiteOutput& out);

/// Runs the suite, writes <out>/<suite>.json and <out>/<suite>.csv, prints a
/// summary, and returns 0, 1 or 2.
int run(const ExperimentConfig& c, std::ostream& log, std::ostream& err);

}  // namespace finidist::cli
