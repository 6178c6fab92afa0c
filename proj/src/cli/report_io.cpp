#include "finidist/cli.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace finidist::cli {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json report_to_json(const VerificationReport& r) {
  Json hyps = Json::array();
  for (const Hypothesis& h : r.hypotheses)
    hyps.push_back({{"name", h.name}, {"value", h.value}, {"threshold", h.threshold}, {"ok", h.ok}});
  return {{"name", r.name},
          {"suite", r.suite},
          {"map", r.map},
          {"params", r.params},
          {"hypotheses", hyps},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"ratio", r.ratio},
          {"tolerance", r.tolerance},
          {"verdict", to_string(r.verdict)},
          {"expected_fail", r.expected_fail},
          {"quadrature", {{"level", r.level}, {"error_indicator", r.error_indicator}}},
          {"details", r.details}};
}

Json document(const ExperimentConfig& c, const SuiteOutput& out) {
  Json reports = Json::array();
  for (const auto& r : out.reports) reports.push_back(report_to_json(r));
  return {{"schema_version", kSchemaVersion}, {"config_echo", c.to_json()}, {"constants", out.constants}, {"reports", reports}};
}

std::string csv_table(const SuiteOutput& out) {
  std::ostringstream s;
  s << "schema_version,suite,name,map,params,lhs,rhs,ratio,tolerance,verdict,expected_fail,level,error_indicator,details\n";
  for (const auto& r : out.reports) {
    s << kSchemaVersion << ',' << quote(r.suite) << ',' << quote(r.name) << ',' << quote(r.map) << ','
      << quote(r.params.dump()) << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
      << format_number(r.ratio) << ',' << format_number(r.tolerance) << ',' << to_string(r.verdict) << ','
      << (r.expected_fail ? "true" : "false") << ',' << r.level << ',' << format_number(r.error_indicator) << ','
      << quote(r.details.dump()) << '\n';
  }
  return s.str();
}

int exit_status(const SuiteOutput& out) {
  for (const auto& r : out.reports)
    if (r.unexpected()) return 1;
  return 0;
}

}  // namespace finidist::cli
