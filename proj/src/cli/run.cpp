#include "finidist/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>

namespace finidist::cli {

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

}  // namespace

int run(const ExperimentConfig& c, std::ostream& log, std::ostream& err) {
  try {
    validate(c);
  } catch (const ConfigError& e) {
    err << "finidist: invalid configuration: " << e.what() << '\n';
    return 2;
  }

  SuiteOutput out;
  try {
    out = run_suite(c);
  } catch (const ConfigError& e) {
    err << "finidist: invalid configuration: " << e.what() << '\n';
    return 2;
  }

  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec) {
    err << "finidist: cannot create " << c.out << ": " << ec.message() << '\n';
    return 2;
  }
  const std::filesystem::path base = std::filesystem::path(c.out) / c.suite;
  write_file(base.string() + ".json", document(c, out).dump(2) + "\n");
  write_file(base.string() + ".csv", csv_table(out));

  std::map<std::string, int> counts;
  for (const auto& r : out.reports) ++counts[to_string(r.verdict)];
  log << c.suite << ": " << out.reports.size() << " reports";
  for (const auto& [verdict, k] : counts) log << ", " << k << ' ' << verdict;
  log << '\n';
  for (const auto& r : out.reports)
    if (r.unexpected())
      log << "  unexpected " << to_string(r.verdict) << ": " << r.suite << '/' << r.name << " [" << r.map
          << "] lhs=" << format_number(r.lhs) << " rhs=" << format_number(r.rhs) << '\n';
  log << "wrote " << base.string() << ".json and .csv\n";
  return exit_status(out);
}

}  // namespace finidist::cli
