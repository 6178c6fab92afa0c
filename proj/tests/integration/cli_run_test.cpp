// Runs the finidist executable end to end and inspects its files and exit
// codes.

#include "finidist/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using finidist::cli::Json;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_root() { return fs::temp_directory_path() / ("finidist_it_" + std::to_string(::getpid())); }

class ScratchCleanup : public ::testing::Environment {
 public:
  void TearDown() override { fs::remove_all(scratch_root()); }
};

const auto* const cleanup = ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

fs::path scratch(const std::string& name) {
  const fs::path d = scratch_root() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Result run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(FINIDIST_BIN) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

fs::path write_config(const fs::path& dir, const Json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cell += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
}

}  // namespace

TEST(Cli, ConstantsRow) {
  const fs::path d = scratch("constants");
  const Result r = run_cli("--suite constants --out " + (d / "out").string(), d);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(d / "out" / "constants.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "schema_version");
  const Json details = Json::parse(rows[1][column(rows[0], "details")]);
  EXPECT_NEAR(details["C_M"].get<double>(), 1.25331, 1e-5);
  EXPECT_NEAR(details["A_N"].get<double>(), 8.727e-4, 1e-6);
  EXPECT_NEAR(details["B_N"].get<double>(), 2.0 * 3.141592653589793 * (1.0 - std::cos(3.141592653589793 / 10)), 1e-12);
}

TEST(Cli, DegreeOfPowerMapFromConfig) {
  const fs::path d = scratch("degree");
  const Json cfg = {{"suite", "degree"}, {"maps", {{{"family", "power_map"}, {"params", {{"k", 3}}}}}},
                    {"out", (d / "out").string()}};
  const Result r = run_cli("--config " + write_config(d, cfg).string(), d);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(slurp(d / "out" / "degree.json"));
  ASSERT_EQ(doc["reports"].size(), 1u);
  const Json& rep = doc["reports"][0];
  EXPECT_NEAR(rep["details"]["estimate"].get<double>(), 3.0, 1e-3);
  EXPECT_EQ(rep["verdict"], "pass");
  EXPECT_EQ(doc["config_echo"]["suite"], "degree");
}

TEST(Cli, CounterexampleRows) {
  const fs::path d = scratch("counterexample");
  const Json cfg = {{"suite", "counterexample"}, {"k_max", 4}, {"samples", 4000}, {"out", (d / "out").string()}};
  const Result r = run_cli("--config " + write_config(d, cfg).string(), d);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(d / "out" / "counterexample.csv");
  ASSERT_EQ(rows.size(), 1u + 4u + 1u);
  const std::size_t dc = column(rows[0], "details"), nc = column(rows[0], "name");
  for (int k = 1; k <= 4; ++k) {
    EXPECT_EQ(rows[k][nc], "slice-" + std::to_string(k));
    EXPECT_NEAR(Json::parse(rows[k][dc])["oscillation"].get<double>(), 2.0, 0.01);
  }
  EXPECT_EQ(rows[5][nc], "cumulative");
}

TEST(Cli, ConfigErrorsExitTwo) {
  const fs::path d = scratch("errors");
  Result r = run_cli("--config " + (d / "missing.json").string(), d);
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());

  r = run_cli("--suite nonsense --out " + (d / "out").string(), d);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nonsense"), std::string::npos);

  const Json bad = {{"suite", "degree"}, {"maps", {{{"family", "warp_drive"}, {"params", Json::object()}}}}};
  r = run_cli("--config " + write_config(d, bad).string(), d);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("warp_drive"), std::string::npos);

  std::ofstream(d / "broken.json") << "{ not json";
  r = run_cli("--config " + (d / "broken.json").string(), d);
  EXPECT_EQ(r.code, 2);

  r = run_cli("--suite degree --level 0", d);
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, FlagsOverrideConfig) {
  const fs::path d = scratch("override");
  const Json cfg = {{"suite", "degree"}, {"seed", 1}, {"out", (d / "ignored").string()}};
  const Result r =
      run_cli("--config " + write_config(d, cfg).string() + " --suite constants --seed 42 --out " + (d / "out").string(), d);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(slurp(d / "out" / "constants.json"));
  EXPECT_EQ(doc["config_echo"]["seed"], 42);
  EXPECT_FALSE(fs::exists(d / "ignored"));
}

TEST(Cli, ExpectedFailDoesNotFailTheRun) {
  const fs::path d = scratch("jacobian");
  const Result r = run_cli("--suite jacobian --out " + (d / "out").string(), d);
  EXPECT_EQ(r.code, 0) << r.out;
  const auto rows = read_csv(d / "out" / "jacobian.csv");
  const std::size_t vc = column(rows[0], "verdict"), ec = column(rows[0], "expected_fail");
  int expected_fails = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][ec] == "true") {
      ++expected_fails;
      EXPECT_EQ(rows[i][vc], "fail");
    }
  EXPECT_EQ(expected_fails, 1);
}

TEST(Cli, CsvMatchesJson) {
  const fs::path d = scratch("csvjson");
  ASSERT_EQ(run_cli("--suite boundary-control --out " + (d / "out").string(), d).code, 0);
  const auto rows = read_csv(d / "out" / "boundary-control.csv");
  const Json doc = Json::parse(slurp(d / "out" / "boundary-control.json"));
  ASSERT_EQ(rows.size() - 1, doc["reports"].size());
  const std::size_t lc = column(rows[0], "lhs"), rc = column(rows[0], "rhs");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Json& rep = doc["reports"][i - 1];
    EXPECT_EQ(std::stod(rows[i][lc]), rep["lhs"].get<double>());
    EXPECT_EQ(std::stod(rows[i][rc]), rep["rhs"].get<double>());
  }
}

TEST(Cli, DeterministicAcrossRunsAndThreads) {
  const fs::path d = scratch("determinism");
  for (const char* suite : {"morrey", "retraction"}) {
    const std::string base = std::string("--suite ") + suite + " --seed 5 --samples 512 --out ";
    ASSERT_EQ(run_cli(base + (d / "a").string() + " --threads 1", d).code, 0);
    ASSERT_EQ(run_cli(base + (d / "b").string() + " --threads 1", d).code, 0);
    ASSERT_EQ(run_cli(base + (d / "c").string() + " --threads 3", d).code, 0);
    const std::string file = std::string(suite) + ".csv";
    const std::string a = slurp(d / "a" / file);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(d / "b" / file)) << suite;
    EXPECT_EQ(a, slurp(d / "c" / file)) << suite;
  }
}

TEST(Cli, SeedChangesSampledOutput) {
  const fs::path d = scratch("seed");
  ASSERT_EQ(run_cli("--suite boundary-control --seed 1 --out " + (d / "a").string(), d).code, 0);
  ASSERT_EQ(run_cli("--suite boundary-control --seed 2 --out " + (d / "b").string(), d).code, 0);
  EXPECT_NE(slurp(d / "a" / "boundary-control.csv"), slurp(d / "b" / "boundary-control.csv"));
}
