#include "finidist/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace finidist;
using namespace finidist::cli;

TEST(Config, DefaultsAndFields) {
  const ExperimentConfig c = parse_config(Json{{"suite", "degree"}, {"seed", 9}, {"level", 4}, {"samples", 100}});
  EXPECT_EQ(c.suite, "degree");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.level, 4);
  EXPECT_EQ(c.samples, 100u);
  EXPECT_EQ(c.n, 2);
  EXPECT_NO_THROW(validate(c));
  const CheckOptions o = c.check_options();
  EXPECT_EQ(o.level, 4);
  EXPECT_EQ(o.count, 100u);
  EXPECT_EQ(o.seed, 9u);
}

TEST(Config, UnknownFieldIsAnError) {
  EXPECT_THROW(parse_config(Json{{"suite", "degree"}, {"colour", "red"}}), ConfigError);
  EXPECT_THROW(parse_config(Json::array()), ConfigError);
  EXPECT_THROW(parse_config(Json{{"level", "three"}}), ConfigError);
}

TEST(Config, ValidationRanges) {
  ExperimentConfig c;
  c.suite = "nonsense";
  EXPECT_THROW(validate(c), ConfigError);
  c.suite = "counterexample";
  c.n = 4;
  EXPECT_THROW(validate(c), ConfigError);
  c.n = 2;
  c.k_max = 9;
  EXPECT_THROW(validate(c), ConfigError);
  c.k_max = 4;
  c.level = 5;
  c.max_level = 3;
  EXPECT_THROW(validate(c), ConfigError);
  c.max_level = 8;
  EXPECT_NO_THROW(validate(c));
  c.maps = {Json{{"family", "no_such_family"}, {"params", Json::object()}}};
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, MapDescriptorsAndEcho) {
  const Json j = {{"suite", "degree"}, {"maps", {zoo::power_map(3).descriptor()}}, {"threads", 4}};
  const ExperimentConfig c = parse_config(j);
  ASSERT_EQ(c.maps.size(), 1u);
  const Json echo = c.to_json();
  EXPECT_EQ(echo["suite"], "degree");
  EXPECT_FALSE(echo.contains("threads"));
  EXPECT_EQ(parse_config(echo).to_json(), echo);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError); }

TEST(Output, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0 / 0.0), "inf");
  EXPECT_EQ(format_number(-1.0 / 0.0), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Output, CsvHeaderAndQuoting) {
  SuiteOutput out;
  VerificationReport r;
  r.suite = "degree";
  r.name = "a,b";
  r.map = "m";
  r.lhs = 1.0;
  r.rhs = 2.0;
  r.decide();
  out.reports.push_back(r);
  const std::string csv = csv_table(out);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("schema_version,suite,name,map,params,lhs,rhs,ratio", 0), 0u);
  EXPECT_EQ(row.rfind("1,degree,\"a,b\",m,", 0), 0u);
  EXPECT_NE(row.find(",pass,"), std::string::npos);
}

TEST(Output, DocumentSchema) {
  ExperimentConfig c;
  c.suite = "constants";
  const SuiteOutput out = run_suite(c);
  const Json d = document(c, out);
  EXPECT_EQ(d["schema_version"], kSchemaVersion);
  ASSERT_EQ(d["reports"].size(), 1u);
  const Json& r = d["reports"][0];
  for (const char* key : {"name", "hypotheses", "lhs", "rhs", "ratio", "tolerance", "verdict", "quadrature"})
    EXPECT_TRUE(r.contains(key)) << key;
  EXPECT_TRUE(d["constants"]["C_M"].contains("formula"));
}

TEST(Output, ExitStatus) {
  SuiteOutput out;
  VerificationReport r;
  r.verdict = Verdict::hypothesis_not_met;
  out.reports.push_back(r);
  EXPECT_EQ(exit_status(out), 0);
  r.verdict = Verdict::fail;
  r.expected_fail = true;
  out.reports.push_back(r);
  EXPECT_EQ(exit_status(out), 0);
  r.expected_fail = false;
  out.reports.push_back(r);
  EXPECT_EQ(exit_status(out), 1);
}

TEST(Run, ConfigErrorExitsTwo) {
  ExperimentConfig c;
  c.suite = "bogus";
  std::ostringstream log, err;
  EXPECT_EQ(run(c, log, err), 2);
  EXPECT_NE(err.str().find("bogus"), std::string::npos);
}

TEST(Corpora, Sizes) {
  EXPECT_EQ(morrey_corpus().size(), 50u);
  EXPECT_EQ(osc_log_corpus().size(), 10u);
  for (const MapField& f : morrey_corpus()) {
    EXPECT_FALSE(f.sphere_domain()) << f.label();
    for (const SphereSpec& s : morrey_spheres(f, 10, 3)) EXPECT_TRUE(region_in_domain(f, Region::sphere(s.x, s.r)));
  }
  for (const MapField& f : osc_log_corpus())
    for (const OscLogTriple& t : osc_log_grid(f, 20, 3)) {
      EXPECT_LT(t.r, t.R);
      EXPECT_TRUE(region_in_domain(f, Region::ball(t.x, t.R)));
    }
}
