#include "finidist/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace finidist::cli;

  CLI::App app{"Numerical checks for continuity of finite-distortion maps"};
  std::string config_path, suite, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
  std::optional<std::size_t> samples;
  std::optional<double> tol;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--suite", suite, "suite to run (overrides the config)");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--level", level, "starting quadrature level");
  app.add_option("--samples", samples, "sample count for oscillations and audits");
  app.add_option("--tol", tol, "relative tolerance of the checks");
  app.add_option("--threads", threads, "worker threads");
  app.footer("Suites: constants, morrey, osc-log, boundary-control, degree, counterexample, retraction, loglog, "
             "extremal, jacobian, all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  ExperimentConfig c;
  try {
    if (!config_path.empty()) c = load_config(config_path);
  } catch (const finidist::Error& e) {
    std::cerr << "finidist: " << e.what() << '\n';
    return 2;
  }
  if (!suite.empty()) c.suite = suite;
  if (!out.empty()) c.out = out;
  if (seed) c.seed = *seed;
  if (level) {
    c.level = *level;
    c.max_level = std::max(c.max_level, c.level);
  }
  if (samples) c.samples = *samples;
  if (tol) c.tolerance = *tol;
  if (threads) c.threads = *threads;
  if (c.suite.empty()) {
    std::cerr << "finidist: no suite given (use --suite or a config file)\n";
    return 2;
  }

  try {
    return run(c, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "finidist: " << e.what() << '\n';
    return 2;
  }
}
