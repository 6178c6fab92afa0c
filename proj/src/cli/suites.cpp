#include "finidist/cli.hpp"
#include "finidist/retraction.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <thread>

namespace finidist::cli {

namespace {

using Task = std::function<VerificationReport()>;

// Portable uniform in [0, 1) from the raw 64-bit stream.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec unit(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out / out.norm();
}

MapField chart(const MapField& outer, const Vec& p, double radius = 1.0) {
  return zoo::composed(outer, zoo::exp_chart(p, radius));
}

VerificationReport error_report(const std::string& suite, const std::string& name, const std::string& what) {
  VerificationReport r;
  r.suite = suite;
  r.name = name;
  r.verdict = Verdict::fail;
  r.details = {{"error", what}};
  return r;
}

// Runs tasks on `threads` workers; results keep task order.
std::vector<VerificationReport> execute(const std::vector<Task>& tasks, unsigned threads, const std::string& suite) {
  std::vector<VerificationReport> out(tasks.size());
  auto run_one = [&](std::size_t i) {
    try {
      out[i] = tasks[i]();
    } catch (const std::exception& e) {
      out[i] = error_report(suite, "task " + std::to_string(i), e.what());
    }
  };
  if (threads <= 1 || tasks.size() < 2) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, tasks.size()); ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) run_one(i);
    });
  for (auto& th : pool) th.join();
  return out;
}

void add_check(VerificationReport& r, const std::string& name, double value, double bound, bool ok) {
  if (!r.details.contains("checks")) r.details["checks"] = Json::array();
  r.details["checks"].push_back({{"name", name}, {"value", value}, {"threshold", bound}, {"ok", ok}});
  if (!ok && r.verdict == Verdict::pass) r.verdict = Verdict::fail;
}

std::vector<MapField> configured_or(const ExperimentConfig& c, std::vector<MapField> (*fallback)()) {
  if (c.maps.empty()) return fallback();
  std::vector<MapField> maps;
  for (const Json& m : c.maps) maps.push_back(make_map(m));
  return maps;
}

Vec north(int n) {
  Vec v = Vec::Zero(n + 1);
  v[n] = 1.0;
  return v;
}

// ---- suites -----------------------------------------------------------------

std::vector<Task> constants_tasks(const ExperimentConfig& c) {
  return {[c] {
    const TargetSpec t = c.target == "sphere" ? TargetSpec::unit_sphere(c.n) : TargetSpec::euclidean(c.n);
    const ConstantsTable k = constants(c.n, t);
    VerificationReport r;
    r.suite = "constants";
    r.name = "constants";
    r.map = "none";
    r.params = {{"n", c.n}, {"target", c.target}};
    r.lhs = r.rhs = k.C_M;
    r.decide();
    r.details = {{"C_M", k.C_M}, {"d_N", k.d_N}, {"A_N", k.A_N}, {"B_N", k.B_N}, {"six_CM_pow_n", k.six_CM_pow_n}};
    return r;
  }};
}

std::vector<Task> morrey_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  const CheckOptions o = c.check_options();
  const auto maps = configured_or(c, &morrey_corpus);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto spheres = c.spheres.empty() ? morrey_spheres(maps[i], 10, c.seed + 1000 * i) : c.spheres;
    for (const SphereSpec& s : spheres)
      tasks.push_back([f = maps[i], s, o] { return verify_morrey(f, s.x, s.r, o); });
  }
  tasks.push_back([o] {
    VerificationReport r = verify_morrey(zoo::angular_profile("trig", {0.0, 1.0, 0.0}), Vec::Zero(2), 1.0, o);
    r.name = "morrey-cos-theta";
    return r;
  });
  return tasks;
}

std::vector<Task> osc_log_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  const CheckOptions o = c.check_options();
  const auto maps = configured_or(c, &osc_log_corpus);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto grid = c.triples.empty() ? osc_log_grid(maps[i], 20, c.seed + 1000 * i) : c.triples;
    for (const OscLogTriple& t : grid)
      tasks.push_back([f = maps[i], t, o] { return verify_osc_log(f, t.x, t.r, t.R, ConstantMode::explicit_constant, o); });
  }
  return tasks;
}

std::vector<Task> boundary_tasks(const ExperimentConfig& c) {
  const CheckOptions o = c.check_options();
  const MapField id = zoo::identity_ball(2);
  const Region unit_ball = Region::ball(Vec::Zero(2), 1.0);
  const Vec eq = unit({1.0, 0.0, 0.0});
  return {
      [=] { return verify_boundary_control(id, unit_ball, ControlMode::euclidean_2x, o); },
      [=] { return verify_boundary_control(id, unit_ball, ControlMode::manifold_6x, o); },
      [=] {
        return verify_boundary_control(zoo::radial_stretch(2, 0.5), Region::ball(Vec::Zero(2), 0.5),
                                       ControlMode::euclidean_2x, o);
      },
      [=] {
        return verify_boundary_control(zoo::power_map(2), Region::geodesic_ball(eq, 0.05), ControlMode::manifold_6x, o);
      },
      [=] {
        return verify_boundary_control(zoo::power_map(2), Region::geodesic_ball(eq, 0.05), ControlMode::euclidean_2x, o);
      },
      [=] {
        return verify_boundary_control(zoo::himo_counterexample(2, c.k_max),
                                       Region::geodesic_ball(north(2), schedule_theta(2)), ControlMode::manifold_6x, o);
      },
  };
}

std::vector<Task> degree_tasks(const ExperimentConfig& c) {
  const CheckOptions o = c.check_options();
  std::vector<std::pair<MapField, long long>> cases;
  if (c.maps.empty()) {
    for (int k = 1; k <= 5; ++k) cases.emplace_back(zoo::power_map(k), k);
    cases.emplace_back(zoo::cap_fold(2, 0.5), 0);
    cases.emplace_back(zoo::rotation(2, {{0, 1, 0.7}, {1, 2, -1.1}}), 1);
    cases.emplace_back(zoo::reflection(2, 0), -1);
    cases.emplace_back(zoo::mobius(0.3, 0.1), 1);
  } else {
    for (const Json& m : c.maps) cases.emplace_back(make_map(m), std::numeric_limits<long long>::min());
  }
  std::vector<Task> tasks;
  for (const auto& [f, expected] : cases)
    tasks.push_back([f = f, expected = expected, o] {
      VerificationReport r = verify_degree(f, o);
      if (expected != std::numeric_limits<long long>::min()) {
        r.details["expected"] = expected;
        const long long got = r.details["nearest"].get<long long>();
        add_check(r, "expected_degree", static_cast<double>(got), static_cast<double>(expected), got == expected);
      }
      return r;
    });
  return tasks;
}

std::vector<Task> counterexample_tasks(const ExperimentConfig& c) {
  // One audit, split into rows afterwards; a single task keeps it simple.
  return {[c] {
    VerificationReport r;
    r.suite = "counterexample";
    r.name = "audit";
    const CounterexampleAudit a =
        counterexample_audit(c.n, c.k_max, c.level + 2, std::max<std::size_t>(c.samples, 10000), c.seed);
    Json rows = Json::array();
    for (const SliceRow& s : a.rows)
      rows.push_back({{"k", s.k},
                      {"theta_lo", s.theta_lo},
                      {"theta_hi", s.theta_hi},
                      {"volume", s.volume},
                      {"volume_bound", s.volume_bound},
                      {"int_jacobian", s.int_jacobian},
                      {"int_energy", s.int_energy},
                      {"int_p", s.int_p},
                      {"cum_energy", s.cum_energy},
                      {"cum_p", s.cum_p},
                      {"oscillation", s.oscillation},
                      {"indicator", s.indicator}});
    r.details = {{"rows", rows}, {"fitted_c", a.fitted_c}, {"harmonic_tail", a.harmonic_tail}, {"level", a.level}};
    r.level = a.level;
    return r;
  }};
}

// Expands the single audit report into per-slice rows and a cumulative row.
std::vector<VerificationReport> counterexample_rows(const VerificationReport& audit, const ExperimentConfig& c) {
  if (!audit.details.contains("rows")) return {audit};
  const double vol = sphere_area(c.n + 1, 1.0);
  const std::string label = zoo::himo_counterexample(c.n, c.k_max).label();
  std::vector<VerificationReport> out;
  const Json& rows = audit.details["rows"];
  double cum_p3 = 0.0;
  for (const Json& row : rows) {
    const int k = row["k"].get<int>();
    if (k <= 3) cum_p3 = row["cum_p"].get<double>();
    VerificationReport r;
    r.suite = "counterexample";
    r.name = "slice-" + std::to_string(k);
    r.map = label;
    r.params = {{"n", c.n}, {"k_max", c.k_max}, {"k", k}};
    r.lhs = std::abs(row["int_jacobian"].get<double>() - vol) / vol;
    r.rhs = 0.01;
    r.level = audit.level;
    r.error_indicator = row["indicator"].get<double>();
    r.decide();
    r.details = row;
    const double cum_e = row["cum_energy"].get<double>();
    add_check(r, "cumulative_energy", cum_e, k * vol * 0.99, cum_e >= k * vol * 0.99);
    const double osc = row["oscillation"].get<double>();
    add_check(r, "oscillation", osc, 1.99, osc >= 1.99);
    out.push_back(r);
  }
  VerificationReport cum;
  cum.suite = "counterexample";
  cum.name = "cumulative";
  cum.map = label;
  cum.params = {{"n", c.n}, {"k_max", c.k_max}};
  cum.lhs = rows.back()["cum_p"].get<double>();
  cum.rhs = 2.0 * cum_p3;
  cum.level = audit.level;
  cum.decide();
  cum.details = {{"cum_energy", rows.back()["cum_energy"]},
                 {"cum_p", rows.back()["cum_p"]},
                 {"cum_p_at_3", cum_p3},
                 {"fitted_c", audit.details["fitted_c"]},
                 {"harmonic_tail", audit.details["harmonic_tail"]}};
  out.push_back(cum);
  return out;
}

std::vector<Task> retraction_tasks(const ExperimentConfig& c) {
  const std::size_t samples = std::max<std::size_t>(c.samples, 10000);
  const std::uint64_t seed = c.seed;
  RetractionSpec a;
  a.p = north(2);
  a.d = 0.1;
  a.q = unit({0.0, -std::sin(2.5), std::cos(2.5)});
  a.r_prime = 0.3;
  RetractionSpec b;
  b.p = unit({1.0, 1.0, 0.0, 1.0});
  b.d = 0.12;
  b.q = unit({-1.0, 0.0, 0.5, -1.0});
  b.r_prime = 0.5;
  std::vector<Task> tasks;
  for (const RetractionSpec& s : {a, b})
    tasks.push_back([s, samples, seed] { return verify_retraction(build_retraction(s), s, samples, seed); });
  return tasks;
}

std::vector<Task> loglog_tasks(const ExperimentConfig& c) {
  const CheckOptions o = c.check_options();
  const std::size_t samples = std::max<std::size_t>(c.samples, 10000);
  return {
      [o] {
        const MapField f = zoo::loglog_scalar(2);
        const double rho = std::exp(-2.0);
        const QuadratureEstimate e =
            adaptive([&](int L) { return energy(f, Region::ball(Vec::Zero(2), rho), 2.0, L); }, o);
        VerificationReport r;
        r.suite = "loglog";
        r.name = "loglog-energy";
        r.map = f.label();
        r.params = {{"radius", rho}};
        r.lhs = std::abs(e.value - kPi);
        r.rhs = 1e-3;
        r.level = e.resolution;
        r.error_indicator = e.error_indicator;
        r.decide();
        r.details = {{"energy", e.value}, {"closed_form", -2.0 * kPi / std::log(rho)}};
        return r;
      },
      [samples, o] {
        const MapField f = zoo::graph_embed(2);
        const AuditStats st = finite_distortion_audit(f, f.domain(), samples, o.seed);
        VerificationReport r;
        r.suite = "loglog";
        r.name = "graph-embed-audit";
        r.map = f.label();
        r.params = {{"samples", samples}};
        r.lhs = static_cast<double>(st.samples - st.positive);
        r.rhs = 0.0;
        r.decide();
        r.details = {{"samples", st.samples},
                     {"positive", st.positive},
                     {"degenerate", st.degenerate},
                     {"violations", st.violations},
                     {"min_jacobian", st.min_jac}};
        return r;
      },
  };
}

std::vector<Task> extremal_tasks(const ExperimentConfig& c) {
  CheckOptions o = c.check_options();
  const std::size_t budget = c.budget;
  std::vector<Task> tasks;
  for (const ParametricFamily& fam : {constant_family(), trig_family(), cap_bump_family()})
    tasks.push_back([fam, budget, o] {
      const ExtremalResult res = morrey_extremal_search(fam, budget, o);
      VerificationReport r;
      r.suite = "extremal";
      r.name = "extremal-" + fam.name;
      r.map = fam.name;
      r.params = {{"budget", budget}};
      r.lhs = res.best_ratio;
      r.rhs = 1.0;
      r.tolerance = o.tolerance;
      r.decide();
      r.details = {{"best_params", res.best_params}, {"evaluations", res.evaluations}};
      return r;
    });
  tasks.push_back([o] {
    VerificationReport r;
    r.suite = "extremal";
    r.name = "cap-bump-sweep";
    r.map = "cap_bump";
    Json sweep = Json::array();
    double prev = std::numeric_limits<double>::infinity(), best = 0.0;
    bool monotone = true;
    for (double a = 0.2; a < 3.05; a += 0.4) {
      const double ratio = verify_morrey(zoo::angular_profile("cap_bump", {a}), Vec::Zero(2), 1.0, o).ratio;
      sweep.push_back({{"plateau", a}, {"ratio", ratio}});
      monotone = monotone && ratio <= prev;
      prev = ratio;
      best = std::max(best, ratio);
    }
    r.lhs = best;
    r.rhs = 1.0;
    r.tolerance = o.tolerance;
    r.decide();
    r.details = {{"sweep", sweep}};
    add_check(r, "ratio_grows_as_plateau_shrinks", monotone ? 1.0 : 0.0, 1.0, monotone);
    return r;
  });
  return tasks;
}

std::vector<Task> jacobian_tasks(const ExperimentConfig& c) {
  const CheckOptions o = c.check_options();
  const Region ball = Region::ball(Vec::Zero(2), 1.0);
  std::vector<Task> tasks;
  for (double eps : {0.3, 0.5, 0.8})
    tasks.push_back([=] { return jacobian_integral_match(zoo::identity_ball(2), zoo::radial_stretch(2, eps), ball, o); });
  tasks.push_back([=] {
    const MapField f = zoo::radial_jump(2, 0.5, 1.5, 0.5);
    const MapField g =
        zoo::composed(zoo::euclidean_radial_retraction(Vec::Zero(2), 0.5), f).with_breakpoints({1.0 / 3.0});
    VerificationReport r = jacobian_integral_match(f, g, ball, o, true);
    r.name = "jacobian-match-retracted";
    return r;
  });
  return tasks;
}

SuiteOutput run_one_suite(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  const std::string& s = c.suite;
  if (s == "constants") tasks = constants_tasks(c);
  else if (s == "morrey") tasks = morrey_tasks(c);
  else if (s == "osc-log") tasks = osc_log_tasks(c);
  else if (s == "boundary-control") tasks = boundary_tasks(c);
  else if (s == "degree") tasks = degree_tasks(c);
  else if (s == "counterexample") tasks = counterexample_tasks(c);
  else if (s == "retraction") tasks = retraction_tasks(c);
  else if (s == "loglog") tasks = loglog_tasks(c);
  else if (s == "extremal") tasks = extremal_tasks(c);
  else if (s == "jacobian") tasks = jacobian_tasks(c);
  else throw ConfigError("unknown suite '" + s + "'");

  SuiteOutput out;
  out.reports = execute(tasks, c.threads, s);
  if (s == "counterexample") out.reports = counterexample_rows(out.reports.front(), c);
  for (auto& r : out.reports)
    if (r.suite.empty()) r.suite = s;
  return out;
}

}  // namespace

std::vector<MapField> morrey_corpus() {
  const Vec n = unit({0.0, 0.0, 1.0}), eq = unit({1.0, 0.0, 0.0}), p2 = unit({1.0, 1.0, 0.5});
  std::vector<MapField> maps;
  const double angles[10][3] = {{0.3, 0.0, 0.0},  {0.0, 0.7, 0.0},  {0.0, 0.0, 1.2}, {0.4, -0.9, 0.2},
                                {1.5, 0.3, -0.6}, {-0.8, 0.8, 0.8}, {2.0, 1.0, 0.1}, {0.1, 2.5, -1.0},
                                {-1.3, 0.2, 2.2}, {0.6, 0.6, 0.6}};
  for (int i = 0; i < 10; ++i)
    maps.push_back(chart(zoo::rotation(2, {{0, 1, angles[i][0]}, {1, 2, angles[i][1]}, {0, 2, angles[i][2]}}),
                         i % 2 ? eq : n));
  for (int k = 1; k <= 5; ++k) {
    maps.push_back(chart(zoo::power_map(k), eq));
    maps.push_back(chart(zoo::power_map(k), p2));
  }
  const double slices[5][2] = {{0.2, 0.6}, {0.1, 0.9}, {0.3, 0.5}, {0.05, 0.7}, {0.4, 0.95}};
  for (const auto& s : slices) {
    maps.push_back(chart(zoo::slice_stretch(2, s[0], s[1]), n));
    maps.push_back(chart(zoo::slice_stretch_reflected(2, s[0], s[1]), n));
  }
  maps.push_back(zoo::angular_profile("trig", {0.0, 1.0, 0.0}));
  maps.push_back(zoo::angular_profile("trig", {0.5, 0.3, -0.2, 0.1, 0.4}));
  maps.push_back(zoo::angular_profile("trig", {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.5}));
  maps.push_back(zoo::angular_profile("trig", {1.0, -0.7, 0.7, 0.2, -0.2, 0.1, 0.05}));
  for (double a : {0.3, 1.0, 2.0}) maps.push_back(zoo::angular_profile("cap_bump", {a}));
  maps.push_back(zoo::height(unit({1.0, 0.0}), 0.0, false));
  maps.push_back(zoo::height(unit({1.0, 2.0}), 0.5, false));
  maps.push_back(zoo::height(unit({-3.0, 1.0}), -1.0, false));
  maps.push_back(chart(zoo::mobius(0.3, 0.0), eq));
  maps.push_back(chart(zoo::mobius(0.1, 0.2), eq));
  maps.push_back(chart(zoo::mobius(-0.4, 0.3), p2));
  for (double eps : {0.3, 0.5, 0.8}) maps.push_back(zoo::radial_stretch(2, eps));
  maps.push_back(zoo::euclidean_radial_retraction(Vec::Zero(2), 0.3, 1.0));
  maps.push_back(zoo::euclidean_radial_retraction(Vec::Zero(2), 0.6, 1.0));
  maps.push_back(zoo::exp_chart(n, 1.0));
  maps.push_back(zoo::exp_chart(p2, 1.0));
  return maps;
}

std::vector<SphereSpec> morrey_spheres(const MapField& f, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SphereSpec> out;
  const Region& d = f.domain();
  const int n = d.dim;
  for (std::size_t i = 0; i < count; ++i) {
    if (d.kind == RegionKind::euclidean_annulus) {
      const double t = uniform(rng);
      out.push_back({d.center, std::exp(std::log(2.0 * d.inner) * (1.0 - t) + std::log(0.9 * d.outer) * t)});
      continue;
    }
    Vec x(n);
    for (int k = 0; k < n; ++k) x[k] = 2.0 * uniform(rng) - 1.0;
    x *= 0.5 * d.outer * std::pow(uniform(rng), 1.0 / n) / std::max(x.norm(), 1e-12);
    out.push_back({d.center + x, d.outer * (0.05 + 0.4 * uniform(rng))});
  }
  return out;
}

std::vector<MapField> osc_log_corpus() {
  // Sphere-valued maps use small charts so the energy stays below min(A, B).
  const double rho = 0.005;
  const Vec n = unit({0.0, 0.0, 1.0}), eq = unit({1.0, 0.0, 0.0}), p2 = unit({1.0, 1.0, 0.5});
  return {zoo::identity_ball(2),
          zoo::radial_stretch(2, 0.3),
          zoo::radial_stretch(2, 0.5),
          zoo::radial_stretch(2, 0.8),
          chart(zoo::rotation(2, {{0, 1, 0.4}, {1, 2, -0.9}}), n, rho),
          chart(zoo::power_map(2), eq, rho),
          chart(zoo::power_map(3), p2, rho),
          chart(zoo::mobius(0.3, 0.1), eq, rho),
          zoo::exp_chart(n, rho),
          chart(zoo::reflection(2, 1), p2, rho)};
}

std::vector<OscLogTriple> osc_log_grid(const MapField& f, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Region& d = f.domain();
  const int n = d.dim;
  std::vector<OscLogTriple> out;
  for (std::size_t i = 0; i < count; ++i) {
    Vec x(n);
    for (int k = 0; k < n; ++k) x[k] = 2.0 * uniform(rng) - 1.0;
    x *= 0.3 * d.outer * std::pow(uniform(rng), 1.0 / n) / std::max(x.norm(), 1e-12);
    const double R = d.outer * (0.05 + 0.25 * uniform(rng));
    const double r = R * (0.05 + 0.75 * uniform(rng));
    out.push_back({d.center + x, r, R});
  }
  return out;
}

SuiteOutput run_suite(const ExperimentConfig& c) {
  SuiteOutput out;
  if (c.suite == "all") {
    for (const std::string& s : suite_names()) {
      if (s == "all") continue;
      ExperimentConfig sub = c;
      sub.suite = s;
      if (s != "morrey" && s != "osc-log" && s != "degree") sub.maps.clear();
      SuiteOutput part = run_one_suite(sub);
      out.reports.insert(out.reports.end(), part.reports.begin(), part.reports.end());
    }
  } else {
    out = run_one_suite(c);
  }
  const TargetSpec t = c.target == "sphere" ? TargetSpec::unit_sphere(c.n) : TargetSpec::euclidean(c.n);
  const ConstantsTable k = constants(c.n, t);
  out.constants = {
      {"n", c.n},
      {"target", c.target},
      {"C_M", {{"value", k.C_M}, {"formula", "(n-1) pi / (n omega_n)^(1/n)"}}},
      {"d_N", {{"value", k.d_N}, {"formula", "injectivity radius of the target"}}},
      {"A_N", {{"value", k.A_N}, {"formula", "(d_N / (60 C_M))^n / 2"}}},
      {"B_N", {{"value", k.B_N}, {"formula", "volume of a target ball of radius d_N / 10"}}},
      {"six_CM_pow_n", {{"value", k.six_CM_pow_n}, {"formula", "(6 C_M)^n"}}},
  };
  return out;
}

}  // namespace finidist::cli
