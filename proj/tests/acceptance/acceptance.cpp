// Acceptance gate. `acceptance` runs every criterion, `acceptance N` runs
// criterion N alone. One PASS/FAIL line per criterion; exit 1 on any FAIL.

#include "finidist/calculus.hpp"
#include "finidist/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace finidist;
using finidist::cli::ExperimentConfig;
using finidist::cli::Json;
using finidist::cli::SuiteOutput;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream msg;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      msg << " [" << what << "]";
    }
  }
};

SuiteOutput run(const std::string& suite, unsigned threads = 1) {
  ExperimentConfig c;
  c.suite = suite;
  c.threads = threads;
  cli::validate(c);
  return cli::run_suite(c);
}

int count(const SuiteOutput& o, Verdict v) {
  int k = 0;
  for (const auto& r : o.reports) k += r.verdict == v;
  return k;
}

const VerificationReport* find(const SuiteOutput& o, const std::string& name) {
  for (const auto& r : o.reports)
    if (r.name == name) return &r;
  return nullptr;
}

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

void constants_golden(Outcome& out) {
  const ConstantsTable s2 = constants(2, TargetSpec::unit_sphere(2));
  const double cm3 = morrey_constant(3);
  struct Golden {
    const char* name;
    double value, expected, tol;
  };
  const Golden g[] = {{"C_M(2)", s2.C_M, 1.253314, 1e-5},
                      {"C_M(3)", cm3, 2.702040, 1e-5},
                      {"A_S2", s2.A_N, 8.727e-4, 1e-6},
                      {"B_S2", s2.B_N, 0.307487, 1e-5}};
  for (const Golden& x : g) {
    out.msg << " " << x.name << "=" << x.value;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s off golden %.6g by %.3g > %.0e", x.name, x.expected,
                  std::abs(x.value - x.expected), x.tol);
    out.require(std::abs(x.value - x.expected) <= x.tol, buf);
  }
}

void morrey_suite(Outcome& out) {
  const SuiteOutput o = run("morrey");
  double worst_ratio = 0.0, worst_indicator = 0.0;
  std::map<std::string, int> per_map;
  for (const auto& r : o.reports) {
    worst_ratio = std::max(worst_ratio, r.ratio);
    worst_indicator = std::max(worst_indicator, r.details["relative_indicator"].get<double>());
    if (r.name != "morrey-cos-theta") ++per_map[r.params["map"].dump()];
  }
  bool ten_each = per_map.size() == 50;
  for (const auto& [m, k] : per_map) ten_each = ten_each && k == 10;
  const VerificationReport* cos = find(o, "morrey-cos-theta");
  out.msg << " reports=" << o.reports.size() << " maps=" << per_map.size() << " pass=" << count(o, Verdict::pass)
          << " max_ratio=" << worst_ratio << " max_rel_indicator=" << worst_indicator
          << " cos_theta_ratio=" << (cos ? cos->ratio : NAN);
  out.require(ten_each, "expected 50 maps x 10 spheres");
  out.require(count(o, Verdict::pass) == static_cast<int>(o.reports.size()), "not every report passes");
  out.require(worst_ratio <= 1.0 + 1e-3, "ratio above 1 + 1e-3");
  out.require(worst_indicator < 1e-4, "quadrature indicator not below 1e-4");
  out.require(cos && std::abs(cos->ratio - 0.9003) <= 1e-3, "cos-theta ratio off 0.9003");
}

void osc_log_suite(Outcome& out) {
  const SuiteOutput o = run("osc-log");
  out.msg << " reports=" << o.reports.size() << " pass=" << count(o, Verdict::pass)
          << " hypothesis_not_met=" << count(o, Verdict::hypothesis_not_met) << " fail=" << count(o, Verdict::fail);
  out.require(o.reports.size() == cli::osc_log_corpus().size() * 20, "expected 20 triples per map");
  out.require(count(o, Verdict::fail) == 0, "fail verdicts present");
}

void degree_integrality(Outcome& out) {
  double worst = 0.0;
  for (int k = 1; k <= 5; ++k) {
    const DegreeResult d = degree_adaptive(zoo::power_map(k));
    out.msg << " k" << k << "=" << d.estimate;
    worst = std::max(worst, d.residual);
    out.require(d.nearest == k && d.residual < 1e-3, "power_map(" + std::to_string(k) + ")");
  }
  const DegreeResult fold = degree_adaptive(zoo::cap_fold(2, 0.5));
  out.msg << " cap_fold=" << fold.estimate << " max_residual=" << std::max(worst, fold.residual);
  out.require(fold.nearest == 0 && fold.residual < 1e-3, "cap_fold degree 0");
}

void counterexample_audit_check(Outcome& out) {
  const CounterexampleAudit a = counterexample_audit(2, 6, 5, 10000, 1);
  const double vol = 4.0 * kPi;
  double worst_slice = 0.0, min_osc = 1e300, cum_p3 = 0.0;
  for (const SliceRow& s : a.rows) {
    worst_slice = std::max(worst_slice, std::abs(s.int_jacobian - vol) / vol);
    if (s.k >= 2) min_osc = std::min(min_osc, s.oscillation);
    if (s.k == 3) cum_p3 = s.cum_p;
  }
  const SliceRow& last = a.rows.back();
  out.msg << " slices=" << a.rows.size() << " max_rel_slice_err=" << worst_slice << " cum_energy=" << last.cum_energy
          << " cum_p(6)=" << last.cum_p << " cum_p(3)=" << cum_p3 << " min_osc=" << min_osc;
  out.require(a.rows.size() == 6, "six slices");
  out.require(worst_slice <= 0.01, "per-slice int J off 4 pi by more than 1%");
  out.require(last.cum_energy >= 6 * vol * 0.99, "cumulative energy below K 4 pi 0.99");
  out.require(last.cum_p <= 2.0 * cum_p3, "cum P(6) above 2 cum P(3)");
  out.require(min_osc >= 1.99, "oscillation below 1.99");
}

void jacobian_matching(Outcome& out) {
  const SuiteOutput o = run("jacobian");
  int matched = 0;
  for (const auto& r : o.reports) {
    if (r.expected_fail) {
      out.msg << " retracted_pair=" << to_string(r.verdict) << "(gap " << r.lhs << ")";
      out.require(r.verdict == Verdict::fail, "engineered pair did not fail");
      continue;
    }
    out.msg << " " << r.map << ":" << r.lhs;
    out.require(r.lhs <= 1e-3 * kPi, r.map + " gap above 1e-3 pi");
    ++matched;
  }
  out.require(matched == 3, "three identity/radial-stretch pairs");
}

void retraction_suite(Outcome& out) {
  const SuiteOutput o = run("retraction");
  for (const auto& r : o.reports) {
    out.msg << " " << r.map << ": samples=" << r.details["samples"] << " L=" << r.details["lipschitz"]
            << " dL=" << r.lhs;
    out.require(r.details["samples"].get<std::size_t>() >= 10000, "fewer than 1e4 samples");
    for (const auto& c : r.details["checks"]) {
      const std::string name = c["name"];
      if (name == "boundary_jacobian") continue;
      out.require(c["value"].get<double>() <= 1e-9, name + " above 1e-9");
    }
    out.require(r.lhs <= 0.1, "L-hat moved more than 10% under doubling");
  }
  out.require(o.reports.size() == 2, "two retractions");
}

void loglog_energy(Outcome& out) {
  const SuiteOutput o = run("loglog");
  const VerificationReport* e = find(o, "loglog-energy");
  const VerificationReport* g = find(o, "graph-embed-audit");
  if (!e || !g) {
    out.require(false, "missing reports");
    return;
  }
  const double energy = e->details["energy"].get<double>();
  out.msg << " energy=" << energy << " |E-pi|=" << std::abs(energy - kPi) << " graph_samples=" << g->details["samples"]
          << " positive=" << g->details["positive"] << " violations=" << g->details["violations"];
  out.require(std::abs(energy - kPi) <= 1e-3, "energy off pi");
  out.require(g->details["samples"].get<std::size_t>() >= 10000, "fewer than 1e4 samples");
  out.require(g->details["positive"] == g->details["samples"], "J not positive everywhere");
  out.require(g->details["violations"].get<std::size_t>() == 0, "violations");
}

double fd_error(const MapField& f, const Point& x, double h) {
  const Mat an = differential(f, x, DiffMode::analytic()).matrix;
  const Mat fd = differential(f, x, DiffMode::finite_difference(h)).matrix;
  return (fd - an).norm() / an.norm();
}

void numerics_hygiene(Outcome& out) {
  const Point p = SpherePoint::from_ambient(vec({0.3, -0.5, 0.8}).normalized());
  const Point x2 = vec({0.31, -0.22});
  const std::vector<std::pair<MapField, Point>> probes = {
      {zoo::power_map(1), p},
      {zoo::power_map(2), p},
      {zoo::power_map(3), p},
      {zoo::power_map(4), p},
      {zoo::power_map(5), p},
      {zoo::rotation(2, {{0, 1, 0.7}, {1, 2, -0.4}}), p},
      {zoo::reflection(2, 1), p},
      {zoo::mobius(0.3, 0.1), p},
      {zoo::slice_stretch(2, 0.4, 1.2), p},
      {zoo::radial_stretch(2, 0.5), x2},
      {zoo::exp_chart(vec({0.0, 0.0, 1.0}), 1.0), x2},
      {zoo::angular_profile("trig", {0.2, 1.0, -0.5}), x2},
  };
  double worst = 0.0;
  for (const auto& [f, x] : probes) worst = std::max(worst, fd_error(f, x, 1e-5));
  out.msg << " max_rel_fd_err=" << worst;
  out.require(worst < 1e-6, "FD error not below 1e-6 at h = 1e-5");

  // Truncation-dominated maps; for low-curvature maps rounding swamps the
  // O(h^2) term at this step and the ratio carries no information.
  for (const auto& [f, x] : {std::pair<MapField, Point>{zoo::power_map(5), p}, {zoo::radial_stretch(2, 0.5), x2}}) {
    const double ratio = fd_error(f, x, 1e-5) / fd_error(f, x, 5e-6);
    out.msg << " ratio[" << f.label() << "]=" << ratio;
    out.require(ratio >= 3.5 && ratio <= 4.5, "convergence ratio outside [3.5, 4.5]");
  }

  const std::vector<std::pair<MapField, Point>> conformal = {
      {zoo::mobius(0.3, 0.1), p},
      {zoo::mobius(-0.5, 0.6), SpherePoint::from_ambient(vec({-0.6, 0.0, -0.8}))},
      {zoo::rotation(2, {{0, 1, 0.7}, {1, 2, -0.4}}), p},
      {zoo::identity_sphere(2), p},
      {zoo::identity_ball(2), x2},
  };
  double worst_k = 0.0;
  for (const auto& [f, x] : conformal) {
    const auto k = distortion(f, x);
    worst_k = std::max(worst_k, k ? std::abs(*k - 1.0) : 1.0);
  }
  out.msg << " max|K-1|=" << worst_k;
  out.require(worst_k <= 1e-8, "conformal distortion off 1");
}

void determinism(Outcome& out) {
  ExperimentConfig c;
  c.suite = "all";
  c.threads = 1;
  const std::string a = cli::csv_table(cli::run_suite(c));
  c.threads = 3;
  const std::string b = cli::csv_table(cli::run_suite(c));
  std::size_t rows = 0;
  for (char ch : a) rows += ch == '\n';
  out.msg << " rows=" << rows << " bytes=" << a.size() << " identical=" << (a == b ? "yes" : "no");
  out.require(!a.empty() && a == b, "CSV differs between runs");
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {1, "constants golden values", 1, constants_golden},
      {2, "Morrey suite", 60, morrey_suite},
      {3, "oscillation-log suite", 120, osc_log_suite},
      {4, "degree integrality", 30, degree_integrality},
      {5, "counterexample audit", 120, counterexample_audit_check},
      {6, "Jacobian-integral matching", 30, jacobian_matching},
      {7, "retraction suite", 30, retraction_suite},
      {8, "log-log energy and graph audit", 30, loglog_energy},
      {9, "numerics hygiene", 30, numerics_hygiene},
      {10, "determinism of the full run", 300, determinism},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool any_fail = false;
  for (const Criterion& c : all) {
    if (only && c.id != only) continue;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char t[64];
    std::snprintf(t, sizeof t, "%.2fs <= %.0fs", secs, c.budget_s);
    out.require(secs <= c.budget_s, "over time budget");
    std::printf("%s %2d %s (%s):%s\n", out.ok ? "PASS" : "FAIL", c.id, c.title, t, out.msg.str().c_str());
    std::fflush(stdout);
    any_fail = any_fail || !out.ok;
  }
  return any_fail ? 1 : 0;
}
