#include "finidist/errors.hpp"
#include "finidist/estimates.hpp"

#include <cmath>
#include <limits>

namespace finidist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kAuditSamples = 256;

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Region ball_about(const MapField& f, const Vec& x, double r) {
  return f.sphere_domain() ? Region::geodesic_ball(x, r) : Region::ball(x, r);
}

Hypothesis hypothesis(std::string name, double value, double threshold, bool ok) {
  return Hypothesis{std::move(name), value, threshold, ok};
}

Hypothesis finite_distortion_hypothesis(const MapField& f, const Region& region, std::uint64_t seed) {
  if (!f.equidimensional()) return hypothesis("finite_distortion", 1.0, 0.0, false);
  const AuditStats st = finite_distortion_audit(f, region, kAuditSamples, seed);
  return hypothesis("finite_distortion", st.fraction_violations(), 0.0, st.passes());
}

// Longitudes where the circle S(x, r) of R^2 crosses the map's circular loci.
std::vector<double> circle_crossings(const MapField& f, const Vec& x, double r) {
  std::vector<double> out;
  for (const SingularLocus& l : f.singular_set()) {
    if (l.kind != SingularLocus::Kind::sphere || l.center.size() != 2) continue;
    const Vec dc = l.center - x;
    const double d = dc.norm();
    if (!(d > std::abs(r - l.radius) && d < r + l.radius)) continue;
    const double base = std::atan2(dc[1], dc[0]);
    const double half = std::acos(std::clamp((r * r + d * d - l.radius * l.radius) / (2.0 * r * d), -1.0, 1.0));
    for (double a : {base - half, base + half}) {
      double t = std::fmod(a, 2.0 * kPi);
      if (t < 0.0) t += 2.0 * kPi;
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace

QuadratureEstimate adaptive(const std::function<QuadratureEstimate(int)>& integral, const CheckOptions& o,
                            double scale) {
  int level = o.level;
  QuadratureEstimate e = integral(level);
  while (level < o.max_level && e.error_indicator > o.indicator_target * std::max(std::abs(e.value), scale))
    e = integral(++level);
  return e;
}

QuadratureEstimate tangential_energy(const MapField& f, const Vec& x, double r, int level) {
  if (f.sphere_domain()) throw DomainError("tangential_energy: needs a Euclidean domain");
  const int n = f.domain_dim();
  QuadratureOptions opts = f.quadrature_options(Region::sphere(x, r));
  if (n == 2) {
    const auto extra = circle_crossings(f, x, r);
    opts.angle_breaks.insert(opts.angle_breaks.end(), extra.begin(), extra.end());
  }
  return integrate_sphere(
      [&](const Vec& y) {
        const Vec w = (y - x) / r;
        const Differential d = differential(f, Point(y));
        return std::pow(operator_norm(Mat(d.matrix * tangent_frame(w))), n);
      },
      x, r, level, opts);
}

VerificationReport verify_morrey(const MapField& f, const Vec& x, double r, const CheckOptions& o) {
  if (f.sphere_domain()) throw DomainError("verify_morrey: needs a Euclidean domain");
  if (!(r > 0.0)) throw DomainError("verify_morrey: radius must be positive");
  const Region sphere = Region::sphere(x, r);
  if (!region_in_domain(f, sphere)) throw DomainError(f.label() + ": sphere outside the domain");
  const int n = f.domain_dim();
  const double cm = morrey_constant(n);

  const OscillationSample osc = oscillation(f, sphere, o.count, o.seed, OscMetric::geodesic);
  const QuadratureEstimate e = adaptive([&](int L) { return tangential_energy(f, x, r, L); }, o);

  VerificationReport rep;
  rep.name = "morrey";
  rep.suite = "morrey";
  rep.map = f.label();
  rep.params = {{"map", f.descriptor()}, {"x", to_json(x)}, {"r", r}};
  rep.lhs = osc.diam_lower_bound;
  rep.rhs = cm * std::pow(r * e.value, 1.0 / n);
  rep.tolerance = o.tolerance;
  rep.level = e.resolution;
  rep.error_indicator = e.error_indicator;
  rep.decide();
  rep.details = {{"energy", e.value},
                 {"relative_indicator", e.relative_indicator()},
                 {"C_M", cm},
                 {"samples", osc.evaluated},
                 {"metric", to_string(osc.metric)}};
  return rep;
}

VerificationReport verify_osc_log(const MapField& f, const Vec& x, double r, double R, ConstantMode mode,
                                  const CheckOptions& o) {
  if (!(r > 0.0) || !(r < R)) throw DomainError("verify_osc_log: need 0 < r < R");
  const int n = f.domain_dim();
  const ConstantsTable c = constants(n, f.target());
  const Region inner = ball_about(f, x, r), outer = ball_about(f, x, R);
  if (!region_in_domain(f, outer)) throw DomainError(f.label() + ": B(x, R) outside the domain");

  const OscillationSample osc = oscillation(f, inner, o.count, o.seed, OscMetric::geodesic);
  const QuadratureEstimate e = adaptive([&](int L) { return energy(f, outer, n, L); }, o);
  const double log_ratio = std::log(R / r);

  VerificationReport rep;
  rep.name = "osc-log";
  rep.suite = "osc-log";
  rep.map = f.label();
  rep.params = {{"map", f.descriptor()},
                {"x", to_json(x)},
                {"r", r},
                {"R", R},
                {"mode", mode == ConstantMode::fitted ? "fitted" : "explicit"}};
  rep.lhs = std::pow(osc.diam_lower_bound, n);
  rep.rhs = log_ratio > 0.0 ? c.six_CM_pow_n / log_ratio * e.value : kInf;
  rep.tolerance = o.tolerance;
  rep.level = e.resolution;
  rep.error_indicator = e.error_indicator;

  if (mode == ConstantMode::explicit_constant) {
    double reach = 2.0 * R, room = kPi;
    if (!f.sphere_domain()) {
      reach = (x - f.domain().center).norm() + 2.0 * R;
      room = f.domain().outer;
    }
    const bool contained = f.sphere_domain() ? 2.0 * R <= kPi : region_in_domain(f, ball_about(f, x, 2.0 * R));
    rep.hypotheses.push_back(hypothesis("ball_2R_in_domain", reach, room, contained));
    rep.hypotheses.push_back(finite_distortion_hypothesis(f, outer, o.seed));
    const double thr = c.small_energy_threshold();
    if (std::isfinite(thr)) {
      const QuadratureEstimate total = adaptive([&](int L) { return energy(f, f.domain(), n, L); }, o);
      const bool ok = !region_truncated(f, f.domain()) && total.value < thr;
      rep.hypotheses.push_back(hypothesis("small_energy", total.value, thr, ok));
    } else {
      rep.hypotheses.push_back(hypothesis("small_energy", 0.0, thr, true));
    }
  }
  rep.hypotheses.push_back(hypothesis("energy_resolved", region_truncated(f, outer) ? 1.0 : 0.0, 0.0,
                                      !region_truncated(f, outer)));
  rep.decide();
  rep.details = {{"oscillation", osc.diam_lower_bound},
                 {"energy", e.value},
                 {"relative_indicator", e.relative_indicator()},
                 {"constant", c.six_CM_pow_n},
                 {"log_ratio", log_ratio},
                 {"samples", osc.evaluated}};
  if (mode == ConstantMode::fitted && e.value > 0.0) rep.details["fitted_constant"] = rep.lhs * log_ratio / e.value;
  return rep;
}

double fit_osc_log_constant(const MapField& f, const std::vector<OscLogTriple>& grid, const CheckOptions& o) {
  double best = 0.0;
  for (const OscLogTriple& t : grid) {
    const VerificationReport rep = verify_osc_log(f, t.x, t.r, t.R, ConstantMode::fitted, o);
    if (rep.details.contains("fitted_constant")) best = std::max(best, rep.details["fitted_constant"].get<double>());
  }
  return best;
}

std::string to_string(ControlMode m) { return m == ControlMode::euclidean_2x ? "euclidean-2x" : "manifold-6x"; }

VerificationReport verify_boundary_control(const MapField& f, const Region& ball, ControlMode mode,
                                           const CheckOptions& o) {
  if (ball.kind != RegionKind::euclidean_ball && ball.kind != RegionKind::geodesic_ball)
    throw DomainError("verify_boundary_control: needs a ball");
  const int n = f.domain_dim();
  const OscillationSample osc_b = oscillation(f, ball, o.count, o.seed, OscMetric::geodesic);
  const OscillationSample osc_s = boundary_oscillation(f, ball, o.count, o.seed + 1, OscMetric::geodesic);
  const double d = osc_s.diam_lower_bound;

  VerificationReport rep;
  rep.name = "boundary-control";
  rep.suite = "boundary-control";
  rep.map = f.label();
  rep.params = {{"map", f.descriptor()},
                {"center", to_json(ball.center)},
                {"radius", ball.outer},
                {"mode", to_string(mode)}};
  rep.lhs = osc_b.diam_lower_bound;
  rep.tolerance = o.tolerance;
  rep.details = {{"osc_ball", osc_b.diam_lower_bound}, {"osc_boundary", d}, {"samples", osc_b.evaluated}};

  if (mode == ControlMode::euclidean_2x) {
    rep.rhs = 2.0 * d;
    rep.hypotheses.push_back(finite_distortion_hypothesis(f, ball, o.seed));
    rep.decide();
    return rep;
  }

  rep.rhs = 6.0 * d;
  const ConstantsTable c = constants(n, f.target());
  rep.hypotheses.push_back(hypothesis("boundary_diameter", d, c.d_N / 10.0, d < c.d_N / 10.0));

  double thr = kInf;
  if (std::isfinite(c.d_N)) {
    const double outer = c.d_N / 2.0, inner = 3.0 * d;
    thr = inner < outer ? geodesic_ball_volume(f.target().dim, outer) - geodesic_ball_volume(f.target().dim, inner)
                        : 0.0;
  }
  const QuadratureEstimate jac = adaptive([&](int L) { return jacobian_integral(f, ball, L); }, o);
  const bool truncated = region_truncated(f, ball);
  rep.hypotheses.push_back(hypothesis("jacobian_integral", jac.value, thr, !truncated && jac.value < thr));
  rep.level = jac.resolution;
  rep.error_indicator = jac.error_indicator;
  rep.details["jacobian_integral"] = jac.value;
  rep.details["jacobian_integral_truncated"] = truncated;

  // D1: radius 2d about the image of a fixed boundary point, moved by one
  // Karcher-mean step.
  std::vector<Vec> images;
  for (const Point& x : boundary_samples(ball, o.count, o.seed + 1))
    if (f.in_domain(x) && f.distance_to_singular(x, true) > 0.0) images.push_back(f.value(x));
  if (!images.empty()) {
    const bool sphere = f.target().kind == TargetKind::unit_sphere;
    const Vec y0 = images.front();
    Vec mean = Vec::Zero(y0.size());
    for (const Vec& y : images) mean += sphere ? log_map(y0, y) : Vec(y - y0);
    mean /= static_cast<double>(images.size());
    const Vec center = sphere ? exp_map(y0, mean) : Vec(y0 + mean);
    double reach = 0.0;
    for (const Vec& y : images) reach = std::max(reach, target_distance(f.target(), center, y, OscMetric::geodesic));
    rep.details["d1_center"] = to_json(center);
    rep.details["d1_radius"] = 2.0 * d;
    rep.details["d1_boundary_reach"] = reach;
  }
  rep.decide();
  return rep;
}

VerificationReport jacobian_integral_match(const MapField& f, const MapField& g, const Region& ball,
                                           const CheckOptions& o, bool expected_fail) {
  double gap = 0.0;
  for (const Point& x : boundary_samples(ball, kAuditSamples, o.seed))
    gap = std::max(gap, (f.value(x) - g.value(x)).norm());
  if (gap > 1e-9) throw PreconditionError("jacobian_integral_match: maps differ on the boundary");

  const QuadratureEstimate jf = adaptive([&](int L) { return jacobian_integral(f, ball, L); }, o, 1.0);
  const QuadratureEstimate jg = adaptive([&](int L) { return jacobian_integral(g, ball, L); }, o, 1.0);

  VerificationReport rep;
  rep.name = "jacobian-match";
  rep.suite = "jacobian";
  rep.map = f.label() + " vs " + g.label();
  rep.params = {{"f", f.descriptor()}, {"g", g.descriptor()}, {"center", to_json(ball.center)}, {"radius", ball.outer}};
  rep.lhs = std::abs(jf.value - jg.value);
  rep.rhs = o.tolerance * std::max(1.0, std::abs(jf.value));
  rep.tolerance = 0.0;
  rep.expected_fail = expected_fail;
  rep.level = std::max(jf.resolution, jg.resolution);
  rep.error_indicator = jf.error_indicator + jg.error_indicator;
  rep.decide();
  rep.details = {{"int_J_f", jf.value}, {"int_J_g", jg.value}, {"boundary_gap", gap}, {"relative_tolerance", o.tolerance}};
  return rep;
}

}  // namespace finidist
