#include "finidist/retraction.hpp"

#include "finidist/calculus.hpp"
#include "finidist/errors.hpp"
#include "finidist/map_zoo.hpp"
#include "finidist/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace finidist {

namespace {

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

void check_spec(const RetractionSpec& s) {
  if (s.p.size() < 3 || s.p.size() != s.q.size()) throw ParameterError("retraction: p and q must lie on the same S^n, n >= 2");
  if (std::abs(s.p.norm() - 1.0) > 1e-10 || std::abs(s.q.norm() - 1.0) > 1e-10)
    throw InvalidPointError("retraction: p and q must be unit vectors");
  if (!(s.d > 0.0) || !(s.r_prime > 0.0)) throw ParameterError("retraction: d and r' must be positive");
  if (2.0 * s.d >= kPi / 5.0) throw GeometryError("retraction: 2d must be below d_N/5");
  if (geodesic_distance(s.p, s.q) <= 2.0 * s.d + s.r_prime)
    throw GeometryError("retraction: the caps D1 and D' overlap");
}

class SphereRetractionImpl final : public MapImpl {
 public:
  explicit SphereRetractionImpl(const RetractionSpec& s)
      : q_(s.q), basis_(tangent_frame(s.q)), ball_(retraction_image_ball(s)) {}

  Vec value(const Point& x) const override {
    const Vec& a = std::get<SpherePoint>(x).ambient;
    const Vec u = stereographic(q_, basis_, a);
    const Vec w = u - ball_.center;
    const double r = w.norm();
    if (r <= ball_.radius) return a;
    return inverse_stereographic(q_, basis_, ball_.center + (ball_.radius / r) * w);
  }

  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const Vec& a = std::get<SpherePoint>(x).ambient;
    const int m = static_cast<int>(a.size());
    const Vec u = stereographic(q_, basis_, a);
    const Vec w = u - ball_.center;
    const double r = w.norm();
    if (r <= ball_.radius) return Mat(Mat::Identity(m, m));

    const double den = 1.0 - q_.dot(a);
    const Mat ds = basis_.transpose() / den + (basis_.transpose() * a) * q_.transpose() / (den * den);

    const int k = static_cast<int>(u.size());
    const Vec hat = w / r;
    const Mat dp = (ball_.radius / r) * (Mat::Identity(k, k) - hat * hat.transpose());

    const Vec v = ball_.center + ball_.radius * hat;
    const double s = v.squaredNorm() + 1.0;
    const Mat dinv = 2.0 * basis_ / s - (4.0 / (s * s)) * (basis_ * v - q_) * v.transpose();
    return Mat(dinv * dp * ds);
  }

  bool analytic() const override { return true; }

 private:
  Vec q_;
  Mat basis_;
  ImageBall ball_;
};

Vec random_tangent(const Vec& x, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(x.size());
  for (int i = 0; i < v.size(); ++i) v[i] = g(rng);
  v -= v.dot(x) * x;
  return v / v.norm();
}

// Lipschitz quotient over short random pairs (x, exp_x(delta t)), delta in
// (0, 0.1]. The pair sequence for `count` is a prefix of the one for 2*count.
double lipschitz_estimate(const MapField& r, const std::vector<Point>& base, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double best = 0.0;
  for (std::size_t i = 0; i < count && i < base.size(); ++i) {
    const Vec& x = std::get<SpherePoint>(base[i]).ambient;
    const Vec t = random_tangent(x, rng);
    const double delta = 0.1 * (1.0 - unif(rng));
    const Vec y = exp_map(x, delta * t);
    if (!r.in_domain(Point(x)) || !r.in_domain(Point(y))) continue;
    const double dxy = geodesic_distance(x, y);
    if (dxy <= 0.0) continue;
    best = std::max(best, geodesic_distance(r.value(Point(x)), r.value(Point(y))) / dxy);
  }
  return best;
}

}  // namespace

Vec stereographic(const Vec& q, const Mat& basis, const Vec& x) { return basis.transpose() * x / (1.0 - q.dot(x)); }

Vec inverse_stereographic(const Vec& q, const Mat& basis, const Vec& u) {
  const double s = u.squaredNorm();
  return (2.0 * (basis * u) + (s - 1.0) * q) / (s + 1.0);
}

ImageBall retraction_image_ball(const RetractionSpec& spec) {
  const Mat basis = tangent_frame(spec.q);
  // Any great circle through antipodal p and q will do.
  Vec v = tangent_frame(spec.p).col(0);
  if (geodesic_distance(spec.p, spec.q) < kPi - 1e-9) {
    const Vec toward_q = log_map(spec.p, spec.q);
    v = toward_q / toward_q.norm();
  }
  const Vec a = stereographic(spec.q, basis, exp_map(spec.p, 2.0 * spec.d * v));
  const Vec b = stereographic(spec.q, basis, exp_map(spec.p, -2.0 * spec.d * v));
  return {0.5 * (a + b), 0.5 * (a - b).norm()};
}

MapField build_retraction(const RetractionSpec& spec) {
  check_spec(spec);
  const int n = static_cast<int>(spec.p.size()) - 1;
  Json params{{"p", to_json(spec.p)}, {"d", spec.d}, {"q", to_json(spec.q)}, {"r_prime", spec.r_prime}};
  MapField m("sphere_retraction", params, Region::whole_sphere(n), TargetSpec::unit_sphere(n),
             {latitude_locus(spec.p, 2.0 * spec.d)}, std::make_shared<SphereRetractionImpl>(spec));
  return m.with_excluded_cap(spec.q, spec.r_prime);
}

RetractionCheck check_retraction(const MapField& r, const RetractionSpec& spec, std::size_t samples,
                                 std::uint64_t seed) {
  if (samples < 1) throw DomainError("check_retraction: need at least one sample");
  RetractionCheck c;
  c.samples = samples;
  const double rad = 2.0 * spec.d;

  for (const Point& x : sample_region(Region::geodesic_ball(spec.p, rad), samples, seed)) {
    const Vec& a = std::get<SpherePoint>(x).ambient;
    c.identity_deviation = std::max(c.identity_deviation, (r.value(x) - a).norm());
  }

  // Domain samples: the whole sphere minus D', plus points on the boundary of D'.
  std::vector<Point> dom;
  for (const Point& x : sample_region(Region::whole_sphere(r.domain_dim()), 4 * samples, seed + 1)) {
    if (dom.size() == 2 * samples) break;
    if (r.in_domain(x)) dom.push_back(x);
  }
  std::mt19937_64 rng(seed + 2);
  std::vector<Vec> rim;
  for (std::size_t i = 0; i < std::max<std::size_t>(samples / 10, 1); ++i)
    rim.push_back(exp_map(spec.q, spec.r_prime * random_tangent(spec.q, rng)));

  auto image_checks = [&](const Vec& x) {
    const Vec y = r.value(Point(x));
    c.containment_excess = std::max(c.containment_excess, geodesic_distance(y, spec.p) - rad);
    c.idempotence_deviation = std::max(c.idempotence_deviation, (r.value(Point(y)) - y).norm());
  };
  for (std::size_t i = 0; i < std::min(samples, dom.size()); ++i) image_checks(std::get<SpherePoint>(dom[i]).ambient);
  for (const Vec& x : rim) image_checks(x);

  for (std::size_t i = 0; i < std::min(samples, dom.size()); ++i) {
    const Vec& x = std::get<SpherePoint>(dom[i]).ambient;
    if (geodesic_distance(x, spec.p) <= rad + 1e-6) continue;
    const Differential d = differential(r, Point(x));
    c.boundary_jacobian = std::max(c.boundary_jacobian, std::abs(jacobian_det(d)));
  }

  c.lipschitz = lipschitz_estimate(r, dom, samples, seed + 3);
  c.lipschitz_doubled = lipschitz_estimate(r, dom, 2 * samples, seed + 3);
  return c;
}

VerificationReport verify_retraction(const MapField& r, const RetractionSpec& spec, std::size_t samples,
                                     std::uint64_t seed) {
  const RetractionCheck c = check_retraction(r, spec, samples, seed);
  VerificationReport rep;
  rep.name = "retraction";
  rep.suite = "retraction";
  rep.map = r.label();
  rep.params = r.params();
  rep.lhs = std::abs(c.lipschitz_doubled - c.lipschitz) / c.lipschitz;
  rep.rhs = 0.1;
  rep.tolerance = 0.0;
  rep.decide();

  struct Check {
    const char* name;
    double value, bound;
  };
  const Check checks[] = {{"identity_on_D1", c.identity_deviation, 1e-9},
                          {"containment", c.containment_excess, 1e-9},
                          {"idempotence", c.idempotence_deviation, 1e-9},
                          {"boundary_jacobian", c.boundary_jacobian, 1e-6}};
  nlohmann::json list = nlohmann::json::array();
  for (const Check& k : checks) {
    const bool ok = k.value <= k.bound;
    list.push_back({{"name", k.name}, {"value", k.value}, {"threshold", k.bound}, {"ok", ok}});
    if (!ok) rep.verdict = Verdict::fail;
  }
  rep.details = {{"checks", list},
                 {"lipschitz", c.lipschitz},
                 {"lipschitz_doubled", c.lipschitz_doubled},
                 {"samples", c.samples},
                 {"image_ball", {{"center", to_json(retraction_image_ball(spec).center)},
                                 {"radius", retraction_image_ball(spec).radius}}}};
  return rep;
}

}  // namespace finidist
