#include "finidist/errors.hpp"
#include "finidist/estimates.hpp"
#include "finidist/sampling.hpp"

#include <cmath>

namespace finidist {

std::string to_string(OscMetric m) { return m == OscMetric::ambient ? "ambient" : "geodesic"; }

double target_distance(const TargetSpec& t, const Vec& a, const Vec& b, OscMetric m) {
  if (t.kind == TargetKind::unit_sphere && m == OscMetric::geodesic) return geodesic_distance(a, b);
  return (a - b).norm();
}

double diameter(const TargetSpec& t, const std::vector<Vec>& images, OscMetric m) {
  if (images.size() < 2) return 0.0;
  const int dim = static_cast<int>(images.front().size());
  if (dim == 1) {
    double lo = images.front()[0], hi = lo;
    for (const Vec& y : images) {
      lo = std::min(lo, y[0]);
      hi = std::max(hi, y[0]);
    }
    return hi - lo;
  }
  // Flat copy for the quadratic scan.
  std::vector<double> flat;
  flat.reserve(images.size() * dim);
  for (const Vec& y : images) flat.insert(flat.end(), y.data(), y.data() + dim);
  double best = 0.0;
  const std::size_t count = images.size();
  for (std::size_t i = 0; i < count; ++i) {
    const double* a = &flat[i * dim];
    for (std::size_t j = i + 1; j < count; ++j) {
      const double* b = &flat[j * dim];
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      best = std::max(best, s);
    }
  }
  const double chord = std::sqrt(best);
  if (t.kind == TargetKind::unit_sphere && m == OscMetric::geodesic) return chord_to_geodesic(chord);
  return chord;
}

bool region_in_domain(const MapField& f, const Region& region) {
  const Region& d = f.domain();
  const double slack = 1e-12;
  if (region.is_spherical() != d.is_spherical()) return false;
  if (region.is_spherical()) return region.dim == d.dim;
  if (region.dim != d.dim) return false;
  const double off = (region.center - d.center).norm();
  double lo = 0.0, hi = region.outer;
  switch (region.kind) {
    case RegionKind::euclidean_sphere: lo = std::abs(off - region.outer); break;
    case RegionKind::euclidean_ball: lo = std::max(0.0, off - region.outer); break;
    case RegionKind::euclidean_annulus: lo = std::max(0.0, off - region.outer); break;
    default: return false;
  }
  hi = off + region.outer;
  if (d.kind == RegionKind::euclidean_ball) return hi <= d.outer * (1.0 + slack);
  if (d.kind == RegionKind::euclidean_annulus) {
    if (region.kind == RegionKind::euclidean_annulus && off <= slack) lo = region.inner;
    return lo >= d.inner * (1.0 - slack) && hi <= d.outer * (1.0 + slack);
  }
  return false;
}

namespace {

OscillationSample oscillation_of(const MapField& f, const Region& region, const std::vector<Point>& pts,
                                 std::size_t count, OscMetric metric) {
  std::vector<Vec> images;
  images.reserve(pts.size());
  for (const Point& x : pts) {
    if (!f.in_domain(x, 1e-12) || f.distance_to_singular(x, true) == 0.0) continue;
    Vec y = f.value(x);
    if (!y.allFinite()) continue;
    images.push_back(std::move(y));
  }
  OscillationSample s;
  s.region = region;
  s.sample_count = count;
  s.evaluated = images.size();
  s.metric = metric;
  s.diam_lower_bound = diameter(f.target(), images, metric);
  return s;
}

}  // namespace

OscillationSample oscillation(const MapField& f, const Region& region, std::size_t count, std::uint64_t seed,
                              OscMetric metric) {
  if (count < 2) throw DomainError("oscillation: need at least two samples");
  if (!region_in_domain(f, region)) throw DomainError(f.label() + ": oscillation region outside the domain");
  return oscillation_of(f, region, sample_region(region, count, seed), count, metric);
}

std::vector<Point> boundary_samples(const Region& ball, std::size_t count, std::uint64_t seed) {
  if (ball.kind == RegionKind::euclidean_ball) return sample_region(Region::sphere(ball.center, ball.outer), count, seed);
  if (ball.kind != RegionKind::geodesic_ball) throw DomainError("boundary_samples: needs a Euclidean or geodesic ball");
  const int n = ball.dim;
  const double rho = ball.outer;
  const HaltonSequence h(uniforms_per_direction(n), seed);
  const bool north = ball.center[n] == 1.0, south = ball.center[n] == -1.0;
  const Mat frame = tangent_frame(ball.center);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec u = h.point(i);
    const Vec w = direction_from_uniforms(u.data(), n);
    if (north) out.emplace_back(SpherePoint::from_slice(rho, w));
    else if (south) out.emplace_back(SpherePoint::from_slice(kPi - rho, w));
    else out.emplace_back(SpherePoint::from_ambient(exp_map(ball.center, rho * (frame * w))));
  }
  return out;
}

OscillationSample boundary_oscillation(const MapField& f, const Region& ball, std::size_t count, std::uint64_t seed,
                                       OscMetric metric) {
  if (count < 2) throw DomainError("oscillation: need at least two samples");
  if (!region_in_domain(f, ball)) throw DomainError(f.label() + ": oscillation region outside the domain");
  Region boundary = ball;
  if (ball.kind == RegionKind::euclidean_ball) boundary = Region::sphere(ball.center, ball.outer);
  return oscillation_of(f, boundary, boundary_samples(ball, count, seed), count, metric);
}

}  // namespace finidist
