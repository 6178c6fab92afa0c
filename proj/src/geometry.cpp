#include "finidist/geometry.hpp"

#include "finidist/errors.hpp"
#include "finidist/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace finidist {

namespace {

constexpr double kUnitTol = 1e-10;

void require_unit(const Vec& p, const char* where) {
  if (p.size() < 2) throw InvalidPointError(std::string(where) + ": sphere points need at least 2 coordinates");
  const double nrm = p.norm();
  if (!std::isfinite(nrm) || std::abs(nrm - 1.0) > kUnitTol)
    throw InvalidPointError(std::string(where) + ": |p| = " + std::to_string(nrm) + " is not 1");
}

void require_dim(int n, const char* where) {
  if (n < 1 || n > 8) throw DomainError(std::string(where) + ": dimension " + std::to_string(n) + " outside [1, 8]");
}

}  // namespace

// ---- coordinates ------------------------------------------------------------

SliceCoords to_slice_coords(const Vec& p) {
  require_unit(p, "to_slice_coords");
  const int n = static_cast<int>(p.size()) - 1;
  SliceCoords c;
  const double rho = p.head(n).norm();
  c.theta = std::atan2(rho, p[n]);
  if (rho > 0.0) {
    c.z = p.head(n) / rho;
    c.z_defined = true;
  } else {
    c.theta = p[n] > 0 ? 0.0 : kPi;
    c.z = Vec::Zero(n);
  }
  return c;
}

Vec from_slice_coords(double theta, const Vec& z) {
  const int n = static_cast<int>(z.size());
  Vec p(n + 1);
  p.head(n) = std::sin(theta) * z;
  p[n] = std::cos(theta);
  return p;
}

SpherePoint SpherePoint::from_slice(double theta, const Vec& z) {
  if (!(theta >= 0.0 && theta <= kPi)) throw InvalidPointError("from_slice: colatitude outside [0, pi]");
  if (z.size() < 1) throw InvalidPointError("from_slice: empty longitude vector");
  const double zn = z.norm();
  if (std::abs(zn - 1.0) > kUnitTol) throw InvalidPointError("from_slice: longitude vector is not a unit vector");
  SpherePoint p;
  p.theta = theta;
  p.z_defined = theta > 0.0 && theta < kPi;
  p.z = p.z_defined ? Vec(z / zn) : Vec(Vec::Zero(z.size()));
  p.ambient = from_slice_coords(theta, z / zn);
  if (!p.z_defined) {
    p.ambient.head(z.size()).setZero();
    p.ambient[z.size()] = theta == 0.0 ? 1.0 : -1.0;
  }
  return p;
}

SpherePoint SpherePoint::pole(int n, bool north) {
  SpherePoint p;
  p.ambient = Vec::Zero(n + 1);
  p.ambient[n] = north ? 1.0 : -1.0;
  p.theta = north ? 0.0 : kPi;
  p.z = Vec::Zero(n);
  p.z_defined = false;
  return p;
}

SpherePoint SpherePoint::from_ambient(const Vec& a) {
  const SliceCoords c = to_slice_coords(a);
  SpherePoint p;
  p.ambient = a;
  p.theta = c.theta;
  p.z = c.z;
  p.z_defined = c.z_defined;
  return p;
}

// ---- distances --------------------------------------------------------------

double geodesic_distance(const Vec& a, const Vec& b) {
  require_unit(a, "geodesic_distance");
  require_unit(b, "geodesic_distance");
  if (a.size() != b.size()) throw InvalidPointError("geodesic_distance: dimension mismatch");
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

double geodesic_distance(const SpherePoint& a, const SpherePoint& b) {
  if (a.ambient.size() != b.ambient.size()) throw InvalidPointError("geodesic_distance: dimension mismatch");
  // Chord length from the chart, so that points a few 1e-12 from a pole keep
  // their relative accuracy.
  const double dh = -2.0 * std::sin(0.5 * (a.theta + b.theta)) * std::sin(0.5 * (a.theta - b.theta));
  const double chord2 = (std::sin(a.theta) * a.z - std::sin(b.theta) * b.z).squaredNorm() + dh * dh;
  const double chord = std::sqrt(chord2);
  return 2.0 * std::atan2(chord, std::sqrt(std::max(0.0, 4.0 - chord2)));
}

Vec project_tangent(const Vec& p, const Vec& v) { return v - p.dot(v) * p; }

Vec exp_map(const Vec& p, const Vec& v) {
  const double t = v.norm();
  if (t == 0.0) return p;
  Vec q = std::cos(t) * p + (std::sin(t) / t) * v;
  return q / q.norm();
}

Vec log_map(const Vec& p, const Vec& q) {
  const Vec w = project_tangent(p, q);
  const double wn = w.norm();
  const double d = 2.0 * std::atan2((p - q).norm(), (p + q).norm());
  if (wn == 0.0) {
    if (p.dot(q) < 0.0) throw GeometryError("log_map: antipodal points");
    return Vec::Zero(p.size());
  }
  return (d / wn) * w;
}

// ---- frames -----------------------------------------------------------------

Mat tangent_frame(const Vec& p) {
  const int dim = static_cast<int>(p.size());
  const int m = dim - 1;
  Mat frame(dim, m);
  int chosen = 0;

  auto residual = [&](int axis) {
    Vec v = -p[axis] * p;
    v[axis] += 1.0;
    for (int j = 0; j < chosen; ++j) v -= frame(axis, j) * frame.col(j);
    return v;
  };

  for (int axis = 0; axis < dim && chosen < m - 1; ++axis) {
    const Vec v = residual(axis);
    const double nv = v.norm();
    if (nv > 0.25) frame.col(chosen++) = v / nv;
  }
  // Fallback ordering: largest residual first. Also completes the last column.
  while (chosen < m) {
    int best = 0;
    double best_norm = -1.0;
    Vec best_v;
    for (int axis = 0; axis < dim; ++axis) {
      const Vec v = residual(axis);
      const double nv = v.norm();
      if (nv > best_norm) {
        best_norm = nv;
        best = axis;
        best_v = v;
      }
    }
    (void)best;
    // One more orthogonalisation pass for rounding.
    for (int j = 0; j < chosen; ++j) best_v -= frame.col(j).dot(best_v) * frame.col(j);
    best_v -= p.dot(best_v) * p;
    frame.col(chosen++) = best_v / best_v.norm();
  }

  Mat full(dim, dim);
  full.leftCols(m) = frame;
  full.col(m) = p;
  if (full.determinant() < 0.0) frame.col(m - 1) *= -1.0;
  return frame;
}

// ---- measures ---------------------------------------------------------------

double omega(int n) {
  if (n < 0 || n > 8) throw DomainError("omega: dimension " + std::to_string(n) + " outside [0, 8]");
  double w = n % 2 == 0 ? 1.0 : 2.0;
  for (int k = n % 2 == 0 ? 2 : 3; k <= n; k += 2) w *= 2.0 * kPi / k;
  return w;
}

double sphere_area(int n, double r) {
  require_dim(n, "sphere_area");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("sphere_area: radius must be positive");
  return n * omega(n) * std::pow(r, n - 1);
}

double integrate_sin_power(int m, double a, double b) {
  if (m < 0) throw DomainError("integrate_sin_power: negative exponent");
  if (!(a >= 0.0 && a <= b && b <= kPi)) throw DomainError("integrate_sin_power: need 0 <= a <= b <= pi");
  if (m == 0) return b - a;
  if (m == 1) return 2.0 * std::sin(0.5 * (a + b)) * std::sin(0.5 * (b - a));
  // The reduction formula cancels catastrophically on thin intervals near
  // the poles; a 32-point Gauss rule on each half of the interval is exact
  // to rounding for these trigonometric polynomials.
  const GaussRule& g = gauss_legendre(32);
  double total = 0.0;
  const double mid = 0.5 * (a + b);
  for (const auto& [lo, hi] : {std::pair{a, mid}, std::pair{mid, b}}) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(std::sin(c + h * g.nodes[i]), m);
    total += h * s;
  }
  return total;
}

double geodesic_ball_volume(int n, double rho) {
  require_dim(n, "geodesic_ball_volume");
  if (!(rho >= 0.0 && rho <= kPi)) throw DomainError("geodesic_ball_volume: radius outside [0, pi]");
  return n * omega(n) * integrate_sin_power(n - 1, 0.0, rho);
}

double slice_volume_exact(int n, double alpha, double beta) {
  require_dim(n, "slice_volume_exact");
  if (!(alpha >= 0.0 && alpha < beta && beta <= kPi)) throw DomainError("slice_volume_exact: need 0 <= alpha < beta <= pi");
  return n * omega(n) * integrate_sin_power(n - 1, alpha, beta);
}

double slice_volume_bound(int n, double alpha, double beta) {
  require_dim(n, "slice_volume_bound");
  if (!(alpha >= 0.0 && alpha < beta && beta <= kPi)) throw DomainError("slice_volume_bound: need 0 <= alpha < beta <= pi");
  return omega(n) * (std::pow(beta, n) - std::pow(alpha, n));
}

// ---- regions ----------------------------------------------------------------

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::euclidean_ball: return "euclidean-ball";
    case RegionKind::euclidean_sphere: return "euclidean-sphere";
    case RegionKind::euclidean_annulus: return "euclidean-annulus";
    case RegionKind::geodesic_ball: return "geodesic-ball";
    case RegionKind::latitude_slice: return "latitude-slice";
  }
  return "unknown";
}

namespace {

Region euclidean_region(RegionKind kind, const Vec& c, double r_in, double r_out) {
  if (c.size() < 1 || c.size() > 8) throw DomainError("region: Euclidean dimension outside [1, 8]");
  if (!(r_out > 0.0) || !std::isfinite(r_out)) throw DomainError("region: radius must be positive");
  Region g;
  g.kind = kind;
  g.dim = static_cast<int>(c.size());
  g.center = c;
  g.inner = r_in;
  g.outer = r_out;
  return g;
}

}  // namespace

Region Region::ball(const Vec& c, double radius) { return euclidean_region(RegionKind::euclidean_ball, c, 0.0, radius); }

Region Region::sphere(const Vec& c, double radius) {
  return euclidean_region(RegionKind::euclidean_sphere, c, radius, radius);
}

Region Region::annulus(const Vec& c, double r_in, double r_out) {
  if (!(r_in > 0.0 && r_in < r_out)) throw DomainError("annulus: need 0 < inner < outer");
  return euclidean_region(RegionKind::euclidean_annulus, c, r_in, r_out);
}

Region Region::geodesic_ball(const Vec& p, double radius) {
  require_unit(p, "geodesic_ball");
  if (!(radius > 0.0 && radius <= kPi)) throw DomainError("geodesic_ball: radius outside (0, pi]");
  Region g;
  g.kind = RegionKind::geodesic_ball;
  g.dim = static_cast<int>(p.size()) - 1;
  g.center = p;
  g.outer = radius;
  return g;
}

Region Region::slice(int n, double alpha, double beta) {
  require_dim(n, "slice");
  if (!(alpha >= 0.0 && alpha < beta && beta <= kPi)) throw DomainError("slice: need 0 <= alpha < beta <= pi");
  Region g;
  g.kind = RegionKind::latitude_slice;
  g.dim = n;
  g.center = Vec::Zero(n + 1);
  g.center[n] = 1.0;
  g.inner = alpha;
  g.outer = beta;
  return g;
}

bool Region::contains(const Vec& x, double slack) const {
  switch (kind) {
    case RegionKind::euclidean_ball: return x.size() == dim && (x - center).norm() <= outer + slack;
    case RegionKind::euclidean_sphere:
      return x.size() == dim && std::abs((x - center).norm() - outer) <= slack;
    case RegionKind::euclidean_annulus: {
      if (x.size() != dim) return false;
      const double r = (x - center).norm();
      return r >= inner - slack && r <= outer + slack;
    }
    case RegionKind::geodesic_ball:
    case RegionKind::latitude_slice:
      if (x.size() != dim + 1 || std::abs(x.norm() - 1.0) > kUnitTol) return false;
      return contains(SpherePoint::from_ambient(x), slack);
  }
  return false;
}

bool Region::contains(const SpherePoint& p, double slack) const {
  if (p.dim() != dim) return false;
  if (kind == RegionKind::latitude_slice) return p.theta >= inner - slack && p.theta <= outer + slack;
  if (kind == RegionKind::geodesic_ball) {
    // Centre at a pole: compare colatitudes directly.
    if (center[dim] == 1.0) return p.theta <= outer + slack;
    if (center[dim] == -1.0) return kPi - p.theta <= outer + slack;
    return geodesic_distance(center, p.ambient) <= outer + slack;
  }
  return contains(p.ambient, slack);
}

// ---- targets ----------------------------------------------------------------

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::euclidean_space: return "euclidean-space";
    case TargetKind::unit_sphere: return "unit-sphere";
    case TargetKind::graph_manifold: return "graph-manifold";
  }
  return "unknown";
}

TargetSpec TargetSpec::euclidean(int dim) {
  if (dim < 1) throw DomainError("euclidean target: dimension must be positive");
  TargetSpec t;
  t.kind = TargetKind::euclidean_space;
  t.dim = dim;
  return t;
}

TargetSpec TargetSpec::unit_sphere(int n) {
  require_dim(n, "unit_sphere target");
  TargetSpec t;
  t.kind = TargetKind::unit_sphere;
  t.dim = n;
  t.injectivity_radius = kPi;
  return t;
}

TargetSpec TargetSpec::graph_manifold(int n, GraphProfile profile) {
  require_dim(n, "graph target");
  if (!profile.value || !profile.gradient) throw ParameterError("graph target: profile needs value and gradient");
  TargetSpec t;
  t.kind = TargetKind::graph_manifold;
  t.dim = n;
  // Not computed; the graph targets used here are non-compact and only enter
  // through their failing compactness hypothesis.
  t.injectivity_radius = std::numeric_limits<double>::infinity();
  t.graph = std::make_shared<const GraphProfile>(std::move(profile));
  return t;
}

}  // namespace finidist
