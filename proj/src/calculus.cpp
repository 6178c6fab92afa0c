#include "finidist/calculus.hpp"

#include "finidist/errors.hpp"
#include "finidist/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace finidist {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec ambient_of(const Point& p) {
  if (const auto* s = std::get_if<SpherePoint>(&p)) return s->ambient;
  return std::get<Vec>(p);
}

Point step_point(const MapField& f, const Point& x, const Vec& dir, double h) {
  if (f.sphere_domain()) return SpherePoint::from_ambient(exp_map(std::get<SpherePoint>(x).ambient, h * dir));
  return Vec(std::get<Vec>(x) + h * dir);
}

// Largest eigenvalue of a symmetric positive semidefinite 3x3 matrix.
double max_eig3(const Mat& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  if (p1 <= 1e-300) return std::max({a(0, 0), a(1, 1), a(2, 2)});
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Mat b = (a - q * Mat::Identity(3, 3)) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi);
}

}  // namespace

Mat domain_frame(const MapField& f, const Point& x) {
  if (f.sphere_domain()) return tangent_frame(ambient_of(f.normalize(x)));
  return Mat::Identity(f.domain_dim(), f.domain_dim());
}

Mat target_frame(const TargetSpec& t, const Vec& y) {
  switch (t.kind) {
    case TargetKind::euclidean_space: return Mat::Identity(t.dim, t.dim);
    case TargetKind::unit_sphere: return tangent_frame(y);
    case TargetKind::graph_manifold: {
      const int n = t.dim;
      const Vec g = t.graph->gradient(y.head(n));
      Mat fr(n + 1, n);
      for (int i = 0; i < n; ++i) {
        Vec v = Vec::Zero(n + 1);
        v[i] = 1.0;
        v[n] = g[i];
        for (int j = 0; j < i; ++j) v -= fr.col(j).dot(v) * fr.col(j);
        fr.col(i) = v / v.norm();
      }
      if (frame_orientation(fr, target_normal(t, y)) < 0) fr.col(n - 1) *= -1.0;
      return fr;
    }
  }
  throw DomainError("target_frame: unknown target kind");
}

Vec target_normal(const TargetSpec& t, const Vec& y) {
  switch (t.kind) {
    case TargetKind::euclidean_space: return Vec();
    case TargetKind::unit_sphere: return y;
    case TargetKind::graph_manifold: {
      const int n = t.dim;
      Vec nu(n + 1);
      nu.head(n) = -t.graph->gradient(y.head(n));
      nu[n] = 1.0;
      return nu / nu.norm();
    }
  }
  return Vec();
}

double frame_orientation(const Mat& frame, const Vec& normal) {
  if (normal.size() == 0) return frame.determinant() >= 0 ? 1.0 : -1.0;
  Mat full(frame.rows(), frame.cols() + 1);
  full << frame, normal;
  return full.determinant() >= 0 ? 1.0 : -1.0;
}

bool frames_valid(const Differential& d, double tol) {
  auto ok = [tol](const Mat& fr, const Vec& nrm) {
    const Mat g = fr.transpose() * fr;
    if ((g - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > tol) return false;
    return frame_orientation(fr, nrm) > 0;
  };
  return ok(d.domain_frame, d.domain_normal) && ok(d.target_frame, d.target_normal);
}

Differential differential(const MapField& f, const Point& x0, DiffMode mode) {
  if (!(mode.h > 0.0)) throw DomainError("differential: step must be positive");
  const Point x = f.normalize(x0);
  const double dist = f.distance_to_singular(x);
  if (dist == 0.0) throw SingularPointError(f.label() + ": differential requested on the singular set");

  Differential d;
  d.domain_frame = domain_frame(f, x);
  if (f.sphere_domain()) d.domain_normal = std::get<SpherePoint>(x).ambient;
  const Vec y = f.value(x);
  d.target_frame = target_frame(f.target(), y);
  d.target_normal = target_normal(f.target(), y);

  if (mode.analytic_if_available && f.has_analytic_differential()) {
    if (auto j = f.ambient_jacobian(x)) {
      d.matrix = d.target_frame.transpose() * (*j) * d.domain_frame;
      d.source = DiffSource::analytic;
      return d;
    }
  }

  const double h = std::min(mode.h, 1e-2 * dist);
  d.source = DiffSource::finite_difference;
  d.step = h;
  const int n = static_cast<int>(d.domain_frame.cols());
  d.matrix.resize(d.target_frame.cols(), n);
  for (int i = 0; i < n; ++i) {
    const Vec dir = d.domain_frame.col(i);
    const Vec yp = f.value(step_point(f, x, dir, h));
    const Vec ym = f.value(step_point(f, x, dir, -h));
    Vec diff;
    if (f.target().kind == TargetKind::unit_sphere) diff = log_map(y, yp) - log_map(y, ym);
    else diff = yp - ym;
    d.matrix.col(i) = d.target_frame.transpose() * diff / (2.0 * h);
  }
  return d;
}

double operator_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  const Mat g = m.rows() < m.cols() ? Mat(m * m.transpose()) : Mat(m.transpose() * m);
  double lam = 0.0;
  switch (g.rows()) {
    case 1: lam = g(0, 0); break;
    case 2: {
      const double tr = 0.5 * (g(0, 0) + g(1, 1));
      const double dd = 0.5 * (g(0, 0) - g(1, 1));
      lam = tr + std::hypot(dd, g(0, 1));
      break;
    }
    case 3: lam = max_eig3(g); break;
    default: {
      Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
      lam = es.eigenvalues().maxCoeff();
    }
  }
  return std::sqrt(std::max(0.0, lam));
}

double jacobian_det(const Differential& d) {
  if (d.matrix.rows() != d.matrix.cols()) throw ShapeError("jacobian_det: differential is not square");
  return d.matrix.determinant();
}

std::optional<double> distortion_from(double op, double jac, int n, double tau_j, double tau_d) {
  if (op < tau_d) return 1.0;
  if (jac > tau_j) return std::pow(op, n) / jac;
  return std::nullopt;
}

PointwiseData pointwise(const MapField& f, const Point& x, DiffMode mode, double tau_j, double tau_d) {
  const Differential d = differential(f, x, mode);
  PointwiseData pd;
  pd.op_norm = operator_norm(d);
  if (d.matrix.rows() == d.matrix.cols()) {
    pd.jac = pd.op_norm == 0.0 ? 0.0 : jacobian_det(d);
    pd.distortion = distortion_from(pd.op_norm, pd.jac, static_cast<int>(d.matrix.cols()), tau_j, tau_d);
  } else {
    pd.jac = kNaN;
  }
  return pd;
}

std::optional<double> distortion(const MapField& f, const Point& x, DiffMode mode) {
  if (!f.equidimensional()) return std::nullopt;
  return pointwise(f, x, mode).distortion;
}

std::optional<Region> resolved_region(const MapField& f, const Region& region) {
  const auto cap = f.unresolved_cap();
  if (!cap || !region.is_spherical()) return region;
  const int n = region.dim;
  double lo = 0.0, hi = 0.0;
  if (region.kind == RegionKind::latitude_slice) {
    lo = region.inner;
    hi = region.outer;
  } else if (region.center[n] == 1.0) {
    hi = region.outer;
  } else {
    const double d = geodesic_distance(region.center, Vec(Vec::Unit(n + 1, n)));
    if (d - region.outer >= *cap) return region;
    throw DomainError("resolved_region: off-centre region meets the unresolved cap");
  }
  lo = std::max(lo, *cap);
  if (lo >= hi) return std::nullopt;
  return Region::slice(n, lo, hi);
}

bool region_truncated(const MapField& f, const Region& region) {
  const auto r = resolved_region(f, region);
  if (!r) return true;
  return r->kind != region.kind || r->inner != region.inner || r->outer != region.outer;
}

namespace {

// A blow-up point strictly inside a Euclidean ball but off its centre; such
// balls are integrated in polar coordinates about the point.
std::optional<Vec> interior_pole(const MapField& f, const Region& region) {
  if (region.kind != RegionKind::euclidean_ball) return std::nullopt;
  for (const SingularLocus& l : f.singular_set()) {
    if (l.kind != SingularLocus::Kind::point || !l.blowup || l.center.size() != region.center.size()) continue;
    const double d = (l.center - region.center).norm();
    if (d > 1e-12 && d < region.outer * (1.0 - 1e-9)) return l.center;
  }
  return std::nullopt;
}

QuadratureEstimate integrate_resolved(const MapField& f, const Region& r, int level, const PointIntegrand& g,
                                      QuadratureOptions opts) {
  if (const auto pole = interior_pole(f, r)) {
    QuadratureOptions about = f.quadrature_options(Region::ball(*pole, r.outer));
    return integrate_ball_about([&](const Vec& x) { return g(Point(x)); }, r.center, r.outer, *pole, level, about);
  }
  return integrate_region(r, g, level, opts);
}

}  // namespace

QuadratureEstimate integrate_over(const MapField& f, const Region& region, int level,
                                  const std::function<double(const PointwiseData&)>& fn, DiffMode mode) {
  const auto r = resolved_region(f, region);
  if (!r) return QuadratureEstimate{0.0, 0.0, 0, level};
  return integrate_resolved(f, *r, level, [&](const Point& x) { return fn(pointwise(f, x, mode)); },
                            f.quadrature_options(*r));
}

QuadratureEstimate energy(const MapField& f, const Region& region, double p, int level, DiffMode mode) {
  const auto r = resolved_region(f, region);
  if (!r) return QuadratureEstimate{0.0, 0.0, 0, level};
  QuadratureOptions opts = f.quadrature_options(*r);
  if (f.energy_tail(*r, p, 1e-14)) opts.inner_tail = [&f, rr = *r, p](double delta) { return *f.energy_tail(rr, p, delta); };
  return integrate_resolved(f, *r, level,
                            [&](const Point& x) { return std::pow(operator_norm(differential(f, x, mode)), p); }, opts);
}

QuadratureEstimate jacobian_integral(const MapField& f, const Region& region, int level, DiffMode mode) {
  if (!f.equidimensional()) throw ShapeError("jacobian_integral: map is not equidimensional");
  return integrate_over(f, region, level, [](const PointwiseData& d) { return d.jac; }, mode);
}

AuditStats finite_distortion_audit(const MapField& f, const Region& region, std::size_t samples, std::uint64_t seed,
                                   double tau_j, double tau_d, DiffMode mode) {
  if (samples < 1) throw DomainError("finite_distortion_audit: need at least one sample");
  if (!f.equidimensional()) throw ShapeError("finite_distortion_audit: map is not equidimensional");
  AuditStats st;
  st.min_jac = std::numeric_limits<double>::infinity();
  st.max_hadamard_excess = -std::numeric_limits<double>::infinity();
  const int n = f.domain_dim();
  for (const Point& x : sample_region(region, samples, seed)) {
    if (f.distance_to_singular(x) == 0.0) continue;
    const PointwiseData d = pointwise(f, x, mode, tau_j, tau_d);
    ++st.samples;
    st.min_jac = std::min(st.min_jac, d.jac);
    st.max_hadamard_excess = std::max(st.max_hadamard_excess, d.jac - std::pow(d.op_norm, n));
    if (d.jac > tau_j) ++st.positive;
    else if (d.op_norm < tau_d) ++st.degenerate;
    else ++st.violations;
  }
  return st;
}

}  // namespace finidist
