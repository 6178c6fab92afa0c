#pragma once

// Coordinates, distances, frames and measures on Euclidean balls and on the
// unit spheres S^n sitting in R^{n+1}.
//
// Sphere points use the latitude chart p = (z sin(theta), cos(theta)) with
// theta the colatitude measured from the north pole e_{n+1} and z a unit
// vector of R^n. The chart is authoritative whenever a point is built from
// it: colatitudes near 1e-11 cannot be recovered from cos(theta) in double
// precision, so slice integrals and the counterexample maps never round-trip
// through ambient coordinates.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>

namespace finidist {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

struct SliceCoords {
  double theta = 0.0;
  Vec z;                   // unit vector of R^n; zero vector at the poles
  bool z_defined = false;  // false iff theta is 0 or pi
};

/// A point of S^n carrying both ambient and latitude-chart coordinates.
struct SpherePoint {
  Vec ambient;
  double theta = 0.0;
  Vec z;
  bool z_defined = false;

  int dim() const { return static_cast<int>(ambient.size()) - 1; }

  /// Chart-authoritative construction. `z` must be a unit vector of R^n.
  static SpherePoint from_slice(double theta, const Vec& z);
  /// Pole of S^n: north (theta = 0) or south (theta = pi).
  static SpherePoint pole(int n, bool north);
  /// Validates |p| = 1 within 1e-10 and recovers (theta, z).
  static SpherePoint from_ambient(const Vec& p);
};

/// A domain point: Euclidean coordinates or a point of S^n.
using Point = std::variant<Vec, SpherePoint>;

/// Recovers (theta, z) from a unit vector. Throws InvalidPointError when
/// |p| differs from 1 by more than 1e-10.
SliceCoords to_slice_coords(const Vec& p);

/// (z sin(theta), cos(theta)).
Vec from_slice_coords(double theta, const Vec& z);

/// Riemannian distance on the unit sphere, in [0, pi]. Evaluated as
/// 2 atan2(|a-b|, |a+b|), which equals arccos<a,b> without its loss of
/// accuracy near 0 and pi.
double geodesic_distance(const Vec& a, const Vec& b);
double geodesic_distance(const SpherePoint& a, const SpherePoint& b);

/// Geodesic distance between two points at Euclidean (chord) distance c.
inline double chord_to_geodesic(double c) { return 2.0 * std::asin(std::min(1.0, 0.5 * c)); }

/// Exponential and logarithm maps of the unit sphere. `v` must be tangent
/// at `p`; `log_map` is undefined at the antipode of `p`.
Vec exp_map(const Vec& p, const Vec& v);
Vec log_map(const Vec& p, const Vec& q);

/// Oriented orthonormal basis of the tangent space at the unit vector p of
/// R^{m+1}, returned as the m columns of an (m+1) x m matrix with
/// det[frame | p] = +1.
///
/// The first m-1 columns come from Gram-Schmidt on the coordinate axes in
/// index order, skipping an axis whose residual norm is below 0.25; the last
/// column is the unit vector completing the orientation. The construction is
/// deterministic and continuous away from the loci where an axis crosses the
/// 0.25 acceptance threshold.
Mat tangent_frame(const Vec& p);

/// Unit-sphere tangent space projector I - p p^T applied to v.
Vec project_tangent(const Vec& p, const Vec& v);

// ---- measures ---------------------------------------------------------------

/// Lebesgue measure of the unit ball of R^n, by the recursion
/// w_0 = 1, w_1 = 2, w_n = (2 pi / n) w_{n-2}. Supports 0 <= n <= 8.
double omega(int n);

/// Area of the sphere S^{n-1}(r) bounding a ball of R^n: n w_n r^{n-1}.
double sphere_area(int n, double r);

/// Volume of a geodesic ball of radius rho in S^n: n w_n int_0^rho sin^{n-1}.
double geodesic_ball_volume(int n, double rho);

/// Volume of the latitude slice {alpha <= theta <= beta} of S^n.
double slice_volume_exact(int n, double alpha, double beta);

/// Upper bound w_n (beta^n - alpha^n) for the slice volume.
double slice_volume_bound(int n, double alpha, double beta);

/// int_a^b sin^m(t) dt for 0 <= a <= b <= pi, accurate to rounding for
/// arbitrarily thin intervals near the poles.
double integrate_sin_power(int m, double a, double b);

// ---- regions ----------------------------------------------------------------

enum class RegionKind { euclidean_ball, euclidean_sphere, euclidean_annulus, geodesic_ball, latitude_slice };

std::string to_string(RegionKind kind);

/// Balls, spheres and annuli of R^n, geodesic balls of S^n, and latitude
/// slices S_alpha^beta of S^n.
struct Region {
  RegionKind kind = RegionKind::euclidean_ball;
  int dim = 2;     // n: R^n for Euclidean kinds, S^n for sphere kinds
  Vec center;      // Euclidean centre or ambient point of S^n (unused for slices)
  double inner = 0.0;  // annulus inner radius, or slice alpha
  double outer = 0.0;  // ball/sphere/annulus radius, geodesic radius, or slice beta

  static Region ball(const Vec& c, double radius);
  static Region sphere(const Vec& c, double radius);
  static Region annulus(const Vec& c, double r_in, double r_out);
  static Region geodesic_ball(const Vec& p, double radius);
  static Region slice(int n, double alpha, double beta);
  /// The whole of S^n as the slice [0, pi].
  static Region whole_sphere(int n) { return slice(n, 0.0, kPi); }

  bool is_spherical() const { return kind == RegionKind::geodesic_ball || kind == RegionKind::latitude_slice; }
  double radius() const { return outer; }

  /// Membership with an absolute slack on the defining radii.
  bool contains(const Vec& ambient, double slack = 0.0) const;
  bool contains(const SpherePoint& p, double slack = 0.0) const;
};

// ---- targets ----------------------------------------------------------------

enum class TargetKind { euclidean_space, unit_sphere, graph_manifold };

std::string to_string(TargetKind kind);

/// Height function h of a graph manifold {(x, h(x))} in R^{n+1}.
struct GraphProfile {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

struct TargetSpec {
  TargetKind kind = TargetKind::euclidean_space;
  int dim = 2;  // manifold dimension (1 for scalar-valued maps)
  double injectivity_radius = std::numeric_limits<double>::infinity();
  std::shared_ptr<const GraphProfile> graph;

  static TargetSpec euclidean(int dim);
  /// The round S^n with d_N = pi.
  static TargetSpec unit_sphere(int n);
  static TargetSpec graph_manifold(int n, GraphProfile profile);

  int ambient_dim() const { return kind == TargetKind::euclidean_space ? dim : dim + 1; }
  bool compact() const { return kind == TargetKind::unit_sphere; }
};

}  // namespace finidist
