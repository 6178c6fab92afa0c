#pragma once

// Deterministic product rules on spheres, balls, annuli, latitude slices and
// geodesic caps.
//
// One-dimensional pieces (radius, colatitude) use composite 8-point
// Gauss-Legendre panels, 2^L panels per smooth segment at level L. Circles
// use the trapezoid rule with 8 * 2^L nodes, or Gauss arcs when angular
// breakpoints are declared. S^m for m >= 2 is the product of a colatitude
// rule weighted by sin^{m-1} and a rule on S^{m-1}.
//
// Every estimate is computed at levels L and L-1; the error indicator is
// |Q(L) - Q(L-1)| plus a rounding floor, plus any estimated singular tail.
// Node contributions are summed pairwise in node order, so results do not
// depend on how reports are scheduled.

#include "finidist/geometry.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace finidist {

struct QuadratureEstimate {
  double value = 0.0;
  double error_indicator = 0.0;
  std::int64_t nodes_used = 0;
  int resolution = 0;

  double relative_indicator() const {
    return error_indicator / std::max(std::abs(value), 1e-300);
  }
};

using EuclidIntegrand = std::function<double(const Vec&)>;
using SphereIntegrand = std::function<double(const SpherePoint&)>;
using PointIntegrand = std::function<double(const Point&)>;

struct QuadratureOptions {
  // Radii (balls, annuli), colatitudes (slices, caps) where the integrand may
  // kink or jump. Values outside the integration range are ignored.
  std::vector<double> breakpoints;
  // Same coordinate; integrable blow-ups. Panels are graded geometrically
  // with ratio 1/2 toward them, down to `floor`.
  std::vector<double> singular;
  // Longitude angles in [0, 2 pi) where an integrand over a circle kinks.
  std::vector<double> angle_breaks;
  // Exact integral over the innermost excluded ball (or cap) of radius
  // delta around a singular centre. When absent the excluded piece is
  // estimated from the innermost panel and added to the error indicator.
  std::function<double(double delta)> inner_tail;
  double floor = 1e-14;
};

/// Sum in fixed pairwise order.
double pairwise_sum(std::span<const double> v);

/// Nodes and weights of the level-L rule on the unit sphere S^m in R^{m+1}.
struct SphereRule {
  std::vector<Vec> directions;
  std::vector<double> weights;
};
SphereRule sphere_rule(int m, int level, const std::vector<double>& angle_breaks = {});

/// int_a^b f with the panel layout described above.
QuadratureEstimate integrate_interval(const std::function<double(double)>& f, double a, double b, int level,
                                      const QuadratureOptions& opts = {});

/// int over the sphere S^{n-1}(center, r) of R^n, n = center.size().
QuadratureEstimate integrate_sphere(const EuclidIntegrand& g, const Vec& center, double r, int level,
                                    const QuadratureOptions& opts = {});

/// int over the ball B(center, R), by shells int_0^R (int_{S(t)} g) dt.
QuadratureEstimate integrate_ball(const EuclidIntegrand& g, const Vec& center, double R, int level,
                                  const QuadratureOptions& opts = {});

/// int over B(center, R) in polar coordinates about an interior point
/// `pole`, for integrands that blow up there. Breakpoints are distances from
/// the pole.
QuadratureEstimate integrate_ball_about(const EuclidIntegrand& g, const Vec& center, double R, const Vec& pole,
                                        int level, const QuadratureOptions& opts = {});

QuadratureEstimate integrate_annulus(const EuclidIntegrand& g, const Vec& center, double r_in, double r_out,
                                     int level, const QuadratureOptions& opts = {});

/// int over the latitude slice {alpha <= theta <= beta} of S^n, evaluated
/// in the (theta, z) chart with the integrand receiving chart-authoritative
/// points.
QuadratureEstimate integrate_slice(const SphereIntegrand& g, int n, double alpha, double beta, int level,
                                   const QuadratureOptions& opts = {});

/// int over the geodesic ball B(p, rho) of S^n in geodesic polar
/// coordinates about p; breakpoints refer to the distance from p.
QuadratureEstimate integrate_cap(const SphereIntegrand& g, const Vec& p, double rho, int level,
                                 const QuadratureOptions& opts = {});

/// Dispatch on the region kind.
QuadratureEstimate integrate_region(const Region& region, const PointIntegrand& g, int level,
                                    const QuadratureOptions& opts = {});

}  // namespace finidist
