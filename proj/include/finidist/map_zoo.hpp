#pragma once

// Closed-form map families. A MapField is an immutable value: a descriptor
// (family name and JSON parameters), a domain, a target, a declared singular
// set, and an implementation giving values and, for most families, the
// ambient Jacobian.
//
// The ambient Jacobian of a map into R^M from a domain in R^D (D = n for
// Euclidean domains, n + 1 for S^n) is an M x D matrix whose action on
// tangent vectors is the differential. Calculus frames it.

#include "finidist/geometry.hpp"
#include "finidist/quadrature.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace finidist {

using Json = nlohmann::json;

struct SingularLocus {
  // point; Euclidean sphere |x - center| = radius; geodesic sphere
  // d(x, center) = radius on a sphere domain (a latitude when center is the
  // north pole).
  enum class Kind { point, sphere, latitude };
  Kind kind = Kind::point;
  Vec center;
  double radius = 0.0;
  bool evaluable = false; // a value is defined there (continuous gluing, one-sided limit)
  bool blowup = false;    // |Df| blows up (integrably) toward the locus
};

/// Family implementation. Receives points already normalised to the domain
/// kind: Vec for Euclidean domains, SpherePoint for sphere domains.
class MapImpl {
 public:
  virtual ~MapImpl() = default;
  virtual Vec value(const Point& x) const = 0;
  virtual std::optional<Mat> ambient_jacobian(const Point&) const { return std::nullopt; }
  virtual bool analytic() const { return false; }
  /// Exact int over B(c, delta) of |Df|^p, when the family knows it and the
  /// region is centred at its singular point.
  virtual std::optional<double> energy_tail(const Region&, double /*p*/, double /*delta*/) const { return std::nullopt; }
  /// Family-specific quadrature hints beyond the singular set.
  virtual void refine_options(const Region&, QuadratureOptions&) const {}
};

class MapField {
 public:
  MapField() = default;
  MapField(std::string family, Json params, Region domain, TargetSpec target, std::vector<SingularLocus> singular,
           std::shared_ptr<const MapImpl> impl);

  const std::string& family() const { return family_; }
  const Json& params() const { return params_; }
  /// {"family": ..., "params": {...}}; make_map accepts it back.
  Json descriptor() const;
  /// Short human-readable tag such as power_map(k=3).
  std::string label() const;

  const Region& domain() const { return domain_; }
  bool sphere_domain() const { return domain_.is_spherical(); }
  int domain_dim() const { return domain_.dim; }
  int domain_ambient_dim() const { return sphere_domain() ? domain_.dim + 1 : domain_.dim; }
  const TargetSpec& target() const { return target_; }
  bool equidimensional() const { return target_.dim == domain_.dim; }
  const std::vector<SingularLocus>& singular_set() const { return singular_; }
  bool has_analytic_differential() const { return impl_ && impl_->analytic(); }

  /// Excluded open caps of a sphere domain (centre, radius).
  const std::vector<std::pair<Vec, double>>& excluded_caps() const { return excluded_; }
  MapField with_excluded_cap(const Vec& center, double radius) const;
  /// Colatitude below which the family is evaluable but its integrals are
  /// not resolved (counterexample horizon).
  std::optional<double> unresolved_cap() const { return unresolved_cap_; }
  MapField with_unresolved_cap(double theta) const;
  /// Extra latitude or radial breakpoints for quadrature.
  MapField with_breakpoints(std::vector<double> b) const;

  /// Converts to the domain's point kind and checks membership.
  Point normalize(const Point& x) const;
  bool in_domain(const Point& x, double slack = 1e-12) const;
  /// Distance from x to the nearest singular locus (domain metric; geodesic
  /// on spheres). Infinity when the set is empty.
  double distance_to_singular(const Point& x, bool only_non_evaluable = false) const;

  /// Checked evaluation: throws DomainError outside the domain and
  /// SingularPointError on a non-evaluable singular locus.
  Vec evaluate(const Point& x) const;
  /// Evaluation without singular-set checks (domain points only).
  Vec value(const Point& x) const { return impl_->value(normalize(x)); }
  std::optional<Mat> ambient_jacobian(const Point& x) const { return impl_->ambient_jacobian(normalize(x)); }

  /// Breakpoints and singular coordinates of the map in the 1D coordinate
  /// of the region (radius about the centre, or colatitude).
  QuadratureOptions quadrature_options(const Region& region) const;
  std::optional<double> energy_tail(const Region& r, double p, double delta) const {
    return impl_->energy_tail(r, p, delta);
  }

  const MapImpl& impl() const { return *impl_; }

 private:
  std::string family_;
  Json params_;
  Region domain_;
  TargetSpec target_;
  std::vector<SingularLocus> singular_;
  std::vector<std::pair<Vec, double>> excluded_;
  std::optional<double> unresolved_cap_;
  std::vector<double> extra_breaks_;
  std::shared_ptr<const MapImpl> impl_;
};

/// Evaluable geodesic-sphere locus d(x, center) = radius.
SingularLocus latitude_locus(const Vec& center, double radius);

/// Builds a map from a family name and JSON parameters. Throws
/// ParameterError on unknown families or invalid parameters.
MapField make_map(const std::string& family, const Json& params = Json::object());
/// Accepts the output of MapField::descriptor().
MapField make_map(const Json& descriptor);

std::vector<std::string> family_names();

/// theta_k = 2^{-k^2} pi.
double schedule_theta(int k);

namespace zoo {

MapField identity_sphere(int n);
MapField identity_ball(int n, double radius = 1.0);
/// Rotation of S^n as a product of plane rotations (i, j, angle), applied
/// left to right.
MapField rotation(int n, const std::vector<std::tuple<int, int, double>>& givens);
/// Negates one ambient coordinate of S^n.
MapField reflection(int n, int axis);
/// (theta, phi) -> (theta, k phi) on S^2.
MapField power_map(int k);
/// x |x|^{eps-1} on B(0, radius) in R^n.
MapField radial_stretch(int n, double eps, double radius = 1.0);
/// log|log|x|| on B(0, radius) in R^n, radius < 1.
MapField loglog_scalar(int n, double radius = 0.36787944117144233);
/// Sum of w_j log log(s/|x - c_j|) bumps supported in |x - c_j| < s/e.
MapField dense_singularities(int n, const std::vector<Vec>& centers, const std::vector<double>& weights, double scale,
                             double radius = 1.0);
/// The first `count` centres of a Halton sequence in B(0, radius) with
/// weights 2^{-j}.
MapField dense_singularities(int n, int count, double scale, double radius = 1.0);
/// x -> (x, log|log|x||) into the graph of log|log|.
MapField graph_embed(int n, double radius = 0.36787944117144233);
MapField slice_stretch(int n, double alpha, double beta);
MapField slice_stretch_reflected(int n, double alpha, double beta);
MapField himo_counterexample(int n, int k_max);
MapField euclidean_radial_retraction(const Vec& center, double radius, double domain_radius = 0.0);
/// Disc automorphism w -> (w - a) / (1 - conj(a) w) moved to S^2 by
/// stereographic projection from the north pole.
MapField mobius(double a_re, double a_im);
MapField composed(const MapField& outer, const MapField& inner);
/// u -> exp_p(T u) from B(0, radius) in R^n onto a cap of S^n, T the
/// tangent frame at p.
MapField exp_chart(const Vec& p, double radius);
/// Colatitude fold theta -> rho sin^2(theta): a degree-zero map of S^n onto
/// the cap B(north, rho).
MapField cap_fold(int n, double rho);
/// inner_scale * x for |x| < r_jump, outer_scale * x otherwise, on B(0, 1).
MapField radial_jump(int n, double r_jump, double inner_scale, double outer_scale);
/// Scalar x -> <a, x> + b on S^n (a in R^{n+1}) or on B(0, radius) in R^n.
MapField height(const Vec& a, double b, bool sphere_domain, double radius = 1.0);
/// Scalar function of the polar angle on the annulus r_in <= |x| <= r_out of
/// R^2. kind "trig": sum a_k cos(k phi) + b_k sin(k phi) with
/// coefficients {a_0, a_1, b_1, a_2, b_2, ...}; kind "cap_bump": plateau of
/// value 1 on |phi| <= a, linear ramps to 0 at phi = pi.
MapField angular_profile(const std::string& kind, const std::vector<double>& coeffs, double r_in = 0.05,
                         double r_out = 4.0);

}  // namespace zoo

}  // namespace finidist
