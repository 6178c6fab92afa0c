#pragma once

// Differentials in oriented orthonormal frames, operator norm, signed
// Jacobian, distortion, energies and finite-distortion audits.
//
// Frames: the standard basis on Euclidean domains and targets,
// tangent_frame() on spheres, and Gram-Schmidt of (e_i, d_i h) on a graph
// {(x, h(x))}. All frames are positively oriented with respect to the
// outward (sphere) or upward (graph) normal.

#include "finidist/map_zoo.hpp"
#include "finidist/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace finidist {

inline constexpr double kTauJ = 1e-12;
inline constexpr double kTauD = 1e-9;

enum class DiffSource { analytic, finite_difference };

struct DiffMode {
  bool analytic_if_available = true;
  double h = 1e-5;

  static DiffMode analytic() { return {true, 1e-5}; }
  static DiffMode finite_difference(double h) { return {false, h}; }
};

struct Differential {
  Mat matrix;        // m x n
  Mat domain_frame;  // ambient columns
  Mat target_frame;
  Vec domain_normal; // empty for Euclidean spaces
  Vec target_normal;
  DiffSource source = DiffSource::analytic;
  double step = 0.0; // effective FD step
};

Mat domain_frame(const MapField& f, const Point& x);
/// Oriented frame of the target at the ambient point y, and its normal
/// (empty for Euclidean targets).
Mat target_frame(const TargetSpec& t, const Vec& y);
Vec target_normal(const TargetSpec& t, const Vec& y);

/// Sign of det[frame | normal] (det frame when the normal is empty).
double frame_orientation(const Mat& frame, const Vec& normal);
/// Gram = I within tol and positive orientation, for both frames.
bool frames_valid(const Differential& d, double tol = 1e-10);

/// Throws SingularPointError on the declared singular set and DomainError
/// for a non-positive step.
Differential differential(const MapField& f, const Point& x, DiffMode mode = {});

/// Largest singular value, from the Gram matrix of the smaller side.
double operator_norm(const Mat& m);
inline double operator_norm(const Differential& d) { return operator_norm(d.matrix); }

/// Determinant of the frame matrix; ShapeError unless square.
double jacobian_det(const Differential& d);

struct PointwiseData {
  double op_norm = 0.0;
  double jac = 0.0;  // NaN for non-equidimensional maps
  std::optional<double> distortion;
};

/// |Df|^n / J when J > tau_j; 1 when |Df| < tau_d; undefined otherwise.
std::optional<double> distortion_from(double op_norm, double jac, int n, double tau_j = kTauJ, double tau_d = kTauD);

PointwiseData pointwise(const MapField& f, const Point& x, DiffMode mode = {}, double tau_j = kTauJ,
                        double tau_d = kTauD);
std::optional<double> distortion(const MapField& f, const Point& x, DiffMode mode = {});

/// The part of `region` the map's integrals resolve: for maps with an
/// unresolved polar cap, the region minus that cap (as a latitude slice).
/// Empty when nothing is left.
std::optional<Region> resolved_region(const MapField& f, const Region& region);
bool region_truncated(const MapField& f, const Region& region);

/// int over the resolved region of fn(pointwise data), with the map's
/// breakpoints declared to the quadrature.
QuadratureEstimate integrate_over(const MapField& f, const Region& region, int level,
                                  const std::function<double(const PointwiseData&)>& fn, DiffMode mode = {});

/// int |Df|^p over the region.
QuadratureEstimate energy(const MapField& f, const Region& region, double p, int level, DiffMode mode = {});
/// int J_f over the region.
QuadratureEstimate jacobian_integral(const MapField& f, const Region& region, int level, DiffMode mode = {});

struct AuditStats {
  std::size_t samples = 0;
  std::size_t positive = 0;    // J > tau_j
  std::size_t degenerate = 0;  // |Df| < tau_d
  std::size_t violations = 0;  // neither
  double min_jac = 0.0;
  double max_hadamard_excess = 0.0;  // max (J - |Df|^n)

  double fraction_positive() const { return samples ? double(positive) / samples : 0.0; }
  double fraction_degenerate() const { return samples ? double(degenerate) / samples : 0.0; }
  double fraction_violations() const { return samples ? double(violations) / samples : 0.0; }
  bool passes() const { return violations == 0; }
};

/// Sampled evidence (not proof) of the finite-distortion property.
AuditStats finite_distortion_audit(const MapField& f, const Region& region, std::size_t samples, std::uint64_t seed,
                                   double tau_j = kTauJ, double tau_d = kTauD, DiffMode mode = {});

}  // namespace finidist
