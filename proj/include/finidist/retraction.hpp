#pragma once

// Lipschitz retraction of S^n minus an open cap D' = B(q, r') onto the
// closed cap D1 = B(p, 2d): stereographic projection from q, nearest-point
// projection onto the image ball of D1, inverse projection.

#include "finidist/geometry.hpp"
#include "finidist/report.hpp"

#include <cstdint>

namespace finidist {

class MapField;

struct RetractionSpec {
  Vec p;               // centre of D1
  double d = 0.0;      // D1 has radius 2d
  Vec q;               // centre of the excluded cap D'
  double r_prime = 0.0;
};

/// Stereographic image of D1: a Euclidean ball in q^perp, expressed in the
/// basis tangent_frame(q).
struct ImageBall {
  Vec center;
  double radius = 0.0;
};

/// Projection from q onto q^perp in the basis tangent_frame(q) and its
/// inverse.
Vec stereographic(const Vec& q, const Mat& basis, const Vec& x);
Vec inverse_stereographic(const Vec& q, const Mat& basis, const Vec& u);

ImageBall retraction_image_ball(const RetractionSpec& spec);

/// Throws GeometryError when 2d >= pi/5, or when the closures of D1 and D'
/// meet (d(p, q) <= 2d + r').
MapField build_retraction(const RetractionSpec& spec);

struct RetractionCheck {
  double identity_deviation = 0.0;   // max |R(x) - x| over samples of D1
  double containment_excess = 0.0;   // max (d(R(x), p) - 2d)^+ over samples
  double idempotence_deviation = 0.0;
  double lipschitz = 0.0;            // L-hat at the requested sample count
  double lipschitz_doubled = 0.0;    // L-hat at twice the sample count
  double boundary_jacobian = 0.0;    // max |J_R| at samples mapped to the boundary of D1
  std::size_t samples = 0;
};

RetractionCheck check_retraction(const MapField& r, const RetractionSpec& spec, std::size_t samples, std::uint64_t seed);

/// Report with one hypothesis per property; lhs = L-hat change under
/// doubling, rhs = 10%.
VerificationReport verify_retraction(const MapField& r, const RetractionSpec& spec, std::size_t samples,
                                     std::uint64_t seed);

}  // namespace finidist
