#pragma once

// Low-discrepancy sampling of regions. Sample sets are nested: the first N
// points of a request for M > N points are the N points of the smaller
// request, so sampled maxima are monotone in the count.

#include "finidist/geometry.hpp"

#include <cstdint>
#include <vector>

namespace finidist {

/// Halton sequence in [0,1)^d with a Cranley-Patterson shift drawn from the
/// seed. Supports d <= 16.
class HaltonSequence {
 public:
  HaltonSequence(int dims, std::uint64_t seed);

  int dims() const { return static_cast<int>(shift_.size()); }
  /// Point number `index` (0-based); every coordinate lies in (0, 1).
  Vec point(std::uint64_t index) const;

 private:
  std::vector<double> shift_;
};

/// Uniform direction on S^{n-1} from 2*ceil(n/2) uniforms (Box-Muller).
Vec direction_from_uniforms(const double* u, int n);
inline int uniforms_per_direction(int n) { return 2 * ((n + 1) / 2); }

/// Inverse of t -> int_0^t sin^m / int_0^rho sin^m on [lo, hi]: returns t
/// with int_lo^t sin^m = u * int_lo^hi sin^m.
double inverse_sin_power_cdf(int m, double lo, double hi, double u);

/// `count` volume-uniform quasi-random points of the region. Points of
/// spherical regions are built in the latitude chart when the region is
/// centred at the north pole.
std::vector<Point> sample_region(const Region& region, std::size_t count, std::uint64_t seed);

}  // namespace finidist
