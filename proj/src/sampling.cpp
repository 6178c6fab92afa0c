#include "finidist/sampling.hpp"

#include "finidist/errors.hpp"

#include <array>
#include <cmath>
#include <random>

namespace finidist {

namespace {

constexpr std::array<int, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t i, int base) {
  const double inv = 1.0 / base;
  double f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

HaltonSequence::HaltonSequence(int dims, std::uint64_t seed) {
  if (dims < 1 || dims > static_cast<int>(kPrimes.size())) throw DomainError("HaltonSequence: unsupported dimension");
  std::mt19937_64 rng(seed);
  shift_.resize(dims);
  // Raw 53-bit draws: identical on every standard library.
  for (double& s : shift_) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec HaltonSequence::point(std::uint64_t index) const {
  Vec u(dims());
  for (int d = 0; d < dims(); ++d) {
    double v = radical_inverse(index + 1, kPrimes[d]) + shift_[d];
    v -= std::floor(v);
    u[d] = std::clamp(v, 1e-16, 1.0 - 1e-16);
  }
  return u;
}

Vec direction_from_uniforms(const double* u, int n) {
  Vec g(uniforms_per_direction(n));
  for (int k = 0; k + 1 < g.size(); k += 2) {
    const double rad = std::sqrt(-2.0 * std::log(u[k]));
    g[k] = rad * std::cos(2.0 * kPi * u[k + 1]);
    g[k + 1] = rad * std::sin(2.0 * kPi * u[k + 1]);
  }
  Vec d = g.head(n);
  const double nd = d.norm();
  if (nd == 0.0) {
    d.setZero();
    d[0] = 1.0;
    return d;
  }
  return d / nd;
}

double inverse_sin_power_cdf(int m, double lo, double hi, double u) {
  if (!(lo >= 0.0 && lo < hi && hi <= kPi)) throw DomainError("inverse_sin_power_cdf: need 0 <= lo < hi <= pi");
  u = std::clamp(u, 0.0, 1.0);
  if (m == 0) return lo + u * (hi - lo);
  const double target = u * integrate_sin_power(m, lo, hi);
  // Small-angle guess, exact in the limit sin t ~ t.
  const double p = m + 1.0;
  double t = std::pow(std::pow(lo, p) + u * (std::pow(hi, p) - std::pow(lo, p)), 1.0 / p);
  double a = lo, b = hi;
  t = std::clamp(t, a, b);
  for (int it = 0; it < 60; ++it) {
    const double f = integrate_sin_power(m, lo, t) - target;
    if (f > 0) b = t; else a = t;
    const double df = std::pow(std::sin(t), m);
    double next = df > 0 ? t - f / df : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - t) <= 1e-15 * std::max(t, 1e-300)) return next;
    t = next;
  }
  return t;
}

std::vector<Point> sample_region(const Region& region, std::size_t count, std::uint64_t seed) {
  const int n = region.dim;
  std::vector<Point> out;
  out.reserve(count);
  const int nd = uniforms_per_direction(n);

  switch (region.kind) {
    case RegionKind::euclidean_ball:
    case RegionKind::euclidean_sphere:
    case RegionKind::euclidean_annulus: {
      const HaltonSequence h(nd + 1, seed);
      const double lo = region.kind == RegionKind::euclidean_ball ? 0.0 : std::pow(region.inner, n);
      const double hi = std::pow(region.outer, n);
      for (std::size_t i = 0; i < count; ++i) {
        const Vec u = h.point(i);
        const Vec dir = direction_from_uniforms(u.data(), n);
        const double r = region.kind == RegionKind::euclidean_sphere ? region.outer
                                                                       : std::pow(lo + u[nd] * (hi - lo), 1.0 / n);
        out.emplace_back(Vec(region.center + r * dir));
      }
      break;
    }
    case RegionKind::latitude_slice:
    case RegionKind::geodesic_ball: {
      const HaltonSequence h(nd + 1, seed);
      const bool slice = region.kind == RegionKind::latitude_slice;
      const double lo = slice ? region.inner : 0.0;
      const double hi = region.outer;
      const bool north = slice || region.center[n] == 1.0;
      const bool south = !slice && region.center[n] == -1.0;
      Mat frame;
      if (!north && !south) frame = tangent_frame(region.center);
      for (std::size_t i = 0; i < count; ++i) {
        const Vec u = h.point(i);
        const Vec dir = direction_from_uniforms(u.data(), n);
        const double t = inverse_sin_power_cdf(n - 1, lo, hi, u[nd]);
        if (north) {
          out.emplace_back(SpherePoint::from_slice(t, dir));
        } else if (south) {
          out.emplace_back(SpherePoint::from_slice(kPi - t, dir));
        } else {
          Vec a = std::cos(t) * region.center + std::sin(t) * (frame * dir);
          out.emplace_back(SpherePoint::from_ambient(a / a.norm()));
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace finidist
