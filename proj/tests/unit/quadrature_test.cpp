#include "finidist/errors.hpp"
#include "finidist/legendre.hpp"
#include "finidist/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace finidist;

namespace {

// Composite Simpson, used as an independent reference.
double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const double h = (b - a) / (2 * m);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(GaussLegendre, WeightsAndExactness) {
  for (int n : {1, 2, 5, 8, 17, 64}) {
    const GaussRule& g = gauss_legendre(n);
    ASSERT_EQ(g.nodes.size(), static_cast<std::size_t>(n));
    EXPECT_NEAR(std::accumulate(g.weights.begin(), g.weights.end(), 0.0), 2.0, 1e-13);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(g.nodes[i], -g.nodes[n - 1 - i], 1e-14);
    // Exact for degree 2n - 1.
    const int deg = 2 * n - 2;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], deg);
    EXPECT_NEAR(s, 2.0 / (deg + 1), 1e-13);
  }
}

TEST(Interval, PolynomialIsExactAtLowLevel) {
  const auto q = integrate_interval([](double x) { return 3 * x * x - x + 2; }, -1.0, 2.0, 1);
  EXPECT_NEAR(q.value, 9.0 - 1.5 + 6.0, 1e-13);
  EXPECT_LT(q.error_indicator, 1e-12);
  EXPECT_EQ(q.resolution, 1);
}

TEST(Interval, GradedPanelsResolveInverseSquareRoot) {
  QuadratureOptions o;
  o.singular = {0.0};
  const auto q = integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 3, o);
  EXPECT_NEAR(q.value, 2.0, 1e-6);
  EXPECT_LT(q.error_indicator, 1e-4);
}

TEST(Interval, InnerTailIsAddedExactly) {
  QuadratureOptions o;
  o.singular = {0.0};
  o.inner_tail = [](double delta) { return 2.0 * std::sqrt(delta); };
  const auto q = integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 3, o);
  EXPECT_NEAR(q.value, 2.0, 1e-12);
}

TEST(Interval, BreakpointRecoversKink) {
  QuadratureOptions o;
  o.breakpoints = {0.3};
  const auto q = integrate_interval([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 1, o);
  EXPECT_NEAR(q.value, 0.5 * (0.09 + 0.49), 1e-14);
}

TEST(Interval, LevelRange) {
  EXPECT_THROW(integrate_interval([](double) { return 1.0; }, 0.0, 1.0, 0), DomainError);
  EXPECT_THROW(integrate_interval([](double) { return 1.0; }, 0.0, 1.0, 17), DomainError);
}

TEST(Sphere, SecondMomentOfS2) {
  const auto q = integrate_sphere([](const Vec& x) { return x[0] * x[0]; }, Vec::Zero(3), 1.0, 3);
  EXPECT_NEAR(q.value, 4.0 * kPi / 3.0, 1e-12);
}

TEST(Sphere, CircleLength) {
  Vec c(2);
  c << 0.4, -1.0;
  const auto q = integrate_sphere([](const Vec&) { return 1.0; }, c, 2.5, 2);
  EXPECT_NEAR(q.value, 5.0 * kPi, 1e-12);
}

TEST(Ball, RadialMoment) {
  const auto q = integrate_ball([](const Vec& x) { return x.squaredNorm(); }, Vec::Zero(2), 2.0, 2);
  EXPECT_NEAR(q.value, 8.0 * kPi, 1e-11);
}

TEST(Ball, OffCentrePoleRule) {
  // int over B(x0, R) of 1/|y|: arc length of |y| = t inside the ball, over t.
  Vec x0(2);
  x0 << 0.2, 0.1;
  const double R = 0.5, d = x0.norm();
  auto arc_over_t = [&](double t) {
    if (t <= R - d) return 2.0 * kPi;
    const double c = std::clamp((t * t + d * d - R * R) / (2 * t * d), -1.0, 1.0);
    return 2.0 * std::acos(c);
  };
  const double expected = 2.0 * kPi * (R - d) + simpson(arc_over_t, R - d, R + d, 200000);
  QuadratureOptions o;
  const auto q = integrate_ball_about([](const Vec& y) { return 1.0 / y.norm(); }, x0, R, Vec::Zero(2), 5, o);
  EXPECT_NEAR(q.value, expected, 1e-6);
  EXPECT_THROW(integrate_ball_about([](const Vec&) { return 1.0; }, x0, 0.1, Vec::Zero(2), 3), DomainError);
}

TEST(Annulus, Area) {
  const auto q = integrate_annulus([](const Vec&) { return 1.0; }, Vec::Zero(2), 0.5, 1.5, 2);
  EXPECT_NEAR(q.value, kPi * (2.25 - 0.25), 1e-12);
  EXPECT_THROW(integrate_annulus([](const Vec&) { return 1.0; }, Vec::Zero(2), 0.0, 1.0, 2), DomainError);
}

TEST(Slice, VolumeMatchesClosedForm) {
  for (int n : {1, 2, 3, 4}) {
    const auto q = integrate_slice([](const SpherePoint&) { return 1.0; }, n, 0.3, 1.9, 3);
    EXPECT_NEAR(q.value, slice_volume_exact(n, 0.3, 1.9), 1e-11) << "n=" << n;
  }
}

TEST(Cap, VolumeAndHeight) {
  Vec p(3);
  p << 0.0, 0.6, 0.8;
  const double rho = 0.9;
  const auto vol = integrate_cap([](const SpherePoint&) { return 1.0; }, p, rho, 3);
  EXPECT_NEAR(vol.value, 2.0 * kPi * (1.0 - std::cos(rho)), 1e-12);
  // int of <x, p> over the cap is pi sin^2(rho).
  const auto h = integrate_cap([&](const SpherePoint& x) { return x.ambient.dot(p); }, p, rho, 3);
  EXPECT_NEAR(h.value, kPi * std::sin(rho) * std::sin(rho), 1e-12);
}

TEST(Region, DispatchMatchesDirectCall) {
  const Region r = Region::geodesic_ball(Vec::Unit(3, 2), 0.5);
  const auto a = integrate_region(r, [](const Point&) { return 1.0; }, 3);
  EXPECT_NEAR(a.value, geodesic_ball_volume(2, 0.5), 1e-12);
}

TEST(PairwiseSum, DeterministicAndAccurate) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + i);
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(v));
  EXPECT_NEAR(pairwise_sum(v), std::accumulate(v.begin(), v.end(), 0.0), 1e-12);
}

TEST(Indicator, ShrinksWithLevel) {
  auto f = [](double x) { return std::exp(std::sin(5 * x)); };
  const auto lo = integrate_interval(f, 0.0, 3.0, 1);
  const auto hi = integrate_interval(f, 0.0, 3.0, 4);
  EXPECT_LT(hi.error_indicator, lo.error_indicator);
}
