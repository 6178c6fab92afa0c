#include "finidist/calculus.hpp"
#include "finidist/errors.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

using namespace finidist;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

SpherePoint on_s2(double theta, double phi) { return SpherePoint::from_slice(theta, v2(std::cos(phi), std::sin(phi))); }

double largest_singular_value(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

TEST(OperatorNorm, MatchesSvd) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (auto [r, c] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}, {3, 2}, {1, 3}, {4, 2}}) {
    for (int t = 0; t < 20; ++t) {
      Mat m(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = g(rng);
      const double s = largest_singular_value(m);
      EXPECT_NEAR(operator_norm(m), s, 1e-12 * s) << r << "x" << c;
    }
  }
  EXPECT_EQ(operator_norm(Mat::Zero(3, 3)), 0.0);
}

TEST(OperatorNorm, RepeatedEigenvalues) {
  EXPECT_NEAR(operator_norm(Mat(2.0 * Mat::Identity(3, 3))), 2.0, 1e-14);
  Mat m = Mat::Identity(3, 3);
  m(2, 2) = 1.0 + 1e-9;
  EXPECT_NEAR(operator_norm(m), 1.0 + 1e-9, 1e-14);
}

TEST(Differential, PowerMapIsConformalWithFactorK) {
  for (int k = 1; k <= 5; ++k) {
    const Differential d = differential(zoo::power_map(k), on_s2(0.9, 0.3));
    EXPECT_TRUE(frames_valid(d));
    // (theta, phi) -> (theta, k phi) stretches the parallel by k and keeps the meridian.
    EXPECT_NEAR(operator_norm(d), k, 1e-12);
    EXPECT_NEAR(jacobian_det(d), k, 1e-12);
  }
}

TEST(Differential, RadialStretchClosedForm) {
  const double eps = 0.4;
  const Vec x = v2(0.3, -0.4);  // |x| = 0.5
  const Differential d = differential(zoo::radial_stretch(2, eps), Point(x));
  EXPECT_NEAR(operator_norm(d), std::pow(0.5, eps - 1.0), 1e-12);
  EXPECT_NEAR(jacobian_det(d), eps * std::pow(0.5, 2.0 * (eps - 1.0)), 1e-12);
}

TEST(Differential, FiniteDifferencesAgreeWithAnalytic) {
  const SpherePoint p = on_s2(1.1, 2.0);
  for (const MapField& f : {zoo::power_map(3), zoo::mobius(0.2, -0.1), zoo::rotation(2, {{0, 2, 0.4}})}) {
    const Differential a = differential(f, p, DiffMode::analytic());
    const Differential fd = differential(f, p, DiffMode::finite_difference(1e-5));
    EXPECT_EQ(a.source, DiffSource::analytic);
    EXPECT_EQ(fd.source, DiffSource::finite_difference);
    EXPECT_LT((a.matrix - fd.matrix).norm(), 1e-8 * a.matrix.norm()) << f.label();
  }
}

TEST(Differential, ErrorsOnSingularSetAndBadStep) {
  EXPECT_THROW(differential(zoo::radial_stretch(2, 0.5), Point(Vec(Vec::Zero(2)))), SingularPointError);
  EXPECT_THROW(differential(zoo::power_map(2), on_s2(0.5, 0.1), DiffMode::finite_difference(0.0)), DomainError);
  Mat m(2, 3);
  m.setOnes();
  Differential d;
  d.matrix = m;
  EXPECT_THROW(jacobian_det(d), ShapeError);
}

TEST(Differential, ScalarMapHasGradientRow) {
  const MapField f = zoo::height(v2(3.0, 4.0), 0.0, false);
  const Differential d = differential(f, Point(v2(0.1, 0.1)));
  EXPECT_EQ(d.matrix.rows(), 1);
  EXPECT_NEAR(operator_norm(d), 5.0, 1e-12);
}

TEST(Distortion, Cases) {
  EXPECT_EQ(*distortion_from(1e-12, 0.0, 2), 1.0);
  EXPECT_NEAR(*distortion_from(2.0, 2.0, 2), 2.0, 1e-15);
  EXPECT_FALSE(distortion_from(1.0, -1.0, 2).has_value());
  EXPECT_NEAR(*distortion(zoo::mobius(0.4, 0.1), on_s2(0.7, 1.0)), 1.0, 1e-10);
  EXPECT_FALSE(distortion(zoo::reflection(2, 0), on_s2(0.7, 1.0)).has_value());
}

TEST(Integrals, IdentityEnergyAndJacobian) {
  const MapField id = zoo::identity_ball(2);
  const Region b = Region::ball(Vec::Zero(2), 1.0);
  EXPECT_NEAR(energy(id, b, 2.0, 3).value, kPi, 1e-12);
  EXPECT_NEAR(jacobian_integral(id, b, 3).value, kPi, 1e-12);
}

TEST(Integrals, RotationCoversTheSphereOnce) {
  const auto q = jacobian_integral(zoo::rotation(2, {{0, 1, 0.3}, {1, 2, 0.9}}), Region::whole_sphere(2), 4);
  EXPECT_NEAR(q.value, 4.0 * kPi, 1e-9);
}

TEST(Integrals, RadialStretchEnergyOffCentre) {
  // |Df|^2 = |x|^{2 eps - 2}; on B(0, 1) that is 2 pi / (2 eps).
  const double eps = 0.5;
  const MapField f = zoo::radial_stretch(2, eps);
  EXPECT_NEAR(energy(f, Region::ball(Vec::Zero(2), 1.0), 2.0, 3).value, kPi / eps, 1e-9);
  // Off-centre ball containing the singularity; reference by arcs about the origin.
  const Vec c = v2(0.1, 0.05);
  const double R = 0.3, d = c.norm();
  const int m = 400000;
  double ref = 2.0 * kPi * std::pow(R - d, 2.0 * eps) / (2.0 * eps);
  const double h = 2.0 * d / m;
  for (int i = 0; i < m; ++i) {
    const double t = R - d + (i + 0.5) * h;
    const double cosang = std::clamp((t * t + d * d - R * R) / (2 * t * d), -1.0, 1.0);
    ref += h * 2.0 * std::acos(cosang) * std::pow(t, 2.0 * eps - 1.0);
  }
  EXPECT_NEAR(energy(f, Region::ball(c, R), 2.0, 5).value, ref, 1e-6);
}

TEST(Regions, UnresolvedCapTruncation) {
  const MapField f = zoo::himo_counterexample(2, 4);
  ASSERT_TRUE(f.unresolved_cap().has_value());
  const auto r = resolved_region(f, Region::whole_sphere(2));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->kind, RegionKind::latitude_slice);
  EXPECT_DOUBLE_EQ(r->inner, *f.unresolved_cap());
  EXPECT_TRUE(region_truncated(f, Region::whole_sphere(2)));
  EXPECT_FALSE(region_truncated(zoo::power_map(2), Region::whole_sphere(2)));
}

TEST(Audit, OrientationReversingMapViolates) {
  const AuditStats s = finite_distortion_audit(zoo::reflection(2, 0), Region::whole_sphere(2), 200, 3);
  EXPECT_EQ(s.samples, 200u);
  EXPECT_EQ(s.violations, 200u);
  EXPECT_FALSE(s.passes());
}

TEST(Audit, ConformalMapPasses) {
  const AuditStats s = finite_distortion_audit(zoo::mobius(0.3, 0.3), Region::whole_sphere(2), 500, 3);
  EXPECT_EQ(s.positive, 500u);
  EXPECT_TRUE(s.passes());
  EXPECT_NEAR(s.fraction_positive(), 1.0, 0.0);
}
