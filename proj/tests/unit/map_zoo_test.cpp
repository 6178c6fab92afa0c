#include "finidist/errors.hpp"
#include "finidist/map_zoo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace finidist;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

SpherePoint on_s2(double theta, double phi) { return SpherePoint::from_slice(theta, v2(std::cos(phi), std::sin(phi))); }

}  // namespace

TEST(Factory, UnknownFamilyAndBadParameters) {
  EXPECT_THROW(make_map(std::string("no_such_family")), ParameterError);
  EXPECT_THROW(zoo::power_map(0), ParameterError);
  EXPECT_THROW(zoo::radial_stretch(2, 1.5), ParameterError);
  EXPECT_THROW(zoo::slice_stretch(2, 0.6, 0.2), ParameterError);
  EXPECT_THROW(zoo::mobius(1.0, 0.0), ParameterError);
  EXPECT_THROW(zoo::exp_chart(v3(1, 1, 0), 0.5), ParameterError);
  EXPECT_THROW(zoo::angular_profile("square", {1.0}), ParameterError);
  EXPECT_THROW(make_map("power_map", Json::array()), ParameterError);
}

TEST(Factory, FamilyListIsNonEmptyAndBuildable) {
  const auto names = family_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "power_map"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "himo_counterexample"), names.end());
}

TEST(Factory, DescriptorRoundTrip) {
  const std::vector<MapField> maps = {zoo::power_map(3),
                                      zoo::rotation(2, {{0, 1, 0.3}, {1, 2, -0.2}}),
                                      zoo::radial_stretch(3, 0.4, 2.0),
                                      zoo::composed(zoo::mobius(0.1, 0.2), zoo::exp_chart(v3(0, 0, 1), 0.5)),
                                      zoo::angular_profile("trig", {0.0, 1.0, 0.5}),
                                      zoo::himo_counterexample(2, 4)};
  for (const MapField& f : maps) {
    const MapField g = make_map(f.descriptor());
    EXPECT_EQ(g.descriptor(), f.descriptor());
    EXPECT_EQ(g.label(), f.label());
  }
}

TEST(Values, PowerMapMultipliesLongitude) {
  const MapField f = zoo::power_map(3);
  const Vec y = f.evaluate(on_s2(0.8, 0.4));
  EXPECT_NEAR((y - on_s2(0.8, 1.2).ambient).norm(), 0.0, 1e-14);
}

TEST(Values, RotationIsAnIsometry) {
  const MapField f = zoo::rotation(2, {{0, 1, 0.5}, {0, 2, 1.1}});
  const Vec a = v3(0.2, 0.3, 0.9).normalized(), b = v3(-0.7, 0.1, 0.2).normalized();
  const Vec fa = f.evaluate(SpherePoint::from_ambient(a)), fb = f.evaluate(SpherePoint::from_ambient(b));
  EXPECT_NEAR(fa.norm(), 1.0, 1e-14);
  EXPECT_NEAR(geodesic_distance(fa, fb), geodesic_distance(a, b), 1e-14);
}

TEST(Values, ReflectionNegatesAxis) {
  const Vec a = v3(0.36, 0.48, 0.8);
  const Vec y = zoo::reflection(2, 1).evaluate(SpherePoint::from_ambient(a));
  EXPECT_NEAR((y - v3(0.36, -0.48, 0.8)).norm(), 0.0, 1e-15);
}

TEST(Values, RadialStretch) {
  const MapField f = zoo::radial_stretch(2, 0.5);
  const Vec x = v2(0.09, 0.12);  // |x| = 0.15
  EXPECT_NEAR((f.evaluate(x) - x * std::pow(0.15, -0.5)).norm(), 0.0, 1e-14);
  EXPECT_THROW(f.evaluate(v2(2.0, 0.0)), DomainError);
}

TEST(Values, RadialJump) {
  const MapField f = zoo::radial_jump(2, 0.5, 1.5, 0.5);
  EXPECT_NEAR((f.evaluate(v2(0.1, 0.2)) - v2(0.15, 0.3)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((f.evaluate(v2(0.6, 0.2)) - v2(0.3, 0.1)).norm(), 0.0, 1e-15);
}

TEST(Values, LogLog) {
  const MapField f = zoo::loglog_scalar(2);
  const Vec x = v2(0.01, 0.0);
  EXPECT_NEAR(f.evaluate(x)[0], std::log(std::log(100.0)), 1e-14);
  EXPECT_THROW(f.evaluate(v2(0.0, 0.0)), SingularPointError);
}

TEST(Values, ExpChartPreservesDistanceFromCentre) {
  const Vec p = v3(0.6, 0.0, 0.8);
  const MapField f = zoo::exp_chart(p, 1.0);
  const Vec u = v2(0.3, -0.4);
  EXPECT_NEAR(geodesic_distance(f.evaluate(u), p), 0.5, 1e-14);
  EXPECT_NEAR((f.evaluate(Vec::Zero(2)) - p).norm(), 0.0, 1e-15);
}

TEST(Values, MobiusStaysOnSphere) {
  const MapField f = zoo::mobius(0.3, -0.2);
  for (double t : {0.2, 1.0, 2.5}) EXPECT_NEAR(f.evaluate(on_s2(t, 0.9)).norm(), 1.0, 1e-14);
}

TEST(Values, SliceStretchEnds) {
  const MapField f = zoo::slice_stretch(2, 0.2, 0.6);
  EXPECT_NEAR(f.evaluate(on_s2(0.1, 0.3))[2], 1.0, 1e-15);
  EXPECT_NEAR(f.evaluate(on_s2(0.9, 0.3))[2], -1.0, 1e-15);
  // Midpoint of the slice goes to the equator.
  EXPECT_NEAR(f.evaluate(on_s2(0.4, 0.3))[2], 0.0, 1e-15);
}

TEST(Values, CounterexampleIsDiscontinuousAtTheNorthPole) {
  const MapField f = zoo::himo_counterexample(2, 6);
  EXPECT_THROW(f.evaluate(SpherePoint::pole(2, true)), SingularPointError);
  EXPECT_NEAR(f.evaluate(on_s2(3.0, 0.2)).norm(), 1.0, 1e-14);
}

TEST(Values, HeightFunction) {
  const MapField f = zoo::height(v2(1.0, 2.0), 0.5, false);
  EXPECT_NEAR(f.evaluate(v2(0.1, 0.2))[0], 0.1 + 0.4 + 0.5, 1e-15);
}

TEST(Values, AngularProfile) {
  const MapField f = zoo::angular_profile("trig", {0.5, 1.0, 0.0});
  EXPECT_NEAR(f.evaluate(v2(0.0, 1.0))[0], 0.5, 1e-15);
  EXPECT_NEAR(f.evaluate(v2(1.0, 0.0))[0], 1.5, 1e-15);
}

TEST(Composition, ChainsValues) {
  const Vec p = v3(0, 0, 1);
  const MapField inner = zoo::exp_chart(p, 1.0), outer = zoo::power_map(2);
  const MapField f = zoo::composed(outer, inner);
  const Vec u = v2(0.2, 0.1);
  EXPECT_NEAR((f.evaluate(u) - outer.evaluate(SpherePoint::from_ambient(inner.evaluate(u)))).norm(), 0.0, 1e-14);
  EXPECT_THROW(zoo::composed(zoo::radial_stretch(2, 0.5), zoo::power_map(2)), ParameterError);
}

TEST(Singular, DistanceToLocus) {
  const MapField f = zoo::radial_stretch(2, 0.5);
  EXPECT_NEAR(f.distance_to_singular(v2(0.3, 0.4)), 0.5, 1e-15);
  EXPECT_EQ(zoo::identity_ball(2).distance_to_singular(v2(0.1, 0.1)), std::numeric_limits<double>::infinity());
}

TEST(Caps, ExcludedCapLeavesTheDomain) {
  const MapField f = zoo::identity_sphere(2).with_excluded_cap(v3(0, 0, 1), 0.3);
  EXPECT_FALSE(f.in_domain(on_s2(0.1, 0.0)));
  EXPECT_TRUE(f.in_domain(on_s2(0.5, 0.0)));
  EXPECT_THROW(f.evaluate(on_s2(0.1, 0.0)), DomainError);
}
