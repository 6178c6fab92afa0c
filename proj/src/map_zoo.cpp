#include "finidist/map_zoo.hpp"

#include "finidist/errors.hpp"
#include "finidist/retraction.hpp"
#include "finidist/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <utility>

namespace finidist {

namespace {

constexpr double kE = 2.71828182845904523536;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kScheduleDepth = 30;  // latitudes theta_1..theta_30 are declared

const SpherePoint& sp(const Point& x) { return std::get<SpherePoint>(x); }
const Vec& ev(const Point& x) { return std::get<Vec>(x); }

// ---- parameter parsing ------------------------------------------------------

double num(Json& p, const char* key, std::optional<double> def = std::nullopt) {
  if (!p.contains(key)) {
    if (!def) throw ParameterError(std::string("missing parameter '") + key + "'");
    p[key] = *def;
  }
  if (!p[key].is_number()) throw ParameterError(std::string("parameter '") + key + "' must be a number");
  const double v = p[key].get<double>();
  if (!std::isfinite(v)) throw ParameterError(std::string("parameter '") + key + "' must be finite");
  return v;
}

int integer(Json& p, const char* key, std::optional<int> def = std::nullopt) {
  if (!p.contains(key)) {
    if (!def) throw ParameterError(std::string("missing parameter '") + key + "'");
    p[key] = *def;
  }
  if (!p[key].is_number_integer()) throw ParameterError(std::string("parameter '") + key + "' must be an integer");
  return p[key].get<int>();
}

Vec vec(const Json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_array()) throw ParameterError(std::string("parameter '") + key + "' must be an array");
  const auto& a = p[key];
  Vec v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ParameterError(std::string("parameter '") + key + "' must hold numbers");
    v[i] = a[i].get<double>();
  }
  return v;
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

void check_dim(int n, int lo = 1, int hi = 8) {
  if (n < lo || n > hi) throw ParameterError("dimension " + std::to_string(n) + " not supported");
}

std::string fmt_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- shared latitude machinery ---------------------------------------------

// Maps (z sin t, cos t) -> (S z sin t', cos t') with t' = t'(t), S = sigma
// (negate z_1) when `reflect`.
struct LatitudeImage {
  double theta = 0.0;
  double dtheta = 0.0;
  bool reflect = false;
};

Vec latitude_value(const SpherePoint& x, const LatitudeImage& im) {
  const int n = x.dim();
  Vec out = Vec::Zero(n + 1);
  if (im.theta <= 0.0) {
    out[n] = 1.0;
    return out;
  }
  if (im.theta >= kPi) {
    out[n] = -1.0;
    return out;
  }
  Vec z = x.z_defined ? x.z : Vec(Vec::Unit(n, 0));
  if (im.reflect) z[0] = -z[0];
  out.head(n) = std::sin(im.theta) * z;
  out[n] = std::cos(im.theta);
  return out;
}

Mat latitude_jacobian(const SpherePoint& x, const LatitudeImage& im) {
  const int n = x.dim();
  Mat sigma = Mat::Identity(n, n);
  if (im.reflect) sigma(0, 0) = -1.0;
  Mat J = Mat::Zero(n + 1, n + 1);
  if (!x.z_defined) {
    if (im.dtheta == 0.0) return J;
    if (im.theta > 0.0 && im.theta < kPi)
      throw SingularPointError("latitude map: pole not sent to a pole, differential undefined");
    J.topLeftCorner(n, n) = std::abs(im.dtheta) * sigma;
    return J;
  }
  const Vec& z = x.z;
  Vec e_t(n + 1), e_img(n + 1);
  e_t.head(n) = std::cos(x.theta) * z;
  e_t[n] = -std::sin(x.theta);
  const Vec sz = sigma * z;
  e_img.head(n) = std::cos(im.theta) * sz;
  e_img[n] = -std::sin(im.theta);
  const double s = std::sin(im.theta) / std::sin(x.theta);
  J = im.dtheta * e_img * e_t.transpose();
  J.topLeftCorner(n, n) += s * sigma * (Mat::Identity(n, n) - z * z.transpose());
  return J;
}

}  // namespace

SingularLocus latitude_locus(const Vec& center, double radius) {
  SingularLocus l;
  l.kind = SingularLocus::Kind::latitude;
  l.center = center;
  l.radius = radius;
  l.evaluable = true;
  return l;
}

namespace {

SingularLocus latitude_locus(int n, double theta) {
  SingularLocus l;
  l.kind = SingularLocus::Kind::latitude;
  l.center = Vec::Zero(n + 1);
  l.center[n] = 1.0;
  l.radius = theta;
  l.evaluable = true;
  return l;
}

SingularLocus point_locus(const Vec& c, bool evaluable, bool blowup) {
  SingularLocus l;
  l.kind = SingularLocus::Kind::point;
  l.center = c;
  l.evaluable = evaluable;
  l.blowup = blowup;
  return l;
}

SingularLocus sphere_locus(const Vec& c, double r, bool evaluable, bool blowup) {
  SingularLocus l;
  l.kind = SingularLocus::Kind::sphere;
  l.center = c;
  l.radius = r;
  l.evaluable = evaluable;
  l.blowup = blowup;
  return l;
}

Vec north(int n) {
  Vec v = Vec::Zero(n + 1);
  v[n] = 1.0;
  return v;
}

bool centred_at(const Region& r, const Vec& c) {
  return !r.is_spherical() && r.center.size() == c.size() && (r.center - c).norm() <= 1e-12;
}

// ---- implementations --------------------------------------------------------

class LinearSphereImpl final : public MapImpl {
 public:
  explicit LinearSphereImpl(Mat q) : q_(std::move(q)) {}
  Vec value(const Point& x) const override {
    Vec y = q_ * sp(x).ambient;
    return y / y.norm();
  }
  std::optional<Mat> ambient_jacobian(const Point&) const override { return q_; }
  bool analytic() const override { return true; }

 private:
  Mat q_;
};

class LinearEuclidImpl final : public MapImpl {
 public:
  explicit LinearEuclidImpl(Mat a) : a_(std::move(a)) {}
  Vec value(const Point& x) const override { return a_ * ev(x); }
  std::optional<Mat> ambient_jacobian(const Point&) const override { return a_; }
  bool analytic() const override { return true; }

 private:
  Mat a_;
};

class PowerMapImpl final : public MapImpl {
 public:
  explicit PowerMapImpl(int k) : k_(k) {}
  Vec value(const Point& x) const override {
    const SpherePoint& p = sp(x);
    if (!p.z_defined) return p.ambient;
    const double phi = std::atan2(p.z[1], p.z[0]);
    const double s = std::sin(p.theta);
    Vec y(3);
    y << s * std::cos(k_ * phi), s * std::sin(k_ * phi), p.ambient[2];
    return y;
  }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const SpherePoint& p = sp(x);
    if (!p.z_defined) {
      if (k_ == 1) return Mat(Mat::Identity(3, 3));
      throw SingularPointError("power_map: differential undefined at the poles");
    }
    const double phi = std::atan2(p.z[1], p.z[0]);
    const double ct = std::cos(p.theta), st = std::sin(p.theta);
    Vec et(3), ep(3), et2(3), ep2(3);
    et << ct * std::cos(phi), ct * std::sin(phi), -st;
    ep << -std::sin(phi), std::cos(phi), 0.0;
    et2 << ct * std::cos(k_ * phi), ct * std::sin(k_ * phi), -st;
    ep2 << -std::sin(k_ * phi), std::cos(k_ * phi), 0.0;
    return Mat(et2 * et.transpose() + k_ * ep2 * ep.transpose());
  }
  bool analytic() const override { return true; }

 private:
  int k_;
};

class RadialStretchImpl final : public MapImpl {
 public:
  explicit RadialStretchImpl(double eps) : eps_(eps) {}
  Vec value(const Point& x) const override {
    const Vec& v = ev(x);
    const double r = v.norm();
    if (r == 0.0) return v;
    return std::pow(r, eps_ - 1.0) * v;
  }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const Vec& v = ev(x);
    const double r = v.norm();
    const int n = static_cast<int>(v.size());
    if (r == 0.0) {
      if (eps_ == 1.0) return Mat(Mat::Identity(n, n));
      throw SingularPointError("radial_stretch: differential undefined at the origin");
    }
    const Vec u = v / r;
    return Mat(std::pow(r, eps_ - 1.0) * (Mat::Identity(n, n) + (eps_ - 1.0) * u * u.transpose()));
  }
  bool analytic() const override { return true; }
  std::optional<double> energy_tail(const Region& r, double p, double delta) const override {
    if (!centred_at(r, Vec::Zero(r.dim)) || r.kind != RegionKind::euclidean_ball) return std::nullopt;
    const int n = r.dim;
    const double e = p * (eps_ - 1.0) + n;
    if (e <= 0.0) return std::nullopt;
    return n * omega(n) * std::pow(delta, e) / e;
  }

 private:
  double eps_;
};

double loglog(double r) { return std::log(std::abs(std::log(r))); }

class LogLogImpl final : public MapImpl {
 public:
  Vec value(const Point& x) const override { return Vec::Constant(1, loglog(ev(x).norm())); }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const Vec& v = ev(x);
    const double r = v.norm();
    if (r == 0.0 || r == 1.0) throw SingularPointError("loglog_scalar: singular point");
    return Mat((v / (r * r * std::log(r))).transpose());
  }
  bool analytic() const override { return true; }
  std::optional<double> energy_tail(const Region& r, double p, double delta) const override {
    if (!centred_at(r, Vec::Zero(r.dim)) || r.kind != RegionKind::euclidean_ball) return std::nullopt;
    const int n = r.dim;
    if (p != n) return std::nullopt;
    return n * omega(n) * std::pow(std::abs(std::log(delta)), 1.0 - n) / (n - 1.0);
  }
};

class DenseImpl final : public MapImpl {
 public:
  DenseImpl(std::vector<Vec> c, std::vector<double> w, double s) : c_(std::move(c)), w_(std::move(w)), s_(s) {}
  Vec value(const Point& x) const override {
    const Vec& v = ev(x);
    double f = 0.0;
    for (std::size_t j = 0; j < c_.size(); ++j) {
      const double r = (v - c_[j]).norm();
      if (r < s_ / kE) f += w_[j] * std::log(std::log(s_ / r));
    }
    return Vec::Constant(1, f);
  }

 private:
  std::vector<Vec> c_;
  std::vector<double> w_;
  double s_;
};

class GraphEmbedImpl final : public MapImpl {
 public:
  Vec value(const Point& x) const override {
    const Vec& v = ev(x);
    Vec y(v.size() + 1);
    y.head(v.size()) = v;
    y[v.size()] = loglog(v.norm());
    return y;
  }
};

class LatitudeImpl : public MapImpl {
 public:
  virtual LatitudeImage image(const SpherePoint& p) const = 0;
  Vec value(const Point& x) const override { return latitude_value(sp(x), image(sp(x))); }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    return latitude_jacobian(sp(x), image(sp(x)));
  }
  bool analytic() const override { return true; }
};

// f_alpha^beta on the slice, constant (a pole) outside it.
class SliceStretchImpl final : public LatitudeImpl {
 public:
  SliceStretchImpl(double a, double b, bool reflected) : a_(a), b_(b), reflected_(reflected), c_(kPi / (b - a)) {}
  LatitudeImage image(const SpherePoint& p) const override { return slice_image(p.theta, a_, b_, c_, reflected_); }

  static LatitudeImage slice_image(double t, double a, double b, double c, bool reflected) {
    LatitudeImage im;
    im.reflect = reflected;
    if (t < a) {
      im.theta = reflected ? kPi : 0.0;
    } else if (t > b) {
      im.theta = reflected ? 0.0 : kPi;
    } else if (reflected) {
      im.theta = std::clamp((b - t) * c, 0.0, kPi);
      im.dtheta = -c;
    } else {
      im.theta = std::clamp((t - a) * c, 0.0, kPi);
      im.dtheta = c;
    }
    return im;
  }

 private:
  double a_, b_;
  bool reflected_;
  double c_;
};

class HimoImpl final : public LatitudeImpl {
 public:
  LatitudeImage image(const SpherePoint& p) const override {
    if (p.theta <= 0.0) throw SingularPointError("himo_counterexample: discontinuous at the north pole");
    int k = 1;
    while (k < 60 && schedule_theta(k) > p.theta) ++k;
    const double a = schedule_theta(k), b = schedule_theta(k - 1);
    return SliceStretchImpl::slice_image(p.theta, a, b, kPi / (b - a), k % 2 == 0);
  }
};

class CapFoldImpl final : public LatitudeImpl {
 public:
  explicit CapFoldImpl(double rho) : rho_(rho) {}
  LatitudeImage image(const SpherePoint& p) const override {
    LatitudeImage im;
    const double s = std::sin(p.theta);
    im.theta = rho_ * s * s;
    im.dtheta = 2.0 * rho_ * s * std::cos(p.theta);
    if (!p.z_defined) im.dtheta = 0.0;
    return im;
  }

 private:
  double rho_;
};

class RadialRetractionImpl final : public MapImpl {
 public:
  RadialRetractionImpl(Vec c, double rho) : c_(std::move(c)), rho_(rho) {}
  Vec value(const Point& x) const override {
    const Vec d = ev(x) - c_;
    const double r = d.norm();
    if (r <= rho_) return ev(x);
    return c_ + (rho_ / r) * d;
  }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const Vec d = ev(x) - c_;
    const double r = d.norm();
    const int n = static_cast<int>(d.size());
    if (r <= rho_) return Mat(Mat::Identity(n, n));
    const Vec u = d / r;
    return Mat((rho_ / r) * (Mat::Identity(n, n) - u * u.transpose()));
  }
  bool analytic() const override { return true; }

 private:
  Vec c_;
  double rho_;
};

class MobiusImpl final : public MapImpl {
 public:
  explicit MobiusImpl(std::complex<double> a) : a_(a) {}
  Vec value(const Point& x) const override {
    const Vec& p = sp(x).ambient;
    const std::complex<double> w(p[0] / (1.0 - p[2]), p[1] / (1.0 - p[2]));
    return inverse_stereo(phi(w));
  }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const Vec& p = sp(x).ambient;
    const double m = 1.0 - p[2];
    if (m == 0.0) throw SingularPointError("mobius: projection pole");
    const std::complex<double> w(p[0] / m, p[1] / m);
    Mat ds(2, 3);
    ds << 1.0 / m, 0.0, p[0] / (m * m), 0.0, 1.0 / m, p[1] / (m * m);
    const std::complex<double> den = 1.0 - std::conj(a_) * w;
    if (std::abs(den) == 0.0) throw SingularPointError("mobius: preimage of the projection pole");
    const std::complex<double> d = (1.0 - std::norm(a_)) / (den * den);
    Mat dphi(2, 2);
    dphi << d.real(), -d.imag(), d.imag(), d.real();
    const std::complex<double> v = phi(w);
    const double u1 = v.real(), u2 = v.imag(), s = std::norm(v) + 1.0;
    Mat dinv(3, 2);
    dinv << 2.0 / s - 4.0 * u1 * u1 / (s * s), -4.0 * u1 * u2 / (s * s), -4.0 * u1 * u2 / (s * s),
        2.0 / s - 4.0 * u2 * u2 / (s * s), 4.0 * u1 / (s * s), 4.0 * u2 / (s * s);
    return Mat(dinv * dphi * ds);
  }
  bool analytic() const override { return true; }

  static Vec inverse_stereo(std::complex<double> w) {
    const double s = std::norm(w) + 1.0;
    Vec y(3);
    y << 2.0 * w.real() / s, 2.0 * w.imag() / s, (std::norm(w) - 1.0) / s;
    return y;
  }

 private:
  std::complex<double> phi(std::complex<double> w) const { return (w - a_) / (1.0 - std::conj(a_) * w); }
  std::complex<double> a_;
};

class ComposedImpl final : public MapImpl {
 public:
  ComposedImpl(MapField outer, MapField inner) : outer_(std::move(outer)), inner_(std::move(inner)) {}
  Vec value(const Point& x) const override { return outer_.evaluate(bridge(inner_.value(x))); }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    if (!analytic()) return std::nullopt;
    auto ji = inner_.ambient_jacobian(x);
    auto jo = outer_.ambient_jacobian(bridge(inner_.value(x)));
    if (!ji || !jo) return std::nullopt;
    return Mat(*jo * *ji);
  }
  bool analytic() const override { return outer_.has_analytic_differential() && inner_.has_analytic_differential(); }

 private:
  Point bridge(const Vec& y) const {
    if (outer_.sphere_domain()) return SpherePoint::from_ambient(y / y.norm());
    return y;
  }
  MapField outer_, inner_;
};

class ExpChartImpl final : public MapImpl {
 public:
  ExpChartImpl(Vec p) : p_(std::move(p)), t_(tangent_frame(p_)) {}
  Vec value(const Point& x) const override {
    const Vec& u = ev(x);
    const double r = u.norm();
    if (r == 0.0) return p_;
    Vec y = std::cos(r) * p_ + (std::sin(r) / r) * (t_ * u);
    return y / y.norm();
  }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const Vec& u = ev(x);
    const double r = u.norm();
    const int n = static_cast<int>(u.size());
    if (r == 0.0) return t_;
    const Vec uh = u / r;
    const Mat P = uh * uh.transpose();
    const double sinc = std::sin(r) / r;
    return Mat(-std::sin(r) * p_ * uh.transpose() +
               t_ * (std::cos(r) * P + sinc * (Mat::Identity(n, n) - P)));
  }
  bool analytic() const override { return true; }

 private:
  Vec p_;
  Mat t_;
};

class RadialJumpImpl final : public MapImpl {
 public:
  RadialJumpImpl(double r, double a, double b) : r_(r), a_(a), b_(b) {}
  Vec value(const Point& x) const override { return (ev(x).norm() < r_ ? a_ : b_) * ev(x); }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const int n = static_cast<int>(ev(x).size());
    return Mat((ev(x).norm() < r_ ? a_ : b_) * Mat::Identity(n, n));
  }
  bool analytic() const override { return true; }

 private:
  double r_, a_, b_;
};

class HeightImpl final : public MapImpl {
 public:
  HeightImpl(Vec a, double b, bool sphere) : a_(std::move(a)), b_(b), sphere_(sphere) {}
  Vec value(const Point& x) const override {
    const Vec& v = sphere_ ? sp(x).ambient : ev(x);
    return Vec::Constant(1, a_.dot(v) + b_);
  }
  std::optional<Mat> ambient_jacobian(const Point&) const override { return Mat(a_.transpose()); }
  bool analytic() const override { return true; }

 private:
  Vec a_;
  double b_;
  bool sphere_;
};

class AngularProfileImpl final : public MapImpl {
 public:
  AngularProfileImpl(bool bump, std::vector<double> c) : bump_(bump), c_(std::move(c)) {}
  Vec value(const Point& x) const override {
    const Vec& v = ev(x);
    return Vec::Constant(1, f(std::atan2(v[1], v[0])));
  }
  std::optional<Mat> ambient_jacobian(const Point& x) const override {
    const Vec& v = ev(x);
    const double r2 = v.squaredNorm();
    const double d = df(std::atan2(v[1], v[0]));
    Mat J(1, 2);
    J << -d * v[1] / r2, d * v[0] / r2;
    return J;
  }
  bool analytic() const override { return true; }
  void refine_options(const Region& r, QuadratureOptions& o) const override {
    if (!bump_ || !centred_at(r, Vec::Zero(2))) return;
    const double a = c_[0];
    if (a > 0.0) o.angle_breaks.insert(o.angle_breaks.end(), {a, 2.0 * kPi - a, kPi});
    else o.angle_breaks.insert(o.angle_breaks.end(), {0.0, kPi});
  }

 private:
  double f(double phi) const {
    if (bump_) {
      const double a = c_[0], t = std::abs(phi);
      return t <= a ? 1.0 : (kPi - t) / (kPi - a);
    }
    double s = c_.empty() ? 0.0 : c_[0];
    for (std::size_t i = 1; i < c_.size(); i += 2) {
      const int k = static_cast<int>((i + 1) / 2);
      s += c_[i] * std::cos(k * phi);
      if (i + 1 < c_.size()) s += c_[i + 1] * std::sin(k * phi);
    }
    return s;
  }
  double df(double phi) const {
    if (bump_) {
      const double a = c_[0], t = std::abs(phi);
      if (t <= a) return 0.0;
      return (phi > 0 ? -1.0 : 1.0) / (kPi - a);
    }
    double s = 0.0;
    for (std::size_t i = 1; i < c_.size(); i += 2) {
      const int k = static_cast<int>((i + 1) / 2);
      s -= k * c_[i] * std::sin(k * phi);
      if (i + 1 < c_.size()) s += k * c_[i + 1] * std::cos(k * phi);
    }
    return s;
  }
  bool bump_;
  std::vector<double> c_;
};

// ---- construction -----------------------------------------------------------

MapField build(const std::string& family, Json p);

MapField finish(const std::string& family, Json p, Region domain, TargetSpec target,
                std::vector<SingularLocus> singular, std::shared_ptr<const MapImpl> impl) {
  return MapField(family, std::move(p), std::move(domain), std::move(target), std::move(singular), std::move(impl));
}

Mat givens_product(int n, const Json& list) {
  Mat q = Mat::Identity(n + 1, n + 1);
  if (!list.is_array()) throw ParameterError("rotation: 'givens' must be an array of [i, j, angle]");
  for (const auto& g : list) {
    if (!g.is_array() || g.size() != 3) throw ParameterError("rotation: each entry is [i, j, angle]");
    const int i = g[0].get<int>(), j = g[1].get<int>();
    const double t = g[2].get<double>();
    if (i < 0 || j < 0 || i > n || j > n || i == j) throw ParameterError("rotation: axis indices out of range");
    Mat r = Mat::Identity(n + 1, n + 1);
    r(i, i) = std::cos(t);
    r(j, j) = std::cos(t);
    r(i, j) = -std::sin(t);
    r(j, i) = std::sin(t);
    q = r * q;
  }
  return q;
}

MapField build(const std::string& family, Json p) {
  if (p.is_null()) p = Json::object();
  if (!p.is_object()) throw ParameterError("map parameters must be a JSON object");

  if (family == "identity") {
    const int n = integer(p, "n", 2);
    check_dim(n);
    if (!p.contains("domain")) p["domain"] = "sphere";
    const std::string dom = p["domain"].get<std::string>();
    if (dom == "sphere")
      return finish(family, p, Region::whole_sphere(n), TargetSpec::unit_sphere(n), {},
                    std::make_shared<LinearSphereImpl>(Mat::Identity(n + 1, n + 1)));
    if (dom == "ball") {
      const double R = num(p, "radius", 1.0);
      if (!(R > 0)) throw ParameterError("identity: radius must be positive");
      return finish(family, p, Region::ball(Vec::Zero(n), R), TargetSpec::euclidean(n), {},
                    std::make_shared<LinearEuclidImpl>(Mat::Identity(n, n)));
    }
    throw ParameterError("identity: domain must be 'sphere' or 'ball'");
  }
  if (family == "rotation") {
    const int n = integer(p, "n", 2);
    check_dim(n);
    if (!p.contains("givens")) p["givens"] = Json::array();
    return finish(family, p, Region::whole_sphere(n), TargetSpec::unit_sphere(n), {},
                  std::make_shared<LinearSphereImpl>(givens_product(n, p["givens"])));
  }
  if (family == "reflection") {
    const int n = integer(p, "n", 2);
    check_dim(n);
    const int axis = integer(p, "axis", 0);
    if (axis < 0 || axis > n) throw ParameterError("reflection: axis out of range");
    Mat q = Mat::Identity(n + 1, n + 1);
    q(axis, axis) = -1.0;
    return finish(family, p, Region::whole_sphere(n), TargetSpec::unit_sphere(n), {},
                  std::make_shared<LinearSphereImpl>(q));
  }
  if (family == "power_map") {
    const int k = integer(p, "k");
    if (k < 1) throw ParameterError("power_map: k must be a positive integer");
    std::vector<SingularLocus> s;
    if (k > 1) {
      s.push_back(point_locus(north(2), true, false));
      s.push_back(point_locus(-north(2), true, false));
    }
    return finish(family, p, Region::whole_sphere(2), TargetSpec::unit_sphere(2), s,
                  std::make_shared<PowerMapImpl>(k));
  }
  if (family == "radial_stretch") {
    const int n = integer(p, "n", 2);
    check_dim(n, 2);
    const double eps = num(p, "eps");
    const double R = num(p, "radius", 1.0);
    if (!(eps > 0.0 && eps <= 1.0)) throw ParameterError("radial_stretch: eps must lie in (0, 1]");
    if (!(R > 0)) throw ParameterError("radial_stretch: radius must be positive");
    std::vector<SingularLocus> s;
    if (eps < 1.0) s.push_back(point_locus(Vec::Zero(n), true, true));
    return finish(family, p, Region::ball(Vec::Zero(n), R), TargetSpec::euclidean(n), s,
                  std::make_shared<RadialStretchImpl>(eps));
  }
  if (family == "loglog_scalar" || family == "graph_embed") {
    const int n = integer(p, "n", 2);
    check_dim(n, 2);
    const double R = num(p, "radius", 1.0 / kE);
    if (!(R > 0.0 && R < 1.0)) throw ParameterError(family + ": radius must lie in (0, 1)");
    std::vector<SingularLocus> s{point_locus(Vec::Zero(n), false, true)};
    if (family == "loglog_scalar")
      return finish(family, p, Region::ball(Vec::Zero(n), R), TargetSpec::euclidean(1), s,
                    std::make_shared<LogLogImpl>());
    GraphProfile prof;
    prof.name = "loglog";
    prof.value = [](const Vec& x) { return loglog(x.norm()); };
    prof.gradient = [](const Vec& x) {
      const double r = x.norm();
      return Vec(x / (r * r * std::log(r)));
    };
    return finish(family, p, Region::ball(Vec::Zero(n), R), TargetSpec::graph_manifold(n, prof), s,
                  std::make_shared<GraphEmbedImpl>());
  }
  if (family == "dense_singularities") {
    const int n = integer(p, "n", 2);
    check_dim(n, 2);
    const double R = num(p, "radius", 1.0);
    const double scale = num(p, "scale", 0.25);
    if (!(R > 0) || !(scale > 0.0 && scale < 1.0)) throw ParameterError("dense_singularities: need radius > 0, 0 < scale < 1");
    std::vector<Vec> centers;
    std::vector<double> weights;
    if (p.contains("centers")) {
      for (const auto& c : p["centers"]) {
        Json tmp{{"c", c}};
        Vec v = vec(tmp, "c");
        if (v.size() != n) throw ParameterError("dense_singularities: centre dimension mismatch");
        centers.push_back(v);
      }
    } else {
      const int count = integer(p, "count", 8);
      if (count < 1 || count > 4096) throw ParameterError("dense_singularities: count outside [1, 4096]");
      for (const Point& q : sample_region(Region::ball(Vec::Zero(n), R), count, 0)) centers.push_back(std::get<Vec>(q));
    }
    if (p.contains("weights")) {
      Json tmp{{"w", p["weights"]}};
      const Vec w = vec(tmp, "w");
      if (w.size() != static_cast<int>(centers.size())) throw ParameterError("dense_singularities: one weight per centre");
      weights.assign(w.data(), w.data() + w.size());
    } else {
      for (std::size_t j = 0; j < centers.size(); ++j) weights.push_back(std::ldexp(1.0, -static_cast<int>(j + 1)));
    }
    std::vector<SingularLocus> s;
    for (const Vec& c : centers) {
      s.push_back(point_locus(c, false, true));
      s.push_back(sphere_locus(c, scale / kE, true, false));
    }
    return finish(family, p, Region::ball(Vec::Zero(n), R), TargetSpec::euclidean(1), s,
                  std::make_shared<DenseImpl>(centers, weights, scale));
  }
  if (family == "slice_stretch" || family == "slice_stretch_reflected") {
    const int n = integer(p, "n", 2);
    check_dim(n, 2);
    const double a = num(p, "alpha"), b = num(p, "beta");
    if (!(a >= 0.0 && a < b && b <= kPi)) throw ParameterError(family + ": need 0 <= alpha < beta <= pi");
    std::vector<SingularLocus> s;
    if (a > 0.0) s.push_back(latitude_locus(n, a));
    if (b < kPi) s.push_back(latitude_locus(n, b));
    return finish(family, p, Region::whole_sphere(n), TargetSpec::unit_sphere(n), s,
                  std::make_shared<SliceStretchImpl>(a, b, family == "slice_stretch_reflected"));
  }
  if (family == "himo_counterexample") {
    const int n = integer(p, "n", 2);
    check_dim(n, 2);
    const int k_max = integer(p, "k_max", 6);
    if (k_max < 1 || k_max > 8) throw ParameterError("himo_counterexample: k_max must lie in [1, 8]");
    std::vector<SingularLocus> s{point_locus(north(n), false, false)};
    for (int k = 1; k <= kScheduleDepth; ++k) s.push_back(latitude_locus(n, schedule_theta(k)));
    return finish(family, p, Region::whole_sphere(n), TargetSpec::unit_sphere(n), s, std::make_shared<HimoImpl>())
        .with_unresolved_cap(schedule_theta(k_max));
  }
  if (family == "euclidean_radial_retraction") {
    const Vec c = vec(p, "center");
    check_dim(static_cast<int>(c.size()), 1);
    const double rho = num(p, "radius");
    if (!(rho > 0.0)) throw ParameterError("euclidean_radial_retraction: radius must be positive");
    const double dom = num(p, "domain_radius", 4.0 * rho);
    if (!(dom > 0.0)) throw ParameterError("euclidean_radial_retraction: domain radius must be positive");
    const int n = static_cast<int>(c.size());
    return finish(family, p, Region::ball(c, dom), TargetSpec::euclidean(n), {sphere_locus(c, rho, true, false)},
                  std::make_shared<RadialRetractionImpl>(c, rho));
  }
  if (family == "mobius") {
    const std::complex<double> a(num(p, "a_re", 0.0), num(p, "a_im", 0.0));
    if (!(std::abs(a) < 1.0)) throw ParameterError("mobius: need |a| < 1");
    std::vector<SingularLocus> s{point_locus(north(2), false, false)};
    if (std::abs(a) > 0.0) s.push_back(point_locus(MobiusImpl::inverse_stereo(1.0 / std::conj(a)), false, false));
    return finish(family, p, Region::whole_sphere(2), TargetSpec::unit_sphere(2), s, std::make_shared<MobiusImpl>(a));
  }
  if (family == "composed") {
    if (!p.contains("outer") || !p.contains("inner")) throw ParameterError("composed: need 'outer' and 'inner'");
    MapField outer = make_map(p["outer"]);
    MapField inner = make_map(p["inner"]);
    p["outer"] = outer.descriptor();
    p["inner"] = inner.descriptor();
    if (inner.target().ambient_dim() != outer.domain_ambient_dim())
      throw ParameterError("composed: inner target does not match outer domain");
    Region dom = inner.domain();
    TargetSpec tgt = outer.target();
    auto singular = inner.singular_set();
    if (inner.family() == "exp_chart") {
      // Pull the outer loci back through the chart.
      const Vec c = vec(inner.params(), "p");
      const double R = inner.domain().outer;
      const int n = inner.domain_dim();
      const Mat basis = tangent_frame(c);
      for (const SingularLocus& l : outer.singular_set()) {
        if (l.kind == SingularLocus::Kind::latitude && geodesic_distance(c, l.center) <= 1e-12 && l.radius < R) {
          singular.push_back(sphere_locus(Vec::Zero(n), l.radius, l.evaluable, l.blowup));
        } else if (l.kind == SingularLocus::Kind::point && geodesic_distance(c, l.center) < R) {
          singular.push_back(point_locus(Vec(basis.transpose() * log_map(c, l.center)), l.evaluable, l.blowup));
        }
      }
    }
    MapField m = finish(family, p, dom, tgt, singular, std::make_shared<ComposedImpl>(outer, inner));
    for (const auto& [c, r] : inner.excluded_caps()) m = m.with_excluded_cap(c, r);
    if (inner.unresolved_cap()) m = m.with_unresolved_cap(*inner.unresolved_cap());
    return m;
  }
  if (family == "exp_chart") {
    const Vec q = vec(p, "p");
    if (q.size() < 3 || std::abs(q.norm() - 1.0) > 1e-10) throw ParameterError("exp_chart: p must be a unit vector of R^{n+1}, n >= 2");
    const double R = num(p, "radius");
    if (!(R > 0.0 && R < kPi)) throw ParameterError("exp_chart: radius must lie in (0, pi)");
    const int n = static_cast<int>(q.size()) - 1;
    return finish(family, p, Region::ball(Vec::Zero(n), R), TargetSpec::unit_sphere(n), {},
                  std::make_shared<ExpChartImpl>(q));
  }
  if (family == "cap_fold") {
    const int n = integer(p, "n", 2);
    check_dim(n, 2);
    const double rho = num(p, "rho", kPi / 4);
    if (!(rho > 0.0 && rho < kPi)) throw ParameterError("cap_fold: rho must lie in (0, pi)");
    return finish(family, p, Region::whole_sphere(n), TargetSpec::unit_sphere(n), {},
                  std::make_shared<CapFoldImpl>(rho));
  }
  if (family == "radial_jump") {
    const int n = integer(p, "n", 2);
    check_dim(n, 2);
    const double r = num(p, "r_jump", 0.5), a = num(p, "inner_scale", 1.5), b = num(p, "outer_scale", 0.5);
    if (!(r > 0.0 && r < 1.0) || !(a > 0.0) || !(b > 0.0)) throw ParameterError("radial_jump: need 0 < r_jump < 1 and positive scales");
    return finish(family, p, Region::ball(Vec::Zero(n), 1.0), TargetSpec::euclidean(n),
                  {sphere_locus(Vec::Zero(n), r, true, false)}, std::make_shared<RadialJumpImpl>(r, a, b));
  }
  if (family == "height") {
    const Vec a = vec(p, "a");
    const double b = num(p, "b", 0.0);
    if (!p.contains("domain")) p["domain"] = "ball";
    const bool sphere = p["domain"].get<std::string>() == "sphere";
    if (!sphere && p["domain"].get<std::string>() != "ball") throw ParameterError("height: domain must be 'sphere' or 'ball'");
    const int n = static_cast<int>(a.size()) - (sphere ? 1 : 0);
    check_dim(n, 1);
    Region dom = sphere ? Region::whole_sphere(n) : Region::ball(Vec::Zero(n), num(p, "radius", 1.0));
    return finish(family, p, dom, TargetSpec::euclidean(1), {}, std::make_shared<HeightImpl>(a, b, sphere));
  }
  if (family == "angular_profile") {
    if (!p.contains("kind")) p["kind"] = "trig";
    const std::string kind = p["kind"].get<std::string>();
    if (kind != "trig" && kind != "cap_bump") throw ParameterError("angular_profile: kind must be 'trig' or 'cap_bump'");
    Json tmp{{"c", p.value("coeffs", Json::array())}};
    const Vec c = vec(tmp, "c");
    p["coeffs"] = tmp["c"];
    if (kind == "cap_bump" && (c.size() != 1 || !(c[0] >= 0.0 && c[0] < kPi)))
      throw ParameterError("angular_profile: cap_bump takes one plateau half-width in [0, pi)");
    const double r_in = num(p, "r_in", 0.05), r_out = num(p, "r_out", 4.0);
    if (!(r_in > 0.0 && r_in < r_out)) throw ParameterError("angular_profile: need 0 < r_in < r_out");
    return finish(family, p, Region::annulus(Vec::Zero(2), r_in, r_out), TargetSpec::euclidean(1),
                  {point_locus(Vec::Zero(2), false, false)},
                  std::make_shared<AngularProfileImpl>(kind == "cap_bump", std::vector<double>(c.data(), c.data() + c.size())));
  }
  if (family == "sphere_retraction") {
    RetractionSpec spec;
    spec.p = vec(p, "p");
    spec.q = vec(p, "q");
    spec.d = num(p, "d");
    spec.r_prime = num(p, "r_prime");
    return build_retraction(spec);
  }
  throw ParameterError("unknown map family '" + family + "'");
}

}  // namespace

double schedule_theta(int k) {
  if (k < 0) throw DomainError("schedule_theta: negative index");
  return std::ldexp(kPi, -k * k);
}

std::vector<std::string> family_names() {
  return {"identity",       "rotation",         "reflection",   "power_map",
          "radial_stretch", "loglog_scalar",    "dense_singularities", "graph_embed",
          "slice_stretch",  "slice_stretch_reflected", "himo_counterexample", "euclidean_radial_retraction",
          "mobius",         "composed",         "exp_chart",    "cap_fold",
          "radial_jump",    "height",           "angular_profile", "sphere_retraction"};
}

MapField make_map(const std::string& family, const Json& params) { return build(family, params); }

MapField make_map(const Json& descriptor) {
  if (!descriptor.is_object() || !descriptor.contains("family"))
    throw ParameterError("map descriptor needs a 'family' field");
  return build(descriptor["family"].get<std::string>(), descriptor.value("params", Json::object()));
}

// ---- MapField ---------------------------------------------------------------

MapField::MapField(std::string family, Json params, Region domain, TargetSpec target,
                   std::vector<SingularLocus> singular, std::shared_ptr<const MapImpl> impl)
    : family_(std::move(family)),
      params_(std::move(params)),
      domain_(std::move(domain)),
      target_(std::move(target)),
      singular_(std::move(singular)),
      impl_(std::move(impl)) {}

Json MapField::descriptor() const { return Json{{"family", family_}, {"params", params_}}; }

std::string MapField::label() const {
  if (family_ == "composed") {
    return "composed(" + make_map(params_["outer"]).label() + ", " + make_map(params_["inner"]).label() + ")";
  }
  std::string s = family_ + "(";
  bool first = true;
  for (auto it = params_.begin(); it != params_.end(); ++it) {
    if (!first) s += ",";
    first = false;
    s += it.key() + "=";
    s += it.value().is_number() ? fmt_number(it.value().get<double>()) : it.value().dump();
  }
  return s + ")";
}

MapField MapField::with_excluded_cap(const Vec& center, double radius) const {
  if (!sphere_domain()) throw DomainError("excluded caps need a sphere domain");
  MapField m = *this;
  m.excluded_.emplace_back(center, radius);
  return m;
}

MapField MapField::with_unresolved_cap(double theta) const {
  MapField m = *this;
  m.unresolved_cap_ = theta;
  return m;
}

MapField MapField::with_breakpoints(std::vector<double> b) const {
  MapField m = *this;
  m.extra_breaks_.insert(m.extra_breaks_.end(), b.begin(), b.end());
  return m;
}

Point MapField::normalize(const Point& x) const {
  if (sphere_domain()) {
    if (const auto* s = std::get_if<SpherePoint>(&x)) {
      if (s->dim() != domain_.dim) throw DomainError(label() + ": point dimension mismatch");
      return *s;
    }
    const Vec& v = std::get<Vec>(x);
    if (v.size() != domain_.dim + 1) throw DomainError(label() + ": point dimension mismatch");
    return SpherePoint::from_ambient(v);
  }
  if (std::holds_alternative<SpherePoint>(x)) throw DomainError(label() + ": Euclidean domain given a sphere point");
  if (std::get<Vec>(x).size() != domain_.dim) throw DomainError(label() + ": point dimension mismatch");
  return x;
}

bool MapField::in_domain(const Point& x, double slack) const {
  Point p;
  try {
    p = normalize(x);
  } catch (const Error&) {
    return false;
  }
  if (sphere_domain()) {
    const SpherePoint& s = std::get<SpherePoint>(p);
    if (!domain_.contains(s, slack)) return false;
    for (const auto& [c, r] : excluded_)
      if (geodesic_distance(c, s.ambient) < r) return false;
    return true;
  }
  return domain_.contains(std::get<Vec>(p), slack);
}

double MapField::distance_to_singular(const Point& x, bool only_non_evaluable) const {
  const Point p = normalize(x);
  double best = kInf;
  for (const SingularLocus& l : singular_) {
    if (only_non_evaluable && l.evaluable) continue;
    double d = kInf;
    if (sphere_domain()) {
      const SpherePoint& s = std::get<SpherePoint>(p);
      if (l.kind == SingularLocus::Kind::latitude) {
        d = l.center[domain_.dim] == 1.0 ? std::abs(s.theta - l.radius)
                                         : std::abs(geodesic_distance(l.center, s.ambient) - l.radius);
      } else {
        const SpherePoint c = SpherePoint::from_ambient(l.center);
        d = geodesic_distance(c, s);
      }
    } else {
      const Vec& v = std::get<Vec>(p);
      if (l.kind == SingularLocus::Kind::point) d = (v - l.center).norm();
      else if (l.kind == SingularLocus::Kind::sphere) d = std::abs((v - l.center).norm() - l.radius);
    }
    best = std::min(best, d);
  }
  return best;
}

Vec MapField::evaluate(const Point& x) const {
  const Point p = normalize(x);
  if (!in_domain(p, 1e-12)) throw DomainError(label() + ": point outside the domain");
  if (distance_to_singular(p, true) == 0.0) throw SingularPointError(label() + ": evaluation on the singular set");
  Vec y = impl_->value(p);
  for (int i = 0; i < y.size(); ++i)
    if (!std::isfinite(y[i])) throw SingularPointError(label() + ": non-finite value");
  return y;
}

QuadratureOptions MapField::quadrature_options(const Region& region) const {
  QuadratureOptions o;
  auto add = [&o](double t, bool blowup) { (blowup ? o.singular : o.breakpoints).push_back(t); };
  if (region.is_spherical()) {
    const int n = region.dim;
    const bool north_c = region.kind == RegionKind::latitude_slice || region.center[n] == 1.0;
    const bool south_c = region.kind == RegionKind::geodesic_ball && region.center[n] == -1.0;
    for (const SingularLocus& l : singular_) {
      if (l.kind == SingularLocus::Kind::latitude) {
        const Vec c = region.kind == RegionKind::latitude_slice ? north(n) : region.center;
        const double d0 = geodesic_distance(c, l.center);
        if (d0 <= 1e-12) add(l.radius, l.blowup);
        else if (d0 >= kPi - 1e-12) add(kPi - l.radius, l.blowup);
      } else if (l.kind == SingularLocus::Kind::point && l.center.size() == n + 1) {
        const double t = region.kind == RegionKind::latitude_slice
                             ? SpherePoint::from_ambient(l.center).theta
                             : geodesic_distance(region.center, l.center);
        add(t, l.blowup);
      }
    }
    for (double b : extra_breaks_) o.breakpoints.push_back(north_c ? b : south_c ? kPi - b : b);
  } else {
    for (const SingularLocus& l : singular_) {
      if (l.center.size() != region.center.size()) continue;
      const double d = (l.center - region.center).norm();
      if (l.kind == SingularLocus::Kind::point) {
        if (d <= 1e-12) add(0.0, l.blowup);
        else o.breakpoints.push_back(d);
      } else if (l.kind == SingularLocus::Kind::sphere && d <= 1e-12) {
        add(l.radius, l.blowup);
      }
    }
    o.breakpoints.insert(o.breakpoints.end(), extra_breaks_.begin(), extra_breaks_.end());
  }
  impl_->refine_options(region, o);
  return o;
}

// ---- typed factories --------------------------------------------------------

namespace zoo {

MapField identity_sphere(int n) { return make_map("identity", {{"n", n}, {"domain", "sphere"}}); }
MapField identity_ball(int n, double radius) {
  return make_map("identity", {{"n", n}, {"domain", "ball"}, {"radius", radius}});
}
MapField rotation(int n, const std::vector<std::tuple<int, int, double>>& givens) {
  Json g = Json::array();
  for (const auto& [i, j, t] : givens) g.push_back(Json::array({i, j, t}));
  return make_map("rotation", {{"n", n}, {"givens", g}});
}
MapField reflection(int n, int axis) { return make_map("reflection", {{"n", n}, {"axis", axis}}); }
MapField power_map(int k) { return make_map("power_map", {{"k", k}}); }
MapField radial_stretch(int n, double eps, double radius) {
  return make_map("radial_stretch", {{"n", n}, {"eps", eps}, {"radius", radius}});
}
MapField loglog_scalar(int n, double radius) { return make_map("loglog_scalar", {{"n", n}, {"radius", radius}}); }
MapField dense_singularities(int n, const std::vector<Vec>& centers, const std::vector<double>& weights, double scale,
                             double radius) {
  Json c = Json::array();
  for (const Vec& v : centers) c.push_back(to_json(v));
  return make_map("dense_singularities",
                  {{"n", n}, {"centers", c}, {"weights", weights}, {"scale", scale}, {"radius", radius}});
}
MapField dense_singularities(int n, int count, double scale, double radius) {
  return make_map("dense_singularities", {{"n", n}, {"count", count}, {"scale", scale}, {"radius", radius}});
}
MapField graph_embed(int n, double radius) { return make_map("graph_embed", {{"n", n}, {"radius", radius}}); }
MapField slice_stretch(int n, double alpha, double beta) {
  return make_map("slice_stretch", {{"n", n}, {"alpha", alpha}, {"beta", beta}});
}
MapField slice_stretch_reflected(int n, double alpha, double beta) {
  return make_map("slice_stretch_reflected", {{"n", n}, {"alpha", alpha}, {"beta", beta}});
}
MapField himo_counterexample(int n, int k_max) { return make_map("himo_counterexample", {{"n", n}, {"k_max", k_max}}); }
MapField euclidean_radial_retraction(const Vec& center, double radius, double domain_radius) {
  Json p{{"center", to_json(center)}, {"radius", radius}};
  if (domain_radius > 0.0) p["domain_radius"] = domain_radius;
  return make_map("euclidean_radial_retraction", p);
}
MapField mobius(double a_re, double a_im) { return make_map("mobius", {{"a_re", a_re}, {"a_im", a_im}}); }
MapField composed(const MapField& outer, const MapField& inner) {
  return make_map("composed", {{"outer", outer.descriptor()}, {"inner", inner.descriptor()}});
}
MapField exp_chart(const Vec& p, double radius) { return make_map("exp_chart", {{"p", to_json(p)}, {"radius", radius}}); }
MapField cap_fold(int n, double rho) { return make_map("cap_fold", {{"n", n}, {"rho", rho}}); }
MapField radial_jump(int n, double r_jump, double inner_scale, double outer_scale) {
  return make_map("radial_jump",
                  {{"n", n}, {"r_jump", r_jump}, {"inner_scale", inner_scale}, {"outer_scale", outer_scale}});
}
MapField height(const Vec& a, double b, bool sphere_domain, double radius) {
  Json p{{"a", to_json(a)}, {"b", b}, {"domain", sphere_domain ? "sphere" : "ball"}};
  if (!sphere_domain) p["radius"] = radius;
  return make_map("height", p);
}
MapField angular_profile(const std::string& kind, const std::vector<double>& coeffs, double r_in, double r_out) {
  return make_map("angular_profile", {{"kind", kind}, {"coeffs", coeffs}, {"r_in", r_in}, {"r_out", r_out}});
}

}  // namespace zoo

}  // namespace finidist
