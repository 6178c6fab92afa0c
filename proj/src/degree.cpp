#include "finidist/errors.hpp"
#include "finidist/estimates.hpp"

#include <cmath>

namespace finidist {

namespace {

void check_degree_map(const MapField& f) {
  const Region& d = f.domain();
  if (!f.sphere_domain() || d.kind != RegionKind::latitude_slice || d.inner != 0.0 || d.outer != kPi ||
      !f.excluded_caps().empty())
    throw PreconditionError(f.label() + ": degree needs a map defined on all of S^n");
  if (f.target().kind != TargetKind::unit_sphere || f.target().dim != f.domain_dim())
    throw PreconditionError(f.label() + ": degree needs a map into S^n");
}

DegreeResult from_integral(const MapField& f, const QuadratureEstimate& e) {
  DegreeResult r;
  r.integral = e;
  r.estimate = e.value / sphere_area(f.domain_dim() + 1, 1.0);
  r.nearest = std::llround(r.estimate);
  r.residual = std::abs(r.estimate - static_cast<double>(r.nearest));
  return r;
}

}  // namespace

DegreeResult degree(const MapField& f, int level) {
  check_degree_map(f);
  return from_integral(f, jacobian_integral(f, Region::whole_sphere(f.domain_dim()), level));
}

DegreeResult degree_adaptive(const MapField& f, const CheckOptions& o) {
  check_degree_map(f);
  const Region s = Region::whole_sphere(f.domain_dim());
  return from_integral(f, adaptive([&](int L) { return jacobian_integral(f, s, L); }, o, sphere_area(f.domain_dim() + 1, 1.0)));
}

VerificationReport verify_degree(const MapField& f, const CheckOptions& o, double residual_bound) {
  const DegreeResult d = degree_adaptive(f, o);
  VerificationReport rep;
  rep.name = "degree";
  rep.suite = "degree";
  rep.map = f.label();
  rep.params = {{"map", f.descriptor()}};
  rep.lhs = d.residual;
  rep.rhs = residual_bound;
  rep.tolerance = 0.0;
  rep.level = d.integral.resolution;
  rep.error_indicator = d.integral.error_indicator;
  rep.decide();
  rep.details = {{"estimate", d.estimate},
                 {"nearest", d.nearest},
                 {"integral", d.integral.value},
                 {"relative_indicator", d.integral.relative_indicator()}};
  return rep;
}

}  // namespace finidist
