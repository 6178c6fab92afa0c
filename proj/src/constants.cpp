#include "finidist/errors.hpp"
#include "finidist/estimates.hpp"

#include <cmath>
#include <limits>

namespace finidist {

double morrey_constant(int n) {
  if (n < 2 || n > 8) throw ParameterError("morrey_constant: need 2 <= n <= 8");
  return (n - 1) * kPi / std::pow(n * omega(n), 1.0 / n);
}

ConstantsTable constants(int n, const TargetSpec& target) {
  ConstantsTable t;
  t.n = n;
  t.C_M = morrey_constant(n);
  t.six_CM_pow_n = std::pow(6.0 * t.C_M, n);
  t.d_N = target.injectivity_radius;
  if (std::isfinite(t.d_N)) {
    t.A_N = 0.5 * std::pow(t.d_N / (60.0 * t.C_M), n);
    t.B_N = target.kind == TargetKind::unit_sphere ? geodesic_ball_volume(target.dim, t.d_N / 10.0)
                                                   : omega(target.dim) * std::pow(t.d_N / 10.0, target.dim);
  } else {
    t.A_N = t.B_N = std::numeric_limits<double>::infinity();
  }
  return t;
}

}  // namespace finidist
