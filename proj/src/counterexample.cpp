#include "finidist/errors.hpp"
#include "finidist/estimates.hpp"

#include <cmath>

namespace finidist {

double orlicz_p(double t, int n) { return std::pow(t, n) / std::log(std::exp(1.0) + t); }

CounterexampleAudit counterexample_audit(int n, int k_max, int level, std::size_t osc_samples, std::uint64_t seed) {
  if (n < 2 || n > 3) throw ParameterError("counterexample_audit: need 2 <= n <= 3");
  if (k_max < 2 || k_max > 6) throw ParameterError("counterexample_audit: need 2 <= K_max <= 6");
  const MapField f = zoo::himo_counterexample(n, k_max);
  Vec north = Vec::Zero(n + 1);
  north[n] = 1.0;

  CounterexampleAudit audit;
  audit.n = n;
  audit.k_max = k_max;
  audit.level = level;
  double cum_e = 0.0, cum_p = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    SliceRow row;
    row.k = k;
    row.theta_lo = schedule_theta(k);
    row.theta_hi = schedule_theta(k - 1);
    row.volume = slice_volume_exact(n, row.theta_lo, row.theta_hi);
    row.volume_bound = slice_volume_bound(n, row.theta_lo, row.theta_hi);
    const Region slice = Region::slice(n, row.theta_lo, row.theta_hi);
    const auto j = integrate_over(f, slice, level, [](const PointwiseData& d) { return d.jac; });
    const auto e = integrate_over(f, slice, level, [n](const PointwiseData& d) { return std::pow(d.op_norm, n); });
    const auto p = integrate_over(f, slice, level, [n](const PointwiseData& d) { return orlicz_p(d.op_norm, n); });
    row.int_jacobian = j.value;
    row.int_energy = e.value;
    row.int_p = p.value;
    row.indicator = std::max({j.relative_indicator(), e.relative_indicator(), p.relative_indicator()});
    cum_e += e.value;
    cum_p += p.value;
    row.cum_energy = cum_e;
    row.cum_p = cum_p;
    row.oscillation =
        oscillation(f, Region::geodesic_ball(north, row.theta_lo), osc_samples, seed, OscMetric::ambient).diam_lower_bound;
    if (k >= 2) {
      audit.fitted_c = std::max(audit.fitted_c, row.int_p * (k - 1) * (k - 1));
      audit.harmonic_tail += 1.0 / ((k - 1.0) * (k - 1.0));
    }
    audit.rows.push_back(row);
  }
  return audit;
}

}  // namespace finidist
