#pragma once

// Constants, sampled oscillations, the oscillation inequalities, degree,
// Jacobian-integral matching, the counterexample audit and the search for
// near-extremal Morrey profiles.
//
// Oscillations are maxima of pairwise image distances over quasi-random
// samples: lower bounds of the true oscillation. A check lhs <= rhs with a
// sampled lhs therefore never fails spuriously on account of sampling.

#include "finidist/calculus.hpp"
#include "finidist/map_zoo.hpp"
#include "finidist/report.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace finidist {

// ---- constants --------------------------------------------------------------

/// (n - 1) pi / (n omega_n)^{1/n}.
double morrey_constant(int n);

struct ConstantsTable {
  int n = 0;
  double C_M = 0.0;
  double d_N = 0.0;  // infinite for non-compact targets
  double A_N = 0.0;
  double B_N = 0.0;
  double six_CM_pow_n = 0.0;

  double small_energy_threshold() const { return std::min(A_N, B_N); }
};

/// A_N = (d_N / (60 C_M))^n / 2 and B_N = Vol B(d_N / 10) in the target;
/// both infinite when d_N is.
ConstantsTable constants(int n, const TargetSpec& target);

// ---- oscillation ------------------------------------------------------------

enum class OscMetric { ambient, geodesic };
std::string to_string(OscMetric m);

struct OscillationSample {
  Region region;
  std::size_t sample_count = 0;  // requested
  std::size_t evaluated = 0;     // off the singular set and inside the domain
  double diam_lower_bound = 0.0;
  OscMetric metric = OscMetric::geodesic;
};

/// Distance in the target: chord or great-circle distance on spheres,
/// Euclidean otherwise (graph targets use the ambient distance, a lower
/// bound of the intrinsic one).
double target_distance(const TargetSpec& t, const Vec& a, const Vec& b, OscMetric m);
/// Max pairwise distance of the images.
double diameter(const TargetSpec& t, const std::vector<Vec>& images, OscMetric m);

bool region_in_domain(const MapField& f, const Region& region);

/// Throws DomainError when the region is not inside the domain and
/// DomainError when count < 2.
OscillationSample oscillation(const MapField& f, const Region& region, std::size_t count, std::uint64_t seed,
                              OscMetric metric = OscMetric::geodesic);

/// Quasi-random points of the boundary of a Euclidean or geodesic ball.
std::vector<Point> boundary_samples(const Region& ball, std::size_t count, std::uint64_t seed);
OscillationSample boundary_oscillation(const MapField& f, const Region& ball, std::size_t count, std::uint64_t seed,
                                       OscMetric metric = OscMetric::geodesic);

// ---- checks -----------------------------------------------------------------

/// Quadrature levels are raised from `level` until the relative indicator
/// drops below `indicator_target` or `max_level` is reached.
struct CheckOptions {
  int level = 3;
  int max_level = 10;
  double indicator_target = 1e-4;
  std::size_t count = 2048;
  std::uint64_t seed = 1;
  double tolerance = 1e-3;
};

/// Repeats `integral(level)` with increasing levels as described above. The
/// indicator is taken relative to max(|value|, scale), so integrals that
/// vanish stop once they are small on the scale of the problem.
QuadratureEstimate adaptive(const std::function<QuadratureEstimate(int)>& integral, const CheckOptions& o,
                            double scale = 0.0);

/// int over S(x, r) of |D_T f|^n, D_T the derivative along the sphere.
QuadratureEstimate tangential_energy(const MapField& f, const Vec& x, double r, int level);

/// diam f(S(x, r)) <= C_M (r int_{S(x,r)} |D_T f|^n)^{1/n} on a Euclidean
/// domain.
VerificationReport verify_morrey(const MapField& f, const Vec& x, double r, const CheckOptions& o = {});

enum class ConstantMode { explicit_constant, fitted };

/// (osc_{B(x,r)} f)^n <= (6 C_M)^n / log(R/r) * int_{B(x,R)} |Df|^n.
/// Explicit mode checks B(x, 2R) in the domain, finite distortion (sampled)
/// and int |Df|^n < min(A_N, B_N) over the domain; a violated hypothesis
/// gives hypothesis-not-met. Fitted mode reports the smallest constant for
/// this triple in details.fitted_constant.
VerificationReport verify_osc_log(const MapField& f, const Vec& x, double r, double R,
                                  ConstantMode mode = ConstantMode::explicit_constant, const CheckOptions& o = {});

struct OscLogTriple {
  Vec x;
  double r = 0.0;
  double R = 0.0;
};
/// Smallest C with osc^n <= C / log(R/r) * energy over all triples.
double fit_osc_log_constant(const MapField& f, const std::vector<OscLogTriple>& grid, const CheckOptions& o = {});

enum class ControlMode { euclidean_2x, manifold_6x };
std::string to_string(ControlMode m);

/// osc_B f <= 2 osc_{dB} f, or <= 6 osc_{dB} f under d = osc_{dB} f < d_N/10
/// and int_B J_f < Vol(D3 \ D2) with D2, D3 of radii 3d and d_N/2.
VerificationReport verify_boundary_control(const MapField& f, const Region& ball, ControlMode mode,
                                           const CheckOptions& o = {});

// ---- degree -----------------------------------------------------------------

struct DegreeResult {
  double estimate = 0.0;
  long long nearest = 0;
  double residual = 0.0;
  QuadratureEstimate integral;
};

/// (1 / Vol S^n) int_{S^n} J_f for a map S^n -> S^n.
DegreeResult degree(const MapField& f, int level);
DegreeResult degree_adaptive(const MapField& f, const CheckOptions& o = {});
/// lhs = residual, rhs = tolerance (default 1e-3); details carry the estimate.
VerificationReport verify_degree(const MapField& f, const CheckOptions& o = {}, double residual_bound = 1e-3);

/// |int_B J_f - int_B J_g| <= tolerance * max(1, |int_B J_f|). Throws
/// PreconditionError when f and g differ by more than 1e-9 on sampled
/// boundary points.
VerificationReport jacobian_integral_match(const MapField& f, const MapField& g, const Region& ball,
                                           const CheckOptions& o = {}, bool expected_fail = false);

// ---- counterexample ---------------------------------------------------------

/// t^n / log(e + t).
double orlicz_p(double t, int n);

struct SliceRow {
  int k = 0;
  double theta_lo = 0.0;  // theta_k
  double theta_hi = 0.0;  // theta_{k-1}
  double volume = 0.0;
  double volume_bound = 0.0;  // omega_n (theta_{k-1}^n - theta_k^n)
  double int_jacobian = 0.0;
  double int_energy = 0.0;    // int |Df|^n
  double int_p = 0.0;         // int P(|Df|)
  double cum_energy = 0.0;
  double cum_p = 0.0;
  double oscillation = 0.0;   // ambient, on B(north pole, theta_k)
  double indicator = 0.0;     // largest relative indicator of the three integrals
};

struct CounterexampleAudit {
  int n = 0;
  int k_max = 0;
  int level = 0;
  std::vector<SliceRow> rows;
  double fitted_c = 0.0;        // max_{k >= 2} int_{A_k} P (k - 1)^2
  double harmonic_tail = 0.0;   // sum_{k=2}^{K} 1 / (k - 1)^2
};

/// Requires 2 <= n <= 3 and 2 <= k_max <= 6.
CounterexampleAudit counterexample_audit(int n, int k_max, int level, std::size_t osc_samples = 10000,
                                         std::uint64_t seed = 1);

// ---- extremal search --------------------------------------------------------

/// A scalar family on the circle S(0, 1) of R^2 with at most six parameters.
struct ParametricFamily {
  std::string name;
  std::function<MapField(const std::vector<double>&)> make;
  std::vector<double> lower, upper, initial;
};

ParametricFamily constant_family();
/// a cos(phi) + b sin(phi).
ParametricFamily trig_family();
/// Plateau of half-width a, linear ramps down to 0 at phi = pi.
ParametricFamily cap_bump_family();

struct ExtremalResult {
  double best_ratio = 0.0;
  std::vector<double> best_params;
  std::size_t evaluations = 0;
};

/// Coordinate descent with golden-section line searches maximising the
/// Morrey ratio on the unit circle, within `budget` ratio evaluations.
ExtremalResult morrey_extremal_search(const ParametricFamily& family, std::size_t budget, const CheckOptions& o = {});

}  // namespace finidist
