#include "finidist/quadrature.hpp"

#include "finidist/errors.hpp"
#include "finidist/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace finidist {

namespace {

constexpr int kPanelPoints = 8;
constexpr double kRoundingFloor = 64.0 * std::numeric_limits<double>::epsilon();

// A gap is the innermost piece next to a singular coordinate that the graded
// panels never reach. [first, last) indexes the nodes of the adjacent panel.
struct Gap {
  double lo = 0.0, hi = 0.0;
  bool at_start = false;  // gap touches the start of the whole interval
  std::size_t first = 0, last = 0;
};

struct Rule1D {
  std::vector<double> x, w;
  std::vector<Gap> gaps;
};

bool near_value(double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)); }

bool is_singular(double t, const std::vector<double>& singular) {
  return std::any_of(singular.begin(), singular.end(), [t](double s) { return near_value(s, t); });
}

void add_panel(Rule1D& r, double lo, double hi) {
  const GaussRule& g = gauss_legendre(kPanelPoints);
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  for (int i = 0; i < kPanelPoints; ++i) {
    r.x.push_back(c + h * g.nodes[i]);
    r.w.push_back(h * g.weights[i]);
  }
}

void add_uniform(Rule1D& r, double lo, double hi, int pieces) {
  const double step = (hi - lo) / pieces;
  for (int j = 0; j < pieces; ++j) add_panel(r, lo + j * step, j + 1 == pieces ? hi : lo + (j + 1) * step);
}

// Graded panels on [u, v] toward `toward` (u or v), each split into `pieces`.
void add_graded(Rule1D& r, double u, double v, bool toward_u, int pieces, double floor, bool at_start) {
  const double len = v - u;
  int levels = 0;
  while (len * std::ldexp(1.0, -levels) > floor && levels < 200) ++levels;
  auto edge = [&](int j) { return toward_u ? u + len * std::ldexp(1.0, -j) : v - len * std::ldexp(1.0, -j); };
  std::size_t inner_first = 0, inner_last = 0;
  for (int j = 0; j < levels; ++j) {
    const double a = edge(j), b = edge(j + 1);
    const std::size_t before = r.x.size();
    add_uniform(r, std::min(a, b), std::max(a, b), pieces);
    if (j + 1 == levels) {
      inner_first = before;
      inner_last = r.x.size();
    }
  }
  const double delta = len * std::ldexp(1.0, -levels);
  Gap gap;
  gap.lo = toward_u ? u : v - delta;
  gap.hi = toward_u ? u + delta : v;
  gap.at_start = at_start;
  gap.first = inner_first;
  gap.last = inner_last;
  r.gaps.push_back(gap);
}

Rule1D build_rule_1d(double a, double b, int level, const QuadratureOptions& opts) {
  if (!(a < b)) throw DomainError("quadrature: empty interval");
  std::vector<double> cuts{a, b};
  for (double t : opts.breakpoints)
    if (t > a && t < b) cuts.push_back(t);
  for (double t : opts.singular)
    if (t > a && t < b) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), near_value), cuts.end());

  const int pieces = 1 << level;
  Rule1D r;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double u = cuts[s], v = cuts[s + 1];
    const bool su = is_singular(u, opts.singular), sv = is_singular(v, opts.singular);
    if (!su && !sv) {
      add_uniform(r, u, v, pieces);
    } else if (su && sv) {
      const double m = 0.5 * (u + v);
      add_graded(r, u, m, true, pieces, opts.floor, s == 0);
      add_graded(r, m, v, false, pieces, opts.floor, false);
    } else {
      add_graded(r, u, v, su, pieces, opts.floor, su && s == 0);
    }
  }
  return r;
}

double checked(double v) {
  if (!std::isfinite(v)) throw IntegrandError("integrand returned a non-finite value off the declared singular set");
  return v;
}

template <class F, class X>
double eval_guarded(const F& f, const X& x) {
  try {
    return checked(f(x));
  } catch (const IntegrandError&) {
    throw;
  } catch (const Error& e) {
    throw IntegrandError(std::string("integrand evaluation failed: ") + e.what());
  }
}

struct LevelResult {
  double value = 0.0;
  double tail_indicator = 0.0;
  std::int64_t nodes = 0;
};

// Combines a 1D rule with per-node values (already including the 1D weight
// and any Jacobian factor); handles singular gaps.
LevelResult finish(const Rule1D& rule, const std::vector<double>& node_values, std::vector<double>& contributions,
                   const QuadratureOptions& opts, std::int64_t nodes) {
  LevelResult out;
  out.value = pairwise_sum(contributions);
  out.nodes = nodes;
  for (const Gap& gap : rule.gaps) {
    if (gap.at_start && opts.inner_tail) {
      out.value += opts.inner_tail(gap.hi - gap.lo);
      continue;
    }
    double neighbour = 0.0;
    for (std::size_t i = gap.first; i < gap.last; ++i) neighbour += node_values[i];
    out.tail_indicator += 2.0 * std::abs(neighbour);
  }
  return out;
}

template <class Compute>
QuadratureEstimate two_level(int level, const Compute& compute) {
  if (level < 1 || level > 16) throw DomainError("quadrature: level must be in [1, 16]");
  const LevelResult hi = compute(level);
  const LevelResult lo = compute(level - 1);
  QuadratureEstimate q;
  q.value = hi.value;
  q.error_indicator = std::abs(hi.value - lo.value) + kRoundingFloor * std::abs(hi.value) + hi.tail_indicator;
  q.nodes_used = hi.nodes + lo.nodes;
  q.resolution = level;
  return q;
}

void circle_rule(SphereRule& rule, int level, const std::vector<double>& angle_breaks) {
  const double two_pi = 2.0 * kPi;
  if (angle_breaks.empty()) {
    const int count = kPanelPoints << level;
    for (int j = 0; j < count; ++j) {
      const double phi = two_pi * j / count;
      Vec d(2);
      d << std::cos(phi), std::sin(phi);
      rule.directions.push_back(std::move(d));
      rule.weights.push_back(two_pi / count);
    }
    return;
  }
  std::vector<double> br;
  for (double a : angle_breaks) {
    double t = std::fmod(a, two_pi);
    if (t < 0) t += two_pi;
    br.push_back(t);
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(), near_value), br.end());
  br.push_back(br.front() + two_pi);
  Rule1D r;
  for (std::size_t s = 0; s + 1 < br.size(); ++s) add_uniform(r, br[s], br[s + 1], 1 << level);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    Vec d(2);
    d << std::cos(r.x[i]), std::sin(r.x[i]);
    rule.directions.push_back(std::move(d));
    rule.weights.push_back(r.w[i]);
  }
}

}  // namespace

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

SphereRule sphere_rule(int m, int level, const std::vector<double>& angle_breaks) {
  if (m < 1 || m > 7) throw DomainError("sphere_rule: dimension outside [1, 7]");
  if (level < 0 || level > 16) throw DomainError("sphere_rule: level outside [0, 16]");
  SphereRule rule;
  if (m == 1) {
    circle_rule(rule, level, angle_breaks);
    return rule;
  }
  const SphereRule sub = sphere_rule(m - 1, level, angle_breaks);
  Rule1D colat;
  add_uniform(colat, 0.0, kPi, 1 << level);
  for (std::size_t i = 0; i < colat.x.size(); ++i) {
    const double s = std::sin(colat.x[i]), c = std::cos(colat.x[i]);
    const double w = colat.w[i] * std::pow(s, m - 1);
    for (std::size_t k = 0; k < sub.directions.size(); ++k) {
      Vec d(m + 1);
      d.head(m) = s * sub.directions[k];
      d[m] = c;
      rule.directions.push_back(std::move(d));
      rule.weights.push_back(w * sub.weights[k]);
    }
  }
  return rule;
}

QuadratureEstimate integrate_interval(const std::function<double(double)>& f, double a, double b, int level,
                                      const QuadratureOptions& opts) {
  return two_level(level, [&](int L) {
    const Rule1D rule = build_rule_1d(a, b, L, opts);
    std::vector<double> vals(rule.x.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i) vals[i] = rule.w[i] * eval_guarded(f, rule.x[i]);
    std::vector<double> contrib = vals;
    return finish(rule, vals, contrib, opts, static_cast<std::int64_t>(vals.size()));
  });
}

QuadratureEstimate integrate_sphere(const EuclidIntegrand& g, const Vec& center, double r, int level,
                                    const QuadratureOptions& opts) {
  const int n = static_cast<int>(center.size());
  if (n < 2) throw DomainError("integrate_sphere: dimension must be at least 2");
  if (!(r > 0.0)) throw DomainError("integrate_sphere: radius must be positive");
  const double scale = std::pow(r, n - 1);
  return two_level(level, [&](int L) {
    const SphereRule rule = sphere_rule(n - 1, L, opts.angle_breaks);
    std::vector<double> contrib(rule.directions.size());
    for (std::size_t k = 0; k < contrib.size(); ++k)
      contrib[k] = rule.weights[k] * eval_guarded(g, Vec(center + r * rule.directions[k]));
    LevelResult out;
    out.value = scale * pairwise_sum(contrib);
    out.nodes = static_cast<std::int64_t>(contrib.size());
    return out;
  });
}

namespace {

QuadratureEstimate integrate_shells(const EuclidIntegrand& g, const Vec& center, double r_in, double r_out,
                                    int level, const QuadratureOptions& opts) {
  const int n = static_cast<int>(center.size());
  if (n < 2) throw DomainError("integrate_ball: dimension must be at least 2");
  if (!(r_out > r_in && r_in >= 0.0)) throw DomainError("integrate_ball: need 0 <= inner < outer radius");
  return two_level(level, [&](int L) {
    const Rule1D radial = build_rule_1d(r_in, r_out, L, opts);
    const SphereRule ang = sphere_rule(n - 1, L, opts.angle_breaks);
    const std::size_t na = ang.directions.size();
    std::vector<double> contrib(radial.x.size() * na);
    std::vector<double> shell(radial.x.size());
    std::vector<double> tmp(na);
    for (std::size_t i = 0; i < radial.x.size(); ++i) {
      const double t = radial.x[i];
      const double w = radial.w[i] * std::pow(t, n - 1);
      for (std::size_t k = 0; k < na; ++k) {
        tmp[k] = w * ang.weights[k] * eval_guarded(g, Vec(center + t * ang.directions[k]));
        contrib[i * na + k] = tmp[k];
      }
      shell[i] = pairwise_sum(tmp);
    }
    return finish(radial, shell, contrib, opts, static_cast<std::int64_t>(contrib.size()));
  });
}

}  // namespace

QuadratureEstimate integrate_ball(const EuclidIntegrand& g, const Vec& center, double R, int level,
                                  const QuadratureOptions& opts) {
  if (!(R > 0.0)) throw DomainError("integrate_ball: radius must be positive");
  return integrate_shells(g, center, 0.0, R, level, opts);
}

QuadratureEstimate integrate_ball_about(const EuclidIntegrand& g, const Vec& center, double R, const Vec& pole,
                                        int level, const QuadratureOptions& opts) {
  const int n = static_cast<int>(center.size());
  if (n < 2) throw DomainError("integrate_ball_about: dimension must be at least 2");
  if (!(R > 0.0)) throw DomainError("integrate_ball_about: radius must be positive");
  const Vec off = pole - center;
  const double c = off.squaredNorm() - R * R;
  if (!(c < 0.0)) throw DomainError("integrate_ball_about: pole must lie inside the ball");
  // The tail formula is for balls about the pole; here the inner piece varies
  // with the direction, so it only enters the indicator.
  QuadratureOptions radial_opts = opts;
  radial_opts.inner_tail = nullptr;
  radial_opts.singular.push_back(0.0);
  return two_level(level, [&](int L) {
    const SphereRule ang = sphere_rule(n - 1, L, opts.angle_breaks);
    const std::size_t na = ang.directions.size();
    std::vector<double> ray_values(na);
    LevelResult out;
    for (std::size_t k = 0; k < na; ++k) {
      const Vec& u = ang.directions[k];
      const double b = off.dot(u);
      const double rho = -b + std::sqrt(b * b - c);
      const Rule1D radial = build_rule_1d(0.0, rho, L, radial_opts);
      std::vector<double> vals(radial.x.size());
      for (std::size_t i = 0; i < radial.x.size(); ++i) {
        const double t = radial.x[i];
        vals[i] = ang.weights[k] * radial.w[i] * std::pow(t, n - 1) * eval_guarded(g, Vec(pole + t * u));
      }
      std::vector<double> ray = vals;
      const LevelResult r = finish(radial, vals, ray, radial_opts, static_cast<std::int64_t>(vals.size()));
      ray_values[k] = r.value;
      out.tail_indicator += r.tail_indicator;
      out.nodes += r.nodes;
    }
    out.value = pairwise_sum(ray_values);
    return out;
  });
}

QuadratureEstimate integrate_annulus(const EuclidIntegrand& g, const Vec& center, double r_in, double r_out,
                                     int level, const QuadratureOptions& opts) {
  if (!(r_in > 0.0)) throw DomainError("integrate_annulus: inner radius must be positive");
  return integrate_shells(g, center, r_in, r_out, level, opts);
}

QuadratureEstimate integrate_slice(const SphereIntegrand& g, int n, double alpha, double beta, int level,
                                   const QuadratureOptions& opts) {
  if (n < 1 || n > 7) throw DomainError("integrate_slice: dimension outside [1, 7]");
  if (!(alpha >= 0.0 && alpha < beta && beta <= kPi)) throw DomainError("integrate_slice: need 0 <= alpha < beta <= pi");
  return two_level(level, [&](int L) {
    const Rule1D colat = build_rule_1d(alpha, beta, L, opts);
    const SphereRule lon = n == 1 ? SphereRule{} : sphere_rule(n - 1, L, opts.angle_breaks);
    std::vector<Vec> zs = lon.directions;
    std::vector<double> zw = lon.weights;
    if (n == 1) {
      // S^1 as two meridian arcs z = +1 and z = -1.
      zs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
      zw = {1.0, 1.0};
    }
    const std::size_t nz = zs.size();
    std::vector<double> contrib(colat.x.size() * nz);
    std::vector<double> ring(colat.x.size());
    std::vector<double> tmp(nz);
    for (std::size_t i = 0; i < colat.x.size(); ++i) {
      const double th = colat.x[i];
      const double w = colat.w[i] * std::pow(std::sin(th), n - 1);
      for (std::size_t k = 0; k < nz; ++k) {
        tmp[k] = w * zw[k] * eval_guarded(g, SpherePoint::from_slice(th, zs[k]));
        contrib[i * nz + k] = tmp[k];
      }
      ring[i] = pairwise_sum(tmp);
    }
    return finish(colat, ring, contrib, opts, static_cast<std::int64_t>(contrib.size()));
  });
}

QuadratureEstimate integrate_cap(const SphereIntegrand& g, const Vec& p, double rho, int level,
                                 const QuadratureOptions& opts) {
  const int n = static_cast<int>(p.size()) - 1;
  if (n < 1) throw InvalidPointError("integrate_cap: centre must lie on a sphere");
  if (std::abs(p.norm() - 1.0) > 1e-10) throw InvalidPointError("integrate_cap: centre is not a unit vector");
  if (!(rho > 0.0 && rho <= kPi)) throw DomainError("integrate_cap: radius outside (0, pi]");
  if (p[n] == 1.0) return integrate_slice(g, n, 0.0, rho, level, opts);
  if (p[n] == -1.0) {
    QuadratureOptions flipped = opts;
    for (double& t : flipped.breakpoints) t = kPi - t;
    for (double& t : flipped.singular) t = kPi - t;
    return integrate_slice(g, n, kPi - rho, kPi, level, flipped);
  }
  const Mat frame = tangent_frame(p);
  return two_level(level, [&](int L) {
    const Rule1D radial = build_rule_1d(0.0, rho, L, opts);
    const SphereRule ang = sphere_rule(n - 1, L, opts.angle_breaks);
    const std::size_t na = ang.directions.size();
    std::vector<double> contrib(radial.x.size() * na);
    std::vector<double> ring(radial.x.size());
    std::vector<double> tmp(na);
    for (std::size_t i = 0; i < radial.x.size(); ++i) {
      const double t = radial.x[i];
      const double w = radial.w[i] * std::pow(std::sin(t), n - 1);
      for (std::size_t k = 0; k < na; ++k) {
        Vec a = std::cos(t) * p + std::sin(t) * (frame * ang.directions[k]);
        a /= a.norm();
        tmp[k] = w * ang.weights[k] * eval_guarded(g, SpherePoint::from_ambient(a));
        contrib[i * na + k] = tmp[k];
      }
      ring[i] = pairwise_sum(tmp);
    }
    return finish(radial, ring, contrib, opts, static_cast<std::int64_t>(contrib.size()));
  });
}

QuadratureEstimate integrate_region(const Region& region, const PointIntegrand& g, int level,
                                    const QuadratureOptions& opts) {
  const EuclidIntegrand ge = [&g](const Vec& x) { return g(Point{x}); };
  const SphereIntegrand gs = [&g](const SpherePoint& p) { return g(Point{p}); };
  switch (region.kind) {
    case RegionKind::euclidean_ball: return integrate_ball(ge, region.center, region.outer, level, opts);
    case RegionKind::euclidean_sphere: return integrate_sphere(ge, region.center, region.outer, level, opts);
    case RegionKind::euclidean_annulus:
      return integrate_annulus(ge, region.center, region.inner, region.outer, level, opts);
    case RegionKind::geodesic_ball: return integrate_cap(gs, region.center, region.outer, level, opts);
    case RegionKind::latitude_slice: return integrate_slice(gs, region.dim, region.inner, region.outer, level, opts);
  }
  throw DomainError("integrate_region: unknown region kind");
}

}  // namespace finidist
