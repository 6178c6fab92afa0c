#include "finidist/errors.hpp"
#include "finidist/estimates.hpp"

#include <cmath>

namespace finidist {

ParametricFamily constant_family() {
  return {"constant", [](const std::vector<double>& p) { return zoo::angular_profile("trig", {p[0]}); }, {-1.0}, {1.0}, {0.5}};
}

ParametricFamily trig_family() {
  return {"trig",
          [](const std::vector<double>& p) { return zoo::angular_profile("trig", {0.0, p[0], p[1]}); },
          {-1.0, -1.0},
          {1.0, 1.0},
          {1.0, 0.0}};
}

ParametricFamily cap_bump_family() {
  return {"cap_bump", [](const std::vector<double>& p) { return zoo::angular_profile("cap_bump", {p[0]}); }, {0.05},
          {3.0}, {1.5}};
}

ExtremalResult morrey_extremal_search(const ParametricFamily& family, std::size_t budget, const CheckOptions& o) {
  const std::size_t dims = family.initial.size();
  if (dims == 0 || dims > 6 || family.lower.size() != dims || family.upper.size() != dims)
    throw ParameterError("morrey_extremal_search: need 1 to 6 parameters with bounds");

  ExtremalResult res;
  const Vec origin = Vec::Zero(2);
  auto ratio = [&](const std::vector<double>& p) {
    ++res.evaluations;
    return verify_morrey(family.make(p), origin, 1.0, o).ratio;
  };

  std::vector<double> x = family.initial;
  double best = ratio(x);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  bool improved = true;
  while (improved && res.evaluations + 2 <= budget) {
    improved = false;
    for (std::size_t i = 0; i < dims && res.evaluations + 2 <= budget; ++i) {
      double a = family.lower[i], b = family.upper[i];
      auto at = [&](double t) {
        std::vector<double> y = x;
        y[i] = t;
        return ratio(y);
      };
      double c = b - g * (b - a), d = a + g * (b - a);
      double fc = at(c), fd = at(d);
      while (b - a > 1e-4 * (family.upper[i] - family.lower[i]) && res.evaluations < budget) {
        if (fc >= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - g * (b - a);
          fc = at(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + g * (b - a);
          fd = at(d);
        }
      }
      const double t = fc >= fd ? c : d;
      const double ft = std::max(fc, fd);
      if (ft > best + 1e-12) {
        best = ft;
        x[i] = t;
        improved = true;
      }
    }
  }
  res.best_ratio = best;
  res.best_params = x;
  return res;
}

}  // namespace finidist
