#pragma once

#include <vector>

namespace finidist {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Rules with 1..64 points, built once (Newton on P_n) and cached.
const GaussRule& gauss_legendre(int npts);

}  // namespace finidist
