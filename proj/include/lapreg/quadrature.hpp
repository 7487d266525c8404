#pragma once

#include <vector>

namespace lapreg {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with `order` nodes on [lo, hi]. Exact for polynomials
// of degree <= 2*order - 1.
QuadratureRule gauss_legendre(int order, double lo = -1.0, double hi = 1.0);

}  // namespace lapreg
