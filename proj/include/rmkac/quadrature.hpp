// Gauss rules on infinite domains.
#pragma once

#include <vector>

namespace rmkac {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// integral of exp(-x^2) f(x) over the real line
QuadratureRule gauss_hermite(int n);
// integral of x^alpha exp(-x) f(x) over the half line
QuadratureRule gauss_laguerre(int n, double alpha);

}  // namespace rmkac
