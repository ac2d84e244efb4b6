#include "rmkac/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rmkac/matrix.hpp"

namespace rmkac {

// Newton iteration on the orthonormal recurrences, with the classical asymptotic
// initial guesses for the roots.

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  QuadratureRule r;
  r.nodes.assign(static_cast<std::size_t>(n), 0.0);
  r.weights.assign(static_cast<std::size_t>(n), 0.0);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * r.nodes[0];
    else if (i == 3) z = 1.91 * z - 0.91 * r.nodes[1];
    else z = 2.0 * z - r.nodes[static_cast<std::size_t>(i - 2)];
    double pp = 0.0;
    int it = 0;
    for (; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    if (it == 100) throw ConvergenceError("Gauss-Hermite root iteration did not converge");
    r.nodes[static_cast<std::size_t>(i)] = z;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = -z;
    r.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    r.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / (pp * pp);
  }
  return r;
}

QuadratureRule gauss_laguerre(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  if (!(alpha > -1.0)) throw std::invalid_argument("Laguerre exponent must exceed -1");
  QuadratureRule r;
  r.nodes.assign(static_cast<std::size_t>(n), 0.0);
  r.weights.assign(static_cast<std::size_t>(n), 0.0);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * n + 1.8 * alpha);
    } else if (i == 1) {
      z += (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * n);
    } else {
      double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) *
           (z - r.nodes[static_cast<std::size_t>(i - 2)]) / (1.0 + 0.3 * alpha);
    }
    double pp = 0.0, p2 = 0.0;
    int it = 0;
    for (; it < 100; ++it) {
      double p1 = 1.0;
      p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0 + alpha - z) * p2 - (j - 1.0 + alpha) * p3) / j;
      }
      pp = (n * p1 - (n + alpha) * p2) / z;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    if (it == 100) throw ConvergenceError("Gauss-Laguerre root iteration did not converge");
    r.nodes[static_cast<std::size_t>(i)] = z;
    r.weights[static_cast<std::size_t>(i)] =
        -std::exp(std::lgamma(alpha + n) - std::lgamma(static_cast<double>(n))) / (pp * n * p2);
  }
  return r;
}

}  // namespace rmkac
