// Independent reference computations for the tests. Nothing here calls into the
// library's numerical kernels.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "rmkac/matrix.hpp"

namespace oracle {

// Eigenvalues in descending order from Eigen's self-adjoint solver.
inline std::vector<double> eigenvalues(const rmkac::SymMatrix& m) {
  const int d = m.dim();
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + d);
  std::sort(v.rbegin(), v.rend());
  return v;
}

inline double determinant(const rmkac::Matrix& m) {
  const int d = m.dim();
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = m(i, j);
  return a.determinant();
}

// E f(V_1) for V uniform on the unit sphere in R^d (d >= 2): the marginal density
// of V_1 is proportional to (1 - x^2)^((d-3)/2) on (-1, 1).
inline double sphere_marginal_expectation(int d, const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double e = 0.5 * (d - 3);
  auto dens = [e](double x) { return std::pow(1.0 - x * x, e); };
  double z = ts.integrate(dens, -1.0, 1.0);
  double m = ts.integrate([&](double x) { return f(x) * dens(x); }, -1.0, 1.0);
  return m / z;
}

struct SphereMoments {
  double v2, v4, v2v2;
};

// E V1^2, E V1^4 by 1D integration; E V1^2 V2^2 from sum_j V_j^2 = 1 and exchangeability.
inline SphereMoments sphere_moments_by_integration(int d) {
  double v2 = sphere_marginal_expectation(d, [](double x) { return x * x; });
  double v4 = sphere_marginal_expectation(d, [](double x) { return x * x * x * x; });
  return {v2, v4, (v2 - v4) / (d - 1)};
}

// traceless contraction of the Maxwell model
inline double maxwell_kappa(double mean_alpha, const SphereMoments& m) {
  return 1.0 - 2.0 * mean_alpha * (m.v2 + m.v2v2 - m.v4);
}

// Two-point alpha law used by several tests.
struct TwoPoint {
  double a, b, pa;
  double moment(double s) const { return pa * std::pow(a, s) + (1.0 - pa) * std::pow(b, s); }
  template <class F>
  double expect(F f) const {
    return pa * f(a) + (1.0 - pa) * f(b);
  }
};

// For the Maxwell model with L = alpha n n^T and R = 1 - alpha n n^T:
// E|L e|^s + E|R e|^s, with |L e| = alpha |V1| and |R e|^2 = 1 - (2 alpha - alpha^2) V1^2.
inline double maxwell_kappa_star(int d, const TwoPoint& alpha, double s) {
  double left = alpha.moment(s) * sphere_marginal_expectation(d, [s](double x) { return std::pow(std::abs(x), s); });
  double right = alpha.expect([&](double al) {
    double c = 2.0 * al - al * al;
    return sphere_marginal_expectation(d, [c, s](double x) { return std::pow(std::max(0.0, 1.0 - c * x * x), 0.5 * s); });
  });
  return left + right;
}

// smallest s in [lo, hi] where kappa_star crosses 1 (bisection on a bracketing pair)
inline double bisect_threshold(const std::function<double(double)>& g, double lo, double hi, double tol = 1e-6) {
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 1.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Moments of the Gauss rule weights.
inline double hermite_moment(int k) {  // integral x^k exp(-x^2)
  return k % 2 ? 0.0 : std::tgamma(0.5 * k + 0.5);
}
inline double laguerre_moment(int k, double alpha) {  // integral x^(alpha + k) exp(-x) over x > 0
  return std::tgamma(alpha + k + 1.0);
}

// Philox4x32-10 known-answer vectors from the Random123 distribution.
struct PhiloxVector {
  std::array<std::uint32_t, 4> counter;
  std::array<std::uint32_t, 2> key;
  std::array<std::uint32_t, 4> expected;
};
inline const std::vector<PhiloxVector>& philox_vectors() {
  static const std::vector<PhiloxVector> v{
      {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}},
      {{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
       {0xffffffff, 0xffffffff},
       {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}},
      {{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
       {0xa4093822, 0x299f31d0},
       {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}},
  };
  return v;
}

// integral exp(-|xi|^2/2) exp(-u^2 xi^T S xi / 2) d xi = (2 pi)^(d/2) det(1 + u^2 S)^(-1/2)
inline double gaussian_h_member(const rmkac::SymMatrix& s, double u) {
  const int d = s.dim();
  rmkac::Matrix a = rmkac::Matrix::identity(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) += u * u * s(i, j);
  return std::pow(2.0 * std::numbers::pi, 0.5 * d) / std::sqrt(determinant(a));
}

// geometric pmf of the Wild depth at time t
inline double depth_pmf(double t, int n) { return std::exp(-t) * std::pow(1.0 - std::exp(-t), n); }

// exact M_p for rotation-invariant weights with equality in the weight condition
inline double gamma_ratio(double kp, int n) {
  return boost::math::tgamma_ratio(kp + n, static_cast<double>(n + 1)) / boost::math::tgamma(kp);
}

}  // namespace oracle
