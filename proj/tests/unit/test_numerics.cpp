#include <doctest.h>

#include "oracles.hpp"
#include "rmkac/quadrature.hpp"
#include "rmkac/stats.hpp"

using namespace rmkac;

TEST_CASE("Gauss-Hermite integrates polynomials exactly") {
  for (int n : {4, 16, 32}) {
    QuadratureRule q = gauss_hermite(n);
    REQUIRE(q.nodes.size() == static_cast<std::size_t>(n));
    for (int k = 0; k < 2 * n && k <= 40; ++k) {
      double s = 0.0, mag = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        s += q.weights[i] * std::pow(q.nodes[i], k);
        mag += q.weights[i] * std::pow(std::abs(q.nodes[i]), k);
      }
      // odd moments cancel, so measure the error against sum w |x|^k
      CHECK(std::abs(s - oracle::hermite_moment(k)) <= 1e-12 * mag + 1e-14);
    }
  }
}

TEST_CASE("Gauss-Laguerre integrates polynomials exactly") {
  for (double alpha : {-0.5, 0.0, 0.5}) {
    QuadratureRule q = gauss_laguerre(32, alpha);
    for (int k = 0; k <= 20; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
      CHECK(s == doctest::Approx(oracle::laguerre_moment(k, alpha)).epsilon(1e-8));
    }
  }
}

TEST_CASE("running stats and merge") {
  RunningStats a, b, all;
  for (int i = 0; i < 100; ++i) {
    double x = std::sin(i);
    (i < 37 ? a : b).add(x);
    all.add(x);
  }
  a.merge(b);
  CHECK(a.count() == 100);
  CHECK(a.mean() == doctest::Approx(all.mean()));
  CHECK(a.variance() == doctest::Approx(all.variance()));
}

TEST_CASE("least squares recovers a line") {
  std::vector<double> x{0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(2.5 - 0.75 * v);
  LinearFit f = least_squares(x, y);
  CHECK(f.slope == doctest::Approx(-0.75));
  CHECK(f.intercept == doctest::Approx(2.5));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("Mann-Kendall exact small-sample p-values") {
  std::vector<double> dec{4, 3, 2, 1};
  MannKendall mk = mann_kendall_decreasing(dec);
  CHECK(mk.statistic == -6);
  CHECK(mk.p_value == doctest::Approx(1.0 / 24));
  std::vector<double> inc{1, 2, 3, 4};
  CHECK(mann_kendall_decreasing(inc).p_value == doctest::Approx(1.0));
  // one discordant pair out of six: P(S <= -4) = 4 / 24
  std::vector<double> near{4, 3, 1, 2};
  CHECK(mann_kendall_decreasing(near).p_value == doctest::Approx(4.0 / 24));
}

TEST_CASE("distribution helpers") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985));
  CHECK(chi_squared_sf(3.841458821, 1) == doctest::Approx(0.05));
  CHECK(chi_squared_sf(0.0, 4) == doctest::Approx(1.0));
}
