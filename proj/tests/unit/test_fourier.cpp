#include <doctest.h>

#include <complex>

#include "oracles.hpp"
#include "rmkac/fourier.hpp"

using namespace rmkac;

namespace {

VelocityEnsemble gaussian_samples(int d, double var, std::size_t n, std::uint64_t seed) {
  std::vector<double> flat;
  Rng rng(seed, "gauss");
  for (std::size_t i = 0; i < n * static_cast<std::size_t>(d); ++i) flat.push_back(std::sqrt(var) * rng.normal());
  return VelocityEnsemble(d, std::move(flat));
}

}  // namespace

TEST_CASE("cos remainder is accurate near zero") {
  for (double x : {1e-6, 1e-3, 0.1}) CHECK(cos_remainder(x) == doctest::Approx(std::pow(x, 4) / 24 - std::pow(x, 6) / 720).epsilon(1e-6));
  for (double x : {0.5, 1.0, 3.0, 40.0}) CHECK(cos_remainder(x) == doctest::Approx(std::cos(x) - 1 + x * x / 2).epsilon(1e-12));
}

TEST_CASE("characteristic function of symmetric atoms") {
  VelocityEnsemble e = VelocityEnsemble::from_vectors({Vector{1.0, 2.0}, Vector{-1.0, -2.0}});
  Vector xi{0.3, -0.7};
  std::complex<double> c = char_fn(e, xi);
  CHECK(c.real() == doctest::Approx(std::cos(0.3 - 1.4)));
  CHECK(std::abs(c.imag()) < 1e-15);
}

TEST_CASE("fourier grid layout") {
  FourierGrid g = make_fourier_grid(3, 10, 5, 0.1, 10.0);
  CHECK(g.size() == 50);
  CHECK(g.radii.front() == doctest::Approx(0.1));
  CHECK(g.radii.back() == doctest::Approx(10.0));
  CHECK(g.radii[2] == doctest::Approx(1.0));
  Vector p = g.point(7);
  CHECK(p.norm() == doctest::Approx(g.radii[2]));
  FourierGrid gm = make_fourier_grid(cross2d(0.3), 10, 5);
  CHECK(gm.directions.size() >= 12);
}

TEST_CASE("distance is zero on identical input and sees the covariance part") {
  VelocityEnsemble a = gaussian_samples(2, 1.0, 2000, 1);
  FourierGrid g = make_fourier_grid(2, 16, 8, 0.1, 10.0);
  WeightFunction w = WeightFunction::euclidean(4.0);
  MetricReport same = d_omega(a, a, w, 3.0, g);
  CHECK(same.value == 0.0);
  VelocityEnsemble b = a;
  a.set_known_covariance(SymMatrix::identity(2));
  b.set_known_covariance(SymMatrix::diagonal(Vector{1.2, 1.0}));
  MetricReport cov = d_omega(a, b, w, 3.0, g);
  CHECK(cov.weighted_part == 0.0);
  CHECK(cov.covariance_part == doctest::Approx(3.0 * 0.2));
  CHECK(cov.value == doctest::Approx(0.6));
}

TEST_CASE("Gaussian laws of different scale are far apart") {
  VelocityEnsemble a = gaussian_samples(2, 1.0, 20000, 2), b = gaussian_samples(2, 1.0, 20000, 3);
  VelocityEnsemble c = gaussian_samples(2, 2.0, 20000, 4);
  FourierGrid g = make_fourier_grid(2, 16, 12, 0.05, 20.0);
  WeightFunction w = WeightFunction::euclidean(4.0);
  double near = d_omega(a, b, w, 1.0, g).value;
  double far = d_omega(a, c, w, 1.0, g).value;
  CHECK(far > 10 * near);
}

TEST_CASE("centering is required") {
  std::vector<Vector> v;
  Rng rng(5, "shift");
  for (int i = 0; i < 4000; ++i) v.push_back(Vector{3.0 + rng.normal(), rng.normal()});
  VelocityEnsemble e = VelocityEnsemble::from_vectors(v);
  CHECK_THROWS_AS(require_centered(e), std::domain_error);
  CHECK_NOTHROW(require_centered(gaussian_samples(2, 1.0, 4000, 6)));
}

TEST_CASE("alpha and lambda rules") {
  CHECK(alpha_rule(2, 4.0, 0.0, 0.5) == doctest::Approx(8.0));
  CHECK(alpha_rule(2, 4.0, 0.5, 0.5) == doctest::Approx(16.0));
  CHECK(alpha_rule(2, 4.0, 1.0, 0.5) == doctest::Approx(8.0));
  CHECK(alpha_rule(3, 4.0, 0.0, 0.7) == doctest::Approx(25.2));
  CHECK(lambda_bound(2, 4.0, 0.0, 0.5, 8.0) == doctest::Approx(0.5));
  CHECK(lambda_bound(3, 4.0, 0.0, 0.7, 25.2) == doctest::Approx(0.7));
  CHECK(lambda_bound(2, 4.0, 0.5, 0.5, 16.0) == doctest::Approx(0.75));
}

TEST_CASE("one collision step of the cross model") {
  VelocityEnsemble a = gaussian_samples(2, 1.0, 1000, 7);
  VelocityEnsemble out = one_collision_step(a, cross2d(0.3), Rng(7, "step"));
  CHECK(out.size() == a.size());
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out[i][0] * out[i][1]) < 1e-12);
}

TEST_CASE("matrix surrogate against a direct evaluation") {
  MatrixGrid g = make_matrix_grid(2, 4, 5, 0.1, 10.0);
  CHECK(g.size() == g.units.size() * 5);
  PsdMatrix s1(SymMatrix::diagonal(Vector{0.6, 1.4})), s2 = PsdMatrix::identity(2);
  MatrixEnsemble a = MatrixEnsemble::point_mass(s1, 10), b = MatrixEnsemble::point_mass(s2, 10);
  MatrixMetricReport same = matrix_metric_surrogate(a, a, 4.0, 2.0, g);
  CHECK(same.value == 0.0);
  MatrixMetricReport r = matrix_metric_surrogate(a, b, 4.0, 2.0, g);
  double sup = 0.0;
  SymMatrix delta = s1.sym() - s2.sym();
  for (const auto& u : g.units)
    for (double c : g.scales) {
      SymMatrix xi = c * u;
      double t1 = trace_inner(xi, s1.sym()), t2 = trace_inner(xi, s2.sym());
      std::complex<double> diff = std::exp(std::complex<double>(0, -t1)) - std::exp(std::complex<double>(0, -t2)) +
                                  std::complex<double>(0, trace_inner(xi, delta));
      auto ev = oracle::eigenvalues(xi);
      double n1 = 0.0;
      for (double e : ev) n1 += std::abs(e);
      double w = std::pow(2.0, -1.0) * n1 * n1;
      sup = std::max(sup, std::abs(diff) / w);
    }
  CHECK(r.weighted_part == doctest::Approx(sup).epsilon(1e-9));
  CHECK(r.covariance_part == doctest::Approx(2.0 * 0.4));
}
