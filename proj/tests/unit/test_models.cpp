#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "rmkac/directions.hpp"
#include "rmkac/laws.hpp"
#include "rmkac/models.hpp"

using namespace rmkac;

namespace {

// Monte Carlo E[L^T L + R^T R] with entrywise standard errors
void check_normalized(const CollisionModel& m, int n, std::uint64_t seed) {
  const int d = m.dim();
  Rng rng(seed, "norm");
  std::vector<double> s(static_cast<std::size_t>(d * d), 0.0), s2(s.size(), 0.0);
  for (int k = 0; k < n; ++k) {
    CoefficientPair p = m.sample_pair(rng);
    Matrix a = p.left.transpose() * p.left + p.right.transpose() * p.right;
    for (int i = 0; i < d * d; ++i) {
      s[static_cast<std::size_t>(i)] += a.data()[static_cast<std::size_t>(i)];
      s2[static_cast<std::size_t>(i)] += a.data()[static_cast<std::size_t>(i)] * a.data()[static_cast<std::size_t>(i)];
    }
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto k = static_cast<std::size_t>(i * d + j);
      double mean = s[k] / n;
      double se = std::sqrt(std::max(s2[k] / n - mean * mean, 0.0) / n);
      CHECK(std::abs(mean - (i == j ? 1.0 : 0.0)) <= 5 * se + 1e-12);
    }
}

}  // namespace

TEST_CASE("sphere moments match one-dimensional integration") {
  for (int d = 2; d <= 6; ++d) {
    rmkac::SphereMoments a = sphere_moments(d);
    oracle::SphereMoments b = oracle::sphere_moments_by_integration(d);
    CHECK(a.v2 == doctest::Approx(b.v2).epsilon(1e-8));
    CHECK(a.v4 == doctest::Approx(b.v4).epsilon(1e-8));
    CHECK(a.v2v2 == doctest::Approx(b.v2v2).epsilon(1e-8));
  }
}

TEST_CASE("maxwell reference constants") {
  oracle::TwoPoint tp{1.8, 0.6, 1.0 / 7};
  ScalarLaw law = ScalarLaw::two_point(1.8, 0.6, 1.0 / 7);
  CHECK(law.mean() == doctest::Approx(tp.moment(1)));
  CHECK(tp.moment(1) == doctest::Approx(tp.moment(2)));
  for (int d : {2, 3, 5}) {
    CollisionModel m = maxwell(d, law);
    double k = oracle::maxwell_kappa(tp.moment(1), oracle::sphere_moments_by_integration(d));
    CHECK(*m.reference().kappa == doctest::Approx(k).epsilon(1e-8));
    // weight contraction for |xi|^4 from one-dimensional integrals
    double kp = oracle::maxwell_kappa_star(d, tp, 4.0);
    CHECK(*m.reference().kappa_p == doctest::Approx(kp).epsilon(1e-8));
  }
  CHECK_THROWS_AS(maxwell(3, ScalarLaw::point(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(maxwell(1, ScalarLaw::point(1.0)), std::invalid_argument);
}

TEST_CASE("builtin models satisfy the normalization") {
  check_normalized(maxwell(3, ScalarLaw::point(1.0)), 100000, 1);
  check_normalized(maxwell(2, ScalarLaw::two_point(1.8, 0.6, 1.0 / 7)), 100000, 2);
  check_normalized(cross2d(0.3), 100000, 3);
  check_normalized(random_rotation(3, PairLaw::angle(0.0, 2 * std::numbers::pi), RotationLaw::haar, 4.0), 50000, 4);
  check_normalized(diagonal_scalar(2, PairLaw::angle(0.0, 2 * std::numbers::pi), 4.0), 100000, 5);
}

TEST_CASE("sampled pairs are exchangeable") {
  CollisionModel m = cross2d(0.3);
  Rng rng(9, "swap");
  const int n = 40000;
  double left = 0, right = 0;
  for (int k = 0; k < n; ++k) {
    CoefficientPair p = m.sample_pair(rng);
    // e_plus^T row pattern marks which coefficient came first
    left += p.left(0, 1) + p.left(1, 1);
    right += p.right(0, 1) + p.right(1, 1);
  }
  // E of entry-column-1 sums is zero only if the two orders are equally likely
  CHECK(std::abs(left / n) < 5 * std::sqrt(0.5 / n));
  CHECK(std::abs(right / n) < 5 * std::sqrt(0.5 / n));
}

TEST_CASE("cross2d collisions land on a coordinate axis") {
  CollisionModel m = cross2d(0.3);
  Rng rng(10, "cross");
  for (int k = 0; k < 1000; ++k) {
    Vector v{rng.normal(), rng.normal()}, w{rng.normal(), rng.normal()};
    CoefficientPair p = m.sample_pair(rng);
    Vector out = p.left * v + p.right * w;
    CHECK(std::abs(out[0] * out[1]) <= 1e-12);
  }
  CHECK_THROWS_AS(cross2d(0.0), std::invalid_argument);
  CHECK_THROWS_AS(cross2d(1.0), std::invalid_argument);
}

TEST_CASE("cross2d weight profile") {
  WeightFunction w = cross2d_weight(0.3);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(w(Vector{h, h}) == doctest::Approx(1.0));
  CHECK(w(Vector{2 * h, -2 * h}) == doctest::Approx(16.0));
  CHECK(w(Vector{1.0, 0.0}) == doctest::Approx(2.8));
  CHECK(w.upper_bound() == doctest::Approx(2.8));
  CHECK(w(Vector{0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(WeightFunction::euclidean(2.0), std::invalid_argument);
}

TEST_CASE("law moments") {
  ScalarLaw u = ScalarLaw::uniform(-1.0, 2.0);
  CHECK(u.mean() == doctest::Approx(0.5));
  CHECK(u.abs_moment(2.0) == doctest::Approx(1.0));
  CHECK(u.abs_moment(3.0) == doctest::Approx((1.0 + 16.0) / 12.0));
  PairLaw circle = PairLaw::angle(0.0, 2 * std::numbers::pi);
  CHECK(circle.on_unit_circle());
  CHECK(circle.sum_abs_moment(4.0) == doctest::Approx(0.75).epsilon(1e-8));
  CHECK(circle.sum_abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-8));
  PairLaw fixed = PairLaw::fixed(0.6, 0.8);
  CHECK(fixed.on_unit_circle());
  CHECK(fixed.sum_abs_moment(4.0) == doctest::Approx(0.1296 + 0.4096));
  CHECK_FALSE(PairLaw::fixed(0.6, 0.6).on_unit_circle());
  CHECK_THROWS_AS(ScalarLaw::two_point(1, 2, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(ScalarLaw::uniform(1, 1), std::invalid_argument);
}

TEST_CASE("rotation reference and mixtures") {
  CollisionModel r = random_rotation(3, PairLaw::fixed(std::sqrt(0.5), std::sqrt(0.5)), RotationLaw::haar, 4.0);
  CHECK(*r.reference().kappa == 0.0);
  CHECK(*r.reference().kappa_p == doctest::Approx(0.5));
  CHECK(r.reference().psi(Vector{0.0, 0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(r.rotation_invariant());
  std::vector<MixtureAtom> bad{{0.4, Matrix::identity(2), Matrix::identity(2)}};
  CHECK_THROWS_AS(finite_mixture(2, bad, 4.0), std::invalid_argument);
  std::vector<MixtureAtom> wrong_dim{{1.0, Matrix::identity(3), Matrix::identity(3)}};
  CHECK_THROWS_AS(finite_mixture(2, wrong_dim, 4.0), DimensionMismatch);
}

TEST_CASE("direction sets") {
  for (int d = 1; d <= 6; ++d) {
    auto dirs = sphere_directions(d, 50);
    for (const auto& u : dirs) CHECK(u.norm() == doctest::Approx(1.0));
  }
  CollisionModel m = cross2d(0.3);
  auto dirs = direction_set(m, 16);
  const double h = 1.0 / std::sqrt(2.0);
  bool plus = false, minus = false;
  for (const auto& u : dirs) {
    plus |= std::abs(u[0] - h) < 1e-12 && std::abs(u[1] - h) < 1e-12;
    minus |= std::abs(u[0] - h) < 1e-12 && std::abs(u[1] + h) < 1e-12;
  }
  CHECK(plus);
  CHECK(minus);
}
