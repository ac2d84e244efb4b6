#include <doctest.h>

#include "oracles.hpp"
#include "rmkac/stats.hpp"
#include "rmkac/wild.hpp"

using namespace rmkac;

TEST_CASE("weight trees grow one leaf per split") {
  CollisionModel m = maxwell(3, ScalarLaw::point(1.0));
  Rng rng(1, "tree");
  WeightArray t0 = build_weight_tree(m, 0, rng);
  CHECK(t0.size() == 1);
  Matrix b = t0.beta(0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(b(i, j) == (i == j ? 1.0 : 0.0));
  WeightArray t5 = build_weight_tree(m, 5, rng);
  CHECK(t5.size() == 6);
  CHECK(t5.depth() == 5);
}

TEST_CASE("expected leaf Gram sum is the identity") {
  CollisionModel m = maxwell(2, ScalarLaw::two_point(1.8, 0.6, 1.0 / 7));
  const int n = 20000;
  for (int depth : {1, 4}) {
    RunningStats s00, s01, s11;
    Rng base(2, "gram");
    for (int k = 0; k < n; ++k) {
      Rng rng = base.child(static_cast<std::uint64_t>(k));
      WeightArray t = build_weight_tree(m, depth, rng);
      Matrix g(2);
      for (std::size_t j = 0; j < t.size(); ++j) g += t.beta(j).transpose() * t.beta(j);
      s00.add(g(0, 0));
      s01.add(g(0, 1));
      s11.add(g(1, 1));
    }
    CHECK(std::abs(s00.mean() - 1.0) < 5 * s00.stderr_of_mean());
    CHECK(std::abs(s11.mean() - 1.0) < 5 * s11.stderr_of_mean());
    CHECK(std::abs(s01.mean()) < 5 * s01.stderr_of_mean());
  }
}

TEST_CASE("depth cap and depth law") {
  CHECK(depth_cap(0.0) == 64);
  CHECK(depth_cap(1.0) == 128);
  double t = 8.0;
  int tail = static_cast<int>(std::ceil(std::log(1e-6) / std::log(1.0 - std::exp(-t))));
  CHECK(depth_cap(t) == std::max(64 * 9, tail));
  CHECK_THROWS_AS(depth_cap(20.0), std::invalid_argument);

  Rng rng(3, "depth");
  const int n = 50000, bins = 8;
  std::vector<double> counts(bins + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    DepthDraw dd = sample_depth(1.0, rng);
    counts[static_cast<std::size_t>(std::min(dd.depth, bins))] += 1.0;
  }
  double chi2 = 0.0, rest = 1.0;
  for (int k = 0; k <= bins; ++k) {
    double p = k < bins ? oracle::depth_pmf(1.0, k) : rest;
    rest -= p;
    double e = n * p;
    chi2 += (counts[static_cast<std::size_t>(k)] - e) * (counts[static_cast<std::size_t>(k)] - e) / e;
  }
  CHECK(chi_squared_sf(chi2, bins) > 0.001);
}

TEST_CASE("conditional covariance of a single leaf") {
  CollisionModel m = cross2d(0.3);
  Rng rng(4, "cov");
  WeightArray t = build_weight_tree(m, 0, rng);
  SymMatrix s0(2, {2.0, 0.5, 0.5, 1.0});
  PsdMatrix c = conditional_covariance(t, s0);
  CHECK(c(0, 0) == 2.0);
  CHECK(c(0, 1) == 0.5);
  CHECK(c(1, 1) == 1.0);
}

TEST_CASE("gamma bound") {
  for (double kp : {0.5, 0.7})
    for (int n : {0, 1, 8, 100}) CHECK(gamma_bound(kp, n) == doctest::Approx(oracle::gamma_ratio(kp, n)).epsilon(1e-10));
}

TEST_CASE("transient law at time zero is the initial law") {
  CollisionModel m = cross2d(0.3);
  InitialLaw mu0 = InitialLaw::uniform_ball(2);
  TransientEnsemble e = sample_transient(m, mu0, 0.0, 1000, Rng(5, "t0"));
  CHECK(e.mean_depth == 0.0);
  VelocityEnsemble direct = sample_initial(mu0, 1000, Rng(5, "t0"));
  // same law; compare temperatures loosely
  CHECK(std::abs(e.samples.temperature() - 1.0) < 0.1);
  CHECK(std::abs(direct.temperature() - 1.0) < 0.1);
}

TEST_CASE("transient sampling conserves temperature") {
  CollisionModel m = maxwell(3, ScalarLaw::two_point(1.8, 0.6, 1.0 / 7));
  InitialLaw mu0 = InitialLaw::uniform_ball(3);
  const std::size_t n = 20000;
  TransientEnsemble e = sample_transient(m, mu0, 2.0, n, Rng(6, "temp"));
  RunningStats s;
  for (std::size_t i = 0; i < e.samples.size(); ++i) s.add(e.samples[i].squared_norm() / 3.0);
  CHECK(std::abs(s.mean() - 1.0) < 4 * s.stderr_of_mean());
  REQUIRE(e.samples.known_covariance().has_value());
  CHECK(e.samples.known_covariance()->trace() == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("transient sampling is reproducible") {
  CollisionModel m = cross2d(0.3);
  InitialLaw mu0 = InitialLaw::standard_gaussian(2);
  TransientEnsemble a = sample_transient(m, mu0, 1.5, 500, Rng(7, "rep"));
  TransientEnsemble b = sample_transient(m, mu0, 1.5, 500, Rng(7, "rep"));
  CHECK(a.samples.flat() == b.samples.flat());
}
