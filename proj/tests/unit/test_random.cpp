#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "rmkac/random.hpp"

using namespace rmkac;

TEST_CASE("philox known-answer vectors") {
  for (const auto& v : oracle::philox_vectors()) {
    auto out = philox4x32_10(v.counter, v.key);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out[i] == v.expected[i]);
  }
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a(42, "x"), b(42, "x"), c(42, "y"), d(43, "x");
  std::uint64_t xa = a(), xb = b(), xc = c(), xd = d();
  CHECK(xa == xb);
  CHECK(xa != xc);
  CHECK(xa != xd);
  Rng p(7, 0u);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(p.child(i)());
  CHECK(firsts.size() == 1000);
  // children depend only on the parent's identity, not on its draw position
  Rng q(7, 0u);
  (void)q();
  CHECK(q.child(5)() == p.child(5)());
}

TEST_CASE("uniform and normal moments") {
  Rng r(1, "moments");
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    double z = r.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(su2 / n - 1.0 / 3) < 4 * std::sqrt(4.0 / 45 / n));
  CHECK(std::abs(sn / n) < 4 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(sn4 / n - 3) < 4 * std::sqrt(96.0 / n));
}

TEST_CASE("index is unbiased over small ranges") {
  Rng r(3, "index");
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.index(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 4 * std::sqrt(10000.0 * 6 / 7));
}

TEST_CASE("sphere and Haar draws") {
  Rng r(4, "haar");
  for (int d = 1; d <= kMaxDim; ++d) {
    Vector u = uniform_sphere(d, r);
    CHECK(u.norm() == doctest::Approx(1.0));
    Matrix q = haar_rotation(d, r);
    Matrix qtq = q.transpose() * q;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) CHECK(qtq(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    CHECK(oracle::determinant(q) == doctest::Approx(1.0));
  }
  // first column of a Haar rotation is uniform on the sphere: E q_11^2 = 1/d
  const int d = 3, n = 40000;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    Matrix q = haar_rotation(d, r);
    s += q(0, 0) * q(0, 0);
  }
  double sd = std::sqrt((3.0 / 15 - 1.0 / 9) / n);
  CHECK(std::abs(s / n - 1.0 / d) < 4 * sd);
}
