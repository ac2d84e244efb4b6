#include <doctest.h>

#include "oracles.hpp"
#include "rmkac/matrix.hpp"
#include "rmkac/random.hpp"

using namespace rmkac;

namespace {

SymMatrix random_sym(int d, Rng& rng) {
  Matrix a(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  return SymMatrix(a);
}

PsdMatrix random_psd(int d, Rng& rng) {
  Matrix a(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  return PsdMatrix::congruence(a, PsdMatrix::identity(d));
}

}  // namespace

TEST_CASE("eigenvalues agree with Eigen's self-adjoint solver") {
  Rng rng(1, "eig");
  for (int d = 1; d <= kMaxDim; ++d)
    for (int rep = 0; rep < 20; ++rep) {
      SymMatrix m = random_sym(d, rng);
      SpectralDecomposition sd = spectral_decompose(m);
      std::vector<double> ref = oracle::eigenvalues(m);
      for (int i = 0; i < d; ++i) CHECK(sd.values[i] == doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-10));
    }
}

TEST_CASE("spectral decomposition reconstructs and is orthonormal") {
  Rng rng(2, "eig");
  for (int d = 1; d <= kMaxDim; ++d) {
    SymMatrix m = random_sym(d, rng);
    SpectralDecomposition sd = spectral_decompose(m);
    SymMatrix back = sd.reconstruct();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) CHECK(back(i, j) == doctest::Approx(m(i, j)).epsilon(1e-10));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        CHECK(sd.vectors[static_cast<std::size_t>(i)].dot(sd.vectors[static_cast<std::size_t>(j)]) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
  }
}

TEST_CASE("eigenvalues are descending and eigenvectors sign-normalized") {
  SymMatrix m(3, {2, 1, 0, 1, 2, 0, 0, 0, 5});
  SpectralDecomposition sd = spectral_decompose(m);
  CHECK(sd.values[0] == doctest::Approx(5.0));
  CHECK(sd.values[1] == doctest::Approx(3.0));
  CHECK(sd.values[2] == doctest::Approx(1.0));
  for (const auto& v : sd.vectors) {
    int k = 0;
    while (std::abs(v[k]) <= 1e-12) ++k;
    CHECK(v[k] > 0.0);
  }
  // repeated eigenvalues: identity keeps the coordinate axes
  SpectralDecomposition id = spectral_decompose(SymMatrix::identity(4));
  for (int i = 0; i < 4; ++i) CHECK(id.values[i] == 1.0);
}

TEST_CASE("psd_sqrt squares back") {
  Rng rng(3, "sqrt");
  for (int d = 1; d <= kMaxDim; ++d) {
    PsdMatrix s = random_psd(d, rng);
    PsdMatrix r = psd_sqrt(s);
    Matrix sq = r.matrix() * r.matrix();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) CHECK(sq(i, j) == doctest::Approx(s(i, j)).epsilon(1e-9).scale(1.0));
  }
  PsdMatrix deg(SymMatrix::diagonal(Vector{4.0, 0.0}));
  PsdMatrix r = psd_sqrt(deg);
  CHECK(r(0, 0) == doctest::Approx(2.0));
  CHECK(r(1, 1) == 0.0);
  CHECK(r(0, 1) == 0.0);
}

TEST_CASE("PsdMatrix rejects indefinite input") {
  CHECK_THROWS_AS(PsdMatrix(SymMatrix::diagonal(Vector{1.0, -0.5})), NotPositiveSemidefinite);
  CHECK_NOTHROW(PsdMatrix(SymMatrix::diagonal(Vector{1.0, -1e-14})));
}

TEST_CASE("dimension mismatches throw") {
  CHECK_THROWS_AS(Matrix::identity(2) * Matrix::identity(3), DimensionMismatch);
  CHECK_THROWS_AS(Vector(2) + Vector(3), DimensionMismatch);
  CHECK_THROWS_AS(Matrix(kMaxDim + 1), DimensionMismatch);
}

TEST_CASE("Schatten norms") {
  SymMatrix m = SymMatrix::diagonal(Vector{3.0, -4.0});
  CHECK(matrix_norm(m, NormOrder::one) == doctest::Approx(7.0));
  CHECK(matrix_norm(m, NormOrder::two) == doctest::Approx(5.0));
  CHECK(matrix_norm(m, NormOrder::inf) == doctest::Approx(4.0));
}

TEST_CASE("symmetric basis is orthonormal and round-trips") {
  for (int d = 1; d <= 5; ++d) {
    const int n = sym_basis_size(d);
    CHECK(n == d * (d + 1) / 2);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        CHECK(trace_inner(sym_basis_element(d, a), sym_basis_element(d, b)) == doctest::Approx(a == b ? 1.0 : 0.0));
    Rng rng(static_cast<std::uint64_t>(d), "basis");
    SymMatrix m = random_sym(d, rng);
    SymMatrix back = sym_from_coordinates(d, sym_coordinates(m));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) CHECK(back(i, j) == doctest::Approx(m(i, j)));
  }
}

TEST_CASE("congruence and transpose_times") {
  Matrix a(2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  Vector v{1.0, -1.0};
  Vector t = transpose_times(a, v);
  CHECK(t[0] == doctest::Approx(-2.0));
  CHECK(t[1] == doctest::Approx(-2.0));
  SymMatrix c = SymMatrix::congruence(a, SymMatrix::identity(2));
  Matrix ref = a * a.transpose();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(c(i, j) == doctest::Approx(ref(i, j)));
}
