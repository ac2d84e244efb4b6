#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "rmkac/diagnostics.hpp"
#include "rmkac/directions.hpp"
#include "rmkac/stationary.hpp"

using namespace rmkac;

namespace {

std::vector<double> log_radii(double lo, double hi, int n) {
  std::vector<double> r;
  for (int k = 0; k < n; ++k) r.push_back(lo * std::pow(hi / lo, k / (n - 1.0)));
  return r;
}

}  // namespace

TEST_CASE("temperature with standard error") {
  VelocityEnsemble e = VelocityEnsemble::from_vectors({Vector{1.0, 1.0}, Vector{-1.0, -1.0}, Vector{2.0, 0.0}});
  Estimate t = temperature(e);
  CHECK(t.value == doctest::Approx((2.0 + 2.0 + 4.0) / 3 / 2));
  CHECK(t.stderr_ > 0.0);
}

TEST_CASE("Hill estimator recovers a Pareto index") {
  InitialLaw law = InitialLaw::radial_pareto(2, 3.0, 1.0);
  VelocityEnsemble e = sample_initial(law, 200000, Rng(1, "pareto"));
  TailReport r = hill_tail_index(e, {}, 3.0, 2.0);
  REQUIRE(r.plateau.has_value());
  CHECK(std::abs(*r.plateau - 3.0) < 0.3);
  CHECK(r.verdict == TailVerdict::consistent);
  TailReport far = hill_tail_index(e, {}, 8.0, 2.0);
  CHECK(far.verdict == TailVerdict::indeterminate);
  TailReport none = hill_tail_index(e);
  CHECK(none.verdict == TailVerdict::no_prediction);
}

TEST_CASE("Hill estimator flags light tails") {
  VelocityEnsemble e = sample_initial(InitialLaw::standard_gaussian(2), 100000, Rng(2, "gauss"));
  TailReport r = hill_tail_index(e, {}, 6.0, 4.0);
  CHECK(r.verdict == TailVerdict::light_tail);
  CHECK_FALSE(r.plateau.has_value());
  VelocityEnsemble small = sample_initial(InitialLaw::standard_gaussian(2), 100, Rng(2, "gauss"));
  CHECK_THROWS_AS(hill_tail_index(small), std::invalid_argument);
}

TEST_CASE("decay of the characteristic function") {
  auto dirs = sphere_directions(1, 1);
  auto radii = log_radii(0.01, 100.0, 25);
  VelocityEnsemble g = sample_initial(InitialLaw::standard_gaussian(1), 100000, Rng(3, "decay"));
  DecayReport dg = char_decay(g, dirs, radii);
  CHECK(dg.verdict == DecayVerdict::superpolynomial);
  CHECK(dg.sobolev);
  // Laplace law: characteristic function 1 / (1 + r^2)
  std::vector<Vector> lap;
  Rng rng(4, "laplace");
  for (int i = 0; i < 100000; ++i) {
    double x = -std::log(rng.uniform_positive());
    lap.push_back(Vector{rng.bernoulli(0.5) ? x : -x});
  }
  DecayReport dl = char_decay(VelocityEnsemble::from_vectors(lap), dirs, radii);
  CHECK(dl.verdict == DecayVerdict::polynomial);
  CHECK(dl.exponent > 0.5);
  // symmetric atoms never decay
  VelocityEnsemble atoms = sample_initial(InitialLaw::symmetric_atoms({Vector{1.0}}, {1.0}), 10000, Rng(5, "atoms"));
  std::vector<double> integers;
  for (int k = 0; k < 25; ++k) integers.push_back(2 * std::numbers::pi * std::pow(10.0, k / 6.0));
  CHECK(char_decay(atoms, dirs, integers).verdict == DecayVerdict::no_decay);
  CHECK_THROWS_AS(char_decay(g, dirs, log_radii(1.0, 50.0, 5)), std::invalid_argument);
}

TEST_CASE("symmetry test") {
  FourierGrid grid = make_fourier_grid(2, 16, 8, 0.1, 10.0);
  std::vector<Matrix> group{-1.0 * Matrix::identity(2), Matrix(2, {0.0, -1.0, 1.0, 0.0})};
  VelocityEnsemble iso = sample_initial(InitialLaw::standard_gaussian(2), 20000, Rng(6, "iso"));
  SymmetryReport ok = symmetry_test(iso, group, grid);
  CHECK(ok.pass);
  CHECK(ok.per_element.size() == 2);
  InitialLaw axes = InitialLaw::symmetric_atoms({Vector{1.0, 0.0}, Vector{0.0, 1.0}}, {0.3, 0.7});
  VelocityEnsemble aniso = sample_initial(axes, 20000, Rng(7, "aniso"));
  SymmetryReport bad = symmetry_test(aniso, group, grid);
  CHECK_FALSE(bad.pass);
  CHECK(bad.element_at_max == 1);
  std::vector<Matrix> not_orthogonal{2.0 * Matrix::identity(2)};
  CHECK_THROWS(symmetry_test(iso, not_orthogonal, grid));
}

TEST_CASE("explosion needs infinite temperature") {
  CollisionModel m = cross2d(0.3);
  std::vector<double> times{0.0, 1.0};
  CHECK_THROWS_AS(explosion_experiment(m, InitialLaw::standard_gaussian(2), 1.0, times, 100, Rng(8, "x")),
                  std::invalid_argument);
}

TEST_CASE("H function of a Gaussian member") {
  PsdMatrix s(SymMatrix(2, {1.5, 0.2, 0.2, 0.5}));
  MatrixEnsemble e = MatrixEnsemble::point_mass(s, 2);
  // 32-node tensor quadrature loses accuracy once u gets large
  for (double u : {0.1, 0.5, 1.0}) CHECK(h_function(e, u) == doctest::Approx(oracle::gaussian_h_member(s.sym(), u)).epsilon(1e-6));
  CHECK(h_function(e, 2.0) == doctest::Approx(oracle::gaussian_h_member(s.sym(), 2.0)).epsilon(1e-3));
  double prev = h_function(e, 0.1);
  for (double u : {0.25, 0.5, 1.0, 2.0}) {
    double h = h_function(e, u);
    CHECK(h < prev);
    prev = h;
  }
  PsdMatrix iso = PsdMatrix::identity(3);
  MatrixEnsemble ei = MatrixEnsemble::point_mass(iso, 2);
  for (double u : {0.5, 2.0}) {
    double ref = oracle::gaussian_h_member(iso.sym(), u);
    CHECK(h_function(ei, u) == doctest::Approx(ref).epsilon(u <= 1.0 ? 1e-6 : 1e-4));
    CHECK(h_function(ei, u, true) == doctest::Approx(ref).epsilon(1e-8));
  }
}
