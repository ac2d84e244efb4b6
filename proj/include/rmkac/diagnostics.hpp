// Temperature, tail index, characteristic-function decay, symmetry and explosion checks.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmkac/ensembles.hpp"
#include "rmkac/fourier.hpp"
#include "rmkac/models.hpp"

namespace rmkac {

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

// (1/d) E|v|^2 with its standard error
Estimate temperature(const VelocityEnsemble& ens);

// ---- tails ----

enum class TailVerdict {
  consistent,     // plateau within one unit of the predicted threshold
  indeterminate,  // plateau between p and s* - 1, where moment bounds say nothing
  inconsistent,
  light_tail,     // no plateau; estimates keep growing into the extreme order statistics
  no_prediction,  // no threshold was supplied
};
std::string to_string(TailVerdict v);

struct HillOptions {
  double k_lo_exponent = 0.3;  // k from N^0.3
  double k_hi_exponent = 0.6;  // to N^0.6
  int k_count = 40;            // log-spaced, deduplicated
  double window_fraction = 0.25;
  double drift_threshold = 0.3;
};

struct TailReport {
  std::vector<int> ks;
  std::vector<double> estimates;  // tail index 1 / H_k
  std::optional<double> plateau;  // none for light tails
  int window_lo = 0;              // k range of the plateau window
  int window_hi = 0;
  double plateau_cv = 0.0;
  double drift = 0.0;  // relative change of the fitted trend across the k range
  std::optional<double> s_star;
  std::optional<double> p;
  TailVerdict verdict = TailVerdict::no_prediction;
};

// Hill estimator on the order statistics of |v|. Throws std::invalid_argument when
// N < 10 k_max.
TailReport hill_tail_index(const VelocityEnsemble& ens, const HillOptions& options = {},
                           std::optional<double> s_star = std::nullopt, std::optional<double> p = std::nullopt);

// ---- characteristic function decay ----

enum class DecayVerdict { no_decay, polynomial, superpolynomial };
std::string to_string(DecayVerdict v);

struct DecayPoint {
  double radius = 0.0;
  double sup_abs = 0.0;  // max over directions of |mu_hat|
  bool above_floor = false;
};

struct DecayReport {
  std::vector<DecayPoint> points;
  double noise_floor = 0.0;  // 3 / sqrt(N_eff)
  double exponent = 0.0;     // fitted a in sup|mu_hat| ~ |xi|^-a
  std::size_t fit_points = 0;
  DecayVerdict verdict = DecayVerdict::no_decay;
  // a > d/2; always true for super-polynomial decay
  bool sobolev = false;
};

// Throws std::invalid_argument when the radii span less than two decades and
// std::domain_error when no radius is above the noise floor.
DecayReport char_decay(const VelocityEnsemble& ens, std::span<const Vector> directions, std::span<const double> radii);

// ---- symmetry ----

struct SymmetryReport {
  double max_discrepancy = 0.0;
  double stderr_at_max = 0.0;
  double noise_floor = 0.0;  // largest standard error over grid and group
  Vector argmax;
  std::size_t element_at_max = 0;
  std::vector<double> per_element;  // max discrepancy per group element
  bool pass = true;
  double tolerance = 0.0;
};

// max over the grid and the group of |mu_hat(xi) - mu_hat(Theta^T xi)|; passes iff
// every point is within 3 standard errors plus tolerance.
SymmetryReport symmetry_test(const VelocityEnsemble& ens, std::span<const Matrix> group, const FourierGrid& grid,
                             double tolerance = 0.0);

// ---- explosion ----

struct ExplosionReport {
  std::vector<double> times;
  double radius = 0.0;
  std::vector<double> mass;
  std::vector<double> stderr_;
  std::vector<std::size_t> capped;
  double mann_kendall_p = 1.0;
  int mann_kendall_s = 0;
  bool halved = false;
  bool pass = false;
};

// Mass of B_r(0) under mu(t). Throws std::invalid_argument for a finite-temperature mu0.
ExplosionReport explosion_experiment(const CollisionModel& model, const InitialLaw& mu0, double radius,
                                     std::span<const double> times, std::size_t count, const Rng& rng);

// ---- H function ----

// H(u) = integral of exp(-|xi|^2 / 2) Psi(u xi) d xi by Gauss-Hermite tensor quadrature
// (nodes per axis, fewer above d = 3), or a radial Gauss-Laguerre rule along e_1 when
// radial is set.
double h_function(const MatrixEnsemble& ens, double u, bool radial = false, int nodes = 32);
std::vector<double> h_function(const MatrixEnsemble& ens, std::span<const double> us, bool radial = false,
                               int nodes = 32);

}  // namespace rmkac
