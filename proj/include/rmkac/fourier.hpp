// Fourier-based distances between velocity laws and between laws on PSD matrices.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rmkac/ensembles.hpp"
#include "rmkac/models.hpp"

namespace rmkac {

// Directions times log-spaced radii.
struct FourierGrid {
  int dim = 0;
  std::vector<Vector> directions;
  std::vector<double> radii;

  std::size_t size() const { return directions.size() * radii.size(); }
  Vector point(std::size_t k) const;  // direction k / radii.size(), radius k % radii.size()
};

FourierGrid make_fourier_grid(int dim, int directions = 64, int radii = 24, double r_min = 1e-2, double r_max = 1e2,
                              std::span<const Vector> extra_directions = {});
// grid with the model's critical directions added
FourierGrid make_fourier_grid(const CollisionModel& model, int directions = 64, int radii = 24, double r_min = 1e-2,
                              double r_max = 1e2);

std::complex<double> char_fn(const VelocityEnsemble& ens, const Vector& xi);
std::vector<std::complex<double>> char_fn(const VelocityEnsemble& ens, std::span<const Vector> grid);

// cos x - 1 + x^2 / 2 without cancellation for small x
double cos_remainder(double x);

// Per grid point mean and variance of cos(xi.v) - 1 + (xi.v)^2 / 2: the second-order
// remainder of the characteristic function of the point-symmetrized law.
struct RemainderTable {
  FourierGrid grid;
  std::vector<double> mean;
  std::vector<double> variance;
  double effective_size = 0.0;
  SymMatrix covariance;  // known covariance when available, else the empirical second moment
  bool covariance_known = false;
};

RemainderTable remainder_table(const VelocityEnsemble& ens, const FourierGrid& grid);

struct MetricReport {
  double value = 0.0;
  double alpha = 0.0;
  double weighted_part = 0.0;
  double covariance_part = 0.0;
  double stderr_ = 0.0;  // of the weighted part at the maximizer
  Vector argmax;
  std::size_t grid_points = 0;
};

// sup_xi |r_1(xi) - r_2(xi)| / w(xi) + alpha |C_1 - C_2|_inf over the grid.
// Both ensembles must be centered; throws std::domain_error otherwise.
MetricReport d_omega(const VelocityEnsemble& a, const VelocityEnsemble& b, const WeightFunction& weight, double alpha,
                     const FourierGrid& grid);
MetricReport d_omega(const RemainderTable& a, const RemainderTable& b, const WeightFunction& weight, double alpha);

void require_centered(const VelocityEnsemble& ens);

// alpha = 4 d^(p/2) kappa_p / (1 - kappa); for kappa >= 1 the rule does not apply and
// alpha = 4 d^(p/2) kappa_p is returned instead.
double alpha_rule(int dim, double p, double kappa, double kappa_p);
// max(kappa_p, kappa + 2 d^(p/2) kappa_p / alpha)
double lambda_bound(int dim, double p, double kappa, double kappa_p, double alpha);

// One application of the collision operator to an empirical law: each output
// is L v + R v* with v, v* drawn uniformly with replacement and a fresh pair.
VelocityEnsemble one_collision_step(const VelocityEnsemble& ens, const CollisionModel& model, const Rng& rng);

struct ContractionMeasurement {
  double ratio = 0.0;
  MetricReport before;
  MetricReport after;
  double noise_floor = 0.0;
};

// d(Q[mu_1], Q[mu_2]) / d(mu_1, mu_2); throws std::domain_error when the input
// distance does not exceed the split-half noise floor of the first ensemble.
ContractionMeasurement contraction_ratio(const CollisionModel& model, const VelocityEnsemble& a,
                                         const VelocityEnsemble& b, const WeightFunction& weight, double alpha,
                                         const FourierGrid& grid, const Rng& rng);

struct RatePoint {
  double time = 0.0;
  double metric = 0.0;
  double stderr_ = 0.0;
  bool above_floor = false;
  std::size_t capped = 0;
  double mean_depth = 0.0;
};

struct RateResult {
  std::vector<RatePoint> points;
  double noise_floor = 0.0;
  double floor_factor = 2.0;  // points count as signal when metric > floor_factor * noise_floor
  double fitted_rate = 0.0;
  double rate_stderr = 0.0;
  double theoretical_rate = 0.0;  // 1 - lambda
  double lambda = 0.0;
  double alpha = 0.0;
  bool monotone = true;
  std::size_t fit_points = 0;
};

// Exponential decay of d(mu_t, mu_inf). mu_inf and mu_inf_replicate are two
// independent sample sets of the stationary law; their distance is the noise floor.
RateResult convergence_rate(const CollisionModel& model, const InitialLaw& mu0, std::span<const double> times,
                            std::size_t samples, const VelocityEnsemble& mu_inf,
                            const VelocityEnsemble& mu_inf_replicate, const WeightFunction& weight, double alpha,
                            double lambda, const FourierGrid& grid, const Rng& rng);

// ---- laws on PSD matrices ----

// Xi = c Q diag(tau) Q^T over random frames Q, sign patterns tau (one per pair
// {tau, -tau}) and log-spaced scales c.
struct MatrixGrid {
  int dim = 0;
  std::vector<SymMatrix> units;  // c = 1 elements
  std::vector<double> scales;
  std::size_t size() const { return units.size() * scales.size(); }
};

MatrixGrid make_matrix_grid(int dim, int frames = 16, int scales = 12, double c_min = 1e-2, double c_max = 1e2,
                            std::uint64_t seed = 0x5eed);

struct MatrixMetricReport {
  double value = 0.0;
  double weighted_part = 0.0;
  double covariance_part = 0.0;
  double alpha = 0.0;
  std::size_t grid_points = 0;
};

// sup |nu_1(Xi) - nu_2(Xi) + i tr(Xi (E S_1 - E S_2))| / w(Xi) + alpha |E S_1 - E S_2|_inf with
// nu(Xi) = E exp(-i tr(Xi S)) and w(Xi) = d^-(p/2 - 1) |Xi|_1^(p/2). At most max_members
// members of each ensemble enter the Fourier part (0: all).
MatrixMetricReport matrix_metric_surrogate(const MatrixEnsemble& a, const MatrixEnsemble& b, double p, double alpha,
                                           const MatrixGrid& grid, std::size_t max_members = 0);

}  // namespace rmkac
