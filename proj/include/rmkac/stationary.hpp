// Population dynamics for the stationary law of the random PSD matrix S solving
// S = L S' L^T + R S'' R^T in law; the stationary velocity law is sqrt(S) times
// a standard Gaussian.
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmkac/ensembles.hpp"
#include "rmkac/fourier.hpp"
#include "rmkac/models.hpp"

namespace rmkac {

class DegenerateEnsemble : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the distance between two chains started apart stops shrinking.
struct IterationRecord;
class StationaryDivergence : public std::runtime_error {
 public:
  StationaryDivergence(const std::string& what, std::vector<IterationRecord> history);
  const std::vector<IterationRecord>& history() const;

 private:
  std::shared_ptr<const std::vector<IterationRecord>> history_;
};

// Each output member is L S_a L^T + R S_b R^T with a, b uniform (with replacement)
// and a fresh pair; the result is rescaled so that the mean trace is d. The
// applied factor is stored in *renormalization when given.
MatrixEnsemble iterate_T(const MatrixEnsemble& ens, const CollisionModel& model, const Rng& rng,
                         double* renormalization = nullptr);

struct StationaryOptions {
  std::size_t ensemble_size = 16384;
  int max_iterations = 50;
  double tolerance = 1e-3;
  // starting point mass; default: the model's known fixed point, else the identity
  std::optional<PsdMatrix> start;
  // run a second chain from a traceless perturbation of the start and stop with
  // StationaryDivergence when the two chains do not approach each other
  bool probe = true;
  int stall_iterations = 5;
  std::size_t monitor_members = 4096;
  double alpha = 1.0;
  double p = 0.0;  // 0: the model weight's exponent
  int grid_frames = 16;
  int grid_scales = 12;
};

struct IterationRecord {
  int iteration = 0;
  double renormalization = 1.0;
  double successive_metric = 0.0;
  double probe_metric = -1.0;  // negative once the probe has been retired
};

struct StationaryResult {
  MatrixEnsemble ensemble;
  std::vector<IterationRecord> history;
  int iterations = 0;
  bool converged = false;
  double initial_probe_metric = 0.0;
  std::vector<std::string> warnings;
};

StationaryResult solve_stationary(const CollisionModel& model, const StationaryOptions& options, const Rng& rng);

// count draws of sqrt(S) w with S drawn uniformly from the ensemble and w standard
// Gaussian. The result carries the ensemble mean as its known covariance.
VelocityEnsemble sample_mu_inf(const MatrixEnsemble& ens, std::size_t count, const Rng& rng);

// E exp(-xi^T S xi / 2) over the ensemble
double psi_eval(const MatrixEnsemble& ens, const Vector& xi);

struct PsiResidual {
  double max_residual = 0.0;
  Vector argmax;
  std::vector<double> residuals;
};

// |Psi(xi) - E[Psi(L^T xi) Psi(R^T xi)]| on the grid. The expectation is estimated
// with `pairs` draws of (L, R), each paired with an independent pair of ensemble
// members, which is unbiased for the product of the two ensemble averages.
PsiResidual psi_fixed_point_residual(const MatrixEnsemble& ens, const CollisionModel& model,
                                     std::span<const Vector> grid, std::size_t pairs, const Rng& rng);

// Directions times radii for residual checks.
std::vector<Vector> psi_grid(int dim, int directions, std::span<const double> radii);

}  // namespace rmkac
