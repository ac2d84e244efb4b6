// Monte Carlo checks of the structural conditions on a collision model.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmkac/matrix.hpp"
#include "rmkac/models.hpp"
#include "rmkac/random.hpp"

namespace rmkac {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

// ---- first condition: E[L^T L + R^T R] = 1 ----

struct NormalizationCheck {
  SymMatrix deviation;   // E[L^T L + R^T R] - 1
  SymMatrix stderr_;     // entrywise standard error
  double deviation_norm = 0.0;  // spectral norm
  double max_stderr = 0.0;
  std::size_t samples = 0;
  Verdict verdict = Verdict::inconclusive;
};

NormalizationCheck check_normalization(const CollisionModel& model, std::size_t samples, const Rng& rng);

// ---- the linear map M -> E[L M L^T + R M R^T] on symmetric matrices ----

class UpsilonEstimate {
 public:
  static constexpr int kBatches = 32;

  UpsilonEstimate(int dim, std::vector<double> mean, std::vector<std::vector<double>> batches, std::size_t samples);

  int dim() const { return dim_; }
  int basis_size() const { return size_; }
  std::size_t samples() const { return samples_; }
  SymMatrix apply(const SymMatrix& m) const;
  SymMatrix apply_batch(int batch, const SymMatrix& m) const;
  int batch_count() const { return static_cast<int>(batches_.size()); }
  // estimate built from the batches with index % 2 == parity
  UpsilonEstimate half(int parity) const;
  // D x D matrix in the orthonormal symmetric basis, row-major
  const std::vector<double>& coordinates() const { return mean_; }
  // entrywise standard error from the batch means
  std::vector<double> coordinate_stderr() const;

 private:
  SymMatrix apply_coords(const std::vector<double>& a, const SymMatrix& m) const;
  int dim_;
  int size_;
  std::vector<double> mean_;
  std::vector<std::vector<double>> batches_;
  std::size_t samples_;
};

UpsilonEstimate estimate_upsilon(const CollisionModel& model, std::size_t samples, const Rng& rng);

// Positive definite fixed point with trace d, by power iteration with trace
// renormalization. Throws ConvergenceError or NotPositiveSemidefinite.
PsdMatrix fixed_point_sigma(const UpsilonEstimate& upsilon, double tolerance = 1e-8, int max_iterations = 10000);

struct ContractionEstimate {
  // ratio |Upsilon(M)|_inf / |M|_inf at the maximizer. The maximizer is found on one
  // half of the batches and scored on the other (then swapped), so the noise that
  // picks the direction does not also inflate the value.
  double kappa = 0.0;
  double stderr_ = 0.0;
  SymMatrix argmax;
  bool near_one = false;   // kappa >= 1 - 3 stderr
  int starts = 0;
};

ContractionEstimate traceless_contraction(const UpsilonEstimate& upsilon, int restarts, const Rng& rng);

// ---- second condition: sup_xi E[w(L^T xi) + w(R^T xi)] / w(xi) ----

struct WeightContraction {
  double kappa_p = 0.0;
  double stderr_ = 0.0;
  Vector argmax;
  std::size_t directions = 0;
  std::size_t samples = 0;
};

WeightContraction kappa_p_estimate(const CollisionModel& model, const WeightFunction& weight, int directions,
                                   std::size_t samples, const Rng& rng);

// Weight with a smaller exponent p' built from w and the fixed point; upper
// bound (zeta_+ / zeta_-)^eps wbar^(1-eps) with eps = (p - p') / (p - 2).
WeightFunction weight_prime(const WeightFunction& weight, double p_prime, const PsdMatrix& sigma_star);

// ---- moment divergence ----

struct KappaStar {
  double value = 0.0;
  double stderr_ = 0.0;
  double left_part = 0.0;   // inf_e E|L e|^s
  double right_part = 0.0;  // inf_e E|R e|^s
};

// Draws are stored once so that any number of s values share common random numbers.
class KappaStarSampler {
 public:
  KappaStarSampler(const CollisionModel& model, int directions, std::size_t samples, const Rng& rng);
  KappaStar evaluate(double s) const;
  // smallest s in [s_lo, s_hi] with kappa_star(s) > 1, or nullopt if none
  std::optional<double> threshold(double s_lo, double s_hi, double tolerance = 1e-3) const;
  std::size_t directions() const { return n_dirs_; }

 private:
  std::size_t n_dirs_;
  std::size_t n_samples_;
  // log |L e_k| and log |R e_k| per sample, sample-major
  std::vector<double> log_left_;
  std::vector<double> log_right_;
};

KappaStar kappa_star(const CollisionModel& model, double s, int directions, std::size_t samples, const Rng& rng);

// ---- regularity ----

struct RegularityCheck {
  double m_hat = 0.0;  // sup_e E[min(|L^T e|, |R^T e|)^(-delta)]
  double M_hat = 0.0;  // sup_e E[max(|L^T e|, |R^T e|)^(-a_bar)]
  bool m_diverged = false;
  bool M_diverged = false;
  // the decay bound needs, for every e, P(L^T e = R^T e = 0) = 0 and P(L^T e != 0 != R^T e) > 0
  bool applicable = true;
  std::string reason;
};

RegularityCheck regularity_conditions(const CollisionModel& model, double delta, double a_bar, int directions,
                                      std::size_t samples, const Rng& rng);

// ---- combined report ----

struct VerifyOptions {
  std::size_t samples = 200000;
  int directions = 0;  // 0: 512 for d <= 3, 2048 otherwise
  int restarts = 32;
  std::size_t kappa_p_samples = 200000;
};

struct AssumptionReport {
  std::string model;
  int dim = 0;
  NormalizationCheck normalization;
  std::optional<SymMatrix> sigma_star;
  std::string sigma_star_error;
  ContractionEstimate contraction;
  WeightContraction weight_contraction;
  Verdict assumption_1 = Verdict::inconclusive;
  Verdict assumption_2 = Verdict::inconclusive;
  Verdict assumption_3 = Verdict::inconclusive;
  std::size_t upsilon_samples = 0;
  std::size_t directions = 0;
  std::vector<std::string> caveats;

  bool all_pass() const;
  bool any_fail() const;
};

AssumptionReport verify(const CollisionModel& model, const VerifyOptions& options, const Rng& rng);
nlohmann::json to_json(const AssumptionReport& report);
std::string to_table(const AssumptionReport& report);
nlohmann::json sym_to_json(const SymMatrix& m);

int default_direction_count(int dim);

}  // namespace rmkac
