// Wild sum representation of the transient solution.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rmkac/ensembles.hpp"
#include "rmkac/matrix.hpp"
#include "rmkac/models.hpp"

namespace rmkac {

// The n + 1 leaf weights beta_0, ..., beta_n of a random binary tree with n
// internal nodes, in left-to-right order. Stored flat.
class WeightArray {
 public:
  WeightArray(int dim, std::vector<double> flat);

  int dim() const { return dim_; }
  int depth() const { return static_cast<int>(size()) - 1; }
  std::size_t size() const { return flat_.size() / stride(); }
  Matrix beta(std::size_t j) const { return Matrix(dim_, raw(j)); }
  std::span<const double> raw(std::size_t j) const { return {flat_.data() + j * stride(), stride()}; }

 private:
  std::size_t stride() const { return static_cast<std::size_t>(dim_ * dim_); }
  int dim_;
  std::vector<double> flat_;
};

// Starts from (1) and n times replaces a uniformly chosen leaf beta by
// (beta L, beta R) with a fresh pair (L, R).
WeightArray build_weight_tree(const CollisionModel& model, int n, Rng& rng);

// sum_j beta_j X_j with X_j i.i.d. from the initial law
Vector wild_sum(const WeightArray& tree, const InitialLaw& mu0, Rng& rng);

// sum_j beta_j S0 beta_j^T: the covariance of the Wild sum given the tree.
PsdMatrix conditional_covariance(const WeightArray& tree, const SymMatrix& s0);

// Depth truncation max(64 (1 + t), ceil(ln 1e-6 / ln(1 - e^-t))): the second
// term keeps the truncated geometric mass below 1e-6 for large t.
int depth_cap(double t);

struct DepthDraw {
  int depth = 0;
  bool capped = false;
};

// P(n) = e^-t (1 - e^-t)^n, truncated at depth_cap(t).
DepthDraw sample_depth(double t, Rng& rng);

struct TransientDraw {
  Vector velocity;
  int depth = 0;
  bool capped = false;
};

TransientDraw sample_mu_t(const CollisionModel& model, const InitialLaw& mu0, double t, Rng& rng);

struct TransientEnsemble {
  VelocityEnsemble samples;
  double time = 0.0;
  std::size_t capped = 0;
  double mean_depth = 0.0;
};

// count independent draws from mu_t, one substream per draw. When the initial
// covariance is known the ensemble carries the average conditional covariance
// as its known covariance.
TransientEnsemble sample_transient(const CollisionModel& model, const InitialLaw& mu0, double t, std::size_t count,
                                   const Rng& rng);

struct MpPoint {
  int depth = 0;
  double value = 0.0;     // sum_j sup_e E[w(beta_j^T e)]
  double stderr_ = 0.0;
  double gamma_bound = 0.0;  // Gamma(kappa_p + n) / (n! Gamma(kappa_p))
};

std::vector<MpPoint> mp_decay(const CollisionModel& model, const WeightFunction& weight, std::span<const int> depths,
                              std::size_t trees, int directions, double kappa_p, const Rng& rng);

double gamma_bound(double kappa_p, int n);

// least-squares slope of log value against log depth
double loglog_slope(std::span<const MpPoint> points);

}  // namespace rmkac
