// Sample containers for velocity laws and for laws on PSD matrices, plus initial laws.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmkac/matrix.hpp"
#include "rmkac/random.hpp"

namespace rmkac {

class VelocityEnsemble {
 public:
  VelocityEnsemble() = default;
  // flat holds size * dim coordinates row by row; weights are optional and need not be normalized
  VelocityEnsemble(int dim, std::vector<double> flat, std::vector<double> weights = {});
  static VelocityEnsemble from_vectors(const std::vector<Vector>& samples);

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ ? flat_.size() / static_cast<std::size_t>(dim_) : 0; }
  Vector operator[](std::size_t i) const;
  std::span<const double> row(std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& flat() const { return flat_; }

  bool weighted() const { return !weights_.empty(); }
  // normalized weight of sample i (1 / size when unweighted)
  double weight(std::size_t i) const;

  // Exact covariance of the law being sampled when it is known (for instance the
  // conditional covariance carried along by the Wild sum sampler).
  void set_known_covariance(const SymMatrix& c) { known_cov_ = c; }
  const std::optional<SymMatrix>& known_covariance() const { return known_cov_; }

  Vector mean() const;
  // per-coordinate standard error of the mean
  Vector mean_stderr() const;
  // E[v v^T] from the samples
  SymMatrix second_moment() const;
  // known covariance if set, otherwise the empirical second moment
  SymMatrix covariance_estimate() const;
  // (1/d) E|v|^2
  double temperature() const;

  VelocityEnsemble slice(std::size_t begin, std::size_t end) const;

 private:
  int dim_ = 0;
  std::vector<double> flat_;
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
  std::optional<SymMatrix> known_cov_;
};

class MatrixEnsemble {
 public:
  MatrixEnsemble() = default;
  MatrixEnsemble(int dim, std::size_t size);
  static MatrixEnsemble point_mass(const PsdMatrix& s, std::size_t size);

  int dim() const { return dim_; }
  std::size_t size() const { return size_; }
  PsdMatrix member(std::size_t i) const;
  std::span<const double> raw(std::size_t i) const {
    return {flat_.data() + i * stride(), stride()};
  }
  void set(std::size_t i, const PsdMatrix& s);
  void scale_all(double factor);

  SymMatrix mean() const;
  double mean_trace() const;
  MatrixEnsemble slice(std::size_t begin, std::size_t end) const;

 private:
  std::size_t stride() const { return static_cast<std::size_t>(dim_ * dim_); }
  int dim_ = 0;
  std::size_t size_ = 0;
  std::vector<double> flat_;
};

// Law of the initial velocity.
class InitialLaw {
 public:
  using Sampler = std::function<Vector(Rng&)>;

  static InitialLaw gaussian(const SymMatrix& covariance);
  static InitialLaw standard_gaussian(int dim);
  // uniform on the ball of radius sqrt(d + 2), so that the temperature is 1
  static InitialLaw uniform_ball(int dim);
  // law of A v for v drawn from base
  static InitialLaw linear_image(const InitialLaw& base, const Matrix& a);
  // +a_k and -a_k each with probability p_k / 2
  static InitialLaw symmetric_atoms(std::vector<Vector> atoms, std::vector<double> probabilities);
  // r theta with theta uniform on the sphere and P(r > x) = (scale / x)^index for x >= scale
  static InitialLaw radial_pareto(int dim, double index, double scale);
  // uniform resampling of the given samples
  static InitialLaw empirical(VelocityEnsemble samples);

  Vector sample(Rng& rng) const { return sampler_(rng); }
  int dim() const { return dim_; }
  // covariance of the law; unset when infinite
  const std::optional<SymMatrix>& covariance() const { return covariance_; }
  bool finite_temperature() const { return covariance_.has_value(); }
  const nlohmann::json& describe() const { return description_; }

 private:
  InitialLaw(int dim, Sampler sampler, std::optional<SymMatrix> cov, nlohmann::json description);
  int dim_;
  Sampler sampler_;
  std::optional<SymMatrix> covariance_;
  nlohmann::json description_;
};

// N independent draws, each from its own substream of rng.
VelocityEnsemble sample_initial(const InitialLaw& law, std::size_t count, const Rng& rng);

}  // namespace rmkac
