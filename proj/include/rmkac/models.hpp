// Collision models: laws of the random coefficient pair (L, R) plus their weights.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmkac/laws.hpp"
#include "rmkac/matrix.hpp"
#include "rmkac/random.hpp"

namespace rmkac {

struct CoefficientPair {
  Matrix left;
  Matrix right;
};

// omega(xi) = |xi|^p g(xi / |xi|) with 1 <= g <= upper_bound.
class WeightFunction {
 public:
  using Profile = std::function<double(const Vector& unit)>;

  static WeightFunction euclidean(double p);
  WeightFunction(double exponent, double upper_bound, Profile profile, std::string name);

  double operator()(const Vector& xi) const;
  // g on the unit sphere
  double profile(const Vector& unit) const;
  double exponent() const { return p_; }
  double upper_bound() const { return bound_; }
  const std::string& name() const { return name_; }
  bool is_euclidean() const { return !profile_; }

 private:
  double p_;
  double bound_;
  Profile profile_;
  std::string name_;
};

// Values known in closed form for a model. Anything unset is unknown.
struct ModelReference {
  std::optional<SymMatrix> sigma_star;
  std::optional<double> kappa;
  std::optional<double> kappa_p;
  // Fourier transform of the stationary law, when known.
  std::function<double(const Vector&)> psi;
};

class CollisionModel {
 public:
  using Sampler = std::function<CoefficientPair(Rng&)>;

  struct Traits {
    bool exchangeable = false;
    bool rotation_invariant = false;
    std::vector<Vector> critical_directions;
    ModelReference reference;
    nlohmann::json parameters = nlohmann::json::object();
  };

  CollisionModel(std::string name, int dim, Sampler sampler, WeightFunction weight, Traits traits);

  // One draw of (L, R). Unless the law is exchangeable, L and R are swapped with
  // probability 1/2 so that the returned pair always is.
  CoefficientPair sample_pair(Rng& rng) const;

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const WeightFunction& weight() const { return weight_; }
  bool rotation_invariant() const { return traits_.rotation_invariant; }
  const std::vector<Vector>& critical_directions() const { return traits_.critical_directions; }
  const ModelReference& reference() const { return traits_.reference; }
  nlohmann::json describe() const;

 private:
  std::string name_;
  int dim_;
  Sampler sampler_;
  WeightFunction weight_;
  Traits traits_;
};

// Sphere moments of one coordinate V_1 of a uniform unit vector in R^d.
struct SphereMoments {
  double v2;    // E V_1^2
  double v4;    // E V_1^4
  double v2v2;  // E V_1^2 V_2^2
};
SphereMoments sphere_moments(int dim);

// L = alpha n n^T, R = 1 - alpha n n^T with n uniform on the sphere; requires E alpha = E alpha^2.
CollisionModel maxwell(int dim, const ScalarLaw& alpha);

enum class RotationLaw { haar, identity };
// L = alpha A, R = beta B with A, B independent rotations.
CollisionModel random_rotation(int dim, const PairLaw& weights, RotationLaw rotations, double p);

// (L, R) = (e_i e_+^T, e_i e_-^T) in the plane, i = 1 with probability q.
CollisionModel cross2d(double q);
WeightFunction cross2d_weight(double q);

// L = l 1, R = r 1.
CollisionModel diagonal_scalar(int dim, const PairLaw& weights, double p);

// Finite mixture of fixed coefficient pairs.
struct MixtureAtom {
  double probability;
  Matrix left;
  Matrix right;
};
CollisionModel finite_mixture(int dim, std::vector<MixtureAtom> atoms, double p);

}  // namespace rmkac
