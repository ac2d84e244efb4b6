#include "rmkac/models.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace rmkac {

// ---- WeightFunction ----

WeightFunction WeightFunction::euclidean(double p) {
  return WeightFunction(p, 1.0, nullptr, fmt::format("|xi|^{}", p));
}

WeightFunction::WeightFunction(double exponent, double upper_bound, Profile profile, std::string name)
    : p_(exponent), bound_(upper_bound), profile_(std::move(profile)), name_(std::move(name)) {
  if (!(exponent > 2.0)) throw std::invalid_argument("weight exponent must exceed 2");
  if (!(upper_bound >= 1.0)) throw std::invalid_argument("weight upper bound must be at least 1");
}

double WeightFunction::profile(const Vector& unit) const { return profile_ ? profile_(unit) : 1.0; }

double WeightFunction::operator()(const Vector& xi) const {
  double r2 = xi.squared_norm();
  if (r2 == 0.0) return 0.0;
  double base = p_ == 4.0 ? r2 * r2 : std::pow(r2, 0.5 * p_);
  if (!profile_) return base;
  return base * profile_((1.0 / std::sqrt(r2)) * xi);
}

// ---- CollisionModel ----

CollisionModel::CollisionModel(std::string name, int dim, Sampler sampler, WeightFunction weight,
                               Traits traits)
    : name_(std::move(name)),
      dim_(dim),
      sampler_(std::move(sampler)),
      weight_(std::move(weight)),
      traits_(std::move(traits)) {
  if (dim < 1 || dim > kMaxDim) throw DimensionMismatch(fmt::format("model dimension {} unsupported", dim));
  for (int i = 0; i < dim; ++i) traits_.critical_directions.push_back(Vector::unit(dim, i));
}

CoefficientPair CollisionModel::sample_pair(Rng& rng) const {
  CoefficientPair pair = sampler_(rng);
  if (!traits_.exchangeable && rng.bernoulli(0.5)) std::swap(pair.left, pair.right);
  return pair;
}

nlohmann::json CollisionModel::describe() const {
  nlohmann::json j;
  j["name"] = name_;
  j["dim"] = dim_;
  j["parameters"] = traits_.parameters;
  j["weight"] = {{"name", weight_.name()}, {"exponent", weight_.exponent()}, {"upper_bound", weight_.upper_bound()}};
  j["rotation_invariant"] = traits_.rotation_invariant;
  return j;
}

SphereMoments sphere_moments(int d) {
  double dd = d;
  double v4 = 3.0 / (dd * (dd + 2.0));
  return {1.0 / dd, v4, 1.0 / (dd * (dd + 2.0))};
}

// ---- maxwell ----

CollisionModel maxwell(int dim, const ScalarLaw& alpha) {
  if (dim < 2) throw std::invalid_argument("maxwell model needs dimension >= 2");
  double ea = alpha.mean();
  double ea2 = alpha.expect([](double a) { return a * a; });
  if (std::abs(ea - ea2) > 1e-9)
    throw std::invalid_argument(fmt::format("maxwell model needs E alpha = E alpha^2 (got {} vs {})", ea, ea2));

  CollisionModel::Traits traits;
  traits.rotation_invariant = true;
  traits.parameters = {{"alpha", alpha.to_json()}};
  SphereMoments sm = sphere_moments(dim);
  traits.reference.sigma_star = SymMatrix::identity(dim);
  traits.reference.kappa = 1.0 - 2.0 * ea * (sm.v2 + sm.v2v2 - sm.v4);
  double ea2c = alpha.expect([](double a) { return a * a * (1.0 - a) * (1.0 - a); });
  traits.reference.kappa_p = 1.0 - 2.0 * ea2 * (sm.v2 - sm.v4) + 2.0 * ea2c * sm.v4;
  double elastic_defect = alpha.expect([](double a) { return std::abs(a * (1.0 - a)); });
  if (elastic_defect < 1e-14)
    traits.reference.psi = [](const Vector& xi) { return std::exp(-0.5 * xi.squared_norm()); };

  auto sampler = [dim, alpha](Rng& rng) {
    Vector n = uniform_sphere(dim, rng);
    double a = alpha.sample(rng);
    Matrix l = a * Matrix::outer(n, n);
    Matrix r = Matrix::identity(dim) - l;
    return CoefficientPair{l, r};
  };
  return CollisionModel(fmt::format("maxwell_d{}", dim), dim, sampler, WeightFunction::euclidean(4.0),
                        std::move(traits));
}

// ---- random_rotation ----

CollisionModel random_rotation(int dim, const PairLaw& weights, RotationLaw rotations, double p) {
  CollisionModel::Traits traits;
  traits.rotation_invariant = rotations == RotationLaw::haar;
  traits.parameters = {{"weights", weights.to_json()},
                       {"rotations", rotations == RotationLaw::haar ? "haar" : "identity"},
                       {"p", p}};
  traits.reference.sigma_star = SymMatrix::identity(dim);
  traits.reference.kappa = rotations == RotationLaw::haar && dim >= 2 ? 0.0 : 1.0;
  traits.reference.kappa_p = weights.sum_abs_moment(p);
  if (weights.on_unit_circle())
    traits.reference.psi = [](const Vector& xi) { return std::exp(-0.5 * xi.squared_norm()); };

  auto sampler = [dim, weights, rotations](Rng& rng) {
    auto [a, b] = weights.sample(rng);
    if (rotations == RotationLaw::identity)
      return CoefficientPair{a * Matrix::identity(dim), b * Matrix::identity(dim)};
    Matrix ra = haar_rotation(dim, rng);
    Matrix rb = haar_rotation(dim, rng);
    return CoefficientPair{a * ra, b * rb};
  };
  return CollisionModel(fmt::format("random_rotation_d{}", dim), dim, sampler, WeightFunction::euclidean(p),
                        std::move(traits));
}

// ---- cross2d ----

namespace {
Vector e_plus() { return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}; }
Vector e_minus() { return {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}; }

bool parallel_to(const Vector& unit, const Vector& e) { return std::abs(std::abs(unit.dot(e)) - 1.0) <= 1e-12; }
}  // namespace

WeightFunction cross2d_weight(double q) {
  double off = 4.0 * std::max(q, 1.0 - q);
  auto profile = [off](const Vector& u) {
    return parallel_to(u, e_plus()) || parallel_to(u, e_minus()) ? 1.0 : off;
  };
  return WeightFunction(4.0, off, profile, fmt::format("cross2d(|xi|^4, off-diagonal factor {})", off));
}

CollisionModel cross2d(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("cross2d needs 0 < q < 1");
  CollisionModel::Traits traits;
  traits.parameters = {{"q", q}};
  traits.critical_directions = {e_plus(), e_minus()};
  traits.reference.sigma_star = SymMatrix::diagonal(Vector{2.0 * q, 2.0 * (1.0 - q)});
  traits.reference.kappa = 0.0;
  traits.reference.kappa_p = 0.5;
  traits.reference.psi = [q](const Vector& eta) {
    return q * std::exp(-eta[0] * eta[0]) + (1.0 - q) * std::exp(-eta[1] * eta[1]);
  };

  auto sampler = [q](Rng& rng) {
    int i = rng.bernoulli(q) ? 0 : 1;
    Vector ei = Vector::unit(2, i);
    return CoefficientPair{Matrix::outer(ei, e_plus()), Matrix::outer(ei, e_minus())};
  };
  return CollisionModel("cross2d", 2, sampler, cross2d_weight(q), std::move(traits));
}

// ---- diagonal_scalar ----

CollisionModel diagonal_scalar(int dim, const PairLaw& weights, double p) {
  CollisionModel::Traits traits;
  traits.rotation_invariant = true;
  traits.parameters = {{"weights", weights.to_json()}, {"p", p}};
  traits.reference.kappa = 1.0;
  traits.reference.kappa_p = weights.sum_abs_moment(p);

  auto sampler = [dim, weights](Rng& rng) {
    auto [l, r] = weights.sample(rng);
    return CoefficientPair{l * Matrix::identity(dim), r * Matrix::identity(dim)};
  };
  return CollisionModel(fmt::format("diagonal_scalar_d{}", dim), dim, sampler, WeightFunction::euclidean(p),
                        std::move(traits));
}

// ---- finite_mixture ----

CollisionModel finite_mixture(int dim, std::vector<MixtureAtom> atoms, double p) {
  if (atoms.empty()) throw std::invalid_argument("mixture needs at least one atom");
  double total = 0.0;
  nlohmann::json js = nlohmann::json::array();
  for (const auto& a : atoms) {
    if (a.left.dim() != dim || a.right.dim() != dim) throw DimensionMismatch("mixture atom dimension");
    if (!(a.probability >= 0.0)) throw std::invalid_argument("negative mixture probability");
    total += a.probability;
    js.push_back({{"probability", a.probability},
                  {"left", std::vector<double>(a.left.data().begin(), a.left.data().end())},
                  {"right", std::vector<double>(a.right.data().begin(), a.right.data().end())}});
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture probabilities must sum to 1");
  CollisionModel::Traits traits;
  traits.parameters = {{"atoms", js}};
  std::vector<double> cdf;
  double c = 0.0;
  for (const auto& a : atoms) cdf.push_back(c += a.probability);
  auto sampler = [atoms = std::move(atoms), cdf](Rng& rng) {
    double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < cdf.size() && u >= cdf[k]) ++k;
    return CoefficientPair{atoms[k].left, atoms[k].right};
  };
  return CollisionModel(fmt::format("mixture_d{}", dim), dim, sampler, WeightFunction::euclidean(p),
                        std::move(traits));
}

}  // namespace rmkac
