#include "rmkac/ensembles.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "rmkac/parallel.hpp"

namespace rmkac {

// ---- VelocityEnsemble ----

VelocityEnsemble::VelocityEnsemble(int dim, std::vector<double> flat, std::vector<double> weights)
    : dim_(dim), flat_(std::move(flat)), weights_(std::move(weights)) {
  if (dim < 1 || dim > kMaxDim) throw DimensionMismatch(fmt::format("ensemble dimension {}", dim));
  if (flat_.size() % static_cast<std::size_t>(dim) != 0)
    throw DimensionMismatch("ensemble data length is not a multiple of the dimension");
  if (!weights_.empty()) {
    if (weights_.size() != size()) throw DimensionMismatch("ensemble weights length mismatch");
    for (double w : weights_) {
      if (!(w >= 0.0)) throw std::invalid_argument("negative ensemble weight");
      weight_sum_ += w;
    }
    if (!(weight_sum_ > 0.0)) throw std::invalid_argument("ensemble weights sum to zero");
  }
}

VelocityEnsemble VelocityEnsemble::from_vectors(const std::vector<Vector>& samples) {
  if (samples.empty()) throw std::invalid_argument("empty sample list");
  int d = samples.front().dim();
  std::vector<double> flat;
  flat.reserve(samples.size() * static_cast<std::size_t>(d));
  for (const auto& v : samples) {
    if (v.dim() != d) throw DimensionMismatch("samples of mixed dimension");
    flat.insert(flat.end(), v.values().begin(), v.values().end());
  }
  return VelocityEnsemble(d, std::move(flat));
}

Vector VelocityEnsemble::operator[](std::size_t i) const { return Vector(row(i)); }

double VelocityEnsemble::weight(std::size_t i) const {
  return weights_.empty() ? 1.0 / static_cast<double>(size()) : weights_[i] / weight_sum_;
}

Vector VelocityEnsemble::mean() const {
  Vector m(dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    double w = weight(i);
    auto r = row(i);
    for (int k = 0; k < dim_; ++k) m[k] += w * r[static_cast<std::size_t>(k)];
  }
  return m;
}

Vector VelocityEnsemble::mean_stderr() const {
  Vector m = mean();
  Vector var(dim_);
  double w2 = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double w = weight(i);
    w2 += w * w;
    auto r = row(i);
    for (int k = 0; k < dim_; ++k) {
      double dv = r[static_cast<std::size_t>(k)] - m[k];
      var[k] += w * dv * dv;
    }
  }
  // Kish effective sample size
  double n_eff = 1.0 / w2;
  Vector se(dim_);
  for (int k = 0; k < dim_; ++k) se[k] = n_eff > 1.0 ? std::sqrt(var[k] / (n_eff - 1.0)) : 0.0;
  return se;
}

SymMatrix VelocityEnsemble::second_moment() const {
  Matrix m(dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    double w = weight(i);
    auto r = row(i);
    for (int a = 0; a < dim_; ++a)
      for (int b = a; b < dim_; ++b) m(a, b) += w * r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(b)];
  }
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < a; ++b) m(a, b) = m(b, a);
  return SymMatrix(m);
}

SymMatrix VelocityEnsemble::covariance_estimate() const { return known_cov_ ? *known_cov_ : second_moment(); }

double VelocityEnsemble::temperature() const { return second_moment().trace() / dim_; }

VelocityEnsemble VelocityEnsemble::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw std::out_of_range("ensemble slice out of range");
  const auto d = static_cast<std::size_t>(dim_);
  std::vector<double> flat(flat_.begin() + static_cast<std::ptrdiff_t>(begin * d),
                           flat_.begin() + static_cast<std::ptrdiff_t>(end * d));
  std::vector<double> w;
  if (!weights_.empty())
    w.assign(weights_.begin() + static_cast<std::ptrdiff_t>(begin), weights_.begin() + static_cast<std::ptrdiff_t>(end));
  VelocityEnsemble out(dim_, std::move(flat), std::move(w));
  out.known_cov_ = known_cov_;
  return out;
}

// ---- MatrixEnsemble ----

MatrixEnsemble::MatrixEnsemble(int dim, std::size_t size)
    : dim_(dim), size_(size), flat_(size * static_cast<std::size_t>(dim * dim), 0.0) {
  if (dim < 1 || dim > kMaxDim) throw DimensionMismatch(fmt::format("ensemble dimension {}", dim));
}

MatrixEnsemble MatrixEnsemble::point_mass(const PsdMatrix& s, std::size_t size) {
  MatrixEnsemble e(s.dim(), size);
  for (std::size_t i = 0; i < size; ++i) e.set(i, s);
  return e;
}

PsdMatrix MatrixEnsemble::member(std::size_t i) const {
  return PsdMatrix::trusted(SymMatrix(Matrix(dim_, raw(i))));
}

void MatrixEnsemble::set(std::size_t i, const PsdMatrix& s) {
  if (s.dim() != dim_) throw DimensionMismatch("matrix ensemble member dimension");
  auto src = s.matrix().data();
  std::copy(src.begin(), src.end(), flat_.begin() + static_cast<std::ptrdiff_t>(i * stride()));
}

void MatrixEnsemble::scale_all(double factor) {
  if (factor < 0.0) throw std::domain_error("negative scaling of a PSD ensemble");
  for (double& x : flat_) x *= factor;
}

SymMatrix MatrixEnsemble::mean() const {
  std::vector<double> acc(stride(), 0.0);
  for (std::size_t i = 0; i < size_; ++i) {
    auto r = raw(i);
    for (std::size_t k = 0; k < stride(); ++k) acc[k] += r[k];
  }
  for (double& x : acc) x /= static_cast<double>(size_);
  return SymMatrix(Matrix(dim_, acc));
}

double MatrixEnsemble::mean_trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    auto r = raw(i);
    for (int k = 0; k < dim_; ++k) t += r[static_cast<std::size_t>(k * dim_ + k)];
  }
  return t / static_cast<double>(size_);
}

MatrixEnsemble MatrixEnsemble::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size_) throw std::out_of_range("ensemble slice out of range");
  MatrixEnsemble out(dim_, end - begin);
  std::copy(flat_.begin() + static_cast<std::ptrdiff_t>(begin * stride()),
            flat_.begin() + static_cast<std::ptrdiff_t>(end * stride()), out.flat_.begin());
  return out;
}

// ---- InitialLaw ----

InitialLaw::InitialLaw(int dim, Sampler sampler, std::optional<SymMatrix> cov, nlohmann::json description)
    : dim_(dim), sampler_(std::move(sampler)), covariance_(std::move(cov)), description_(std::move(description)) {}

InitialLaw InitialLaw::gaussian(const SymMatrix& covariance) {
  PsdMatrix root = psd_sqrt(PsdMatrix(covariance));
  const int d = covariance.dim();
  std::vector<double> flat(covariance.matrix().data().begin(), covariance.matrix().data().end());
  return InitialLaw(
      d, [root](Rng& rng) { return root.matrix() * standard_normal_vector(root.dim(), rng); }, covariance,
      {{"type", "gaussian"}, {"covariance", flat}});
}

InitialLaw InitialLaw::standard_gaussian(int dim) { return gaussian(SymMatrix::identity(dim)); }

InitialLaw InitialLaw::uniform_ball(int dim) {
  const double radius = std::sqrt(dim + 2.0);
  return InitialLaw(
      dim,
      [dim, radius](Rng& rng) {
        Vector u = uniform_sphere(dim, rng);
        return (radius * std::pow(rng.uniform(), 1.0 / dim)) * u;
      },
      SymMatrix::identity(dim), {{"type", "uniform_ball"}});
}

InitialLaw InitialLaw::linear_image(const InitialLaw& base, const Matrix& a) {
  if (a.dim() != base.dim()) throw DimensionMismatch("linear image dimension");
  std::optional<SymMatrix> cov;
  if (base.covariance_) cov = SymMatrix::congruence(a, *base.covariance_);
  nlohmann::json desc = {{"type", "linear_image"},
                         {"base", base.description_},
                         {"matrix", std::vector<double>(a.data().begin(), a.data().end())}};
  Sampler s = base.sampler_;
  return InitialLaw(base.dim(), [s, a](Rng& rng) { return a * s(rng); }, cov, desc);
}

InitialLaw InitialLaw::symmetric_atoms(std::vector<Vector> atoms, std::vector<double> probabilities) {
  if (atoms.empty() || atoms.size() != probabilities.size())
    throw std::invalid_argument("atoms and probabilities must be non-empty and of equal length");
  const int d = atoms.front().dim();
  double total = 0.0;
  Matrix cov(d);
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (atoms[k].dim() != d) throw DimensionMismatch("atoms of mixed dimension");
    if (!(probabilities[k] >= 0.0)) throw std::invalid_argument("negative atom probability");
    total += probabilities[k];
    cov += probabilities[k] * Matrix::outer(atoms[k], atoms[k]);
    pts.push_back(std::vector<double>(atoms[k].values().begin(), atoms[k].values().end()));
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("atom probabilities must sum to 1");
  std::vector<double> cdf;
  double c = 0.0;
  for (double p : probabilities) cdf.push_back(c += p);
  nlohmann::json desc = {{"type", "symmetric_atoms"}, {"atoms", pts}, {"probabilities", probabilities}};
  return InitialLaw(
      d,
      [atoms = std::move(atoms), cdf](Rng& rng) {
        double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < cdf.size() && u >= cdf[k]) ++k;
        return rng.bernoulli(0.5) ? atoms[k] : -atoms[k];
      },
      SymMatrix(cov), desc);
}

InitialLaw InitialLaw::radial_pareto(int dim, double index, double scale) {
  if (!(index > 0.0) || !(scale > 0.0)) throw std::invalid_argument("radial Pareto needs positive index and scale");
  std::optional<SymMatrix> cov;
  if (index > 2.0) cov = (scale * scale * index / (index - 2.0) / dim) * SymMatrix::identity(dim);
  return InitialLaw(
      dim,
      [dim, index, scale](Rng& rng) {
        double r = scale * std::pow(rng.uniform_positive(), -1.0 / index);
        return r * uniform_sphere(dim, rng);
      },
      cov, {{"type", "radial_pareto"}, {"index", index}, {"scale", scale}});
}

InitialLaw InitialLaw::empirical(VelocityEnsemble samples) {
  if (samples.size() == 0) throw std::invalid_argument("empty empirical law");
  if (samples.weighted()) throw std::invalid_argument("empirical initial law needs unweighted samples");
  const int d = samples.dim();
  SymMatrix cov = samples.second_moment();
  std::size_t n = samples.size();
  return InitialLaw(
      d, [s = std::move(samples)](Rng& rng) { return s[rng.index(s.size())]; }, cov,
      {{"type", "empirical"}, {"samples", n}});
}

VelocityEnsemble sample_initial(const InitialLaw& law, std::size_t count, const Rng& rng) {
  const auto d = static_cast<std::size_t>(law.dim());
  std::vector<double> flat(count * d);
  parallel_for_index(count, [&](std::size_t i) {
    Rng r = rng.child(i);
    Vector v = law.sample(r);
    std::copy(v.values().begin(), v.values().end(), flat.begin() + static_cast<std::ptrdiff_t>(i * d));
  });
  VelocityEnsemble e(law.dim(), std::move(flat));
  if (law.covariance()) e.set_known_covariance(*law.covariance());
  return e;
}

}  // namespace rmkac
