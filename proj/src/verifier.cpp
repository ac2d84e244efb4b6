#include "rmkac/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "rmkac/directions.hpp"
#include "rmkac/parallel.hpp"
#include "rmkac/stats.hpp"

namespace rmkac {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

int default_direction_count(int dim) { return dim <= 3 ? 512 : 4096; }

namespace {

constexpr int kBatches = UpsilonEstimate::kBatches;

std::size_t batch_size(std::size_t total, int b) {
  return total / kBatches + (static_cast<std::size_t>(b) < total % kBatches ? 1 : 0);
}

void require_samples(std::size_t n) {
  if (n < static_cast<std::size_t>(kBatches))
    throw std::invalid_argument(fmt::format("need at least {} samples", kBatches));
}

Verdict upper_verdict(double value, double se) {
  if (value + 3.0 * se < 1.0) return Verdict::pass;
  if (value - 3.0 * se >= 1.0) return Verdict::fail;
  return Verdict::inconclusive;
}

}  // namespace

// ---- normalization ----

NormalizationCheck check_normalization(const CollisionModel& model, std::size_t samples, const Rng& rng) {
  require_samples(samples);
  const int d = model.dim();
  std::vector<Matrix> batch_means(kBatches, Matrix(d));
  parallel_for_index(kBatches, [&](std::size_t b) {
    Rng r = rng.child(b);
    std::size_t n = batch_size(samples, static_cast<int>(b));
    Matrix acc(d);
    for (std::size_t k = 0; k < n; ++k) {
      CoefficientPair p = model.sample_pair(r);
      acc += p.left.transpose() * p.left;
      acc += p.right.transpose() * p.right;
    }
    batch_means[b] = (1.0 / static_cast<double>(n)) * acc;
  });
  NormalizationCheck out;
  out.samples = samples;
  Matrix mean(d), se(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<double> vals;
      double total = 0.0;
      for (int b = 0; b < kBatches; ++b) {
        vals.push_back(batch_means[static_cast<std::size_t>(b)](i, j));
        total += batch_means[static_cast<std::size_t>(b)](i, j) * static_cast<double>(batch_size(samples, b));
      }
      mean(i, j) = total / static_cast<double>(samples);
      se(i, j) = batch_stderr(vals);
    }
  out.deviation = SymMatrix(mean - Matrix::identity(d));
  out.stderr_ = SymMatrix(se);
  out.deviation_norm = matrix_norm(out.deviation, NormOrder::inf);
  for (double x : se.data()) out.max_stderr = std::max(out.max_stderr, x);
  out.verdict = out.deviation_norm <= 3.0 * out.max_stderr + 1e-12 ? Verdict::pass : Verdict::fail;
  return out;
}

// ---- Upsilon ----

UpsilonEstimate::UpsilonEstimate(int dim, std::vector<double> mean, std::vector<std::vector<double>> batches,
                                 std::size_t samples)
    : dim_(dim), size_(sym_basis_size(dim)), mean_(std::move(mean)), batches_(std::move(batches)), samples_(samples) {
  if (mean_.size() != static_cast<std::size_t>(size_ * size_)) throw DimensionMismatch("Upsilon coordinates");
}

SymMatrix UpsilonEstimate::apply_coords(const std::vector<double>& a, const SymMatrix& m) const {
  if (m.dim() != dim_) throw DimensionMismatch("Upsilon argument dimension");
  std::vector<double> c = sym_coordinates(m);
  std::vector<double> y(static_cast<std::size_t>(size_), 0.0);
  for (int i = 0; i < size_; ++i) {
    double s = 0.0;
    for (int j = 0; j < size_; ++j) s += a[static_cast<std::size_t>(i * size_ + j)] * c[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return sym_from_coordinates(dim_, y);
}

SymMatrix UpsilonEstimate::apply(const SymMatrix& m) const { return apply_coords(mean_, m); }

SymMatrix UpsilonEstimate::apply_batch(int batch, const SymMatrix& m) const {
  return apply_coords(batches_.at(static_cast<std::size_t>(batch)), m);
}

UpsilonEstimate UpsilonEstimate::half(int parity) const {
  std::vector<std::vector<double>> picked;
  for (std::size_t b = static_cast<std::size_t>(parity); b < batches_.size(); b += 2) picked.push_back(batches_[b]);
  if (picked.empty()) throw std::invalid_argument("not enough batches to split");
  std::vector<double> mean(mean_.size(), 0.0);
  for (const auto& b : picked)
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += b[k] / static_cast<double>(picked.size());
  std::size_t n = samples_ * picked.size() / batches_.size();
  return UpsilonEstimate(dim_, std::move(mean), std::move(picked), n);
}

std::vector<double> UpsilonEstimate::coordinate_stderr() const {
  std::vector<double> se(mean_.size(), 0.0);
  std::vector<double> vals(batches_.size());
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    for (std::size_t b = 0; b < batches_.size(); ++b) vals[b] = batches_[b][k];
    se[k] = batch_stderr(vals);
  }
  return se;
}

UpsilonEstimate estimate_upsilon(const CollisionModel& model, std::size_t samples, const Rng& rng) {
  require_samples(samples);
  const int d = model.dim();
  const int D = sym_basis_size(d);
  std::vector<SymMatrix> basis;
  for (int b = 0; b < D; ++b) basis.push_back(sym_basis_element(d, b));

  std::vector<std::vector<double>> batches(kBatches, std::vector<double>(static_cast<std::size_t>(D * D), 0.0));
  parallel_for_index(kBatches, [&](std::size_t b) {
    Rng r = rng.child(b);
    std::size_t n = batch_size(samples, static_cast<int>(b));
    auto& acc = batches[b];
    for (std::size_t k = 0; k < n; ++k) {
      CoefficientPair p = model.sample_pair(r);
      for (int col = 0; col < D; ++col) {
        SymMatrix y = SymMatrix::congruence(p.left, basis[static_cast<std::size_t>(col)]) +
                      SymMatrix::congruence(p.right, basis[static_cast<std::size_t>(col)]);
        std::vector<double> c = sym_coordinates(y);
        for (int row = 0; row < D; ++row) acc[static_cast<std::size_t>(row * D + col)] += c[static_cast<std::size_t>(row)];
      }
    }
    for (double& x : acc) x /= static_cast<double>(n);
  });
  std::vector<double> mean(static_cast<std::size_t>(D * D), 0.0);
  for (int b = 0; b < kBatches; ++b) {
    double w = static_cast<double>(batch_size(samples, b)) / static_cast<double>(samples);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += w * batches[static_cast<std::size_t>(b)][k];
  }
  return UpsilonEstimate(d, std::move(mean), std::move(batches), samples);
}

PsdMatrix fixed_point_sigma(const UpsilonEstimate& ups, double tolerance, int max_iterations) {
  const int d = ups.dim();
  SymMatrix s = SymMatrix::identity(d);
  for (int it = 0; it < max_iterations; ++it) {
    SymMatrix next = ups.apply(s);
    double tr = next.trace();
    if (!(tr > 0.0)) throw ConvergenceError("fixed-point iteration lost positive trace");
    next *= d / tr;
    double change = frobenius_norm((next - s).matrix());
    s = next;
    if (change <= tolerance) {
      SpectralDecomposition sd = spectral_decompose(s);
      double lo = sd.values[d - 1];
      if (!(lo > 1e-10 * d))
        throw NotPositiveSemidefinite(fmt::format("fixed point is not positive definite (smallest eigenvalue {:.3e})", lo));
      return PsdMatrix::trusted(s);
    }
  }
  throw ConvergenceError(fmt::format("fixed-point iteration did not converge in {} iterations", max_iterations));
}

// ---- traceless contraction ----

namespace {

struct Frame {
  Matrix q;
  std::vector<double> mu;
};

SymMatrix frame_matrix(const Frame& f) {
  const int d = f.q.dim();
  Matrix m(d);
  for (int k = 0; k < d; ++k) {
    double mk = f.mu[static_cast<std::size_t>(k)];
    if (mk == 0.0) continue;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) += mk * f.q(i, k) * f.q(j, k);
  }
  return SymMatrix(m);
}

void normalize_mu(std::vector<double>& mu) {
  double mean = mean_of(mu);
  for (double& x : mu) x -= mean;
  double mx = 0.0;
  for (double x : mu) mx = std::max(mx, std::abs(x));
  if (mx > 0.0)
    for (double& x : mu) x /= mx;
}

double objective(const UpsilonEstimate& ups, const Frame& f) {
  SymMatrix m = frame_matrix(f);
  double nm = matrix_norm(m, NormOrder::inf);
  if (nm == 0.0) return 0.0;
  return matrix_norm(ups.apply(m), NormOrder::inf) / nm;
}

void rotate_plane(Matrix& q, int i, int j, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  for (int k = 0; k < q.dim(); ++k) {
    double a = q(k, i), b = q(k, j);
    q(k, i) = c * a - s * b;
    q(k, j) = s * a + c * b;
  }
}

double refine(const UpsilonEstimate& ups, Frame& f) {
  const int d = ups.dim();
  double best = objective(ups, f);
  double h = 0.5;
  int guard = 0;
  while (h > 1e-6 && guard++ < 5000) {
    Frame best_frame = f;
    double cand_best = best;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (double sgn : {1.0, -1.0}) {
          Frame g = f;
          rotate_plane(g.q, i, j, sgn * h);
          double v = objective(ups, g);
          if (v > cand_best) {
            cand_best = v;
            best_frame = g;
          }
          Frame m = f;
          m.mu[static_cast<std::size_t>(i)] += sgn * h;
          m.mu[static_cast<std::size_t>(j)] -= sgn * h;
          normalize_mu(m.mu);
          v = objective(ups, m);
          if (v > cand_best) {
            cand_best = v;
            best_frame = m;
          }
        }
    if (cand_best > best + 1e-15) {
      best = cand_best;
      f = best_frame;
    } else {
      h *= 0.5;
    }
  }
  return best;
}

Frame decompose_frame(const SymMatrix& m) {
  SpectralDecomposition sd = spectral_decompose(m);
  const int d = m.dim();
  Frame f{Matrix(d), std::vector<double>(static_cast<std::size_t>(d))};
  for (int k = 0; k < d; ++k) {
    f.mu[static_cast<std::size_t>(k)] = sd.values[k];
    for (int i = 0; i < d; ++i) f.q(i, k) = sd.vectors[static_cast<std::size_t>(k)][i];
  }
  normalize_mu(f.mu);
  return f;
}

}  // namespace

namespace {

struct Maximizer {
  SymMatrix m;
  Vector e;
  double sign = 1.0;
  double norm = 1.0;
  int starts = 0;
};

Maximizer maximize(const UpsilonEstimate& ups, int restarts, const Rng& rng) {
  const int d = ups.dim();
  std::vector<Frame> starts;
  // signed patterns in the standard frame, one per pair {tau, -tau}
  for (unsigned mask = 1; mask < (1u << d) - 1; ++mask) {
    if (mask & 1u) continue;
    Frame f{Matrix::identity(d), {}};
    for (int k = 0; k < d; ++k) f.mu.push_back((mask >> k) & 1u ? 1.0 : -1.0);
    normalize_mu(f.mu);
    starts.push_back(f);
  }
  for (int r = 0; r < restarts; ++r) {
    Rng sub = rng.child(static_cast<std::uint64_t>(r));
    Frame f{haar_rotation(d, sub), {}};
    for (int k = 0; k < d; ++k) f.mu.push_back(k % 2 == 0 ? 1.0 : -1.0);
    normalize_mu(f.mu);
    starts.push_back(f);
    Matrix g(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = sub.normal();
    SymMatrix m(g);
    m -= (m.trace() / d) * SymMatrix::identity(d);
    starts.push_back(decompose_frame(m));
  }

  std::vector<double> values(starts.size());
  parallel_for_index(starts.size(), [&](std::size_t k) { values[k] = refine(ups, starts[k]); });
  std::size_t best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  Maximizer out;
  out.m = frame_matrix(starts[best]);
  out.starts = static_cast<int>(starts.size());
  // the spectral norm of the image is attained at its top eigenvector; freezing it
  // makes the score linear in Upsilon
  SpectralDecomposition sd = spectral_decompose(ups.apply(out.m));
  int top = std::abs(sd.values[0]) >= std::abs(sd.values[d - 1]) ? 0 : d - 1;
  out.e = sd.vectors[static_cast<std::size_t>(top)];
  out.sign = sd.values[top] >= 0.0 ? 1.0 : -1.0;
  out.norm = matrix_norm(out.m, NormOrder::inf);
  return out;
}

double score(const Maximizer& mx, const SymMatrix& image) { return mx.sign * image.quadratic_form(mx.e) / mx.norm; }

}  // namespace

ContractionEstimate traceless_contraction(const UpsilonEstimate& ups, int restarts, const Rng& rng) {
  const int d = ups.dim();
  ContractionEstimate out;
  out.argmax = SymMatrix(d);
  if (d < 2) return out;
  if (ups.batch_count() < 4) throw std::invalid_argument("need at least 4 batches for the contraction estimate");

  // The two cross scores are correlated (each maximizer leans toward its own half's
  // noise, which the other score then samples), so the error of their mean is
  // bounded by the mean of the two standard errors rather than pooled.
  for (int parity : {0, 1}) {
    Maximizer mx = maximize(ups.half(parity), restarts, rng.child(static_cast<std::uint64_t>(parity)));
    UpsilonEstimate other = ups.half(1 - parity);
    std::vector<double> per_batch;
    for (int b = 0; b < other.batch_count(); ++b) per_batch.push_back(score(mx, other.apply_batch(b, mx.m)));
    out.kappa += 0.5 * score(mx, other.apply(mx.m));
    out.stderr_ += 0.5 * batch_stderr(per_batch);
    if (parity == 0) out.argmax = mx.m;
    out.starts += mx.starts;
  }
  out.near_one = out.kappa >= 1.0 - 3.0 * out.stderr_;
  return out;
}

// ---- kappa_p ----

WeightContraction kappa_p_estimate(const CollisionModel& model, const WeightFunction& weight, int directions,
                                   std::size_t samples, const Rng& rng) {
  require_samples(samples);
  std::vector<Vector> dirs = direction_set(model, directions);
  const std::size_t nd = dirs.size();
  std::vector<std::vector<double>> sum(kBatches, std::vector<double>(nd, 0.0));
  std::vector<std::vector<double>> sumsq(kBatches, std::vector<double>(nd, 0.0));
  parallel_for_index(kBatches, [&](std::size_t b) {
    Rng r = rng.child(b);
    std::size_t n = batch_size(samples, static_cast<int>(b));
    auto& s1 = sum[b];
    auto& s2 = sumsq[b];
    for (std::size_t k = 0; k < n; ++k) {
      CoefficientPair p = model.sample_pair(r);
      for (std::size_t j = 0; j < nd; ++j) {
        double v = weight(transpose_times(p.left, dirs[j])) + weight(transpose_times(p.right, dirs[j]));
        s1[j] += v;
        s2[j] += v * v;
      }
    }
  });
  WeightContraction out;
  out.directions = nd;
  out.samples = samples;
  double best = -1.0;
  std::size_t arg = 0;
  std::vector<double> mean(nd), var(nd);
  const double n = static_cast<double>(samples);
  for (std::size_t j = 0; j < nd; ++j) {
    double s1 = 0.0, s2 = 0.0;
    for (int b = 0; b < kBatches; ++b) {
      s1 += sum[static_cast<std::size_t>(b)][j];
      s2 += sumsq[static_cast<std::size_t>(b)][j];
    }
    mean[j] = s1 / n;
    var[j] = std::max(0.0, (s2 / n - mean[j] * mean[j]) * n / (n - 1.0));
    double ratio = mean[j] / weight(dirs[j]);
    if (ratio > best) {
      best = ratio;
      arg = j;
    }
  }
  out.kappa_p = best;
  out.argmax = dirs[arg];
  out.stderr_ = std::sqrt(var[arg] / n) / weight(dirs[arg]);
  return out;
}

WeightFunction weight_prime(const WeightFunction& w, double p_prime, const PsdMatrix& sigma_star) {
  const double p = w.exponent();
  if (!(p_prime > 2.0 && p_prime <= p)) throw std::invalid_argument("need 2 < p' <= p");
  if (sigma_star.dim() < 1) throw DimensionMismatch("empty fixed point");
  SpectralDecomposition sd = spectral_decompose(sigma_star.sym());
  double zmax = sd.values[0];
  double zmin = sd.values[sigma_star.dim() - 1];
  if (!(zmin > 0.0)) throw NotPositiveSemidefinite("weight change needs a positive definite fixed point");
  const double eps = (p - p_prime) / (p - 2.0);
  const double bound = std::pow(zmax / zmin, eps) * std::pow(w.upper_bound(), 1.0 - eps);
  SymMatrix s = sigma_star.sym();
  WeightFunction base = w;
  auto profile = [base, s, eps, zmin](const Vector& u) {
    return std::pow(zmin, -eps) * std::pow(base.profile(u), 1.0 - eps) * std::pow(s.quadratic_form(u), eps);
  };
  return WeightFunction(p_prime, bound, profile, fmt::format("{} lowered to p'={}", w.name(), p_prime));
}

// ---- kappa star ----

KappaStarSampler::KappaStarSampler(const CollisionModel& model, int directions, std::size_t samples, const Rng& rng)
    : n_samples_(samples) {
  require_samples(samples);
  std::vector<Vector> dirs = model.rotation_invariant() ? std::vector<Vector>{Vector::unit(model.dim(), 0)}
                                                        : direction_set(model, directions);
  n_dirs_ = dirs.size();
  if (n_dirs_ * samples > 50'000'000)
    throw std::invalid_argument("directions x samples too large for the moment-divergence sampler");
  log_left_.assign(n_dirs_ * samples, 0.0);
  log_right_.assign(n_dirs_ * samples, 0.0);
  parallel_for_index(kBatches, [&](std::size_t b) {
    Rng r = rng.child(b);
    std::size_t start = 0;
    for (int c = 0; c < static_cast<int>(b); ++c) start += batch_size(samples, c);
    std::size_t n = batch_size(samples, static_cast<int>(b));
    for (std::size_t k = start; k < start + n; ++k) {
      CoefficientPair p = model.sample_pair(r);
      for (std::size_t j = 0; j < n_dirs_; ++j) {
        double a = (p.left * dirs[j]).norm();
        double c = (p.right * dirs[j]).norm();
        log_left_[k * n_dirs_ + j] = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
        log_right_[k * n_dirs_ + j] = c > 0.0 ? std::log(c) : -std::numeric_limits<double>::infinity();
      }
    }
  });
}

KappaStar KappaStarSampler::evaluate(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("moment order must be positive");
  std::vector<double> ml(n_dirs_, 0.0), mr(n_dirs_, 0.0);
  for (std::size_t k = 0; k < n_samples_; ++k)
    for (std::size_t j = 0; j < n_dirs_; ++j) {
      ml[j] += std::exp(s * log_left_[k * n_dirs_ + j]);
      mr[j] += std::exp(s * log_right_[k * n_dirs_ + j]);
    }
  std::size_t a = static_cast<std::size_t>(std::min_element(ml.begin(), ml.end()) - ml.begin());
  std::size_t c = static_cast<std::size_t>(std::min_element(mr.begin(), mr.end()) - mr.begin());
  KappaStar out;
  const double n = static_cast<double>(n_samples_);
  out.left_part = ml[a] / n;
  out.right_part = mr[c] / n;
  out.value = out.left_part + out.right_part;
  RunningStats rs;
  for (std::size_t k = 0; k < n_samples_; ++k)
    rs.add(std::exp(s * log_left_[k * n_dirs_ + a]) + std::exp(s * log_right_[k * n_dirs_ + c]));
  out.stderr_ = rs.stderr_of_mean();
  return out;
}

std::optional<double> KappaStarSampler::threshold(double s_lo, double s_hi, double tolerance) const {
  if (!(s_lo < s_hi)) throw std::invalid_argument("need s_lo < s_hi");
  // kappa_star(2) = 1 under the normalization, so sampling noise can put the first
  // grid point just above 1. Only an up-crossing counts; a curve that never dips
  // below 1 gives s_lo.
  const double step = 0.25;
  double prev = s_lo;
  bool prev_above = evaluate(s_lo).value > 1.0;
  bool ever_below = !prev_above;
  for (double s = s_lo + step;; s += step) {
    s = std::min(s, s_hi);
    bool above = evaluate(s).value > 1.0;
    if (above && !prev_above) {
      double lo = prev, hi = s;
      while (hi - lo > tolerance) {
        double mid = 0.5 * (lo + hi);
        (evaluate(mid).value > 1.0 ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    ever_below = ever_below || !above;
    if (s >= s_hi) return ever_below ? std::nullopt : std::optional<double>(s_lo);
    prev = s;
    prev_above = above;
  }
}

KappaStar kappa_star(const CollisionModel& model, double s, int directions, std::size_t samples, const Rng& rng) {
  return KappaStarSampler(model, directions, samples, rng).evaluate(s);
}

// ---- regularity ----

RegularityCheck regularity_conditions(const CollisionModel& model, double delta, double a_bar, int directions,
                                      std::size_t samples, const Rng& rng) {
  require_samples(samples);
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(a_bar > 0.0)) throw std::invalid_argument("a_bar must be positive");
  std::vector<Vector> dirs = model.rotation_invariant() ? std::vector<Vector>{Vector::unit(model.dim(), 0)}
                                                        : direction_set(model, directions);
  const std::size_t nd = dirs.size();
  struct Acc {
    std::vector<double> m, M;
    std::vector<std::size_t> both_zero, both_nonzero, min_zero, max_zero;
  };
  std::vector<Acc> acc(kBatches);
  parallel_for_index(kBatches, [&](std::size_t b) {
    Rng r = rng.child(b);
    Acc& a = acc[b];
    a.m.assign(nd, 0.0);
    a.M.assign(nd, 0.0);
    a.both_zero.assign(nd, 0);
    a.both_nonzero.assign(nd, 0);
    a.min_zero.assign(nd, 0);
    a.max_zero.assign(nd, 0);
    std::size_t n = batch_size(samples, static_cast<int>(b));
    for (std::size_t k = 0; k < n; ++k) {
      CoefficientPair p = model.sample_pair(r);
      for (std::size_t j = 0; j < nd; ++j) {
        double x = transpose_times(p.left, dirs[j]).norm();
        double y = transpose_times(p.right, dirs[j]).norm();
        bool zx = x <= 1e-14, zy = y <= 1e-14;
        if (zx && zy) ++a.both_zero[j];
        if (!zx && !zy) ++a.both_nonzero[j];
        double lo = std::min(x, y), hi = std::max(x, y);
        if (lo <= 1e-14) ++a.min_zero[j];
        else a.m[j] += std::pow(lo, -delta);
        if (hi <= 1e-14) ++a.max_zero[j];
        else a.M[j] += std::pow(hi, -a_bar);
      }
    }
  });
  RegularityCheck out;
  const double n = static_cast<double>(samples);
  constexpr double kDivergence = 1e6;
  for (std::size_t j = 0; j < nd; ++j) {
    double m = 0.0, M = 0.0;
    std::size_t bz = 0, bn = 0, mz = 0, Mz = 0;
    for (const auto& a : acc) {
      m += a.m[j];
      M += a.M[j];
      bz += a.both_zero[j];
      bn += a.both_nonzero[j];
      mz += a.min_zero[j];
      Mz += a.max_zero[j];
    }
    m /= n;
    M /= n;
    if (mz > 0 || m > kDivergence) out.m_diverged = true;
    if (Mz > 0 || M > kDivergence) out.M_diverged = true;
    out.m_hat = std::max(out.m_hat, m);
    out.M_hat = std::max(out.M_hat, M);
    if (out.applicable && bz > 0) {
      out.applicable = false;
      out.reason = fmt::format("L^T e = R^T e = 0 with positive frequency {:.3g} at e = {}", bz / n,
                               to_string(Matrix::outer(dirs[j], dirs[j])));
    }
    if (out.applicable && bn == 0) {
      out.applicable = false;
      out.reason = "L^T e and R^T e are never simultaneously nonzero for some direction";
    }
  }
  if (out.m_diverged) out.m_hat = std::numeric_limits<double>::infinity();
  if (out.M_diverged) out.M_hat = std::numeric_limits<double>::infinity();
  return out;
}

// ---- combined ----

bool AssumptionReport::all_pass() const {
  return assumption_1 == Verdict::pass && assumption_2 == Verdict::pass && assumption_3 == Verdict::pass;
}

bool AssumptionReport::any_fail() const {
  return assumption_1 == Verdict::fail || assumption_2 == Verdict::fail || assumption_3 == Verdict::fail;
}

AssumptionReport verify(const CollisionModel& model, const VerifyOptions& opt, const Rng& rng) {
  AssumptionReport rep;
  rep.model = model.name();
  rep.dim = model.dim();
  const int ndir = opt.directions > 0 ? opt.directions : default_direction_count(model.dim());

  rep.normalization = check_normalization(model, opt.samples, rng.child("normalization"));
  rep.assumption_1 = rep.normalization.verdict;

  UpsilonEstimate ups = estimate_upsilon(model, opt.samples, rng.child("upsilon"));
  rep.upsilon_samples = ups.samples();
  try {
    rep.sigma_star = fixed_point_sigma(ups).sym();
  } catch (const std::exception& e) {
    rep.sigma_star_error = e.what();
  }
  rep.contraction = traceless_contraction(ups, opt.restarts, rng.child("contraction"));
  if (!rep.sigma_star || rep.contraction.near_one)
    rep.assumption_3 = Verdict::fail;
  else
    rep.assumption_3 = Verdict::pass;

  rep.weight_contraction =
      kappa_p_estimate(model, model.weight(), ndir, opt.kappa_p_samples, rng.child("kappa_p"));
  rep.directions = rep.weight_contraction.directions;
  rep.assumption_2 = upper_verdict(rep.weight_contraction.kappa_p, rep.weight_contraction.stderr_);

  rep.caveats.push_back(fmt::format("kappa_p is a supremum over {} directions, so it can only underestimate",
                                    rep.directions));
  rep.caveats.push_back(fmt::format("kappa is the best of {} local searches over traceless matrices, a lower bound",
                                    rep.contraction.starts));
  return rep;
}

nlohmann::json sym_to_json(const SymMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.dim(); ++i) {
    std::vector<double> r;
    for (int j = 0; j < m.dim(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json to_json(const AssumptionReport& r) {
  nlohmann::json j;
  j["model"] = r.model;
  j["dim"] = r.dim;
  j["a1_deviation"] = {{"matrix", sym_to_json(r.normalization.deviation)},
                       {"stderr", sym_to_json(r.normalization.stderr_)},
                       {"norm", r.normalization.deviation_norm},
                       {"max_stderr", r.normalization.max_stderr},
                       {"samples", r.normalization.samples}};
  j["sigma_star"] = r.sigma_star ? sym_to_json(*r.sigma_star) : nlohmann::json(nullptr);
  if (!r.sigma_star_error.empty()) j["sigma_star_error"] = r.sigma_star_error;
  j["kappa"] = {{"value", r.contraction.kappa},
                {"stderr", r.contraction.stderr_},
                {"near_one", r.contraction.near_one},
                {"argmax", sym_to_json(r.contraction.argmax)},
                {"starts", r.contraction.starts},
                {"samples", r.upsilon_samples}};
  j["kappa_p"] = {{"value", r.weight_contraction.kappa_p},
                  {"stderr", r.weight_contraction.stderr_},
                  {"argmax", std::vector<double>(r.weight_contraction.argmax.values().begin(),
                                                 r.weight_contraction.argmax.values().end())},
                  {"directions", r.weight_contraction.directions},
                  {"samples", r.weight_contraction.samples}};
  j["verdicts"] = {{"assumption_1", to_string(r.assumption_1)},
                   {"assumption_2", to_string(r.assumption_2)},
                   {"assumption_3", to_string(r.assumption_3)}};
  j["caveats"] = r.caveats;
  return j;
}

std::string to_table(const AssumptionReport& r) {
  std::string s = fmt::format("model {} (d = {})\n", r.model, r.dim);
  s += fmt::format("  {:<34} {:>12} {:>12}  {}\n", "quantity", "estimate", "stderr", "verdict");
  s += fmt::format("  {:<34} {:>12.5g} {:>12.3g}  {}\n", "|E[L^T L + R^T R] - 1|", r.normalization.deviation_norm,
                   r.normalization.max_stderr, to_string(r.assumption_1));
  s += fmt::format("  {:<34} {:>12.5g} {:>12.3g}  {}\n", "kappa_p (weight contraction)", r.weight_contraction.kappa_p,
                   r.weight_contraction.stderr_, to_string(r.assumption_2));
  s += fmt::format("  {:<34} {:>12.5g} {:>12.3g}  {}\n", "kappa (traceless contraction)", r.contraction.kappa,
                   r.contraction.stderr_, to_string(r.assumption_3));
  if (r.sigma_star)
    s += fmt::format("  Sigma* = {}\n", to_string(r.sigma_star->matrix()));
  else
    s += fmt::format("  Sigma* unavailable: {}\n", r.sigma_star_error);
  for (const auto& c : r.caveats) s += "  note: " + c + "\n";
  return s;
}

}  // namespace rmkac
