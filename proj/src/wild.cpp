#include "rmkac/wild.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rmkac/directions.hpp"
#include "rmkac/parallel.hpp"
#include "rmkac/stats.hpp"

namespace rmkac {

WeightArray::WeightArray(int dim, std::vector<double> flat) : dim_(dim), flat_(std::move(flat)) {
  if (dim < 1 || dim > kMaxDim) throw DimensionMismatch("weight array dimension");
  if (flat_.empty() || flat_.size() % stride() != 0) throw DimensionMismatch("weight array data length");
}

namespace {

// c = a * b for d x d row-major blocks
void multiply(const double* a, const Matrix& b, double* c, int d) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += a[i * d + k] * b(k, j);
      c[i * d + j] = s;
    }
}

}  // namespace

WeightArray build_weight_tree(const CollisionModel& model, int n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("tree depth must be nonnegative");
  const int d = model.dim();
  const auto stride = static_cast<std::size_t>(d * d);
  const auto slots = static_cast<std::size_t>(n) + 1;
  std::vector<double> pool(slots * stride, 0.0);
  std::vector<std::size_t> next(slots, slots);  // linked list in left-to-right order; slots marks the end
  for (int i = 0; i < d; ++i) pool[static_cast<std::size_t>(i * d + i)] = 1.0;
  std::vector<double> parent(stride);
  for (std::size_t k = 1; k < slots; ++k) {
    std::size_t u = rng.index(k);
    CoefficientPair p = model.sample_pair(rng);
    std::copy_n(pool.begin() + static_cast<std::ptrdiff_t>(u * stride), stride, parent.begin());
    multiply(parent.data(), p.left, pool.data() + u * stride, d);
    multiply(parent.data(), p.right, pool.data() + k * stride, d);
    next[k] = next[u];
    next[u] = k;
  }
  std::vector<double> ordered;
  ordered.reserve(slots * stride);
  for (std::size_t s = 0; s != slots; s = next[s])
    ordered.insert(ordered.end(), pool.begin() + static_cast<std::ptrdiff_t>(s * stride),
                   pool.begin() + static_cast<std::ptrdiff_t>((s + 1) * stride));
  return WeightArray(d, std::move(ordered));
}

Vector wild_sum(const WeightArray& tree, const InitialLaw& mu0, Rng& rng) {
  if (mu0.dim() != tree.dim()) throw DimensionMismatch("initial law and tree dimensions differ");
  const int d = tree.dim();
  Vector w(d);
  for (std::size_t j = 0; j < tree.size(); ++j) {
    Vector x = mu0.sample(rng);
    auto b = tree.raw(j);
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += b[static_cast<std::size_t>(i * d + k)] * x[k];
      w[i] += s;
    }
  }
  return w;
}

PsdMatrix conditional_covariance(const WeightArray& tree, const SymMatrix& s0) {
  if (s0.dim() != tree.dim()) throw DimensionMismatch("covariance and tree dimensions differ");
  SymMatrix acc(tree.dim());
  for (std::size_t j = 0; j < tree.size(); ++j) acc += SymMatrix::congruence(tree.beta(j), s0);
  return PsdMatrix::trusted(acc);
}

int depth_cap(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
  double base = 64.0 * (1.0 + t);
  double q = -std::expm1(-t);  // 1 - e^-t
  double tail = q > 0.0 ? std::ceil(std::log(1e-6) / std::log(q)) : 0.0;
  double cap = std::max(base, tail);
  if (cap > 5e7) throw std::invalid_argument("time too large for the Wild sum sampler");
  return static_cast<int>(cap);
}

DepthDraw sample_depth(double t, Rng& rng) {
  DepthDraw out;
  int cap = depth_cap(t);
  double l = std::log1p(-std::exp(-t));
  if (l == 0.0) return out;  // t = 0: the tree is a single leaf
  double n = std::floor(std::log(rng.uniform_positive()) / l);
  if (n >= cap) {
    out.depth = cap;
    out.capped = true;
  } else {
    out.depth = static_cast<int>(n);
  }
  return out;
}

TransientDraw sample_mu_t(const CollisionModel& model, const InitialLaw& mu0, double t, Rng& rng) {
  DepthDraw dd = sample_depth(t, rng);
  WeightArray tree = build_weight_tree(model, dd.depth, rng);
  return {wild_sum(tree, mu0, rng), dd.depth, dd.capped};
}

TransientEnsemble sample_transient(const CollisionModel& model, const InitialLaw& mu0, double t, std::size_t count,
                                   const Rng& rng) {
  if (mu0.dim() != model.dim()) throw DimensionMismatch("initial law and model dimensions differ");
  const auto d = static_cast<std::size_t>(model.dim());
  std::vector<double> flat(count * d);
  std::vector<int> depth(count);
  std::vector<char> capped(count);
  const bool rb = mu0.covariance().has_value();
  std::vector<double> cov(rb ? count * d * d : 0);
  parallel_for_index(count, [&](std::size_t i) {
    Rng r = rng.child(i);
    DepthDraw dd = sample_depth(t, r);
    WeightArray tree = build_weight_tree(model, dd.depth, r);
    Vector v = wild_sum(tree, mu0, r);
    std::copy(v.values().begin(), v.values().end(), flat.begin() + static_cast<std::ptrdiff_t>(i * d));
    depth[i] = dd.depth;
    capped[i] = dd.capped;
    if (rb) {
      PsdMatrix c = conditional_covariance(tree, *mu0.covariance());
      std::copy(c.matrix().data().begin(), c.matrix().data().end(),
                cov.begin() + static_cast<std::ptrdiff_t>(i * d * d));
    }
  });
  TransientEnsemble out;
  out.time = t;
  out.samples = VelocityEnsemble(model.dim(), std::move(flat));
  double total_depth = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    total_depth += depth[i];
    out.capped += capped[i] ? 1 : 0;
  }
  out.mean_depth = count ? total_depth / static_cast<double>(count) : 0.0;
  if (rb && count > 0) {
    std::vector<double> mean(d * d, 0.0);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t k = 0; k < d * d; ++k) mean[k] += cov[i * d * d + k];
    for (double& x : mean) x /= static_cast<double>(count);
    out.samples.set_known_covariance(SymMatrix(Matrix(model.dim(), mean)));
  }
  return out;
}

double gamma_bound(double kappa_p, int n) {
  return std::exp(std::lgamma(kappa_p + n) - std::lgamma(n + 1.0) - std::lgamma(kappa_p));
}

std::vector<MpPoint> mp_decay(const CollisionModel& model, const WeightFunction& weight, std::span<const int> depths,
                              std::size_t trees, int directions, double kappa_p, const Rng& rng) {
  if (trees < 2) throw std::invalid_argument("need at least two trees per depth");
  std::vector<Vector> dirs = sphere_directions(model.dim(), directions);
  for (const auto& e : model.critical_directions()) dirs.push_back(e.normalized());
  const std::size_t nd = dirs.size();
  constexpr std::size_t kBatches = 32;
  std::vector<MpPoint> out;
  for (int n : depths) {
    const auto leaves = static_cast<std::size_t>(n) + 1;
    const Rng base = rng.child(static_cast<std::uint64_t>(n));
    auto batch_range = [&](std::size_t b) {
      return std::pair{trees * b / kBatches, trees * (b + 1) / kBatches};
    };
    // pass 1: E[w(beta_j^T e)] per leaf and direction
    std::vector<std::vector<double>> sums(kBatches, std::vector<double>(leaves * nd, 0.0));
    parallel_for_index(kBatches, [&](std::size_t b) {
      auto [lo, hi] = batch_range(b);
      for (std::size_t r = lo; r < hi; ++r) {
        Rng sub = base.child(r);
        WeightArray tree = build_weight_tree(model, n, sub);
        for (std::size_t j = 0; j < leaves; ++j) {
          Matrix beta = tree.beta(j);
          for (std::size_t e = 0; e < nd; ++e) sums[b][j * nd + e] += weight(transpose_times(beta, dirs[e]));
        }
      }
    });
    std::vector<std::size_t> best(leaves, 0);
    double total = 0.0;
    for (std::size_t j = 0; j < leaves; ++j) {
      double top = -1.0;
      for (std::size_t e = 0; e < nd; ++e) {
        double s = 0.0;
        for (std::size_t b = 0; b < kBatches; ++b) s += sums[b][j * nd + e];
        if (s > top) {
          top = s;
          best[j] = e;
        }
      }
      total += top / static_cast<double>(trees);
    }
    // pass 2: regenerate the same trees for the spread of the per-tree sum at the maximizers
    std::vector<double> per_tree(trees);
    parallel_for_index(kBatches, [&](std::size_t b) {
      auto [lo, hi] = batch_range(b);
      for (std::size_t r = lo; r < hi; ++r) {
        Rng sub = base.child(r);
        WeightArray tree = build_weight_tree(model, n, sub);
        double s = 0.0;
        for (std::size_t j = 0; j < leaves; ++j) s += weight(transpose_times(tree.beta(j), dirs[best[j]]));
        per_tree[r] = s;
      }
    });
    RunningStats rs;
    for (double v : per_tree) rs.add(v);
    out.push_back({n, total, rs.stderr_of_mean(), gamma_bound(kappa_p, n)});
  }
  return out;
}

double loglog_slope(std::span<const MpPoint> points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (p.depth < 1 || !(p.value > 0.0)) continue;
    x.push_back(std::log(static_cast<double>(p.depth)));
    y.push_back(std::log(p.value));
  }
  return least_squares(x, y).slope;
}

}  // namespace rmkac
