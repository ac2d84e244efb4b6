#include "rmkac/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "rmkac/directions.hpp"
#include "rmkac/parallel.hpp"
#include "rmkac/stats.hpp"
#include "rmkac/wild.hpp"

namespace rmkac {

// ---- grids ----

Vector FourierGrid::point(std::size_t k) const {
  return radii[k % radii.size()] * directions[k / radii.size()];
}

FourierGrid make_fourier_grid(int dim, int directions, int radii, double r_min, double r_max,
                              std::span<const Vector> extra) {
  if (radii < 1 || !(r_min > 0.0) || !(r_max >= r_min)) throw std::invalid_argument("bad Fourier grid radii");
  FourierGrid g;
  g.dim = dim;
  g.directions = sphere_directions(dim, directions);
  for (const auto& e : extra) g.directions.push_back(e.normalized());
  for (int k = 0; k < radii; ++k) {
    double f = radii == 1 ? 0.0 : static_cast<double>(k) / (radii - 1);
    g.radii.push_back(r_min * std::pow(r_max / r_min, f));
  }
  return g;
}

FourierGrid make_fourier_grid(const CollisionModel& model, int directions, int radii, double r_min, double r_max) {
  return make_fourier_grid(model.dim(), directions, radii, r_min, r_max, model.critical_directions());
}

// ---- characteristic functions ----

std::complex<double> char_fn(const VelocityEnsemble& ens, const Vector& xi) {
  if (xi.dim() != ens.dim()) throw DimensionMismatch("char_fn argument dimension");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    auto r = ens.row(i);
    double x = 0.0;
    for (int k = 0; k < ens.dim(); ++k) x += xi[k] * r[static_cast<std::size_t>(k)];
    double w = ens.weight(i);
    re += w * std::cos(x);
    im += w * std::sin(x);
  }
  return {re, im};
}

std::vector<std::complex<double>> char_fn(const VelocityEnsemble& ens, std::span<const Vector> grid) {
  std::vector<std::complex<double>> out(grid.size());
  parallel_for_index(grid.size(), [&](std::size_t k) { out[k] = char_fn(ens, grid[k]); });
  return out;
}

double cos_remainder(double x) {
  double x2 = x * x;
  if (std::abs(x) < 0.1) {
    // x^4/24 - x^6/720 + x^8/40320 - x^10/3628800
    return x2 * x2 * (1.0 / 24 - x2 * (1.0 / 720 - x2 * (1.0 / 40320 - x2 / 3628800)));
  }
  return std::cos(x) - 1.0 + 0.5 * x2;
}

RemainderTable remainder_table(const VelocityEnsemble& ens, const FourierGrid& grid) {
  if (grid.dim != ens.dim()) throw DimensionMismatch("Fourier grid and ensemble dimensions differ");
  if (ens.size() < 2) throw std::invalid_argument("ensemble needs at least two samples");
  RemainderTable t;
  t.grid = grid;
  const std::size_t nr = grid.radii.size();
  t.mean.assign(grid.size(), 0.0);
  t.variance.assign(grid.size(), 0.0);
  double w2 = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) w2 += ens.weight(i) * ens.weight(i);
  t.effective_size = 1.0 / w2;
  parallel_for_index(grid.directions.size(), [&](std::size_t di) {
    const Vector& e = grid.directions[di];
    std::vector<double> s1(nr, 0.0), s2(nr, 0.0);
    for (std::size_t i = 0; i < ens.size(); ++i) {
      auto r = ens.row(i);
      double x = 0.0;
      for (int k = 0; k < ens.dim(); ++k) x += e[k] * r[static_cast<std::size_t>(k)];
      double w = ens.weight(i);
      for (std::size_t j = 0; j < nr; ++j) {
        double v = cos_remainder(grid.radii[j] * x);
        s1[j] += w * v;
        s2[j] += w * v * v;
      }
    }
    for (std::size_t j = 0; j < nr; ++j) {
      t.mean[di * nr + j] = s1[j];
      t.variance[di * nr + j] = std::max(0.0, s2[j] - s1[j] * s1[j]);
    }
  });
  t.covariance = ens.covariance_estimate();
  t.covariance_known = ens.known_covariance().has_value();
  return t;
}

void require_centered(const VelocityEnsemble& ens) {
  // 3 sigma, adjusted so that the family of d coordinates has the two-sided 3 sigma level
  const double level = 1.0 - std::pow(1.0 - 0.0026997960632601866, 1.0 / ens.dim());
  const double z = normal_quantile(1.0 - level / 2.0);
  Vector m = ens.mean();
  Vector se = ens.mean_stderr();
  for (int k = 0; k < ens.dim(); ++k)
    if (std::abs(m[k]) > z * se[k] + 1e-12)
      throw std::domain_error(fmt::format("ensemble is not centered: coordinate {} has mean {:.4g} (stderr {:.3g})",
                                          k, m[k], se[k]));
}

MetricReport d_omega(const RemainderTable& a, const RemainderTable& b, const WeightFunction& weight, double alpha) {
  if (a.grid.size() != b.grid.size() || a.grid.dim != b.grid.dim) throw DimensionMismatch("remainder tables differ");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  MetricReport r;
  r.alpha = alpha;
  r.grid_points = a.grid.size();
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < a.grid.size(); ++k) {
    double w = weight(a.grid.point(k));
    double v = std::abs(a.mean[k] - b.mean[k]) / w;
    if (v > best) {
      best = v;
      arg = k;
    }
  }
  r.weighted_part = best;
  r.argmax = a.grid.point(arg);
  r.stderr_ = std::sqrt(a.variance[arg] / a.effective_size + b.variance[arg] / b.effective_size) / weight(r.argmax);
  r.covariance_part = alpha * matrix_norm(a.covariance - b.covariance, NormOrder::inf);
  r.value = r.weighted_part + r.covariance_part;
  return r;
}

MetricReport d_omega(const VelocityEnsemble& a, const VelocityEnsemble& b, const WeightFunction& weight, double alpha,
                     const FourierGrid& grid) {
  if (a.dim() != b.dim()) throw DimensionMismatch("ensembles of different dimension");
  require_centered(a);
  require_centered(b);
  return d_omega(remainder_table(a, grid), remainder_table(b, grid), weight, alpha);
}

double alpha_rule(int dim, double p, double kappa, double kappa_p) {
  double base = 4.0 * std::pow(static_cast<double>(dim), 0.5 * p) * kappa_p;
  return kappa < 1.0 ? base / (1.0 - kappa) : base;
}

double lambda_bound(int dim, double p, double kappa, double kappa_p, double alpha) {
  return std::max(kappa_p, kappa + 2.0 * std::pow(static_cast<double>(dim), 0.5 * p) * kappa_p / alpha);
}

// ---- one collision step ----

VelocityEnsemble one_collision_step(const VelocityEnsemble& ens, const CollisionModel& model, const Rng& rng) {
  if (ens.dim() != model.dim()) throw DimensionMismatch("ensemble and model dimensions differ");
  if (ens.weighted()) throw std::invalid_argument("collision step needs an unweighted ensemble");
  const std::size_t n = ens.size();
  if (n < 2) throw std::invalid_argument("collision step needs at least two samples");
  const auto d = static_cast<std::size_t>(ens.dim());
  std::vector<double> flat(n * d);
  const bool known = ens.known_covariance().has_value();
  std::vector<double> cov(known ? n * d * d : 0);
  parallel_for_index(n, [&](std::size_t i) {
    Rng r = rng.child(i);
    std::size_t ia = r.index(n), ib = r.index(n);
    CoefficientPair p = model.sample_pair(r);
    Vector v = p.left * ens[ia] + p.right * ens[ib];
    std::copy(v.values().begin(), v.values().end(), flat.begin() + static_cast<std::ptrdiff_t>(i * d));
    if (known) {
      SymMatrix c = SymMatrix::congruence(p.left, *ens.known_covariance()) +
                    SymMatrix::congruence(p.right, *ens.known_covariance());
      std::copy(c.matrix().data().begin(), c.matrix().data().end(), cov.begin() + static_cast<std::ptrdiff_t>(i * d * d));
    }
  });
  VelocityEnsemble out(ens.dim(), std::move(flat));
  if (known) {
    std::vector<double> mean(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < d * d; ++k) mean[k] += cov[i * d * d + k];
    for (double& x : mean) x /= static_cast<double>(n);
    out.set_known_covariance(SymMatrix(Matrix(ens.dim(), mean)));
  }
  return out;
}

ContractionMeasurement contraction_ratio(const CollisionModel& model, const VelocityEnsemble& a,
                                         const VelocityEnsemble& b, const WeightFunction& weight, double alpha,
                                         const FourierGrid& grid, const Rng& rng) {
  ContractionMeasurement m;
  m.before = d_omega(a, b, weight, alpha, grid);
  const std::size_t half = a.size() / 2;
  m.noise_floor = d_omega(remainder_table(a.slice(0, half), grid), remainder_table(a.slice(half, 2 * half), grid),
                          weight, alpha)
                      .value;
  if (!(m.before.value > m.noise_floor))
    throw std::domain_error(fmt::format("input distance {:.4g} does not exceed the noise floor {:.4g}",
                                        m.before.value, m.noise_floor));
  // common random numbers for both steps
  Rng step = rng.child("collision_step");
  m.after = d_omega(one_collision_step(a, model, step), one_collision_step(b, model, step), weight, alpha, grid);
  m.ratio = m.after.value / m.before.value;
  return m;
}

// ---- convergence rate ----

RateResult convergence_rate(const CollisionModel& model, const InitialLaw& mu0, std::span<const double> times,
                            std::size_t samples, const VelocityEnsemble& mu_inf,
                            const VelocityEnsemble& mu_inf_replicate, const WeightFunction& weight, double alpha,
                            double lambda, const FourierGrid& grid, const Rng& rng) {
  if (times.size() < 2) throw std::invalid_argument("need at least two times");
  RateResult res;
  res.alpha = alpha;
  res.lambda = lambda;
  res.theoretical_rate = 1.0 - lambda;
  RemainderTable target = remainder_table(mu_inf, grid);
  res.noise_floor = d_omega(target, remainder_table(mu_inf_replicate, grid), weight, alpha).value;
  for (std::size_t k = 0; k < times.size(); ++k) {
    TransientEnsemble te = sample_transient(model, mu0, times[k], samples, rng.child(k));
    require_centered(te.samples);
    MetricReport mr = d_omega(remainder_table(te.samples, grid), target, weight, alpha);
    RatePoint p;
    p.time = times[k];
    p.metric = mr.value;
    p.stderr_ = mr.stderr_;
    p.above_floor = mr.value > res.floor_factor * res.noise_floor;
    p.capped = te.capped;
    p.mean_depth = te.mean_depth;
    res.points.push_back(p);
  }
  std::vector<double> x, y;
  const RatePoint* prev = nullptr;
  for (const auto& p : res.points) {
    if (!p.above_floor) continue;
    x.push_back(p.time);
    y.push_back(std::log(p.metric));
    if (prev && p.metric > prev->metric + 2.0 * std::hypot(p.stderr_, prev->stderr_)) res.monotone = false;
    prev = &p;
  }
  res.fit_points = x.size();
  if (x.empty()) throw std::runtime_error("all metric values are below the noise floor");
  if (x.size() < 2) throw std::runtime_error("fewer than two metric values above the noise floor");
  LinearFit f = least_squares(x, y);
  res.fitted_rate = -f.slope;
  res.rate_stderr = f.slope_stderr;
  return res;
}

// ---- matrix metric ----

MatrixGrid make_matrix_grid(int dim, int frames, int scales, double c_min, double c_max, std::uint64_t seed) {
  MatrixGrid g;
  g.dim = dim;
  Rng rng(seed, "matrix_grid");
  std::vector<std::vector<double>> patterns;
  if (dim <= 6) {
    for (unsigned mask = 0; mask < (1u << dim); ++mask) {
      if (mask & 1u) continue;  // tau and -tau give conjugate values
      std::vector<double> tau;
      for (int k = 0; k < dim; ++k) tau.push_back((mask >> k) & 1u ? -1.0 : 1.0);
      patterns.push_back(tau);
    }
  } else {
    for (int k = 0; k < 32; ++k) {
      std::vector<double> tau{1.0};
      for (int j = 1; j < dim; ++j) tau.push_back(rng.bernoulli(0.5) ? 1.0 : -1.0);
      patterns.push_back(tau);
    }
  }
  for (int f = 0; f < frames; ++f) {
    Matrix q = f == 0 ? Matrix::identity(dim) : haar_rotation(dim, rng);
    for (const auto& tau : patterns) {
      Matrix m(dim);
      for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) m(i, j) += tau[static_cast<std::size_t>(k)] * q(i, k) * q(j, k);
      g.units.push_back(SymMatrix(m));
    }
  }
  for (int k = 0; k < scales; ++k) {
    double f = scales == 1 ? 0.0 : static_cast<double>(k) / (scales - 1);
    g.scales.push_back(c_min * std::pow(c_max / c_min, f));
  }
  return g;
}

MatrixMetricReport matrix_metric_surrogate(const MatrixEnsemble& a, const MatrixEnsemble& b, double p, double alpha,
                                           const MatrixGrid& grid, std::size_t max_members) {
  if (a.dim() != b.dim() || grid.dim != a.dim()) throw DimensionMismatch("matrix metric dimensions differ");
  const int d = a.dim();
  const std::size_t ns = grid.scales.size();
  auto fourier_part = [&](const MatrixEnsemble& e) {
    std::size_t n = max_members ? std::min(max_members, e.size()) : e.size();
    // real and imaginary parts of E[exp(-i u) - 1 + i u], u = tr(Xi S)
    std::vector<double> re(grid.size(), 0.0), im(grid.size(), 0.0);
    parallel_for_index(grid.units.size(), [&](std::size_t g) {
      auto xi = grid.units[g].matrix().data();
      for (std::size_t i = 0; i < n; ++i) {
        auto s = e.raw(i);
        double u = 0.0;
        for (std::size_t k = 0; k < xi.size(); ++k) u += xi[k] * s[k];
        for (std::size_t c = 0; c < ns; ++c) {
          double x = grid.scales[c] * u;
          double h = std::sin(0.5 * x);
          re[g * ns + c] -= 2.0 * h * h;  // cos x - 1
          im[g * ns + c] += x - std::sin(x);
        }
      }
      for (std::size_t c = 0; c < ns; ++c) {
        re[g * ns + c] /= static_cast<double>(n);
        im[g * ns + c] /= static_cast<double>(n);
      }
    });
    return std::pair{re, im};
  };
  auto [re_a, im_a] = fourier_part(a);
  auto [re_b, im_b] = fourier_part(b);
  MatrixMetricReport r;
  r.alpha = alpha;
  r.grid_points = grid.size();
  const double dnorm = std::pow(static_cast<double>(d), -(0.5 * p - 1.0));
  for (std::size_t g = 0; g < grid.units.size(); ++g) {
    double n1 = matrix_norm(grid.units[g], NormOrder::one);
    for (std::size_t c = 0; c < ns; ++c) {
      double w = dnorm * std::pow(grid.scales[c] * n1, 0.5 * p);
      std::size_t k = g * ns + c;
      double v = std::hypot(re_a[k] - re_b[k], im_a[k] - im_b[k]) / w;
      r.weighted_part = std::max(r.weighted_part, v);
    }
  }
  r.covariance_part = alpha * matrix_norm(a.mean() - b.mean(), NormOrder::inf);
  r.value = r.weighted_part + r.covariance_part;
  return r;
}

}  // namespace rmkac
