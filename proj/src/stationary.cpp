#include "rmkac/stationary.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rmkac/directions.hpp"
#include "rmkac/parallel.hpp"

namespace rmkac {

StationaryDivergence::StationaryDivergence(const std::string& what, std::vector<IterationRecord> history)
    : std::runtime_error(what), history_(std::make_shared<const std::vector<IterationRecord>>(std::move(history))) {}

const std::vector<IterationRecord>& StationaryDivergence::history() const { return *history_; }

MatrixEnsemble iterate_T(const MatrixEnsemble& ens, const CollisionModel& model, const Rng& rng,
                         double* renormalization) {
  if (ens.dim() != model.dim()) throw DimensionMismatch("ensemble and model dimensions differ");
  const std::size_t n = ens.size();
  if (n == 0) throw DegenerateEnsemble("empty ensemble");
  MatrixEnsemble out(ens.dim(), n);
  parallel_for_index(n, [&](std::size_t i) {
    Rng r = rng.child(i);
    std::size_t a = r.index(n), b = r.index(n);
    CoefficientPair p = model.sample_pair(r);
    PsdMatrix s = PsdMatrix::congruence(p.left, ens.member(a));
    s += PsdMatrix::congruence(p.right, ens.member(b));
    out.set(i, s);
  });
  double tr = out.mean_trace();
  if (!(tr > 0.0) || !std::isfinite(tr))
    throw DegenerateEnsemble(fmt::format("cannot renormalize: mean trace is {}", tr));
  double factor = ens.dim() / tr;
  out.scale_all(factor);
  if (renormalization) *renormalization = factor;
  return out;
}

StationaryResult solve_stationary(const CollisionModel& model, const StationaryOptions& opt, const Rng& rng) {
  const int d = model.dim();
  PsdMatrix start = opt.start ? *opt.start
                    : model.reference().sigma_star ? PsdMatrix(*model.reference().sigma_star)
                                                   : PsdMatrix::identity(d);
  if (start.dim() != d) throw DimensionMismatch("start matrix dimension");
  const double p = opt.p > 0.0 ? opt.p : model.weight().exponent();
  const MatrixGrid grid = make_matrix_grid(d, opt.grid_frames, opt.grid_scales);

  StationaryResult res;
  MatrixEnsemble cur = MatrixEnsemble::point_mass(start, opt.ensemble_size);

  // probe chain: start + eps (q1 q1^T - q2 q2^T) in the eigenframe of start
  bool probing = opt.probe && d >= 2;
  MatrixEnsemble probe;
  if (probing) {
    SpectralDecomposition sd = spectral_decompose(start.sym());
    double eps = 0.5 * sd.values[d - 1];
    if (eps <= 0.0) {
      res.warnings.push_back("start matrix is singular; probe chain disabled");
      probing = false;
    } else {
      SymMatrix pert = SymMatrix::outer(sd.vectors[0]) - SymMatrix::outer(sd.vectors[static_cast<std::size_t>(d - 1)]);
      probe = MatrixEnsemble::point_mass(PsdMatrix(start.sym() + eps * pert), opt.ensemble_size);
      res.initial_probe_metric =
          matrix_metric_surrogate(cur, probe, p, opt.alpha, grid, opt.monitor_members).value;
    }
  }

  double last_probe = res.initial_probe_metric;
  int stalled = 0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    Rng step = rng.child(static_cast<std::uint64_t>(it));
    MatrixEnsemble next = iterate_T(cur, model, step.child("main"), &rec.renormalization);
    rec.successive_metric = matrix_metric_surrogate(cur, next, p, opt.alpha, grid, opt.monitor_members).value;
    if (probing) {
      probe = iterate_T(probe, model, step.child("probe"));
      double m = matrix_metric_surrogate(next, probe, p, opt.alpha, grid, opt.monitor_members).value;
      rec.probe_metric = m;
      if (m >= 0.95 * last_probe && m > 0.5 * res.initial_probe_metric && m > opt.tolerance) {
        if (++stalled >= opt.stall_iterations) {
          res.history.push_back(rec);
          throw StationaryDivergence(
              fmt::format("distance between chains started apart stayed at {:.4g} (initially {:.4g}) for {} "
                          "iterations; the iteration does not contract",
                          m, res.initial_probe_metric, stalled),
              res.history);
        }
      } else {
        stalled = 0;
      }
      last_probe = m;
      if (m <= 0.5 * res.initial_probe_metric) probing = false;
    }
    cur = std::move(next);
    res.history.push_back(rec);
    res.iterations = it;
    // no early stop while the probe chain has yet to show contraction
    if (rec.successive_metric < opt.tolerance && !probing) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged)
    res.warnings.push_back(fmt::format(
        "successive-iterate distance did not fall below {} in {} iterations (Monte Carlo noise floor)", opt.tolerance,
        opt.max_iterations));
  res.ensemble = std::move(cur);
  return res;
}

VelocityEnsemble sample_mu_inf(const MatrixEnsemble& ens, std::size_t count, const Rng& rng) {
  const int d = ens.dim();
  const std::size_t n = ens.size();
  if (n == 0) throw DegenerateEnsemble("empty ensemble");
  std::vector<double> roots(n * static_cast<std::size_t>(d * d));
  parallel_for_index(n, [&](std::size_t i) {
    PsdMatrix r = psd_sqrt(ens.member(i));
    std::copy(r.matrix().data().begin(), r.matrix().data().end(),
              roots.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(d * d)));
  });
  const auto du = static_cast<std::size_t>(d);
  std::vector<double> flat(count * du);
  parallel_for_index(count, [&](std::size_t k) {
    Rng r = rng.child(k);
    std::size_t a = r.index(n);
    Vector w = standard_normal_vector(d, r);
    const double* m = roots.data() + a * du * du;
    for (std::size_t i = 0; i < du; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < du; ++j) s += m[i * du + j] * w[static_cast<int>(j)];
      flat[k * du + i] = s;
    }
  });
  VelocityEnsemble out(d, std::move(flat));
  out.set_known_covariance(ens.mean());
  return out;
}

double psi_eval(const MatrixEnsemble& ens, const Vector& xi) {
  if (xi.dim() != ens.dim()) throw DimensionMismatch("psi argument dimension");
  const int d = ens.dim();
  double total = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    auto s = ens.raw(i);
    double q = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) q += xi[a] * s[static_cast<std::size_t>(a * d + b)] * xi[b];
    total += std::exp(-0.5 * q);
  }
  return total / static_cast<double>(ens.size());
}

PsiResidual psi_fixed_point_residual(const MatrixEnsemble& ens, const CollisionModel& model,
                                     std::span<const Vector> grid, std::size_t pairs, const Rng& rng) {
  if (ens.dim() != model.dim()) throw DimensionMismatch("ensemble and model dimensions differ");
  if (pairs == 0) throw std::invalid_argument("need at least one pair");
  const int d = ens.dim();
  const std::size_t n = ens.size();
  // shared draws for all grid points
  std::vector<CoefficientPair> draws(pairs);
  std::vector<std::pair<std::size_t, std::size_t>> members(pairs);
  parallel_for_index(pairs, [&](std::size_t k) {
    Rng r = rng.child(k);
    members[k] = {r.index(n), r.index(n)};
    draws[k] = model.sample_pair(r);
  });
  PsiResidual out;
  out.residuals.assign(grid.size(), 0.0);
  parallel_for_index(grid.size(), [&](std::size_t g) {
    const Vector& xi = grid[g];
    double psi = psi_eval(ens, xi);
    double acc = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      Vector l = transpose_times(draws[k].left, xi);
      Vector r = transpose_times(draws[k].right, xi);
      auto sa = ens.raw(members[k].first);
      auto sb = ens.raw(members[k].second);
      double q = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          q += l[a] * sa[static_cast<std::size_t>(a * d + b)] * l[b] + r[a] * sb[static_cast<std::size_t>(a * d + b)] * r[b];
      acc += std::exp(-0.5 * q);
    }
    out.residuals[g] = std::abs(psi - acc / static_cast<double>(pairs));
  });
  std::size_t arg = 0;
  for (std::size_t g = 0; g < grid.size(); ++g)
    if (out.residuals[g] > out.residuals[arg]) arg = g;
  out.max_residual = grid.empty() ? 0.0 : out.residuals[arg];
  if (!grid.empty()) out.argmax = grid[arg];
  return out;
}

std::vector<Vector> psi_grid(int dim, int directions, std::span<const double> radii) {
  std::vector<Vector> out;
  for (const auto& e : sphere_directions(dim, directions))
    for (double r : radii) out.push_back(r * e);
  return out;
}

}  // namespace rmkac
