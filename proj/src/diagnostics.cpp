#include "rmkac/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "rmkac/parallel.hpp"
#include "rmkac/quadrature.hpp"
#include "rmkac/stationary.hpp"
#include "rmkac/stats.hpp"
#include "rmkac/wild.hpp"

namespace rmkac {

Estimate temperature(const VelocityEnsemble& ens) {
  const std::size_t n = ens.size();
  if (n == 0) return {};
  const int d = ens.dim();
  double mean = 0.0, w2 = 0.0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = ens.row(i);
    double s = 0.0;
    for (double c : r) s += c * c;
    x[i] = s / d;
    double w = ens.weight(i);
    mean += w * x[i];
    w2 += w * w;
  }
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += ens.weight(i) * (x[i] - mean) * (x[i] - mean);
  // weighted variance of the mean; reduces to s^2 / n (biased by (n-1)/n) without weights
  return {mean, std::sqrt(var * w2 * static_cast<double>(n) / std::max<double>(1.0, static_cast<double>(n) - 1.0))};
}

// ---- tails ----

std::string to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::consistent: return "consistent";
    case TailVerdict::indeterminate: return "indeterminate";
    case TailVerdict::inconsistent: return "inconsistent";
    case TailVerdict::light_tail: return "light_tail";
    case TailVerdict::no_prediction: return "no_prediction";
  }
  return "?";
}

TailReport hill_tail_index(const VelocityEnsemble& ens, const HillOptions& opt, std::optional<double> s_star,
                           std::optional<double> p) {
  const std::size_t n = ens.size();
  const double nd = static_cast<double>(n);
  const int k_lo = std::max(2, static_cast<int>(std::ceil(std::pow(nd, opt.k_lo_exponent))));
  const int k_hi = static_cast<int>(std::floor(std::pow(nd, opt.k_hi_exponent)));
  if (n < 10 || k_hi <= k_lo || nd < 10.0 * k_hi)
    throw std::invalid_argument(fmt::format("too few samples for the Hill estimator: N = {}", n));

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = ens.row(i);
    double s = 0.0;
    for (double c : r) s += c * c;
    mag[i] = std::sqrt(s);
  }
  const auto top = static_cast<std::size_t>(k_hi) + 1;
  std::partial_sort(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(top), mag.end(), std::greater<>());
  std::vector<double> cum(top + 1, 0.0);  // cum[k] = sum of log X_(i) for i < k
  for (std::size_t i = 0; i < top; ++i) {
    if (!(mag[i] > 0.0)) throw std::invalid_argument("Hill estimator needs positive order statistics");
    cum[i + 1] = cum[i] + std::log(mag[i]);
  }

  TailReport rep;
  rep.s_star = s_star;
  rep.p = p;
  for (int j = 0; j < opt.k_count; ++j) {
    double f = opt.k_count == 1 ? 0.0 : static_cast<double>(j) / (opt.k_count - 1);
    int k = static_cast<int>(std::lround(std::exp(std::log(k_lo) + f * (std::log(k_hi) - std::log(k_lo)))));
    if (!rep.ks.empty() && k <= rep.ks.back()) continue;
    auto ku = static_cast<std::size_t>(k);
    double h = cum[ku] / k - std::log(mag[ku]);
    rep.ks.push_back(k);
    rep.estimates.push_back(h > 0.0 ? 1.0 / h : std::numeric_limits<double>::infinity());
  }

  const std::size_t m = rep.ks.size();
  std::vector<double> logk(m);
  for (std::size_t j = 0; j < m; ++j) logk[j] = std::log(rep.ks[j]);
  LinearFit trend = least_squares(logk, rep.estimates);
  double avg = mean_of(rep.estimates);
  // positive when the estimates grow toward the extreme order statistics
  rep.drift = -trend.slope * (logk.back() - logk.front()) / avg;

  auto w = static_cast<std::size_t>(std::max(3.0, std::round(opt.window_fraction * static_cast<double>(m))));
  w = std::min(w, m);
  double best_cv = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + w <= m; ++s) {
    RunningStats rs;
    for (std::size_t j = s; j < s + w; ++j) rs.add(rep.estimates[j]);
    double cv = std::sqrt(rs.variance()) / rs.mean();
    if (cv < best_cv) {
      best_cv = cv;
      rep.plateau = rs.mean();
      rep.window_lo = rep.ks[s];
      rep.window_hi = rep.ks[s + w - 1];
    }
  }
  rep.plateau_cv = best_cv;

  if (rep.drift > opt.drift_threshold) {
    rep.plateau.reset();
    rep.verdict = TailVerdict::light_tail;
  } else if (!s_star) {
    rep.verdict = TailVerdict::no_prediction;
  } else if (std::abs(*rep.plateau - *s_star) <= 1.0) {
    rep.verdict = TailVerdict::consistent;
  } else if (p && *rep.plateau > *p && *rep.plateau < *s_star - 1.0) {
    rep.verdict = TailVerdict::indeterminate;
  } else {
    rep.verdict = TailVerdict::inconsistent;
  }
  return rep;
}

// ---- decay ----

std::string to_string(DecayVerdict v) {
  switch (v) {
    case DecayVerdict::no_decay: return "no_decay";
    case DecayVerdict::polynomial: return "polynomial";
    case DecayVerdict::superpolynomial: return "superpolynomial";
  }
  return "?";
}

DecayReport char_decay(const VelocityEnsemble& ens, std::span<const Vector> directions,
                       std::span<const double> radii) {
  if (radii.size() < 2 || directions.empty()) throw std::invalid_argument("need directions and at least two radii");
  auto [rmin, rmax] = std::minmax_element(radii.begin(), radii.end());
  if (!(*rmin > 0.0) || *rmax / *rmin < 100.0) throw std::invalid_argument("radii must span at least two decades");
  std::vector<double> rs(radii.begin(), radii.end());
  std::sort(rs.begin(), rs.end());

  std::vector<Vector> pts;
  for (double r : rs)
    for (const auto& e : directions) pts.push_back(r * e.normalized());
  std::vector<std::complex<double>> cf = char_fn(ens, pts);

  double w2 = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) w2 += ens.weight(i) * ens.weight(i);
  DecayReport rep;
  rep.noise_floor = 3.0 * std::sqrt(w2);
  for (std::size_t j = 0; j < rs.size(); ++j) {
    double top = 0.0;
    for (std::size_t e = 0; e < directions.size(); ++e) top = std::max(top, std::abs(cf[j * directions.size() + e]));
    rep.points.push_back({rs[j], top, top > rep.noise_floor});
  }
  if (std::none_of(rep.points.begin(), rep.points.end(), [](const DecayPoint& p) { return p.above_floor; }))
    throw std::domain_error("characteristic function below the noise floor at every radius");

  // decay region: above the floor and past the shoulder near |xi| = 0
  std::vector<double> x, y;
  for (const auto& p : rep.points)
    if (p.above_floor && p.sup_abs <= 0.9) {
      x.push_back(std::log(p.radius));
      y.push_back(std::log(p.sup_abs));
    }
  rep.fit_points = x.size();
  const bool reached_floor = !rep.points.back().above_floor;
  if (x.size() < 2) {
    rep.verdict = reached_floor ? DecayVerdict::superpolynomial : DecayVerdict::no_decay;
    rep.exponent = reached_floor ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    rep.exponent = -least_squares(x, y).slope;
    if (rep.exponent < 0.1 && !reached_floor) {
      rep.verdict = DecayVerdict::no_decay;
    } else {
      rep.verdict = DecayVerdict::polynomial;
      // local exponents growing like a power of the radius indicate faster than polynomial decay
      std::vector<double> lx, ly;
      for (std::size_t j = 1; j < x.size(); ++j) {
        double loc = -(y[j] - y[j - 1]) / (x[j] - x[j - 1]);
        if (loc > 0.0) {
          lx.push_back(0.5 * (x[j] + x[j - 1]));
          ly.push_back(std::log(loc));
        }
      }
      if (reached_floor && lx.size() >= 3) {
        std::size_t k = std::min<std::size_t>(4, lx.size());
        std::span<const double> tx(lx.end() - static_cast<std::ptrdiff_t>(k), lx.end());
        std::span<const double> ty(ly.end() - static_cast<std::ptrdiff_t>(k), ly.end());
        if (least_squares(tx, ty).slope > 1.0) rep.verdict = DecayVerdict::superpolynomial;
      }
    }
  }
  rep.sobolev = rep.verdict == DecayVerdict::superpolynomial ||
                (rep.verdict == DecayVerdict::polynomial && rep.exponent > 0.5 * ens.dim());
  return rep;
}

// ---- symmetry ----

SymmetryReport symmetry_test(const VelocityEnsemble& ens, std::span<const Matrix> group, const FourierGrid& grid,
                             double tolerance) {
  const int d = ens.dim();
  for (const auto& g : group) {
    if (g.dim() != d) throw DimensionMismatch("group element dimension");
    if (matrix_norm(SymMatrix(g.transpose() * g - Matrix::identity(d)), NormOrder::inf) > 1e-9)
      throw std::invalid_argument("group elements must be orthogonal");
  }
  const std::size_t n = ens.size();
  const std::size_t np = grid.size();
  const std::size_t total = np * group.size();
  SymmetryReport rep;
  rep.tolerance = tolerance;
  rep.per_element.assign(group.size(), 0.0);
  if (total == 0 || n == 0) return rep;
  double w2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) w2 += ens.weight(i) * ens.weight(i);
  // familywise 3-sigma level over all compared points
  const double z = std::max(3.0, normal_quantile(1.0 - 0.5 * (1.0 - std::pow(1.0 - 0.0027, 1.0 / static_cast<double>(total)))));

  std::vector<double> disc(total), se(total);
  parallel_for_index(total, [&](std::size_t k) {
    const Vector xi = grid.point(k % np);
    const Vector eta = transpose_times(group[k / np], xi);
    double mr = 0.0, mi = 0.0;
    std::vector<double> dr(n), di(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = ens.row(i);
      double a = 0.0, b = 0.0;
      for (int c = 0; c < d; ++c) {
        a += xi[c] * r[static_cast<std::size_t>(c)];
        b += eta[c] * r[static_cast<std::size_t>(c)];
      }
      dr[i] = std::cos(a) - std::cos(b);
      di[i] = std::sin(a) - std::sin(b);
      double w = ens.weight(i);
      mr += w * dr[i];
      mi += w * di[i];
    }
    double vr = 0.0, vi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double w = ens.weight(i);
      vr += w * (dr[i] - mr) * (dr[i] - mr);
      vi += w * (di[i] - mi) * (di[i] - mi);
    }
    disc[k] = std::hypot(mr, mi);
    se[k] = std::sqrt((vr + vi) * w2);
  });
  std::size_t arg = 0;
  for (std::size_t k = 0; k < total; ++k) {
    rep.noise_floor = std::max(rep.noise_floor, se[k]);
    rep.per_element[k / np] = std::max(rep.per_element[k / np], disc[k]);
    if (disc[k] > disc[arg]) arg = k;
    if (disc[k] > z * se[k] + tolerance) rep.pass = false;
  }
  rep.max_discrepancy = disc[arg];
  rep.stderr_at_max = se[arg];
  rep.argmax = grid.point(arg % np);
  rep.element_at_max = arg / np;
  return rep;
}

// ---- explosion ----

ExplosionReport explosion_experiment(const CollisionModel& model, const InitialLaw& mu0, double radius,
                                     std::span<const double> times, std::size_t count, const Rng& rng) {
  if (mu0.finite_temperature())
    throw std::invalid_argument("explosion experiment needs an initial law of infinite temperature");
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (count == 0 || times.empty()) throw std::invalid_argument("need samples and times");
  ExplosionReport rep;
  rep.radius = radius;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) throw std::invalid_argument("times must be increasing");
    TransientEnsemble te = sample_transient(model, mu0, times[k], count, rng.child(k));
    std::size_t inside = 0;
    for (std::size_t i = 0; i < count; ++i) {
      auto r = te.samples.row(i);
      double s = 0.0;
      for (double c : r) s += c * c;
      if (s <= radius * radius) ++inside;
    }
    double m = static_cast<double>(inside) / static_cast<double>(count);
    rep.times.push_back(times[k]);
    rep.mass.push_back(m);
    rep.stderr_.push_back(std::sqrt(m * (1.0 - m) / static_cast<double>(count)));
    rep.capped.push_back(te.capped);
  }
  MannKendall mk = mann_kendall_decreasing(rep.mass);
  rep.mann_kendall_p = mk.p_value;
  rep.mann_kendall_s = mk.statistic;
  rep.halved = rep.mass.back() <= 0.5 * rep.mass.front();
  rep.pass = mk.p_value < 0.05 && rep.halved;
  return rep;
}

// ---- H function ----

namespace {

struct Node {
  Vector x;
  double weight;
};

std::vector<Node> h_nodes(int d, bool radial, int nodes) {
  std::vector<Node> out;
  if (radial) {
    // r^2 / 2 = y turns the radial integral into a Laguerre one with alpha = d/2 - 1
    QuadratureRule q = gauss_laguerre(nodes, 0.5 * d - 1.0);
    double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
    double c = sphere * std::pow(2.0, 0.5 * d - 1.0);
    for (std::size_t k = 0; k < q.nodes.size(); ++k)
      out.push_back({std::sqrt(2.0 * q.nodes[k]) * Vector::unit(d, 0), c * q.weights[k]});
    return out;
  }
  int per_axis = nodes;
  if (d > 3) per_axis = std::min(nodes, std::max(4, static_cast<int>(std::floor(std::pow(32768.0, 1.0 / d)))));
  QuadratureRule q = gauss_hermite(per_axis);
  double wmax = *std::max_element(q.weights.begin(), q.weights.end());
  double top = std::pow(wmax, d);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  const double scale = std::pow(2.0, 0.5 * d);
  while (true) {
    double w = 1.0;
    Vector x(d);
    for (int c = 0; c < d; ++c) {
      w *= q.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
      x[c] = std::sqrt(2.0) * q.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
    }
    if (w > 1e-16 * top) out.push_back({x, scale * w});
    int c = 0;
    while (c < d && ++idx[static_cast<std::size_t>(c)] == per_axis) idx[static_cast<std::size_t>(c++)] = 0;
    if (c == d) break;
  }
  return out;
}

}  // namespace

std::vector<double> h_function(const MatrixEnsemble& ens, std::span<const double> us, bool radial, int nodes) {
  for (double u : us)
    if (!(u > 0.0)) throw std::invalid_argument("H is evaluated at positive arguments");
  const int d = ens.dim();
  std::vector<Node> pts = h_nodes(d, radial, nodes);
  std::vector<double> out(us.size(), 0.0);
  std::vector<double> contrib(pts.size() * us.size());
  parallel_for_index(pts.size(), [&](std::size_t k) {
    for (std::size_t j = 0; j < us.size(); ++j)
      contrib[k * us.size() + j] = pts[k].weight * psi_eval(ens, us[j] * pts[k].x);
  });
  for (std::size_t k = 0; k < pts.size(); ++k)
    for (std::size_t j = 0; j < us.size(); ++j) out[j] += contrib[k * us.size() + j];
  return out;
}

double h_function(const MatrixEnsemble& ens, double u, bool radial, int nodes) {
  return h_function(ens, std::span<const double>(&u, 1), radial, nodes)[0];
}

}  // namespace rmkac
