#include "rmkac/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace rmkac {

void RunningStats::add(double x) {
  ++n_;
  double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  double n = static_cast<double>(n_ + o.n_);
  double delta = o.mean_ - mean_;
  mean_ += delta * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

double RunningStats::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double RunningStats::stderr_of_mean() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double mean_of(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double batch_stderr(std::span<const double> b) {
  RunningStats rs;
  for (double v : b) rs.add(v);
  return rs.stderr_of_mean();
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least squares needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = syy - f.slope * sxy;
  f.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  f.slope_stderr = x.size() > 2 ? std::sqrt(std::max(0.0, rss) / (n - 2.0) / sxx) : 0.0;
  return f;
}

MannKendall mann_kendall_decreasing(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("Mann-Kendall needs at least two points");
  MannKendall mk;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) mk.statistic += (x[j] > x[i]) - (x[j] < x[i]);
  const int pairs = n * (n - 1) / 2;
  if (n <= 12) {
    // Number of permutations with k inversions (Mahonian numbers); S = pairs - 2 * inversions.
    std::vector<double> count(static_cast<std::size_t>(pairs + 1), 0.0);
    count[0] = 1.0;
    for (int m = 2; m <= n; ++m) {
      std::vector<double> next(count.size(), 0.0);
      for (std::size_t k = 0; k < count.size(); ++k) {
        if (count[k] == 0.0) continue;
        for (int add = 0; add < m && k + static_cast<std::size_t>(add) < next.size(); ++add)
          next[k + static_cast<std::size_t>(add)] += count[k];
      }
      count = std::move(next);
    }
    double total = 0.0, tail = 0.0;
    for (int k = 0; k <= pairs; ++k) {
      total += count[static_cast<std::size_t>(k)];
      if (pairs - 2 * k <= mk.statistic) tail += count[static_cast<std::size_t>(k)];
    }
    mk.p_value = tail / total;
  } else {
    double var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
    double z = (mk.statistic + 1.0) / std::sqrt(var);
    mk.p_value = boost::math::cdf(boost::math::normal_distribution<double>(), z);
  }
  return mk;
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

double chi_squared_sf(double x, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), x));
}

}  // namespace rmkac
