// Small statistics helpers shared by the estimators.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rmkac {

// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& o);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  // unbiased sample variance
  double variance() const;
  double stderr_of_mean() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double mean_of(std::span<const double> x);
// standard error of the grand mean from equal-size batch means
double batch_stderr(std::span<const double> batch_means);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct MannKendall {
  int statistic = 0;      // S = sum sign(x_j - x_i), i < j
  double p_value = 1.0;   // one-sided, alternative: decreasing trend
};
// Exact null distribution for n <= 12, normal approximation above.
MannKendall mann_kendall_decreasing(std::span<const double> x);

double normal_quantile(double p);
double chi_squared_sf(double x, double dof);

}  // namespace rmkac
