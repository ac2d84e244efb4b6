// Scalar and pair laws used to parametrize collision coefficients.
#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rmkac/random.hpp"

namespace rmkac {

class ScalarLaw {
 public:
  static ScalarLaw point(double value);
  static ScalarLaw two_point(double a, double b, double prob_a);
  static ScalarLaw uniform(double lo, double hi);
  // Quantiles at equally spaced levels 0, 1/m, ..., 1; sampled by linear interpolation.
  static ScalarLaw quantile_table(std::vector<double> quantiles);

  double sample(Rng& rng) const;
  // E|X|^s
  double abs_moment(double s) const;
  // E[f(X)] for a smooth f, by exact sum or quadrature.
  template <class F>
  double expect(F f) const;

  double mean() const;
  double min() const;
  double max() const;
  bool is_point() const;
  nlohmann::json to_json() const;

 private:
  struct Point { double v; };
  struct TwoPoint { double a, b, pa; };
  struct Uniform { double lo, hi; };
  struct Table { std::vector<double> q; };
  std::variant<Point, TwoPoint, Uniform, Table> law_ = Point{0.0};
  double expect_quadrature(double (*f)(double, const void*), const void* ctx) const;
};

class PairLaw {
 public:
  static PairLaw fixed(double a, double b);
  // (cos phi, sin phi) with phi uniform on [lo, hi); optional absolute values.
  static PairLaw angle(double lo, double hi, bool abs_first = false, bool abs_second = false);
  static PairLaw independent(ScalarLaw first, ScalarLaw second);

  std::pair<double, double> sample(Rng& rng) const;
  // E|a|^s + E|b|^s
  double sum_abs_moment(double s) const;
  // true when a^2 + b^2 = 1 almost surely
  bool on_unit_circle() const;
  nlohmann::json to_json() const;

 private:
  struct Fixed { double a, b; };
  struct Angle { double lo, hi; bool abs_a, abs_b; };
  struct Independent { ScalarLaw a, b; };
  std::variant<Fixed, Angle, Independent> law_ = Fixed{0.0, 0.0};
};

template <class F>
double ScalarLaw::expect(F f) const {
  if (auto* p = std::get_if<Point>(&law_)) return f(p->v);
  if (auto* t = std::get_if<TwoPoint>(&law_)) return t->pa * f(t->a) + (1.0 - t->pa) * f(t->b);
  return expect_quadrature(
      [](double x, const void* ctx) { return (*static_cast<const F*>(ctx))(x); }, &f);
}

}  // namespace rmkac
