#include "rmkac/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

namespace rmkac {

namespace {

template <class F>
double integrate(F f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

// integral of f over [a, b] split at 0 so kinks of |x|^s are on piece boundaries
template <class F>
double integrate_split(F f, double a, double b) {
  if (a < 0.0 && b > 0.0) return integrate(f, a, 0.0) + integrate(f, 0.0, b);
  return integrate(f, a, b);
}

}  // namespace

ScalarLaw ScalarLaw::point(double value) {
  ScalarLaw l;
  l.law_ = Point{value};
  return l;
}

ScalarLaw ScalarLaw::two_point(double a, double b, double prob_a) {
  if (!(prob_a >= 0.0 && prob_a <= 1.0)) throw std::invalid_argument("two_point probability outside [0, 1]");
  ScalarLaw l;
  l.law_ = TwoPoint{a, b, prob_a};
  return l;
}

ScalarLaw ScalarLaw::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform law needs lo < hi");
  ScalarLaw l;
  l.law_ = Uniform{lo, hi};
  return l;
}

ScalarLaw ScalarLaw::quantile_table(std::vector<double> quantiles) {
  if (quantiles.size() < 2) throw std::invalid_argument("quantile table needs at least two entries");
  if (!std::is_sorted(quantiles.begin(), quantiles.end()))
    throw std::invalid_argument("quantile table must be nondecreasing");
  ScalarLaw l;
  l.law_ = Table{std::move(quantiles)};
  return l;
}

double ScalarLaw::sample(Rng& rng) const {
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Point>) {
          return law.v;
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          return rng.uniform() < law.pa ? law.a : law.b;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return law.lo + (law.hi - law.lo) * rng.uniform();
        } else {
          double u = rng.uniform() * static_cast<double>(law.q.size() - 1);
          auto k = static_cast<std::size_t>(u);
          double f = u - static_cast<double>(k);
          return law.q[k] + f * (law.q[k + 1] - law.q[k]);
        }
      },
      law_);
}

double ScalarLaw::expect_quadrature(double (*f)(double, const void*), const void* ctx) const {
  auto g = [&](double x) { return f(x, ctx); };
  if (auto* u = std::get_if<Uniform>(&law_)) return integrate_split(g, u->lo, u->hi) / (u->hi - u->lo);
  const auto& q = std::get<Table>(law_).q;
  const double m = static_cast<double>(q.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < q.size(); ++k) {
    double a = q[k], b = q[k + 1];
    if (a == b) {
      total += g(a) / m;
    } else {
      // change of variable u -> x is linear on the segment
      total += integrate_split(g, a, b) / (b - a) / m;
    }
  }
  return total;
}

double ScalarLaw::abs_moment(double s) const {
  return expect([s](double x) { return std::pow(std::abs(x), s); });
}

double ScalarLaw::mean() const {
  return expect([](double x) { return x; });
}

double ScalarLaw::min() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Point>) return law.v;
        else if constexpr (std::is_same_v<T, TwoPoint>) return law.pa == 1.0 ? law.a : law.pa == 0.0 ? law.b : std::min(law.a, law.b);
        else if constexpr (std::is_same_v<T, Uniform>) return law.lo;
        else return law.q.front();
      },
      law_);
}

double ScalarLaw::max() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Point>) return law.v;
        else if constexpr (std::is_same_v<T, TwoPoint>) return law.pa == 1.0 ? law.a : law.pa == 0.0 ? law.b : std::max(law.a, law.b);
        else if constexpr (std::is_same_v<T, Uniform>) return law.hi;
        else return law.q.back();
      },
      law_);
}

bool ScalarLaw::is_point() const {
  if (std::holds_alternative<Point>(law_)) return true;
  if (auto* t = std::get_if<TwoPoint>(&law_)) return t->a == t->b || t->pa == 0.0 || t->pa == 1.0;
  if (auto* t = std::get_if<Table>(&law_)) return t->q.front() == t->q.back();
  return false;
}

nlohmann::json ScalarLaw::to_json() const {
  return std::visit(
      [](const auto& law) -> nlohmann::json {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Point>) return {{"type", "point"}, {"value", law.v}};
        else if constexpr (std::is_same_v<T, TwoPoint>)
          return {{"type", "two_point"}, {"values", {law.a, law.b}}, {"prob_first", law.pa}};
        else if constexpr (std::is_same_v<T, Uniform>)
          return {{"type", "uniform"}, {"lo", law.lo}, {"hi", law.hi}};
        else return {{"type", "quantile_table"}, {"quantiles", law.q}};
      },
      law_);
}

// ---- PairLaw ----

PairLaw PairLaw::fixed(double a, double b) {
  PairLaw p;
  p.law_ = Fixed{a, b};
  return p;
}

PairLaw PairLaw::angle(double lo, double hi, bool abs_first, bool abs_second) {
  if (!(lo < hi)) throw std::invalid_argument("angle law needs lo < hi");
  PairLaw p;
  p.law_ = Angle{lo, hi, abs_first, abs_second};
  return p;
}

PairLaw PairLaw::independent(ScalarLaw first, ScalarLaw second) {
  PairLaw p;
  p.law_ = Independent{std::move(first), std::move(second)};
  return p;
}

std::pair<double, double> PairLaw::sample(Rng& rng) const {
  return std::visit(
      [&](const auto& law) -> std::pair<double, double> {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Fixed>) {
          return {law.a, law.b};
        } else if constexpr (std::is_same_v<T, Angle>) {
          double phi = law.lo + (law.hi - law.lo) * rng.uniform();
          double a = std::cos(phi), b = std::sin(phi);
          return {law.abs_a ? std::abs(a) : a, law.abs_b ? std::abs(b) : b};
        } else {
          double a = law.a.sample(rng);
          double b = law.b.sample(rng);
          return {a, b};
        }
      },
      law_);
}

double PairLaw::sum_abs_moment(double s) const {
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Fixed>) {
          return std::pow(std::abs(law.a), s) + std::pow(std::abs(law.b), s);
        } else if constexpr (std::is_same_v<T, Angle>) {
          // split at multiples of pi/2 where |cos| or |sin| has a kink
          auto f = [s](double phi) {
            return std::pow(std::abs(std::cos(phi)), s) + std::pow(std::abs(std::sin(phi)), s);
          };
          const double h = std::numbers::pi / 2;
          double total = 0.0;
          double a = law.lo;
          double next = (std::floor(a / h) + 1.0) * h;
          while (next < law.hi) {
            total += integrate(f, a, next);
            a = next;
            next += h;
          }
          total += integrate(f, a, law.hi);
          return total / (law.hi - law.lo);
        } else {
          return law.a.abs_moment(s) + law.b.abs_moment(s);
        }
      },
      law_);
}

bool PairLaw::on_unit_circle() const {
  if (auto* f = std::get_if<Fixed>(&law_)) return std::abs(f->a * f->a + f->b * f->b - 1.0) < 1e-12;
  if (std::holds_alternative<Angle>(law_)) return true;
  const auto& ind = std::get<Independent>(law_);
  if (!ind.a.is_point() || !ind.b.is_point()) return false;
  double a = ind.a.min(), b = ind.b.min();
  return std::abs(a * a + b * b - 1.0) < 1e-12;
}

nlohmann::json PairLaw::to_json() const {
  return std::visit(
      [](const auto& law) -> nlohmann::json {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Fixed>) return {{"type", "fixed"}, {"values", {law.a, law.b}}};
        else if constexpr (std::is_same_v<T, Angle>)
          return {{"type", "angle"}, {"lo", law.lo}, {"hi", law.hi}, {"abs", {law.abs_a, law.abs_b}}};
        else return {{"type", "independent"}, {"first", law.a.to_json()}, {"second", law.b.to_json()}};
      },
      law_);
}

}  // namespace rmkac
