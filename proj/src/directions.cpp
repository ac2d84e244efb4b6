#include "rmkac/directions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "rmkac/models.hpp"

namespace rmkac {

std::vector<Vector> sphere_directions(int dim, int count) {
  if (count < 1) throw std::invalid_argument("direction count must be positive");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  if (dim == 1) {
    out.push_back(Vector{1.0});
    return out;
  }
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      double phi = 2.0 * std::numbers::pi * k / count;
      out.push_back(Vector{std::cos(phi), std::sin(phi)});
    }
    return out;
  }
  if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - (2.0 * k + 1.0) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = golden * k;
      out.push_back(Vector{r * std::cos(phi), r * std::sin(phi), z});
    }
    return out;
  }
  // generalized golden ratio: unique positive root of x^(d+1) = x + 1
  double g = 2.0;
  for (int it = 0; it < 60; ++it) g = std::pow(1.0 + g, 1.0 / (dim + 1));
  std::vector<double> alpha(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) alpha[static_cast<std::size_t>(j)] = std::fmod(std::pow(1.0 / g, j + 1), 1.0);
  boost::math::normal_distribution<double> normal;
  for (int k = 0; k < count; ++k) {
    Vector v(dim);
    for (int j = 0; j < dim; ++j) {
      double u = std::fmod(0.5 + alpha[static_cast<std::size_t>(j)] * (k + 1), 1.0);
      u = std::clamp(u, 1e-12, 1.0 - 1e-12);
      v[j] = boost::math::quantile(normal, u);
    }
    out.push_back(v.normalized());
  }
  return out;
}

std::vector<Vector> direction_set(const CollisionModel& model, int count) {
  std::vector<Vector> dirs = sphere_directions(model.dim(), count);
  for (const auto& e : model.critical_directions()) dirs.push_back(e.normalized());
  return dirs;
}

}  // namespace rmkac
