// Counter-based random streams (Philox4x32-10) with cheap substream derivation.
#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

#include "rmkac/matrix.hpp"

namespace rmkac {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

// One stream is (seed, stream id); the block counter advances as values are drawn.
// Children are derived by hashing so that per-index work is reproducible regardless
// of how it is scheduled across threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  Rng(std::uint64_t seed, std::string_view label);

  Rng child(std::uint64_t index) const;
  Rng child(std::string_view label) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_positive();
  double normal();
  // Uniform on {0, ..., n - 1}.
  std::uint64_t index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int pos_ = 4;
  std::normal_distribution<double> normal_;
};

// Uniform on the unit sphere S^{d-1}.
Vector uniform_sphere(int dim, Rng& rng);
Vector standard_normal_vector(int dim, Rng& rng);
// Haar-distributed element of SO(d).
Matrix haar_rotation(int dim, Rng& rng);

}  // namespace rmkac
