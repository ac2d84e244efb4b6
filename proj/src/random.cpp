#include "rmkac/random.hpp"

#include <cmath>
#include <limits>

namespace rmkac {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  constexpr std::uint64_t kM0 = 0xD2511F53u;
  constexpr std::uint64_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint64_t p0 = kM0 * c[0];
    std::uint64_t p1 = kM1 * c[2];
    auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

Rng::Rng(std::uint64_t seed, std::string_view label) : Rng(seed, fnv1a64(label)) {}

Rng Rng::child(std::uint64_t index) const {
  return Rng(seed_, splitmix64(stream_ ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
}

Rng Rng::child(std::string_view label) const { return child(fnv1a64(label)); }

void Rng::refill() {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                      static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = philox4x32_10(ctr, key);
  ++block_;
  pos_ = 0;
}

Rng::result_type Rng::operator()() {
  if (pos_ > 2) refill();
  std::uint64_t hi = buffer_[static_cast<std::size_t>(pos_)];
  std::uint64_t lo = buffer_[static_cast<std::size_t>(pos_ + 1)];
  pos_ += 2;
  return (hi << 32) | lo;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::uniform_positive() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

double Rng::normal() { return normal_(*this); }

std::uint64_t Rng::index(std::uint64_t n) {
  // Lemire's nearly divisionless method.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

Vector standard_normal_vector(int dim, Rng& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v;
}

Vector uniform_sphere(int dim, Rng& rng) {
  for (;;) {
    Vector v = standard_normal_vector(dim, rng);
    double n = v.norm();
    if (n > 1e-300) return (1.0 / n) * v;
  }
}

Matrix haar_rotation(int dim, Rng& rng) {
  // Modified Gram-Schmidt QR of a Gaussian matrix; columns of Q with R_ii > 0
  // give a Haar element of O(d). Flipping one column lands in SO(d) while
  // keeping the Haar law there.
  Matrix g(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Matrix q(dim);
  for (int j = 0; j < dim; ++j) {
    Vector v = g.column(j);
    for (int k = 0; k < j; ++k) {
      Vector qk = q.column(k);
      double r = qk.dot(v);
      v -= r * qk;
    }
    double n = v.norm();
    for (int i = 0; i < dim; ++i) q(i, j) = v[i] / n;
  }
  // sign of det(Q) by Gaussian elimination on a copy
  Matrix a = q;
  double det = 1.0;
  for (int c = 0; c < dim; ++c) {
    int piv = c;
    for (int r = c + 1; r < dim; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (piv != c) {
      for (int j = 0; j < dim; ++j) std::swap(a(c, j), a(piv, j));
      det = -det;
    }
    det *= a(c, c);
    for (int r = c + 1; r < dim; ++r) {
      double f = a(r, c) / a(c, c);
      for (int j = c; j < dim; ++j) a(r, j) -= f * a(c, j);
    }
  }
  if (det < 0.0)
    for (int i = 0; i < dim; ++i) q(i, 0) = -q(i, 0);
  return q;
}

}  // namespace rmkac
