#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "framedual/scalar.hpp"

namespace framedual {

// SplitMix64 finalizer (Steele, Lea & Flood), used to derive independent
// seed streams from one user seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

// Deterministic random source. mt19937_64 is fully specified by the
// standard; the uniform and normal transforms below are written out so that
// identical seeds give bit-identical sequences on every platform (the
// std::*_distribution classes make no such promise).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(derive_seed(seed, stream_id));
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Unbiased integer in [0, n), n >= 1, by rejection.
  std::int64_t below(std::int64_t n) {
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t v = bits();
    while (v >= limit) v = bits();
    return static_cast<std::int64_t>(v % un);
  }

  template <class S>
  S gaussian() {
    if constexpr (is_complex_v<S>) {
      double re = normal();
      double im = normal();
      return Complex(re, im);
    } else {
      return normal();
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace framedual
