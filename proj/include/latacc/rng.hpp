#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace latacc {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ with SplitMix64 stream derivation. Stream k of seed s is
// initialized from the SplitMix64 sequence started at
//   s XOR 0x9E3779B97F4A7C15 * (k + 1),
// so (seed, stream) fully determines the draw sequence. All variate
// generators below are implemented in-library (no std::*_distribution), which
// keeps chains bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
    for (auto& word : state_) word = detail::splitmix64_next(sm);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): 53-bit resolution, never 0 or 1.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Marsaglia polar method; the second variate of each accepted pair is
  // discarded to keep the generator stateless between calls.
  double standard_normal() {
    for (;;) {
      const double u = 2.0 * uniform01() - 1.0;
      const double v = 2.0 * uniform01() - 1.0;
      const double s = u * u + v * v;
      if (s >= 1.0 || s == 0.0) continue;
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  // Marsaglia-Tsang squeeze for shape >= 1, boosted for shape < 1. Unit scale.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = standard_normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Gamma-ratio beta variate, clamped to the open interval so downstream
  // consumers can rely on draws being strictly inside (0,1).
  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    double r = x / (x + y);
    constexpr double lo = 1e-300;
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    if (r < lo) r = lo;
    if (r > hi) r = hi;
    return r;
  }

  // Exact binomial sampling: sequential inversion when n*min(p,1-p) is small,
  // Hoermann's BTRS transformed rejection otherwise (with the exact lgamma
  // acceptance test rather than the Stirling-tail approximation).
  std::int64_t binomial(std::int64_t n, double p) {
    if (n < 0) throw std::invalid_argument("binomial count must be non-negative");
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("binomial probability must lie in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flip = p > 0.5;
    const double ps = flip ? 1.0 - p : p;
    const std::int64_t k =
        (static_cast<double>(n) * ps < 10.0) ? binomial_inversion(n, ps)
                                             : binomial_btrs(n, ps);
    return flip ? n - k : k;
  }

 private:
  std::int64_t binomial_inversion(std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    double f = std::exp(static_cast<double>(n) * std::log(q));
    double u = uniform01();
    std::int64_t k = 0;
    for (;;) {
      if (u <= f) return k;
      u -= f;
      ++k;
      if (k > n) return n;  // guards accumulated floating-point slack
      f *= s * static_cast<double>(n - k + 1) / static_cast<double>(k);
    }
  }

  std::int64_t binomial_btrs(std::int64_t n, double p) {
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);
    const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
    for (;;) {
      const double u = uniform01() - 0.5;
      double v = uniform01();
      const double us = 0.5 - std::fabs(u);
      const double kd = std::floor((2.0 * a / us + b) * u + c);
      if (kd < 0.0 || kd > nd) continue;
      if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kd);
      v = std::log(v * alpha / (a / (us * us) + b));
      const double accept =
          h - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) + (kd - m) * lpq;
      if (v <= accept) return static_cast<std::int64_t>(kd);
    }
  }

  std::uint64_t state_[4];
};

}  // namespace latacc
