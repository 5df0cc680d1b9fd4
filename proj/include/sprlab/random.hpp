#pragma once

// SplitMix64 in counter mode: the k-th draw of stream `seed` is
// mix64(seed + (k + 1) * 0x9E3779B97F4A7C15). Any implementation that uses the
// same mixing constants and the conversions below reproduces our datasets bit
// for bit (up to the platform's log/sqrt/cos).

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sprlab {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, one variate per call (the partner is discarded so draw k
  // depends only on counters 2k-1 and 2k).
  double normal(double mean = 0.0, double sd = 1.0) {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sprlab
