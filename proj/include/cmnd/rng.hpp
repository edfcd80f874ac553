#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace cmnd {

/// Counter-based generator: output i is a stateless mix of (key, i), so
/// any offset can be read directly and disjoint counter ranges give
/// independent, reproducible parallel streams.  The mix is the
/// splitmix64 finalizer over the Weyl sequence key + (i+1)*phi64;
/// results are identical on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t at(std::uint64_t counter) const {
    std::uint64_t z = key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent child stream; child i of key k never collides with the
  /// parent counters because the key is re-mixed through a distinct Weyl
  /// constant.
  CounterRng split(std::uint64_t child) const {
    std::uint64_t z = key_ ^ (0xD1B54A32D192ED03ULL * (child + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return CounterRng(z ^ (z >> 31));
  }

  /// Uniform in [0, 1), 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log argument.
  double uniform_open(std::uint64_t counter) const {
    return (static_cast<double>(at(counter) >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal pair by Box-Muller on counters (2c, 2c+1).  No
  /// rejection, so sample count maps 1:1 to counter offset.
  std::pair<double, double> gaussian_pair(std::uint64_t pair_counter) const {
    const double u1 = uniform_open(2 * pair_counter);
    const double u2 = uniform(2 * pair_counter + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

 private:
  std::uint64_t key_;
};

}  // namespace cmnd
