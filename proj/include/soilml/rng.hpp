#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace soilml {

/// splitmix64 finalizer. Bijective on 64-bit values.
std::uint64_t mix64(std::uint64_t x);

/// Stable stream seed from a master seed, a textual label, and an index.
/// Same inputs give the same seed on every platform.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
/// the standard fixes) and supplies its own value distributions, because the
/// std::*_distribution classes are allowed to differ between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Integer in [0, bound) without modulo bias. bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller. One value per call, no cached spare,
  /// so interleaved normal/uniform draws stay reproducible.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace soilml
