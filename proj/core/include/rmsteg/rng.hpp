#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace rmsteg {

// All randomness in the library flows through std::mt19937_64 plus the
// helpers below, so corpora and reports are reproducible from a single seed.
// The derivation rules are part of the file-format contract and are spelled
// out in the README.

/// splitmix64 finalizer; used to derive independent sub-seeds.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Sub-seed number `index` of a base seed.
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
  return splitmix64(base + 0x9E3779B97F4A7C15ull * (index + 1));
}

/// Thin deterministic wrapper around std::mt19937_64.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  /// One payload bit: the least-significant bit of the next engine output.
  int bit() { return static_cast<int>(eng_() & 1u); }

  /// Uniform double in [0, 1).
  double unit() { return (eng_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [0, n). Modulo draw; the small bias is irrelevant here.
  uint64_t below(uint64_t n) { return eng_() % n; }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = unit();
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher-Yates permutation of [0, n), driven by `rng`.
inline std::vector<size_t> random_permutation(size_t n, Rng& rng) {
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  for (size_t i = n; i > 1; --i) {
    size_t j = static_cast<size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace rmsteg
