#pragma once

#include <cstdint>
#include <initializer_list>

namespace autochart {

/// Portable random stream: SplitMix64 with a Box-Muller normal draw.
///
/// The exact algorithm (and therefore every generated value) is pinned in
/// docs/rng.md so that golden files stay valid across platforms and languages.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// 53-bit uniform in [0, 1).
  double uniform();

  /// Standard normal. Consumes exactly two uniforms (u1 first, then u2).
  double normal();

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Integer in [lo, hi] inclusive.
  int between(int lo, int hi);

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Order-sensitive hash of a seed and a list of integer components.
/// h0 = mix64(seed + gamma); h(k+1) = mix64(h(k) ^ (v(k) + (k+1) * gamma)).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

}  // namespace autochart
