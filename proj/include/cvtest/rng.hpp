#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace cvtest::rng {

/// Stateless 64-bit finalizer with full avalanche (the splitmix64 mixer).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a root seed and a path of indices
/// (cell, run, replicate, attempt, ...). Streams for distinct paths are
/// decorrelated, so work may be scheduled in any order — or on any number of
/// threads — without changing what any single stream produces.
[[nodiscard]] constexpr std::uint64_t derive_seed(
    std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(root + 0x9E3779B97F4A7C15ULL);
  for (std::uint64_t p : path) {
    s = mix64(s ^ mix64(p + 0x9E3779B97F4A7C15ULL));
  }
  return s;
}

/// Deterministic random stream: a fully specified engine (std::mt19937_64)
/// plus hand-rolled draw functions, so results do not depend on the standard
/// library's unspecified distribution algorithms.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1), 53 random bits.
  [[nodiscard]] double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  [[nodiscard]] double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    // log1p(-u1) = log(1 - u1) stays finite because u1 < 1.
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform index in [0, n).
  [[nodiscard]] std::size_t uniform_index(std::size_t n) {
#if defined(__SIZEOF_INT128__)
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
#else
    // Unbiased rejection fallback.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return static_cast<std::size_t>(v % n);
#endif
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cvtest::rng
