#pragma once

#include <cstdint>
#include <limits>

namespace influx {

using u128 = unsigned __int128;

/// Counter-based generator: output i of stream `key` is a keyed mix of i.
///
/// Streams are derived with split(), so parallel or repeated work can take
/// independent generators from one seed without sharing state. Not suitable
/// for cryptographic use.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) noexcept : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }

  result_type next() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Independent child stream; does not advance this generator.
  CounterRng split(std::uint64_t stream) const noexcept {
    CounterRng child;
    child.key_ = mix(key_ ^ mix(stream + 0xbb67ae8584caa73bULL));
    return child;
  }

  std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform in [0, bound), bound > 0.
  u128 below(u128 bound) noexcept {
    if (bound <= u128(max())) return below(std::uint64_t(bound));
    // Rejection on the smallest covering power of two.
    int bits = 128;
    while (bits > 0 && !((bound - 1) >> (bits - 1))) --bits;
    const u128 mask = bits == 128 ? ~u128(0) : ((u128(1) << bits) - 1);
    u128 x;
    do {
      x = ((u128(next()) << 64) | next()) & mask;
    } while (x >= bound);
    return x;
  }

  /// Uniform double in [0, 1).
  double uniform01() noexcept { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace influx
