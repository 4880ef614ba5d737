#pragma once

// Prime fields Z_p: a Montgomery fast path for p < 2^128, an arbitrary
// precision fallback above that, and random prime generation.

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "influx/errors.hpp"
#include "influx/rng.hpp"

namespace influx {

using BigInt = boost::multiprecision::cpp_int;

inline std::uint64_t lo64(u128 x) noexcept { return std::uint64_t(x); }
inline std::uint64_t hi64(u128 x) noexcept { return std::uint64_t(x >> 64); }

inline BigInt to_big(u128 x) {
  BigInt r = hi64(x);
  r <<= 64;
  r |= lo64(x);
  return r;
}

inline u128 to_u128(const BigInt& x) {
  if (x < 0 || (x != 0 && boost::multiprecision::msb(x) >= 128)) throw std::out_of_range("value does not fit in 128 bits");
  const BigInt mask = (BigInt(1) << 64) - 1;
  return (u128(static_cast<std::uint64_t>((x >> 64) & mask)) << 64) | static_cast<std::uint64_t>(x & mask);
}

inline std::string to_decimal(u128 x) {
  if (x == 0) return "0";
  std::string s;
  while (x) {
    s.push_back(char('0' + int(x % 10)));
    x /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

/// Uniform BigInt in [0, bound), bound > 0.
inline BigInt random_below(const BigInt& bound, CounterRng& rng) {
  if (bound <= BigInt(~u128(0))) return to_big(rng.below(to_u128(bound)));
  const unsigned bits = unsigned(boost::multiprecision::msb(bound - 1)) + 1;
  const unsigned words = (bits + 63) / 64;
  const BigInt mask = (BigInt(1) << bits) - 1;
  BigInt x;
  do {
    x = 0;
    for (unsigned w = 0; w < words; ++w) {
      x <<= 64;
      x |= rng.next();
    }
    x &= mask;
  } while (x >= bound);
  return x;
}

/// Z_p for odd p < 2^128, elements held in Montgomery form (R = 2^128).
///
/// Products go through a 256-bit intermediate split into 64-bit limbs
/// (CIOS reduction). The stored representative of every element lies in
/// [0, p), and the map to the canonical residue is a bijection.
class Fp128 {
 public:
  using value_type = u128;

  explicit Fp128(u128 modulus) : p_(modulus) {
    if (modulus < 3 || !(modulus & 1)) throw std::invalid_argument("Fp128 modulus must be odd and > 2");
    p0_ = lo64(p_);
    p1_ = hi64(p_);
    std::uint64_t inv = p0_;  // correct to 3 bits; Newton doubles that
    for (int i = 0; i < 5; ++i) inv *= 2 - p0_ * inv;
    pinv_ = ~inv + 1;
    r1_ = (u128(0) - p_) % p_;
    r2_ = r1_;
    for (int i = 0; i < 128; ++i) r2_ = add(r2_, r2_);
    r3_ = mul(r2_, r2_);
  }

  u128 modulus() const noexcept { return p_; }
  BigInt modulus_big() const { return to_big(p_); }

  value_type zero() const noexcept { return 0; }
  value_type one() const noexcept { return r1_; }
  bool is_zero(value_type a) const noexcept { return a == 0; }

  value_type from_uint(u128 v) const noexcept { return mul(v % p_, r2_); }
  value_type from_big(const BigInt& v) const {
    BigInt r = v % to_big(p_);
    if (r < 0) r += to_big(p_);
    return from_uint(to_u128(r));
  }
  value_type from_int(std::int64_t v) const noexcept {
    if (v >= 0) return from_uint(u128(std::uint64_t(v)));
    return neg(from_uint(u128(~std::uint64_t(v)) + 1));
  }
  /// Canonical residue in [0, p).
  u128 to_uint(value_type a) const noexcept { return mul(a, 1); }
  BigInt to_big_value(value_type a) const { return to_big(to_uint(a)); }
  std::string to_string(value_type a) const { return to_decimal(to_uint(a)); }

  value_type add(value_type a, value_type b) const noexcept {
    const u128 s = a + b;
    return (s < a || s >= p_) ? s - p_ : s;
  }
  value_type sub(value_type a, value_type b) const noexcept { return a >= b ? a - b : a + (p_ - b); }
  value_type neg(value_type a) const noexcept { return a ? p_ - a : 0; }

  value_type mul(value_type a, value_type b) const noexcept {
    const std::uint64_t a0 = lo64(a), a1 = hi64(a);
    std::uint64_t t0 = 0, t1 = 0, t2 = 0, t3 = 0;
    for (int i = 0; i < 2; ++i) {
      const std::uint64_t bi = i ? hi64(b) : lo64(b);
      u128 s = u128(a0) * bi + t0;
      t0 = lo64(s);
      std::uint64_t c = hi64(s);
      s = u128(a1) * bi + t1 + c;
      t1 = lo64(s);
      c = hi64(s);
      s = u128(t2) + c;
      t2 = lo64(s);
      t3 = hi64(s);

      const std::uint64_t m = t0 * pinv_;
      s = u128(m) * p0_ + t0;
      c = hi64(s);
      s = u128(m) * p1_ + t1 + c;
      t0 = lo64(s);
      c = hi64(s);
      s = u128(t2) + c;
      t1 = lo64(s);
      c = hi64(s);
      t2 = t3 + c;
    }
    const u128 r = (u128(t1) << 64) | t0;
    return (t2 || r >= p_) ? r - p_ : r;
  }

  /// Binary extended Euclid on the stored representative, then one
  /// Montgomery correction by R^3.
  value_type inv(value_type a) const {
    if (a == 0) throw DivisionByZero();
    u128 u = a, v = p_, x1 = 1, x2 = 0;
    while (u != 1 && v != 1) {
      if (u == 0 || v == 0) throw DivisionByZero();
      while (!(u & 1)) {
        u >>= 1;
        x1 = half(x1);
      }
      while (!(v & 1)) {
        v >>= 1;
        x2 = half(x2);
      }
      if (u >= v) {
        u -= v;
        x1 = sub(x1, x2);
      } else {
        v -= u;
        x2 = sub(x2, x1);
      }
    }
    return mul(u == 1 ? x1 : x2, r3_);
  }

  value_type pow(value_type base, u128 e) const noexcept {
    value_type r = r1_;
    while (e) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }

  /// Uniform nonzero element.
  value_type random_nonzero(CounterRng& rng) const noexcept { return from_uint(1 + rng.below(p_ - 1)); }
  value_type random(CounterRng& rng) const noexcept { return from_uint(rng.below(p_)); }

 private:
  u128 half(u128 x) const noexcept { return (x & 1) ? (x >> 1) + (p_ >> 1) + 1 : x >> 1; }

  u128 p_;
  std::uint64_t p0_ = 0, p1_ = 0, pinv_ = 0;
  u128 r1_ = 0, r2_ = 0, r3_ = 0;
};

/// Z_p for any prime p > 2, arbitrary precision. Slower fallback for
/// moduli of 128 bits and more.
class FpBig {
 public:
  using value_type = BigInt;

  explicit FpBig(BigInt modulus) : p_(std::move(modulus)) {
    if (p_ < 3) throw std::invalid_argument("FpBig modulus must be > 2");
  }

  const BigInt& modulus() const noexcept { return p_; }
  BigInt modulus_big() const { return p_; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  bool is_zero(const value_type& a) const { return a == 0; }

  value_type from_big(const BigInt& v) const {
    BigInt r = v % p_;
    if (r < 0) r += p_;
    return r;
  }
  value_type from_uint(u128 v) const { return from_big(to_big(v)); }
  value_type from_int(std::int64_t v) const { return from_big(BigInt(v)); }
  BigInt to_big_value(const value_type& a) const { return a; }
  std::string to_string(const value_type& a) const { return a.str(); }

  value_type add(const value_type& a, const value_type& b) const {
    value_type s = a + b;
    if (s >= p_) s -= p_;
    return s;
  }
  value_type sub(const value_type& a, const value_type& b) const {
    value_type s = a - b;
    if (s < 0) s += p_;
    return s;
  }
  value_type neg(const value_type& a) const { return a == 0 ? value_type(0) : value_type(p_ - a); }
  value_type mul(const value_type& a, const value_type& b) const { return value_type((a * b) % p_); }

  value_type inv(const value_type& a) const {
    if (a == 0) throw DivisionByZero();
    BigInt r0 = p_, r1 = a, s0 = 0, s1 = 1;
    while (r1 != 0) {
      BigInt q = r0 / r1;
      BigInt t = r0 - q * r1;
      r0 = std::move(r1);
      r1 = std::move(t);
      t = s0 - q * s1;
      s0 = std::move(s1);
      s1 = std::move(t);
    }
    if (r0 != 1) throw DivisionByZero();
    return from_big(s0);
  }

  value_type pow(value_type base, BigInt e) const { return boost::multiprecision::powm(base, e, p_); }

  value_type random_nonzero(CounterRng& rng) const { return 1 + random_below(p_ - 1, rng); }
  value_type random(CounterRng& rng) const { return random_below(p_, rng); }

 private:
  BigInt p_;
};

template <class F>
concept PrimeField = requires(const F& f, const typename F::value_type& a, CounterRng& rng, std::int64_t i) {
  { f.zero() } -> std::convertible_to<typename F::value_type>;
  { f.one() } -> std::convertible_to<typename F::value_type>;
  { f.is_zero(a) } -> std::convertible_to<bool>;
  { f.add(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.sub(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.neg(a) } -> std::convertible_to<typename F::value_type>;
  { f.mul(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.inv(a) } -> std::convertible_to<typename F::value_type>;
  { f.from_int(i) } -> std::convertible_to<typename F::value_type>;
  { f.to_big_value(a) } -> std::convertible_to<BigInt>;
  { f.random_nonzero(rng) } -> std::convertible_to<typename F::value_type>;
  { f.modulus_big() } -> std::convertible_to<BigInt>;
};

/// Calls fn with Fp128 when p < 2^128, otherwise with FpBig.
template <class Fn>
decltype(auto) with_prime_field(const BigInt& p, Fn&& fn) {
  if (p < (BigInt(1) << 128)) return std::forward<Fn>(fn)(Fp128(to_u128(p)));
  return std::forward<Fn>(fn)(FpBig(p));
}

namespace detail {

inline constexpr std::array<std::uint32_t, 45> kSmallPrimes = {
    3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,
    97,  101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199};

// Returns 0 for composite, 1 for prime, 2 for "undecided by trial division".
template <class Int>
int trial_division(const Int& n) {
  if (n < 2) return 0;
  if (n == 2) return 1;
  if (!(n & 1)) return 0;
  for (std::uint32_t q : kSmallPrimes) {
    if (n == q) return 1;
    if (n % q == 0) return 0;
  }
  return n < Int(199) * 199 ? 1 : 2;
}

inline bool miller_rabin_u128(u128 n, CounterRng& rng, unsigned rounds) {
  const Fp128 f(n);
  u128 d = n - 1;
  unsigned s = 0;
  while (!(d & 1)) {
    d >>= 1;
    ++s;
  }
  const auto one = f.one();
  const auto minus_one = f.neg(one);
  for (unsigned round = 0; round < rounds; ++round) {
    const u128 a = 2 + rng.below(n - 3);  // [2, n-2]
    auto x = f.pow(f.from_uint(a), d);
    if (x == one || x == minus_one) continue;
    bool witness = true;
    for (unsigned r = 1; r < s; ++r) {
      x = f.mul(x, x);
      if (x == minus_one) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

inline bool miller_rabin_big(const BigInt& n, CounterRng& rng, unsigned rounds) {
  BigInt d = n - 1;
  unsigned s = 0;
  while (!bit_test(d, 0)) {
    d >>= 1;
    ++s;
  }
  const BigInt minus_one = n - 1;
  for (unsigned round = 0; round < rounds; ++round) {
    const BigInt a = 2 + random_below(n - 3, rng);
    BigInt x = boost::multiprecision::powm(a, d, n);
    if (x == 1 || x == minus_one) continue;
    bool witness = true;
    for (unsigned r = 1; r < s; ++r) {
      x = (x * x) % n;
      if (x == minus_one) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace detail

/// Number of Miller-Rabin rounds: error probability below 4^-64 = 2^-128.
inline constexpr unsigned kMillerRabinRounds = 64;

inline bool is_probable_prime(const BigInt& n, CounterRng& rng, unsigned rounds = kMillerRabinRounds) {
  const int td = detail::trial_division(n);
  if (td != 2) return td == 1;
  if (n < (BigInt(1) << 128)) return detail::miller_rabin_u128(to_u128(n), rng, rounds);
  return detail::miller_rabin_big(n, rng, rounds);
}

/// Uniform random prime in [2^bit_width, 2^(bit_width+1)).
inline BigInt random_prime(unsigned bit_width, CounterRng& rng) {
  if (bit_width < 8) throw std::invalid_argument("bit_width must be >= 8");
  if (bit_width <= 127) {
    const u128 low = u128(1) << bit_width;
    for (;;) {
      const u128 candidate = (low + rng.below(low)) | 1;
      const int td = detail::trial_division(candidate);
      if (td == 1 || (td == 2 && detail::miller_rabin_u128(candidate, rng, kMillerRabinRounds))) {
        return to_big(candidate);
      }
    }
  }
  const BigInt low = BigInt(1) << bit_width;
  for (;;) {
    BigInt candidate = low + random_below(low, rng);
    candidate |= 1;
    if (is_probable_prime(candidate, rng)) return candidate;
  }
}

inline unsigned bit_length(const BigInt& x) { return x == 0 ? 0 : unsigned(boost::multiprecision::msb(x)) + 1; }

}  // namespace influx
