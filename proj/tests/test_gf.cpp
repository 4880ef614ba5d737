#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "influx/gf.hpp"
#include "influx/prime_size.hpp"
#include "support/fixtures.hpp"

using namespace influx;

namespace {

std::vector<BigInt> test_moduli() {
  CounterRng rng(7);
  return {BigInt(3), BigInt(5), BigInt(257), BigInt(65537), (BigInt(1) << 61) - 1, (BigInt(1) << 127) - 1,
          random_prime(64, rng), random_prime(126, rng), random_prime(127, rng)};
}

std::vector<bool> sieve(std::size_t n) {
  std::vector<bool> prime(n, true);
  prime[0] = prime[1] = false;
  for (std::size_t i = 2; i * i < n; ++i)
    if (prime[i])
      for (std::size_t k = i * i; k < n; k += i) prime[k] = false;
  return prime;
}

}  // namespace

TEST(Fp128, MatchesBigIntReference) {
  CounterRng rng(1);
  for (const BigInt& p : test_moduli()) {
    const Fp128 f(to_u128(p));
    for (int t = 0; t < 300; ++t) {
      const BigInt a = random_below(p, rng), b = random_below(p, rng);
      const auto fa = f.from_big(a), fb = f.from_big(b);
      EXPECT_EQ(f.to_big_value(f.add(fa, fb)), (a + b) % p);
      EXPECT_EQ(f.to_big_value(f.sub(fa, fb)), ((a - b) % p + p) % p);
      EXPECT_EQ(f.to_big_value(f.mul(fa, fb)), (a * b) % p);
      EXPECT_EQ(f.to_big_value(f.neg(fa)), (p - a) % p);
    }
  }
}

TEST(Fp128, FieldAxiomsOnRandomTriples) {
  CounterRng rng(2);
  for (const BigInt& p : test_moduli()) {
    const Fp128 f(to_u128(p));
    for (int t = 0; t < 200; ++t) {
      const auto a = f.random(rng), b = f.random(rng), c = f.random(rng);
      EXPECT_EQ(f.add(a, b), f.add(b, a));
      EXPECT_EQ(f.mul(a, b), f.mul(b, a));
      EXPECT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
      EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
      EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
      EXPECT_EQ(f.add(a, f.neg(a)), f.zero());
      EXPECT_EQ(f.mul(a, f.one()), a);
      if (!f.is_zero(a)) EXPECT_EQ(f.mul(a, f.inv(a)), f.one());
    }
  }
}

TEST(Fp128, Basics) {
  const Fp128 f(to_u128((BigInt(1) << 127) - 1));
  EXPECT_EQ(f.inv(f.one()), f.one());
  EXPECT_TRUE(f.is_zero(f.add(f.from_uint(f.modulus() - 1), f.one())));
  EXPECT_EQ(f.to_uint(f.from_int(-1)), f.modulus() - 1);
  EXPECT_EQ(f.to_uint(f.from_int(INT64_MIN)), f.modulus() - (u128(1) << 63));
  EXPECT_THROW(f.inv(f.zero()), DivisionByZero);
  EXPECT_EQ(f.to_string(f.from_uint(12345)), "12345");
  EXPECT_THROW(Fp128(4), std::invalid_argument);
}

TEST(Fp128, FermatLittleTheorem) {
  CounterRng rng(3);
  for (std::uint64_t p : {3ULL, 5ULL, 7ULL, 11ULL, 101ULL, 7919ULL, 1000003ULL}) {
    const Fp128 f(p);
    for (int t = 0; t < 50; ++t) {
      const auto a = f.random_nonzero(rng);
      EXPECT_EQ(f.pow(a, p - 1), f.one()) << p;
    }
  }
}

TEST(FpBig, AgreesWithFp128) {
  CounterRng rng(4);
  const BigInt p = random_prime(127, rng);
  const Fp128 small(to_u128(p));
  const FpBig big(p);
  for (int t = 0; t < 200; ++t) {
    const BigInt a = random_below(p, rng), b = 1 + random_below(p - 1, rng);
    EXPECT_EQ(small.to_big_value(small.mul(small.from_big(a), small.from_big(b))), big.mul(a, b));
    EXPECT_EQ(small.to_big_value(small.inv(small.from_big(b))), big.inv(b));
  }
  EXPECT_THROW(big.inv(0), DivisionByZero);
  EXPECT_EQ(big.add(p - 1, 1), 0);
}

TEST(FpBig, WideFieldAxioms) {
  CounterRng rng(5);
  const BigInt p = random_prime(300, rng);
  EXPECT_GE(p, BigInt(1) << 300);
  EXPECT_LT(p, BigInt(1) << 301);
  const FpBig f(p);
  for (int t = 0; t < 50; ++t) {
    const auto a = f.random_nonzero(rng), b = f.random(rng);
    EXPECT_EQ(f.mul(a, f.inv(a)), 1);
    EXPECT_EQ(f.sub(f.add(a, b), b), a);
    EXPECT_EQ(f.pow(a, p - 1), 1);
  }
}

TEST(WithPrimeField, DispatchesOnWidth) {
  EXPECT_TRUE(with_prime_field(BigInt(257), [](const auto& f) { return std::is_same_v<std::decay_t<decltype(f)>, Fp128>; }));
  CounterRng rng(6);
  const BigInt wide = random_prime(128, rng);
  EXPECT_TRUE(with_prime_field(wide, [](const auto& f) { return std::is_same_v<std::decay_t<decltype(f)>, FpBig>; }));
}

TEST(Primality, AgreesWithSieveBelowOneMillion) {
  const std::size_t n = 1'000'000;
  const auto prime = sieve(n);
  CounterRng rng(8);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (is_probable_prime(BigInt(i), rng) != prime[i]) ++mismatches;
  EXPECT_EQ(mismatches, 0u);
}

TEST(Primality, KnownValues) {
  CounterRng rng(9);
  EXPECT_TRUE(is_probable_prime((BigInt(1) << 61) - 1, rng));
  EXPECT_TRUE(is_probable_prime((BigInt(1) << 127) - 1, rng));
  EXPECT_TRUE(is_probable_prime((BigInt(1) << 521) - 1, rng));
  for (std::uint64_t carmichael : {561ULL, 41041ULL, 825265ULL, 321197185ULL, 5394826801ULL, 232250619601ULL})
    EXPECT_FALSE(is_probable_prime(BigInt(carmichael), rng)) << carmichael;
  EXPECT_FALSE(is_probable_prime(((BigInt(1) << 61) - 1) * ((BigInt(1) << 89) - 1), rng));
  EXPECT_FALSE(is_probable_prime(((BigInt(1) << 127) - 1) * ((BigInt(1) << 61) - 1), rng));
}

TEST(RandomPrime, SmallWidthsNeverComposite) {
  const auto prime = sieve(1 << 20);
  CounterRng rng(10);
  for (unsigned bits = 8; bits < 20; ++bits)
    for (int t = 0; t < 200; ++t) {
      const BigInt p = random_prime(bits, rng);
      ASSERT_GE(p, BigInt(1) << bits);
      ASSERT_LT(p, BigInt(1) << (bits + 1));
      ASSERT_TRUE(prime[std::size_t(p)]) << p;
    }
}

TEST(RandomPrime, RangeAndReproducibility) {
  CounterRng a(42), b(42);
  const BigInt p = random_prime(127, a);
  EXPECT_EQ(p, random_prime(127, b));
  EXPECT_GE(p, BigInt(1) << 127);
  EXPECT_LT(p, BigInt(1) << 128);
  CounterRng c(43);
  EXPECT_NE(p, random_prime(127, c));
  EXPECT_THROW(random_prime(7, a), std::invalid_argument);
}

TEST(CounterRng, SplitStreamsAreIndependentOfParentPosition) {
  CounterRng a(1), b(1);
  b.next();
  b.next();
  EXPECT_EQ(a.split(5).next(), b.split(5).next());
  EXPECT_NE(a.split(5).next(), a.split(6).next());
  for (int t = 0; t < 1000; ++t) EXPECT_LT(a.below(std::uint64_t(7)), 7u);
}

TEST(PrimeSize, TrivialNetwork) {
  const auto net = parse_network("r: A ->\n");
  const auto rep = check_prime_size(net, BigInt(1) << 127);
  EXPECT_NEAR(rep.bound, 4 * std::log(2.0), 1e-12);
  EXPECT_TRUE(rep.sufficient);
  EXPECT_TRUE(rep.warning.empty());
}

TEST(PrimeSize, TcaModelB) {
  const auto net = influx::testing::fixture("tca_B.net");
  const auto rep = check_prime_size(net, BigInt(1) << 127);
  const double e = double(net.num_reactions()), n = double(net.num_reactions() + net.num_metabolites());
  EXPECT_EQ(rep.max_column_norm, 4);
  EXPECT_NEAR(rep.bound, e * n * n * std::log(5.0), 1e-6);
  EXPECT_LT(rep.bound, 1e8);
  EXPECT_TRUE(rep.sufficient);
  EXPECT_GT(rep.log2_margin, 90);
}

TEST(PrimeSize, SmallPrimeWarns) {
  const auto net = influx::testing::fixture("tca_B.net");
  const auto rep = check_prime_size(net, BigInt(257));
  EXPECT_FALSE(rep.sufficient);
  EXPECT_FALSE(rep.warning.empty());
}
