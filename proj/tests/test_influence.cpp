#include <gtest/gtest.h>

#include "influx/graphkit.hpp"
#include "influx/influence.hpp"
#include "support/fixtures.hpp"
#include "support/random_networks.hpp"

using namespace influx;
using influx::testing::fixture;

namespace {

InfluenceConfig cfg(std::uint64_t seed, bool extended = false, unsigned repeats = 1) {
  InfluenceConfig c;
  c.seed = seed;
  c.extended = extended;
  c.repeats = repeats;
  return c;
}

struct Field127 {
  CounterRng rng{31};
  BigInt p = random_prime(127, rng);
  Fp128 f{to_u128(p)};
};

}  // namespace

TEST(SampleRates, CountsAndDeterminism) {
  const auto net = fixture("fig31.net");
  const auto pattern = input_pattern(net);
  EXPECT_EQ(pattern.size(), 14u);
  for (const auto& [m, j] : pattern.edges) EXPECT_FALSE(net.reaction(j).is_feed());
  Field127 fx;
  CounterRng a(5), b(5);
  const auto s1 = sample_rates(fx.f, pattern, a);
  const auto s2 = sample_rates(fx.f, pattern, b);
  EXPECT_EQ(s1, s2);
  for (const auto& v : s1) EXPECT_FALSE(fx.f.is_zero(v));
}

TEST(AssembleB, SingleExit) {
  const auto net = parse_network("x: A ->\n");
  Field127 fx;
  const auto& f = fx.f;
  const RateSample<Fp128> r{f.from_uint(12345)};
  const auto b = assemble_b(f, stoich_matrix(net), input_pattern(net), r);
  ASSERT_EQ(b.rows(), 2u);
  EXPECT_EQ(b(0, 0), f.neg(f.one()));
  EXPECT_EQ(b(0, 1), r[0]);
  EXPECT_EQ(b(1, 0), f.neg(f.one()));
  EXPECT_TRUE(f.is_zero(b(1, 1)));
  EXPECT_EQ(det(f, b), r[0]);
}

TEST(AssembleB, BlockStructure) {
  const auto net = fixture("fig31.net");
  Field127 fx;
  const auto& f = fx.f;
  const auto s = stoich_matrix(net);
  const auto pattern = input_pattern(net);
  const auto rates = sample_rates(f, pattern, fx.rng);
  const auto b = assemble_b(f, s, pattern, rates);
  const std::size_t e = net.num_reactions(), m = net.num_metabolites();
  ASSERT_EQ(b.rows(), 25u);
  for (std::size_t i = 0; i < e; ++i)
    for (std::size_t k = 0; k < e; ++k) EXPECT_EQ(b(i, k), i == k ? f.neg(f.one()) : f.zero());
  for (std::size_t j = 0; j < e; ++j)
    for (std::size_t x = 0; x < m; ++x) EXPECT_EQ(!f.is_zero(b(j, e + x)), pattern.contains(x, j));
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t j = 0; j < e; ++j) EXPECT_EQ(b(e + x, j), f.from_int(s(x, j)));
    for (std::size_t y = 0; y < m; ++y) EXPECT_TRUE(f.is_zero(b(e + x, e + y)));
  }
}

TEST(AssembleB, InverseCornerIsInverseOfSR) {
  Field127 fx;
  const auto& f = fx.f;
  for (const char* file : {"fig31.net", "tca_A.net", "square.net"}) {
    const auto net = fixture(file);
    const auto s = stoich_matrix(net);
    const auto pattern = input_pattern(net);
    const auto rates = sample_rates(f, pattern, fx.rng);
    const auto inv = lu_invert(f, assemble_b(f, s, pattern, rates));
    const std::size_t e = net.num_reactions(), m = net.num_metabolites();
    FieldMatrix<Fp128> corner(m, m, f.zero());
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = 0; y < m; ++y) corner(x, y) = inv(e + x, e + y);
    EXPECT_EQ(multiply(f, corner, assemble_sr(f, s, pattern, rates)), identity(f, m)) << file;
    // det B = (-1)^E det(SR)
    const auto d_b = det(f, assemble_b(f, s, pattern, rates));
    const auto d_sr = det(f, assemble_sr(f, s, pattern, rates));
    EXPECT_EQ(d_b, e % 2 ? f.neg(d_sr) : d_sr) << file;
  }
}

// Changing one rate r_{jm} by delta is a rank-one update of B, so
// (B'^-1 - B^-1)(beta, alpha) * (1 + delta * B^-1(m, j)) = -delta * B^-1(beta, j) * B^-1(m, alpha),
// the exact finite-difference form of d B^-1 / d r_{jm} = -B^-1 e_j e_m^T B^-1.
TEST(AssembleB, RateDerivativeIdentityHoldsExactly) {
  Field127 fx;
  const auto& f = fx.f;
  for (const char* file : {"fig31.net", "tca_D.net"}) {
    const auto net = fixture(file);
    const auto s = stoich_matrix(net);
    const auto pattern = input_pattern(net);
    const std::size_t e = net.num_reactions();
    const auto rates = sample_rates(f, pattern, fx.rng);
    const auto inv = lu_invert(f, assemble_b(f, s, pattern, rates));
    for (std::size_t k = 0; k < pattern.size(); k += 3) {
      const auto [m, j] = pattern.edges[k];
      auto moved = rates;
      const auto delta = f.random_nonzero(fx.rng);
      moved[k] = f.add(moved[k], delta);
      const auto inv2 = try_invert(f, assemble_b(f, s, pattern, moved));
      ASSERT_TRUE(inv2.has_value());
      const auto scale = f.add(f.one(), f.mul(delta, inv(e + m, j)));
      for (std::size_t beta = 0; beta < inv.rows(); beta += 2)
        for (std::size_t alpha = 0; alpha < inv.cols(); ++alpha) {
          const auto lhs = f.mul(f.sub((*inv2)(beta, alpha), inv(beta, alpha)), scale);
          const auto rhs = f.neg(f.mul(delta, f.mul(inv(beta, j), inv(e + m, alpha))));
          ASSERT_EQ(lhs, rhs) << file << " beta=" << beta << " alpha=" << alpha;
        }
    }
  }
}

TEST(InfluenceMatrixTest, SquareNetworkHasNoFluxInfluence) {
  const auto net = fixture("square.net");
  const auto infl = influence_matrix(net, cfg(1));
  for (std::size_t a = 0; a < net.num_reactions(); ++a)
    for (std::size_t b = 0; b < net.num_reactions(); ++b) EXPECT_FALSE(infl.flux(b, a));
}

TEST(InfluenceMatrixTest, Fig31FixtureFacts) {
  const auto net = fixture("fig31.net");
  const auto infl = influence_matrix(net, cfg(1));
  const auto r11 = net.reaction_id("11");
  EXPECT_TRUE(infl.metabolite(net.metabolite_id("G"), r11));
  EXPECT_TRUE(infl.metabolite(net.metabolite_id("H"), r11));
  for (const auto& sc : single_children(net)) {
    for (std::size_t b = 0; b < net.num_reactions(); ++b) EXPECT_FALSE(infl.flux(b, sc.reaction));
    for (std::size_t m = 0; m < net.num_metabolites(); ++m) EXPECT_EQ(infl.metabolite(m, sc.reaction), m == sc.mother);
  }
  EXPECT_EQ(infl.primes.size(), 1u);
  EXPECT_EQ(infl.evaluations, 1u);
  EXPECT_GT(infl.false_zero_bound, 0);
  EXPECT_LT(infl.false_zero_bound, 1e-36);
}

TEST(InfluenceMatrixTest, RepeatsOnlyAddEntries) {
  const auto net = fixture("tca_A.net");
  const auto one = influence_matrix(net, cfg(3, true, 1));
  const auto three = influence_matrix(net, cfg(3, true, 3));
  ASSERT_EQ(one.bits().size(), three.bits().size());
  for (std::size_t i = 0; i < one.bits().size(); ++i)
    if (one.bits()[i]) EXPECT_TRUE(three.bits()[i]);
  EXPECT_EQ(three.primes.size(), 3u);
  EXPECT_LT(three.false_zero_bound, one.false_zero_bound);
}

TEST(InfluenceMatrixTest, SeedDeterminismAndPrimeIndependence) {
  const auto net = fixture("fig31.net");
  const auto a = influence_matrix(net, cfg(9, true));
  const auto b = influence_matrix(net, cfg(9, true));
  EXPECT_TRUE(a.same_pattern(b));
  EXPECT_EQ(a.primes, b.primes);
  auto wide = cfg(10, true);
  wide.prime_bits = 160;
  const auto c = influence_matrix(net, wide);
  EXPECT_TRUE(a.same_pattern(c));
  EXPECT_GE(BigInt(c.primes[0]), BigInt(1) << 160);
}

TEST(InfluenceMatrixTest, TransitivityOnFixturesExtended) {
  for (const char* file : {"fig31.net", "square.net", "tca_A.net", "tca_B.net", "tca_C.net", "tca_D.net", "tca_E.net"}) {
    const auto infl = influence_matrix(fixture(file), cfg(4, true));
    EXPECT_TRUE(transitivity_violations(infl).empty()) << file;
  }
}

TEST(InfluenceMatrixTest, DegenerateNetworkIsReported) {
  // Full rank, but the only child selection uses two dependent columns.
  const auto net = parse_network("f: -> A\nx: A -> B\ny: B -> A\n");
  try {
    influence_matrix(net, cfg(1));
    FAIL();
  } catch (const StructurallySingular& e) {
    EXPECT_EQ(e.attempts(), 8u);
  }
  const auto v = is_regular(net, cfg(1));
  EXPECT_FALSE(v.regular);
  EXPECT_EQ(v.attempts, 8u);
  EXPECT_THROW(influence_matrix(parse_network("x: A -> B\ny: B -> A\n"), cfg(1)), RankDeficient);
}

TEST(Regularity, Fixtures) {
  for (const char* file : {"fig31.net", "square.net", "tca_A.net", "tca_E.net"}) {
    const auto v = is_regular(fixture(file), cfg(2));
    EXPECT_TRUE(v.regular) << file;
    EXPECT_EQ(v.attempts, 1u);
    EXPECT_FALSE(v.prime.empty());
  }
}

TEST(Config, Validation) {
  const auto net = fixture("fig31.net");
  auto c = cfg(1);
  c.prime_bits = 7;
  EXPECT_THROW(influence_matrix(net, c), ConfigError);
  c = cfg(1);
  c.repeats = 0;
  EXPECT_THROW(influence_matrix(net, c), ConfigError);
}

TEST(DetProbe, Fig31FixtureFactors) {
  const auto net = fixture("fig31.net");
  const auto pattern = input_pattern(net);
  auto r = [&](const char* j, std::optional<std::string> m = std::nullopt) { return rate_index(net, pattern, j, m); };
  std::vector<LinearRelation> rel;
  for (const char* j : {"3", "4", "5", "7", "9", "11", "14", "15"}) rel.push_back({{{r(j), 1}}});
  rel.push_back({{{r("12", "H"), 1}}});
  rel.push_back({{{r("10"), 2}, {r("13"), 1}}});
  rel.push_back({});                          // generic point
  rel.push_back({{{r("12", "G"), 1}}});       // not a factor
  rel.push_back({{{r("10"), 1}, {r("13"), 1}}});  // not a factor either
  const auto dets = det_b_factor_probe(net, rel, cfg(5));
  ASSERT_EQ(dets.size(), rel.size());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(dets[i], 0) << i;
  EXPECT_NE(dets[10], 0);
  EXPECT_NE(dets[11], 0);
  EXPECT_NE(dets[12], 0);
  EXPECT_THROW(r("12"), InvalidNetwork);
  EXPECT_THROW(r("3", std::string("B")), InvalidNetwork);
}
