#include <gtest/gtest.h>

#include <set>

#include "influx/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_networks.hpp"

using namespace influx;
using influx::testing::fixture;

namespace {

InfluenceConfig cfg(std::uint64_t seed, bool extended = false) {
  InfluenceConfig c;
  c.seed = seed;
  c.extended = extended;
  return c;
}

}  // namespace

TEST(Enumerator, Fig31FixtureHasSixSelections) {
  const auto net = fixture("fig31.net");
  Oracle o(net);
  const auto sels = o.selections();
  ASSERT_EQ(sels.size(), 6u);
  std::set<std::pair<std::size_t, std::size_t>> choices;
  for (const auto& j : sels) {
    EXPECT_EQ(j[net.metabolite_id("G")], net.reaction_id("11"));
    EXPECT_EQ(j[net.metabolite_id("H")], net.reaction_id("12"));
    EXPECT_EQ(j[net.metabolite_id("A")], net.reaction_id("3"));
    choices.insert({j[net.metabolite_id("C")], j[net.metabolite_id("F")]});
  }
  EXPECT_EQ(choices.size(), 6u);
}

TEST(Enumerator, ForcedChoicesAreNotBranched) {
  const auto net = fixture("fig31.net");
  const auto pattern = input_pattern(net);
  std::vector<std::size_t> domain(net.num_metabolites());
  for (std::size_t m = 0; m < domain.size(); ++m) domain[m] = m;
  ChildSelectionEnumerator exact(pattern, domain, std::vector<bool>(net.num_reactions(), true), 6);
  EXPECT_EQ(exact.collect().size(), 6u);
  EXPECT_EQ(exact.visited(), 6u);
  ChildSelectionEnumerator tight(pattern, domain, std::vector<bool>(net.num_reactions(), true), 5);
  EXPECT_THROW(tight.collect(), EnumerationBudgetExceeded);
}

TEST(Enumerator, EmptyWhenAMetaboliteHasNoChild) {
  const auto net = fixture("fig31.net");
  Oracle o(net);
  std::vector<bool> allowed(net.num_reactions(), true);
  allowed[net.reaction_id("14")] = false;
  EXPECT_TRUE(o.enumerator(allowed).collect().empty());
}

TEST(Enumerator, SelectionsGiveDistinctMonomials) {
  CounterRng rng(41);
  for (int t = 0; t < 80; ++t) {
    const auto net = influx::testing::random_network(rng, {}, false);
    std::set<std::set<std::pair<std::size_t, std::size_t>>> monomials;
    const auto sels = Oracle(net).selections();
    for (const auto& j : sels) {
      std::set<std::pair<std::size_t, std::size_t>> mono;
      for (std::size_t m = 0; m < j.size(); ++m) mono.insert({j[m], m});
      monomials.insert(mono);
    }
    EXPECT_EQ(monomials.size(), sels.size());
  }
}

TEST(OracleTest, Fig31Fixture) {
  const auto net = fixture("fig31.net");
  EXPECT_TRUE(oracle_regular(net));
  const auto r = [&](const char* n) { return net.reaction_id(n); };
  EXPECT_TRUE(oracle_flux_influence(net, r("10"), r("13")));
  EXPECT_TRUE(oracle_flux_influence(net, r("13"), r("10")));
  EXPECT_TRUE(oracle_flux_influence(net, r("6"), r("6")));
  EXPECT_FALSE(oracle_flux_influence(net, r("3"), r("3")));
  EXPECT_TRUE(oracle_metabolite_influence(net, r("11"), net.metabolite_id("G")));
  EXPECT_FALSE(oracle_metabolite_influence(net, r("12"), net.metabolite_id("G")));
  EXPECT_TRUE(oracle_influence_matrix(net, true).same_pattern(influence_matrix(net, cfg(1, true))));
}

TEST(OracleTest, NotRegular) {
  const auto net = parse_network("f: -> A\nx: A -> B\ny: B -> A\n");
  EXPECT_FALSE(oracle_regular(net));
  EXPECT_THROW(oracle_influence_matrix(net), NotRegular);
}

TEST(OracleTest, WithFeedMatchesMetaboliteColumns) {
  const auto net = fixture("fig31.net");
  const auto fed = with_feed(net, net.metabolite_id("C"));
  EXPECT_EQ(fed.num_reactions(), net.num_reactions() + 1);
  EXPECT_EQ(fed.reaction(net.num_reactions()).name, "feed.C");
  EXPECT_TRUE(fed.reaction(net.num_reactions()).is_feed());
}

TEST(OracleTest, AgreesWithRandomizedPipeline) {
  CounterRng rng(42);
  for (int t = 0; t < 150; ++t) {
    const auto net = influx::testing::random_network(rng, {});
    const bool extended = t % 2 == 1;
    const auto exact = oracle_influence_matrix(net, extended);
    const auto fast = influence_matrix(net, cfg(1000 + t, extended));
    ASSERT_TRUE(exact.same_pattern(fast)) << to_dsl(net);
  }
}

TEST(OracleTest, SquareNetworksHaveNoFluxInfluence) {
  CounterRng rng(43);
  influx::testing::RandomNetworkOptions opt;
  opt.square = true;
  for (int t = 0; t < 40; ++t) {
    const auto net = influx::testing::random_network(rng, opt);
    const auto exact = oracle_influence_matrix(net);
    for (std::size_t a = 0; a < net.num_reactions(); ++a)
      for (std::size_t b = 0; b < net.num_reactions(); ++b) EXPECT_FALSE(exact.flux(b, a));
  }
}

// With E = M, j* changes m' iff some partial selection of M minus m' avoids
// j*. A full selection with J(m') = j* is sufficient but not necessary.
TEST(OracleTest, SquareMetaboliteInfluenceIsPartialSelection) {
  const auto net = parse_network("r1: B -> C\nr2: 2 D -> A\nr3: B + A -> D\nr4: C + 2 A ->\n");
  const auto exact = oracle_influence_matrix(net);
  const std::size_t r1 = net.reaction_id("r1");
  EXPECT_TRUE(exact.metabolite(net.metabolite_id("B"), r1));
  EXPECT_TRUE(exact.metabolite(net.metabolite_id("A"), r1));
  EXPECT_TRUE(exact.metabolite(net.metabolite_id("C"), r1));
  EXPECT_FALSE(exact.metabolite(net.metabolite_id("D"), r1));
  std::size_t selections = 0;
  Oracle(net).enumerator(std::vector<bool>(4, true)).for_each([&](const ChildSelection& sel) {
    EXPECT_EQ(sel[net.metabolite_id("B")], r1);
    ++selections;
    return false;
  });
  EXPECT_EQ(selections, 1u);

  CounterRng rng(44);
  influx::testing::RandomNetworkOptions opt;
  opt.square = true;
  for (int t = 0; t < 40; ++t) {
    const auto rnd = influx::testing::random_network(rng, opt);
    const auto infl = oracle_influence_matrix(rnd);
    const auto pattern = input_pattern(rnd);
    for (std::size_t j = 0; j < rnd.num_reactions(); ++j)
      for (std::size_t m = 0; m < rnd.num_metabolites(); ++m) {
        std::vector<std::size_t> domain;
        for (std::size_t x = 0; x < rnd.num_metabolites(); ++x)
          if (x != m) domain.push_back(x);
        std::vector<bool> allowed(rnd.num_reactions(), true);
        allowed[j] = false;
        const bool partial = ChildSelectionEnumerator(pattern, domain, allowed).for_each([](const ChildSelection&) { return true; });
        EXPECT_EQ(infl.metabolite(m, j), partial) << to_dsl(rnd);
      }
  }
}
