#include <gtest/gtest.h>

#include "influx/graphkit.hpp"
#include "support/fixtures.hpp"
#include "support/random_networks.hpp"

using namespace influx;
using influx::testing::fixture;

namespace {

InfluenceConfig cfg(std::uint64_t seed) {
  InfluenceConfig c;
  c.seed = seed;
  return c;
}

std::vector<std::size_t> ids(const ReactionNetwork& net, std::initializer_list<const char*> names) {
  std::vector<std::size_t> out;
  for (const char* n : names) out.push_back(net.reaction_id(n));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> mids(const ReactionNetwork& net, std::initializer_list<const char*> names) {
  std::vector<std::size_t> out;
  for (const char* n : names) out.push_back(net.metabolite_id(n));
  std::sort(out.begin(), out.end());
  return out;
}

// Flux-only matrix with no metabolite rows from an edge list source -> target.
InfluenceMatrix flux_graph(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> edges) {
  InfluenceMatrix m(n, 0, false);
  for (const auto& [src, dst] : edges) m.set(dst, src);
  return m;
}

}  // namespace

class Fig31FixtureGraph : public ::testing::Test {
 protected:
  ReactionNetwork net = fixture("fig31.net");
  InfluenceMatrix infl = influence_matrix(net, cfg(1));
  PureInfluenceGraph g = condense_and_reduce(infl);
  FullInfluenceGraph full = metabolite_annotations(infl, g);

  const FluxClass& class_of(const char* r) const { return g.classes[g.class_of[net.reaction_id(r)]]; }
  const ClassAnnotation& ann(const char* r) const { return full.annotations[g.class_of[net.reaction_id(r)]]; }
};

TEST_F(Fig31FixtureGraph, SelfInfluentialReactions) {
  std::vector<std::size_t> self;
  for (std::size_t j = 0; j < net.num_reactions(); ++j)
    if (infl.flux(j, j)) self.push_back(j);
  EXPECT_EQ(self, ids(net, {"1", "2", "6", "8", "10", "13"}));
  for (const char* r : {"1", "2", "6", "8"}) {
    EXPECT_EQ(class_of(r).members.size(), 1u) << r;
    EXPECT_TRUE(class_of(r).self_influential) << r;
  }
}

TEST_F(Fig31FixtureGraph, MutualClassOfTenAndThirteen) {
  EXPECT_EQ(class_of("10").members, ids(net, {"10", "13"}));
  EXPECT_TRUE(class_of("10").self_influential);
  std::size_t nontrivial = 0;
  for (const auto& c : g.classes) nontrivial += c.members.size() > 1;
  EXPECT_EQ(nontrivial, 1u);
  EXPECT_EQ(g.classes.size(), 14u);
}

TEST_F(Fig31FixtureGraph, Annotations) {
  EXPECT_EQ(ann("11").direct, mids(net, {"G", "H"}));
  EXPECT_EQ(ann("12").direct, mids(net, {"H"}));
  EXPECT_EQ(influence_sets(full, net.reaction_id("8")).metabolites, mids(net, {"C", "D", "E", "G", "H"}));
  EXPECT_EQ(influence_sets(full, net.reaction_id("6")).metabolites, mids(net, {"E", "G", "H"}));
  for (const auto& sc : single_children(net)) {
    const auto sets = influence_sets(full, sc.reaction);
    EXPECT_TRUE(sets.reactions.empty());
    EXPECT_EQ(sets.metabolites, std::vector<std::size_t>{sc.mother});
  }
}

TEST_F(Fig31FixtureGraph, SetsFromGraphMatchRawColumns) {
  for (std::size_t j = 0; j < net.num_reactions(); ++j) EXPECT_EQ(influence_sets(full, j), influence_sets(infl, j)) << j;
}

TEST_F(Fig31FixtureGraph, OrderIsTopological) {
  for (const auto& [a, b] : g.edges) EXPECT_LT(a, b);
  for (std::size_t src = 0; src < net.num_reactions(); ++src)
    for (std::size_t dst = 0; dst < net.num_reactions(); ++dst)
      if (infl.flux(dst, src) && g.class_of[src] != g.class_of[dst]) EXPECT_LT(g.class_of[src], g.class_of[dst]);
}

TEST(Condense, TieBreakBySmallestMember) {
  // 3 -> 0, 2 -> 1; roots 2 and 3 come first, ordered by index.
  const auto g = condense_and_reduce(flux_graph(4, {{3, 0}, {2, 1}}));
  std::vector<std::size_t> order;
  for (const auto& c : g.classes) order.push_back(c.members[0]);
  EXPECT_EQ(order, (std::vector<std::size_t>{2, 1, 3, 0}));
  for (const auto& c : g.classes) EXPECT_FALSE(c.self_influential);
}

TEST(Condense, TransitiveReduction) {
  // Closed chain 0 -> 1 -> 2 plus the implied 0 -> 2.
  const auto g = condense_and_reduce(flux_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  EXPECT_EQ(g.edges, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
  EXPECT_TRUE(g.reach[0][2]);
  EXPECT_FALSE(g.reach[2][0]);
  EXPECT_TRUE(g.is_sink(2));
  EXPECT_EQ(g.successors(0), std::vector<std::size_t>{1});
}

TEST(Condense, CyclesCollapse) {
  const auto g = condense_and_reduce(flux_graph(5, {{0, 1}, {1, 0}, {1, 2}, {3, 3}, {2, 4}, {4, 2}}));
  ASSERT_EQ(g.classes.size(), 3u);
  EXPECT_EQ(g.classes[0].members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(g.classes[1].members, (std::vector<std::size_t>{2, 4}));
  EXPECT_EQ(g.classes[2].members, std::vector<std::size_t>{3});
  EXPECT_TRUE(g.classes[2].self_influential);
  EXPECT_EQ(g.edges, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
}

TEST(Condense, LongChainDoesNotRecurse) {
  const std::size_t n = 4000;
  InfluenceMatrix m(n, 0, false);
  for (std::size_t i = 0; i + 1 < n; ++i) m.set(i + 1, i);
  m.set(0, n - 1);
  EXPECT_EQ(flux_classes(m).size(), 1u);
}

TEST(Annotations, InconsistentRowsThrow) {
  // Class {0, 1} whose members disagree on metabolite 0.
  InfluenceMatrix m(2, 1, false);
  m.set(1, 0);
  m.set(0, 1);
  m.set(2, 0);
  EXPECT_THROW(metabolite_annotations(m, condense_and_reduce(m)), InconsistentAnnotation);

  // 0 -> 1 where 1 influences metabolite 0 but 0 does not.
  InfluenceMatrix d(2, 1, false);
  d.set(1, 0);
  d.set(2, 1);
  EXPECT_THROW(metabolite_annotations(d, condense_and_reduce(d)), InconsistentAnnotation);
}

TEST(Annotations, RandomNetworksAreConsistent) {
  CounterRng rng(21);
  for (int t = 0; t < 60; ++t) {
    const auto net = influx::testing::random_network(rng, {});
    const auto infl = influence_matrix(net, cfg(t));
    const auto full = metabolite_annotations(infl, condense_and_reduce(infl));
    for (std::size_t j = 0; j < net.num_reactions(); ++j) ASSERT_EQ(influence_sets(full, j), influence_sets(infl, j)) << to_dsl(net);
    for (const auto& a : full.annotations) {
      std::vector<std::size_t> both;
      std::set_intersection(a.direct.begin(), a.direct.end(), a.indirect.begin(), a.indirect.end(), std::back_inserter(both));
      EXPECT_TRUE(both.empty());
    }
  }
}

TEST(Transitivity, DetectsViolation) {
  const auto m = flux_graph(3, {{0, 1}, {1, 2}});
  const auto v = transitivity_violations(m);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].alpha, 0u);
  EXPECT_EQ(v[0].via, 1u);
  EXPECT_EQ(v[0].beta, 2u);
}
