#pragma once

// Flux influence classes, the condensed and transitively reduced influence
// DAG, and its metabolite annotations.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "influx/errors.hpp"
#include "influx/influence.hpp"

namespace influx {

struct FluxClass {
  std::vector<std::size_t> members;  // ascending
  bool self_influential = false;
  friend bool operator==(const FluxClass&, const FluxClass&) = default;
};

struct PureInfluenceGraph {
  std::vector<FluxClass> classes;                        // topological, ties by smallest member
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // reduced, sorted
  std::vector<std::size_t> class_of;                     // per reaction
  std::vector<std::vector<bool>> reach;                  // strict reachability between classes

  std::vector<std::size_t> successors(std::size_t c) const {
    std::vector<std::size_t> out;
    for (const auto& [a, b] : edges)
      if (a == c) out.push_back(b);
    return out;
  }
  bool is_sink(std::size_t c) const {
    return std::none_of(edges.begin(), edges.end(), [c](const auto& e) { return e.first == c; });
  }
};

struct ClassAnnotation {
  std::vector<std::size_t> influenced;  // I_M
  std::vector<std::size_t> indirect;    // M^not-d
  std::vector<std::size_t> direct;      // M^d
};

struct FullInfluenceGraph {
  PureInfluenceGraph graph;
  std::vector<ClassAnnotation> annotations;  // per class
};

namespace detail {

// Tarjan over the digraph source -> target iff infl.flux(target, source).
inline std::vector<std::vector<std::size_t>> tarjan(const InfluenceMatrix& infl) {
  const std::size_t n = infl.num_reactions();
  std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> comps;
  std::size_t counter = 0;

  // Iterative to keep deep chains off the call stack.
  struct Frame {
    std::size_t v, next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != SIZE_MAX) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& fr = frames.back();
      const std::size_t v = fr.v;
      if (fr.next < n) {
        const std::size_t w = fr.next++;
        if (w == v || !infl.flux(w, v)) continue;
        if (index[w] == SIZE_MAX) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
    }
  }
  return comps;
}

inline std::vector<std::size_t> sorted_union(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

/// Mutual influence classes in display order (topological, ties broken by
/// the smallest member).
inline PureInfluenceGraph condense_and_reduce(const InfluenceMatrix& infl) {
  auto comps = detail::tarjan(infl);
  const std::size_t k = comps.size();
  std::vector<std::size_t> comp_of(infl.num_reactions());
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j : comps[c]) comp_of[j] = c;

  std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
  for (std::size_t src = 0; src < infl.num_reactions(); ++src)
    for (std::size_t dst = 0; dst < infl.num_reactions(); ++dst)
      if (comp_of[src] != comp_of[dst] && infl.flux(dst, src)) adj[comp_of[src]][comp_of[dst]] = true;

  // Kahn with a min-heap keyed by the smallest member.
  std::vector<std::size_t> indeg(k, 0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (adj[a][b]) ++indeg[b];
  using Key = std::pair<std::size_t, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (std::size_t c = 0; c < k; ++c)
    if (!indeg[c]) ready.push({comps[c].front(), c});
  std::vector<std::size_t> order, position(k);
  while (!ready.empty()) {
    const std::size_t c = ready.top().second;
    ready.pop();
    position[c] = order.size();
    order.push_back(c);
    for (std::size_t b = 0; b < k; ++b)
      if (adj[c][b] && --indeg[b] == 0) ready.push({comps[b].front(), b});
  }

  PureInfluenceGraph g;
  g.class_of.resize(infl.num_reactions());
  for (std::size_t i = 0; i < k; ++i) {
    FluxClass fc;
    fc.members = comps[order[i]];
    fc.self_influential = fc.members.size() > 1 || infl.flux(fc.members[0], fc.members[0]);
    for (std::size_t j : fc.members) g.class_of[j] = i;
    g.classes.push_back(std::move(fc));
  }
  std::vector<std::vector<bool>> cadj(k, std::vector<bool>(k, false));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (adj[a][b]) cadj[position[a]][position[b]] = true;

  // Edges only run forward in display order, so reverse order closes reach.
  g.reach.assign(k, std::vector<bool>(k, false));
  for (std::size_t a = k; a-- > 0;)
    for (std::size_t b = a + 1; b < k; ++b)
      if (cadj[a][b]) {
        g.reach[a][b] = true;
        for (std::size_t c = b + 1; c < k; ++c)
          if (g.reach[b][c]) g.reach[a][c] = true;
      }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      if (!cadj[a][b]) continue;
      bool implied = false;
      for (std::size_t w = a + 1; w < b && !implied; ++w) implied = cadj[a][w] && g.reach[w][b];
      if (!implied) g.edges.emplace_back(a, b);
    }
  return g;
}

inline std::vector<FluxClass> flux_classes(const InfluenceMatrix& infl) { return condense_and_reduce(infl).classes; }

/// I_M, indirect and direct metabolite sets per class. Throws
/// InconsistentAnnotation when the raw rows contradict transitivity.
inline FullInfluenceGraph metabolite_annotations(const InfluenceMatrix& infl, const PureInfluenceGraph& g) {
  const std::size_t k = g.classes.size();
  FullInfluenceGraph full;
  full.graph = g;
  full.annotations.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const auto& members = g.classes[c].members;
    auto& ann = full.annotations[c];
    for (std::size_t m = 0; m < infl.num_metabolites(); ++m)
      if (infl.metabolite(m, members[0])) ann.influenced.push_back(m);
    for (std::size_t j : members)
      for (std::size_t m = 0; m < infl.num_metabolites(); ++m)
        if (infl.metabolite(m, j) != infl.metabolite(m, members[0]))
          throw InconsistentAnnotation("reactions of one influence class disagree on metabolite rows; rerun with more repeats");
  }
  for (std::size_t c = 0; c < k; ++c) {
    auto& ann = full.annotations[c];
    for (std::size_t d = 0; d < k; ++d)
      if (g.reach[c][d]) ann.indirect = detail::sorted_union(ann.indirect, full.annotations[d].influenced);
    if (!std::includes(ann.influenced.begin(), ann.influenced.end(), ann.indirect.begin(), ann.indirect.end()))
      throw InconsistentAnnotation("downstream metabolite influence missing upstream; rerun with more repeats");
    std::set_difference(ann.influenced.begin(), ann.influenced.end(), ann.indirect.begin(), ann.indirect.end(),
                        std::back_inserter(ann.direct));
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> via_direct;
    for (std::size_t d = 0; d < k; ++d)
      if (g.reach[c][d]) via_direct = detail::sorted_union(via_direct, full.annotations[d].direct);
    if (via_direct != full.annotations[c].indirect)
      throw InconsistentAnnotation("indirect metabolite set is not the union of downstream direct sets");
  }
  return full;
}

struct InfluenceSets {
  std::vector<std::size_t> reactions;    // I_E
  std::vector<std::size_t> metabolites;  // I_M
  friend bool operator==(const InfluenceSets&, const InfluenceSets&) = default;
};

/// I_E and I_M of reaction j read off the annotated graph.
inline InfluenceSets influence_sets(const FullInfluenceGraph& full, std::size_t j) {
  const auto& g = full.graph;
  const std::size_t c = g.class_of.at(j);
  InfluenceSets out;
  std::vector<std::size_t> ms = full.annotations[c].direct;
  for (std::size_t d = 0; d < g.classes.size(); ++d) {
    const bool hit = (d == c && g.classes[c].self_influential) || g.reach[c][d];
    if (!hit) continue;
    out.reactions.insert(out.reactions.end(), g.classes[d].members.begin(), g.classes[d].members.end());
    if (d != c) ms = detail::sorted_union(ms, full.annotations[d].direct);
  }
  std::sort(out.reactions.begin(), out.reactions.end());
  out.metabolites = std::move(ms);
  return out;
}

/// I_E and I_M of reaction j read off the raw matrix column.
inline InfluenceSets influence_sets(const InfluenceMatrix& infl, std::size_t j) {
  InfluenceSets out;
  for (std::size_t b = 0; b < infl.num_reactions(); ++b)
    if (infl.flux(b, j)) out.reactions.push_back(b);
  for (std::size_t m = 0; m < infl.num_metabolites(); ++m)
    if (infl.metabolite(m, j)) out.metabolites.push_back(m);
  return out;
}

struct TransitivityViolation {
  std::size_t alpha, via, beta;  // alpha ~> via ~> beta but not alpha ~> beta
};

/// Checks infl[via][alpha] and infl[beta][via] imply infl[beta][alpha] for
/// every column alpha, reaction via and row beta.
inline std::vector<TransitivityViolation> transitivity_violations(const InfluenceMatrix& infl, std::size_t limit = 100) {
  std::vector<TransitivityViolation> out;
  for (std::size_t a = 0; a < infl.cols(); ++a)
    for (std::size_t j = 0; j < infl.num_reactions(); ++j) {
      if (!infl.at(j, a)) continue;
      for (std::size_t b = 0; b < infl.rows(); ++b)
        if (infl.at(b, j) && !infl.at(b, a)) {
          out.push_back({a, j, b});
          if (out.size() >= limit) return out;
        }
    }
  return out;
}

}  // namespace influx
