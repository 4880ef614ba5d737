#pragma once

// Network extensions: augmentation witnesses, persistence of influences under
// augmentation, the all-exits extension, and the Okada upper estimate.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "influx/errors.hpp"
#include "influx/graphkit.hpp"
#include "influx/influence.hpp"
#include "influx/linalg.hpp"
#include "influx/network.hpp"
#include "influx/oracle.hpp"
#include "influx/rng.hpp"

namespace influx {

/// net0 names that are spelled differently in net1.
using NameMapping = std::map<std::string, std::string>;

struct AugmentationWitness {
  std::vector<std::size_t> metabolite_map;  // net0 id -> net1 id
  std::vector<std::size_t> reaction_map;    // net0 id -> net1 id
  std::vector<std::size_t> new_metabolites;  // net1 ids, ascending
  std::vector<std::size_t> new_reactions;    // net1 ids, ascending
  std::optional<ChildSelection> partial_selection;  // indexed by net1 metabolite
  BigInt partial_det = 0;

  bool hypothesis_holds() const { return new_metabolites.empty() || partial_selection.has_value(); }
};

namespace detail {

inline std::string mapped_name(const NameMapping& mapping, const std::string& name) {
  const auto it = mapping.find(name);
  return it == mapping.end() ? name : it->second;
}

}  // namespace detail

/// Partial selection J on the new metabolites into the new reactions with
/// nonzero determinant of S1 on (new metabolites, J(new metabolites)).
inline std::optional<std::pair<ChildSelection, BigInt>> find_partial_selection(
    const ReactionNetwork& net1, const std::vector<std::size_t>& new_metabolites, const std::vector<std::size_t>& new_reactions,
    std::uint64_t budget = kDefaultEnumerationBudget) {
  const auto s1 = stoich_matrix(net1);
  const auto pattern = input_pattern(net1);
  std::vector<bool> allowed(net1.num_reactions(), false);
  for (std::size_t j : new_reactions) allowed[j] = true;
  ChildSelectionEnumerator en(pattern, new_metabolites, std::move(allowed), budget);
  std::optional<std::pair<ChildSelection, BigInt>> found;
  en.for_each([&](const ChildSelection& j) {
    std::vector<std::size_t> cols;
    for (std::size_t m : new_metabolites) cols.push_back(j[m]);
    const BigInt d = int_det_bareiss(s1.select(new_metabolites, cols));
    if (d == 0) return false;
    found.emplace(j, d);
    return true;
  });
  return found;
}

/// Witness that net1 augments net0, matching by name. Shared reactions must
/// have identical input and output vectors, and therefore cannot touch new
/// metabolites.
inline AugmentationWitness is_augmentation(const ReactionNetwork& net0, const ReactionNetwork& net1, const NameMapping& mapping = {},
                                           std::uint64_t budget = kDefaultEnumerationBudget) {
  using K = AugmentationError::Kind;
  AugmentationWitness w;
  std::vector<bool> old_m(net1.num_metabolites(), false), old_r(net1.num_reactions(), false);
  for (const auto& m : net0.metabolites()) {
    const std::string name = detail::mapped_name(mapping, m.name);
    const auto id = net1.find_metabolite(name);
    if (!id) throw AugmentationError(K::missing_metabolite, "", m.name, "metabolite '" + name + "' is missing from the larger network");
    w.metabolite_map.push_back(*id);
    old_m[*id] = true;
  }
  for (const auto& r : net0.reactions()) {
    const std::string name = detail::mapped_name(mapping, r.name);
    const auto id = net1.find_reaction(name);
    if (!id) throw AugmentationError(K::missing_reaction, r.name, "", "reaction '" + name + "' is missing from the larger network");
    w.reaction_map.push_back(*id);
    old_r[*id] = true;
  }
  for (std::size_t m = 0; m < old_m.size(); ++m)
    if (!old_m[m]) w.new_metabolites.push_back(m);
  for (std::size_t j = 0; j < old_r.size(); ++j)
    if (!old_r[j]) w.new_reactions.push_back(j);

  for (const auto& r0 : net0.reactions()) {
    const auto& r1 = net1.reaction(w.reaction_map[r0.id]);
    for (const Stoichiometry* side : {&r1.inputs, &r1.outputs})
      for (const auto& [m, c] : *side)
        if (!old_m[m])
          throw AugmentationError(K::old_reaction_touches_new_metabolite, r0.name, net1.metabolite(m).name,
                                  "reaction '" + r0.name + "' involves new metabolite '" + net1.metabolite(m).name + "'");
    auto mapped = [&](const Stoichiometry& s) {
      Stoichiometry out;
      for (const auto& [m, c] : s) out[w.metabolite_map[m]] = c;
      return out;
    };
    if (mapped(r0.inputs) != r1.inputs || mapped(r0.outputs) != r1.outputs)
      throw AugmentationError(K::stoichiometry_mismatch, r0.name, "", "reaction '" + r0.name + "' has different stoichiometry");
  }
  if (!w.new_metabolites.empty()) {
    if (auto found = find_partial_selection(net1, w.new_metabolites, w.new_reactions, budget)) {
      w.partial_selection = std::move(found->first);
      w.partial_det = found->second;
    }
  }
  return w;
}

struct InfluenceEntry {
  std::size_t row;  // net0 row index
  std::size_t col;  // net0 column index
  friend bool operator==(const InfluenceEntry&, const InfluenceEntry&) = default;
};

struct Lumping {
  std::vector<std::size_t> members;                      // net1 reaction ids of the merged class
  std::vector<std::vector<std::size_t>> merged_classes;  // net0 classes (net0 ids) it absorbs
};

struct AugmenticityReport {
  AugmentationWitness witness;
  bool hypothesis_verified = false;
  std::vector<InfluenceEntry> losses;  // true in net0, false in net1
  std::vector<InfluenceEntry> gains;   // false in net0, true in net1
  std::vector<Lumping> lumpings;

  std::string status() const {
    if (!hypothesis_verified) return "informational";
    return losses.empty() ? "verified" : "violation";
  }
  /// Losses count as violations only when the hypothesis is verified.
  std::size_t violations() const { return hypothesis_verified ? losses.size() : 0; }
};

namespace detail {

// Index in net1 of a row or column of net0's influence matrix.
inline std::size_t map_index(const AugmentationWitness& w, std::size_t e0, std::size_t e1, std::size_t idx) {
  return idx < e0 ? w.reaction_map[idx] : e1 + w.metabolite_map[idx - e0];
}

}  // namespace detail

/// Compares influence matrices over shared indices. Both matrices must have
/// the same mode; in extended mode metabolite columns persist as well, since
/// a metabolite perturbation is the perturbation of a feed reaction.
inline AugmenticityReport check_augmenticity(const ReactionNetwork& net0, const ReactionNetwork& net1, const InfluenceMatrix& infl0,
                                             const InfluenceMatrix& infl1, const AugmentationWitness& witness) {
  if (infl0.extended() != infl1.extended()) throw ConfigError("influence matrices differ in mode");
  if (infl0.num_reactions() != net0.num_reactions() || infl1.num_reactions() != net1.num_reactions())
    throw ConfigError("influence matrix does not match its network");
  AugmenticityReport rep;
  rep.witness = witness;
  rep.hypothesis_verified = witness.hypothesis_holds();
  const std::size_t e0 = net0.num_reactions(), e1 = net1.num_reactions();
  for (std::size_t c = 0; c < infl0.cols(); ++c)
    for (std::size_t r = 0; r < infl0.rows(); ++r) {
      const bool before = infl0.at(r, c);
      const bool after = infl1.at(detail::map_index(witness, e0, e1, r), detail::map_index(witness, e0, e1, c));
      if (before && !after) rep.losses.push_back({r, c});
      if (!before && after) rep.gains.push_back({r, c});
    }
  const auto g0 = condense_and_reduce(infl0);
  const auto g1 = condense_and_reduce(infl1);
  for (const auto& cls : g1.classes) {
    std::set<std::size_t> absorbed;
    for (std::size_t j0 = 0; j0 < e0; ++j0)
      if (std::binary_search(cls.members.begin(), cls.members.end(), witness.reaction_map[j0])) absorbed.insert(g0.class_of[j0]);
    if (absorbed.size() < 2) continue;
    Lumping l;
    l.members = cls.members;
    for (std::size_t c : absorbed) l.merged_classes.push_back(g0.classes[c].members);
    rep.lumpings.push_back(std::move(l));
  }
  return rep;
}

/// Monomolecular exit: m -> nothing with unit coefficient.
inline bool is_monomolecular_exit(const Reaction& r) {
  return r.outputs.empty() && r.inputs.size() == 1 && r.inputs.begin()->second == 1;
}

/// Adds `exit_<m>: m ->` for every metabolite without a monomolecular exit.
inline ReactionNetwork extend_with_exits(const ReactionNetwork& net) {
  ReactionNetwork out = net;
  std::vector<bool> has_exit(net.num_metabolites(), false);
  for (const auto& r : net.reactions())
    if (is_monomolecular_exit(r)) has_exit[r.inputs.begin()->first] = true;
  for (std::size_t m = 0; m < net.num_metabolites(); ++m) {
    if (has_exit[m]) continue;
    std::string name = "exit_" + net.metabolite(m).name;
    while (out.find_reaction(name)) name += "_";
    out.add_reaction(name, {{m, 1}}, {});
  }
  return out;
}

enum class OkadaStatus { passed, not_output_complete, dimension_mismatch };

inline const char* to_string(OkadaStatus s) {
  switch (s) {
    case OkadaStatus::passed: return "passed";
    case OkadaStatus::not_output_complete: return "not_output_complete";
    case OkadaStatus::dimension_mismatch: return "dimension_mismatch";
  }
  return "";
}

struct OkadaReport {
  OkadaStatus status = OkadaStatus::passed;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // (m0, j0): m0 in M0 feeds j0 outside E0
  long long dimension_defect = 0;  // dim(ker S on E0) + |M0| - |E0|
  std::vector<std::size_t> escaped_reactions;    // union of I_E over E0, outside E0
  std::vector<std::size_t> escaped_metabolites;  // union of I_M over E0, outside M0
  bool strict = false;  // the union of influence sets is a proper subset of E0 or M0

  bool contained() const { return escaped_reactions.empty() && escaped_metabolites.empty(); }
};

/// Output completeness, the dimension condition (kernel dimension mod p),
/// and, when both hold, containment of the influence sets of E0.
inline OkadaReport okada_check(const ReactionNetwork& net, std::vector<std::size_t> e0, std::vector<std::size_t> m0,
                               const InfluenceMatrix& infl, const BigInt& p) {
  std::sort(e0.begin(), e0.end());
  e0.erase(std::unique(e0.begin(), e0.end()), e0.end());
  std::sort(m0.begin(), m0.end());
  m0.erase(std::unique(m0.begin(), m0.end()), m0.end());
  OkadaReport rep;
  const auto pattern = input_pattern(net);
  for (std::size_t m : m0)
    for (std::size_t j : pattern.children.at(m))
      if (!std::binary_search(e0.begin(), e0.end(), j)) {
        rep.status = OkadaStatus::not_output_complete;
        rep.witness = {m, j};
        return rep;
      }
  const auto s = stoich_matrix(net);
  std::vector<std::size_t> all_rows(net.num_metabolites());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
  const std::size_t r = with_prime_field(p, [&](const auto& f) { return rank(f, to_field(f, s.select(all_rows, e0))); });
  rep.dimension_defect = static_cast<long long>(e0.size() - r + m0.size()) - static_cast<long long>(e0.size());
  if (rep.dimension_defect != 0) {
    rep.status = OkadaStatus::dimension_mismatch;
    return rep;
  }
  std::set<std::size_t> reached_e, reached_m;
  for (std::size_t j : e0) {
    for (std::size_t b = 0; b < infl.num_reactions(); ++b)
      if (infl.flux(b, j)) reached_e.insert(b);
    for (std::size_t m = 0; m < infl.num_metabolites(); ++m)
      if (infl.metabolite(m, j)) reached_m.insert(m);
  }
  for (std::size_t b : reached_e)
    if (!std::binary_search(e0.begin(), e0.end(), b)) rep.escaped_reactions.push_back(b);
  for (std::size_t m : reached_m)
    if (!std::binary_search(m0.begin(), m0.end(), m)) rep.escaped_metabolites.push_back(m);
  rep.strict = rep.contained() && (reached_e.size() < e0.size() || reached_m.size() < m0.size());
  return rep;
}

struct OkadaProbe {
  std::vector<std::size_t> reactions;    // E0
  std::vector<std::size_t> metabolites;  // M0
  friend auto operator<=>(const OkadaProbe&, const OkadaProbe&) = default;
};

/// Random candidate subnetwork: a random metabolite seed closed under
/// children and their products, so that it is output complete and the columns
/// of E0 live on M0 rows. A random share of the closure steps is skipped to
/// also produce candidates that fail the conditions.
inline OkadaProbe random_okada_probe(const ReactionNetwork& net, CounterRng& rng) {
  const auto pattern = input_pattern(net);
  const std::size_t m_count = net.num_metabolites();
  std::vector<bool> in_m(m_count, false), in_e(net.num_reactions(), false);
  const std::size_t seeds = 1 + rng.below(std::uint64_t(std::min<std::size_t>(3, m_count)));
  for (std::size_t i = 0; i < seeds; ++i) in_m[rng.below(std::uint64_t(m_count))] = true;
  const bool sloppy = rng.below(std::uint64_t(4)) == 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t m = 0; m < m_count; ++m) {
      if (!in_m[m]) continue;
      for (std::size_t j : pattern.children[m]) {
        if (in_e[j]) continue;
        in_e[j] = true;
        changed = true;
        for (const auto* side : {&net.reaction(j).inputs, &net.reaction(j).outputs})
          for (const auto& [x, c] : *side)
            if (!in_m[x] && !(sloppy && rng.below(std::uint64_t(2)) == 0)) in_m[x] = true;
      }
    }
  }
  // Feeds into M0 keep the closure intact and vary E0.
  for (const auto& r : net.reactions()) {
    if (in_e[r.id] || !r.is_feed()) continue;
    bool inside = true;
    for (const auto& [x, c] : r.outputs) inside = inside && in_m[x];
    if (inside && rng.below(std::uint64_t(2)) == 0) in_e[r.id] = true;
  }
  OkadaProbe probe;
  for (std::size_t j = 0; j < in_e.size(); ++j)
    if (in_e[j]) probe.reactions.push_back(j);
  for (std::size_t m = 0; m < m_count; ++m)
    if (in_m[m]) probe.metabolites.push_back(m);
  return probe;
}

}  // namespace influx
