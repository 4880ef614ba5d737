#pragma once

// Exact influence decisions by enumerating child selections, for small
// networks. Independent of the randomized pipeline.
//
// det(SR) expands as a sum over child selections J of a_J * prod_m r_{J(m) m}.
// Distinct selections give distinct monomials, because the set of pairs
// (J(m), m) determines J, so no two terms can cancel: the polynomial is
// nonzero iff some coefficient a_J, a minor of S, is nonzero. The same
// holds for the numerators behind every influence entry.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "influx/errors.hpp"
#include "influx/influence.hpp"
#include "influx/linalg.hpp"
#include "influx/network.hpp"

namespace influx {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;
inline constexpr std::size_t kUnassigned = SIZE_MAX;

/// Indexed by metabolite; kUnassigned outside the domain.
using ChildSelection = std::vector<std::size_t>;

/// Backtracking over injective maps m -> J(m) with m an input of J(m).
/// Metabolites with a single admissible child are fixed first (repeatedly,
/// as fixing one can leave another with a single choice); the rest are
/// branched in ascending order with candidates ascending.
class ChildSelectionEnumerator {
 public:
  ChildSelectionEnumerator(const InputPattern& pattern, std::vector<std::size_t> domain, std::vector<bool> allowed,
                           std::uint64_t budget = kDefaultEnumerationBudget)
      : pattern_(pattern), domain_(std::move(domain)), allowed_(std::move(allowed)), budget_(budget) {}

  /// Calls fn(J) for each selection until fn returns true. Returns whether
  /// fn stopped the enumeration.
  template <class Fn>
  bool for_each(Fn&& fn) {
    visited_ = 0;
    ChildSelection sel(pattern_.children.size(), kUnassigned);
    std::vector<bool> used(allowed_.size(), false);
    std::vector<std::size_t> open(domain_);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < open.size(); ++i) {
        const std::size_t m = open[i];
        std::size_t count = 0, only = 0;
        for (std::size_t j : pattern_.children[m])
          if (allowed_[j] && !used[j]) {
            ++count;
            only = j;
          }
        if (count == 0) return false;
        if (count == 1) {
          sel[m] = only;
          used[only] = true;
          open.erase(open.begin() + std::ptrdiff_t(i));
          changed = true;
          break;
        }
      }
    }
    std::sort(open.begin(), open.end());
    return branch(open, 0, sel, used, fn);
  }

  std::uint64_t visited() const noexcept { return visited_; }

  std::vector<ChildSelection> collect() {
    std::vector<ChildSelection> out;
    for_each([&](const ChildSelection& j) {
      out.push_back(j);
      return false;
    });
    return out;
  }

 private:
  template <class Fn>
  bool branch(const std::vector<std::size_t>& open, std::size_t depth, ChildSelection& sel, std::vector<bool>& used, Fn& fn) {
    if (depth == open.size()) {
      if (++visited_ > budget_) throw EnumerationBudgetExceeded(budget_);
      return fn(static_cast<const ChildSelection&>(sel));
    }
    const std::size_t m = open[depth];
    for (std::size_t j : pattern_.children[m]) {
      if (!allowed_[j] || used[j]) continue;
      sel[m] = j;
      used[j] = true;
      const bool stop = branch(open, depth + 1, sel, used, fn);
      used[j] = false;
      sel[m] = kUnassigned;
      if (stop) return true;
    }
    return false;
  }

  const InputPattern& pattern_;
  std::vector<std::size_t> domain_;
  std::vector<bool> allowed_;
  std::uint64_t budget_;
  std::uint64_t visited_ = 0;
};

class Oracle {
 public:
  explicit Oracle(const ReactionNetwork& net, std::uint64_t budget = kDefaultEnumerationBudget)
      : net_(net), s_(stoich_matrix(net)), pattern_(input_pattern(net)), budget_(budget) {}

  const ReactionNetwork& network() const noexcept { return net_; }
  const InputPattern& pattern() const noexcept { return pattern_; }

  /// det of S restricted to all metabolite rows and `cols`; order ignored.
  bool minor_nonzero(std::vector<std::size_t> cols) {
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) return false;
    if (cols.size() != s_.rows()) throw std::invalid_argument("minor must be square");
    auto it = cache_.find(cols);
    if (it != cache_.end()) return it->second;
    std::vector<std::size_t> rows(s_.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const bool nz = int_det_bareiss(s_.select(rows, cols)) != 0;
    cache_.emplace(std::move(cols), nz);
    return nz;
  }

  ChildSelectionEnumerator enumerator(std::vector<bool> allowed) const {
    std::vector<std::size_t> domain(net_.num_metabolites());
    for (std::size_t m = 0; m < domain.size(); ++m) domain[m] = m;
    return {pattern_, std::move(domain), std::move(allowed), budget_};
  }
  ChildSelectionEnumerator enumerator(std::vector<std::size_t> domain, std::vector<bool> allowed) const {
    return {pattern_, std::move(domain), std::move(allowed), budget_};
  }

  std::vector<ChildSelection> selections() const { return enumerator(all_reactions()).collect(); }

  /// Some selection J has det S^{J(M)} != 0.
  bool regular() {
    if (!regular_) {
      auto en = enumerator(all_reactions());
      regular_ = en.for_each([&](const ChildSelection& j) { return minor_nonzero(j); });
    }
    return *regular_;
  }

  /// Perturbing reaction `source` changes flux `target`.
  bool flux_influence(std::size_t source, std::size_t target) {
    auto allowed = all_reactions();
    allowed[source] = false;
    auto en = enumerator(std::move(allowed));
    if (source == target) return en.for_each([&](const ChildSelection& j) { return minor_nonzero(j); });
    return en.for_each([&](const ChildSelection& j) {
      auto hit = std::find(j.begin(), j.end(), target);
      if (hit == j.end()) return false;
      ChildSelection swapped = j;
      swapped[std::size_t(hit - j.begin())] = source;
      return minor_nonzero(swapped);
    });
  }

  /// Perturbing reaction `source` changes metabolite `target`.
  bool metabolite_influence(std::size_t source, std::size_t target) {
    auto allowed = all_reactions();
    allowed[source] = false;
    std::vector<std::size_t> domain;
    for (std::size_t m = 0; m < net_.num_metabolites(); ++m)
      if (m != target) domain.push_back(m);
    auto en = enumerator(std::move(domain), std::move(allowed));
    return en.for_each([&](const ChildSelection& j) {
      ChildSelection cols = j;
      cols[target] = source;
      return minor_nonzero(cols);
    });
  }

  /// Rows E then M, columns E. Throws NotRegular.
  InfluenceMatrix matrix() {
    if (!regular()) throw NotRegular();
    const std::size_t e = net_.num_reactions(), m = net_.num_metabolites();
    InfluenceMatrix out(e, m, false);
    for (std::size_t a = 0; a < e; ++a) {
      for (std::size_t b = 0; b < e; ++b) out.set(b, a, flux_influence(a, b));
      for (std::size_t x = 0; x < m; ++x) out.set(e + x, a, metabolite_influence(a, x));
    }
    return out;
  }

 private:
  std::vector<bool> all_reactions() const { return std::vector<bool>(net_.num_reactions(), true); }

  const ReactionNetwork& net_;
  DenseMatrix<std::int64_t> s_;
  InputPattern pattern_;
  std::uint64_t budget_;
  std::map<std::vector<std::size_t>, bool> cache_;
  std::optional<bool> regular_;
};

/// The network plus a feed reaction into `m`; perturbing that feed is the
/// metabolite perturbation of m.
inline ReactionNetwork with_feed(const ReactionNetwork& net, std::size_t m) {
  ReactionNetwork out = net;
  std::string name = "feed." + net.metabolite(m).name;
  while (out.find_reaction(name)) name += "_";
  out.add_reaction(name, {}, {{m, 1}});
  return out;
}

inline bool oracle_regular(const ReactionNetwork& net, std::uint64_t budget = kDefaultEnumerationBudget) {
  return Oracle(net, budget).regular();
}

inline bool oracle_flux_influence(const ReactionNetwork& net, std::size_t source, std::size_t target,
                                  std::uint64_t budget = kDefaultEnumerationBudget) {
  return Oracle(net, budget).flux_influence(source, target);
}

inline bool oracle_metabolite_influence(const ReactionNetwork& net, std::size_t source, std::size_t target,
                                        std::uint64_t budget = kDefaultEnumerationBudget) {
  return Oracle(net, budget).metabolite_influence(source, target);
}

/// Exact influence matrix; extended mode adds metabolite perturbation
/// columns through an auxiliary feed reaction per metabolite.
inline InfluenceMatrix oracle_influence_matrix(const ReactionNetwork& net, bool extended = false,
                                               std::uint64_t budget = kDefaultEnumerationBudget) {
  Oracle base(net, budget);
  const InfluenceMatrix flux_only = base.matrix();
  if (!extended) return flux_only;
  const std::size_t e = net.num_reactions(), m = net.num_metabolites();
  InfluenceMatrix out(e, m, true);
  for (std::size_t r = 0; r < e + m; ++r)
    for (std::size_t c = 0; c < e; ++c) out.set(r, c, flux_only.at(r, c));
  for (std::size_t x = 0; x < m; ++x) {
    const ReactionNetwork fed = with_feed(net, x);
    Oracle o(fed, budget);
    const std::size_t feed = e;
    for (std::size_t b = 0; b < e; ++b) out.set(b, e + x, o.flux_influence(feed, b));
    for (std::size_t y = 0; y < m; ++y) out.set(e + y, e + x, o.metabolite_influence(feed, y));
  }
  return out;
}

}  // namespace influx
