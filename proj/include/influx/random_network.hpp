#pragma once

// Random small networks, generated as text so that the parser is exercised
// and metabolite order is first-appearance order.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "influx/network.hpp"
#include "influx/oracle.hpp"
#include "influx/rng.hpp"

namespace influx {

struct RandomNetworkOptions {
  std::size_t min_metabolites = 1;
  std::size_t max_metabolites = 6;
  std::size_t max_reactions = 9;
  std::int64_t max_coeff = 2;
  bool square = false;
  // No feeds; every reaction has an input whose net coefficient is nonzero.
  bool noncatalytic_mothers = false;
};

inline std::string species_name(std::size_t i) { return std::string(1, char('A' + i)); }

inline std::string random_side(CounterRng& rng, std::size_t m_count, std::size_t terms, std::int64_t max_coeff) {
  std::vector<std::size_t> picked;
  while (picked.size() < terms && picked.size() < m_count) {
    const std::size_t m = rng.below(std::uint64_t(m_count));
    if (std::find(picked.begin(), picked.end(), m) == picked.end()) picked.push_back(m);
  }
  std::string out;
  for (std::size_t m : picked) {
    if (!out.empty()) out += " + ";
    const std::int64_t c = rng.below(std::uint64_t(4)) == 0 ? 1 + std::int64_t(rng.below(std::uint64_t(max_coeff))) : 1;
    if (c != 1) out += std::to_string(c) + " ";
    out += species_name(m);
  }
  return out;
}

inline std::string random_network_text(CounterRng& rng, const RandomNetworkOptions& opt) {
  const std::size_t m_count = opt.min_metabolites + rng.below(std::uint64_t(opt.max_metabolites - opt.min_metabolites + 1));
  const std::size_t e_count = opt.square ? m_count : m_count + rng.below(std::uint64_t(opt.max_reactions - m_count + 1));
  std::string text;
  for (std::size_t j = 0; j < e_count; ++j) {
    const std::uint64_t u = rng.below(std::uint64_t(20));
    std::size_t ins = u < 3 ? 0 : (u < 14 ? 1 : 2);
    if (opt.noncatalytic_mothers && ins == 0) ins = 1;
    const std::uint64_t v = rng.below(std::uint64_t(20));
    const std::size_t outs = v < 4 ? 0 : (v < 15 ? 1 : 2);
    text += "r" + std::to_string(j + 1) + ": " + random_side(rng, m_count, ins, opt.max_coeff) + " -> " +
            random_side(rng, m_count, outs, opt.max_coeff) + "\n";
  }
  return text;
}

inline bool has_noncatalytic_mothers(const ReactionNetwork& net) {
  const auto s = stoich_matrix(net);
  for (const auto& r : net.reactions()) {
    bool ok = false;
    for (const auto& [m, c] : r.inputs) ok = ok || s(m, r.id) != 0;
    if (!ok) return false;
  }
  return true;
}

/// Draws until the network is full rank and meets the options; regularity
/// (checked by the oracle) is required when `regular` is set.
inline ReactionNetwork random_network(CounterRng& rng, const RandomNetworkOptions& opt, bool regular = true) {
  for (;;) {
    const std::string text = random_network_text(rng, opt);
    ReactionNetwork net;
    try {
      net = parse_network(text);
    } catch (const ParseError&) {
      continue;
    }
    if (exact_rank(stoich_matrix(net)) != net.num_metabolites()) continue;
    if (opt.square && net.num_metabolites() != net.num_reactions()) continue;
    if (opt.noncatalytic_mothers && !has_noncatalytic_mothers(net)) continue;
    if (regular && !oracle_regular(net)) continue;
    return net;
  }
}

}  // namespace influx
