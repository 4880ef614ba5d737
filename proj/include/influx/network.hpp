#pragma once

// Reaction networks: the line-oriented text format, a JSON mirror, and the
// derived stoichiometric matrix and input pattern.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "influx/errors.hpp"
#include "influx/gf.hpp"
#include "influx/linalg.hpp"

namespace influx {

/// Coefficients keyed by metabolite index.
using Stoichiometry = std::map<std::size_t, std::int64_t>;

struct Metabolite {
  std::size_t id = 0;
  std::string name;
  friend bool operator==(const Metabolite&, const Metabolite&) = default;
};

struct Reaction {
  std::size_t id = 0;
  std::string name;
  Stoichiometry inputs;
  Stoichiometry outputs;

  bool is_feed() const noexcept { return inputs.empty(); }
  bool is_exit() const noexcept { return outputs.empty(); }
  std::int64_t input(std::size_t m) const {
    auto it = inputs.find(m);
    return it == inputs.end() ? 0 : it->second;
  }
  std::int64_t output(std::size_t m) const {
    auto it = outputs.find(m);
    return it == outputs.end() ? 0 : it->second;
  }
  friend bool operator==(const Reaction&, const Reaction&) = default;
};

inline bool valid_species_name(std::string_view s) {
  if (s.empty()) return false;
  bool digits_only = true;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == ',' || c == '.' || c == '-' || c == '_';
    if (!ok) return false;
    if (!std::isdigit(static_cast<unsigned char>(c))) digits_only = false;
  }
  return !digits_only;
}

inline bool valid_reaction_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == ',' || c == '.' || c == '-' || c == '_')) return false;
  return true;
}

class ReactionNetwork {
 public:
  const std::vector<Metabolite>& metabolites() const noexcept { return metabolites_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
  std::size_t num_metabolites() const noexcept { return metabolites_.size(); }
  std::size_t num_reactions() const noexcept { return reactions_.size(); }

  const Metabolite& metabolite(std::size_t m) const { return metabolites_.at(m); }
  const Reaction& reaction(std::size_t j) const { return reactions_.at(j); }

  std::optional<std::size_t> find_metabolite(std::string_view name) const {
    auto it = metabolite_index_.find(std::string(name));
    if (it == metabolite_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find_reaction(std::string_view name) const {
    auto it = reaction_index_.find(std::string(name));
    if (it == reaction_index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t metabolite_id(std::string_view name) const {
    if (auto m = find_metabolite(name)) return *m;
    throw InvalidNetwork("unknown metabolite '" + std::string(name) + "'");
  }
  std::size_t reaction_id(std::string_view name) const {
    if (auto j = find_reaction(name)) return *j;
    throw InvalidNetwork("unknown reaction '" + std::string(name) + "'");
  }

  /// Returns the index of `name`, appending it if new.
  std::size_t add_metabolite(const std::string& name) {
    if (auto m = find_metabolite(name)) return *m;
    if (!valid_species_name(name)) throw InvalidNetwork("invalid metabolite name '" + name + "'");
    const std::size_t id = metabolites_.size();
    metabolites_.push_back({id, name});
    metabolite_index_.emplace(name, id);
    return id;
  }

  std::size_t add_reaction(const std::string& name, Stoichiometry inputs, Stoichiometry outputs) {
    if (!valid_reaction_name(name)) throw InvalidNetwork("invalid reaction name '" + name + "'");
    if (find_reaction(name)) throw InvalidNetwork("duplicate reaction '" + name + "'");
    for (const auto* side : {&inputs, &outputs})
      for (const auto& [m, c] : *side) {
        if (m >= metabolites_.size()) throw InvalidNetwork("reaction '" + name + "' references unknown metabolite");
        if (c < 1) throw InvalidNetwork("reaction '" + name + "' has coefficient < 1");
      }
    const std::size_t id = reactions_.size();
    reactions_.push_back({id, name, std::move(inputs), std::move(outputs)});
    reaction_index_.emplace(name, id);
    return id;
  }

  friend bool operator==(const ReactionNetwork& a, const ReactionNetwork& b) {
    return a.metabolites_ == b.metabolites_ && a.reactions_ == b.reactions_;
  }

 private:
  std::vector<Metabolite> metabolites_;
  std::vector<Reaction> reactions_;
  std::unordered_map<std::string, std::size_t> metabolite_index_;
  std::unordered_map<std::string, std::size_t> reaction_index_;
};

inline void require_nonempty(const ReactionNetwork& net) {
  if (net.num_reactions() == 0) throw InvalidNetwork("network has no reactions");
  if (net.num_metabolites() == 0) throw InvalidNetwork("network has no metabolites");
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool is_integer_token(const std::string& t) {
  std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
  if (i == t.size()) return false;
  for (; i < t.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  return true;
}

using Terms = std::vector<std::pair<std::string, std::int64_t>>;

inline Terms parse_side(std::string_view text, std::size_t line) {
  using K = ParseError::Kind;
  const auto tokens = split_ws(text);
  Terms terms;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::int64_t coeff = 1;
    if (tokens[i] == "+") throw ParseError(K::syntax, line, "unexpected '+'");
    if (is_integer_token(tokens[i])) {
      long long v = 0;
      try {
        v = std::stoll(tokens[i]);
      } catch (const std::out_of_range&) {
        throw ParseError(K::syntax, line, "coefficient out of range: " + tokens[i]);
      }
      if (v <= 0) throw ParseError(K::non_positive_coefficient, line, "coefficient must be positive: " + tokens[i]);
      coeff = v;
      ++i;
      if (i == tokens.size() || tokens[i] == "+")
        throw ParseError(K::syntax, line, "coefficient without metabolite (bare integers are not metabolite names)");
    }
    const std::string& name = tokens[i];
    if (!valid_species_name(name)) throw ParseError(K::syntax, line, "invalid metabolite name '" + name + "'");
    terms.emplace_back(name, coeff);
    ++i;
    if (i < tokens.size()) {
      if (tokens[i] != "+") throw ParseError(K::syntax, line, "expected '+' before '" + tokens[i] + "'");
      ++i;
      if (i == tokens.size()) throw ParseError(K::syntax, line, "trailing '+'");
    }
  }
  return terms;
}

inline Stoichiometry intern(ReactionNetwork& net, const Terms& terms) {
  Stoichiometry s;
  for (const auto& [name, c] : terms) s[net.add_metabolite(name)] += c;
  return s;
}

}  // namespace detail

/// Parses the text format. One reaction per line, `name: lhs -> rhs`,
/// `#` starts a comment line, `<->` expands to reactions `name`a and `name`b.
inline ReactionNetwork parse_network(std::string_view text) {
  using K = ParseError::Kind;
  ReactionNetwork net;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(K::syntax, line_no, "missing ':' after reaction name");
    const auto name_tokens = detail::split_ws(line.substr(0, colon));
    if (name_tokens.size() != 1 || !valid_reaction_name(name_tokens[0]))
      throw ParseError(K::syntax, line_no, "invalid reaction name");
    const std::string name = name_tokens[0];
    std::string_view body = line.substr(colon + 1);

    bool reversible = false;
    std::size_t arrow = body.find("<->");
    std::size_t arrow_len = 3;
    if (arrow != std::string_view::npos) {
      reversible = true;
    } else {
      arrow = body.find("->");
      arrow_len = 2;
    }
    if (arrow == std::string_view::npos) throw ParseError(K::syntax, line_no, "missing '->'");
    if (body.find("->", arrow + arrow_len) != std::string_view::npos) throw ParseError(K::syntax, line_no, "more than one arrow");

    const auto lhs = detail::parse_side(body.substr(0, arrow), line_no);
    const auto rhs = detail::parse_side(body.substr(arrow + arrow_len), line_no);

    const std::vector<std::string> names = reversible ? std::vector<std::string>{name + "a", name + "b"} : std::vector<std::string>{name};
    for (const auto& n : names)
      if (net.find_reaction(n)) throw ParseError(K::duplicate_reaction, line_no, "duplicate reaction '" + n + "'");

    Stoichiometry in = detail::intern(net, lhs);
    Stoichiometry out = detail::intern(net, rhs);
    if (reversible) {
      net.add_reaction(names[0], in, out);
      net.add_reaction(names[1], out, in);
    } else {
      net.add_reaction(name, std::move(in), std::move(out));
    }
    if (end == text.size()) break;
  }
  if (net.num_reactions() == 0) throw ParseError(K::syntax, 0, "no reactions");
  if (net.num_metabolites() == 0) throw ParseError(K::syntax, 0, "no metabolites");
  return net;
}

namespace detail {

inline std::string side_to_dsl(const ReactionNetwork& net, const Stoichiometry& s) {
  std::string out;
  for (const auto& [m, c] : s) {
    if (!out.empty()) out += " + ";
    if (c != 1) out += std::to_string(c) + " ";
    out += net.metabolite(m).name;
  }
  return out;
}

}  // namespace detail

inline std::string to_dsl(const ReactionNetwork& net) {
  std::string out;
  for (const auto& r : net.reactions()) {
    out += r.name + ":";
    const std::string lhs = detail::side_to_dsl(net, r.inputs);
    const std::string rhs = detail::side_to_dsl(net, r.outputs);
    if (!lhs.empty()) out += " " + lhs;
    out += " ->";
    if (!rhs.empty()) out += " " + rhs;
    out += "\n";
  }
  return out;
}

inline nlohmann::json to_json(const ReactionNetwork& net) {
  nlohmann::json j;
  j["metabolites"] = nlohmann::json::array();
  for (const auto& m : net.metabolites()) j["metabolites"].push_back(m.name);
  j["reactions"] = nlohmann::json::array();
  for (const auto& r : net.reactions()) {
    nlohmann::json in = nlohmann::json::object(), out = nlohmann::json::object();
    for (const auto& [m, c] : r.inputs) in[net.metabolite(m).name] = c;
    for (const auto& [m, c] : r.outputs) out[net.metabolite(m).name] = c;
    j["reactions"].push_back({{"name", r.name}, {"inputs", in}, {"outputs", out}});
  }
  return j;
}

inline ReactionNetwork network_from_json(const nlohmann::json& j) {
  using K = ParseError::Kind;
  auto fail = [](const std::string& what) { return ParseError(K::schema, 0, what); };
  if (!j.is_object() || !j.contains("reactions") || !j["reactions"].is_array()) throw fail("expected object with 'reactions' array");
  ReactionNetwork net;
  if (j.contains("metabolites")) {
    if (!j["metabolites"].is_array()) throw fail("'metabolites' must be an array");
    for (const auto& m : j["metabolites"]) {
      if (!m.is_string()) throw fail("metabolite names must be strings");
      const std::string name = m.get<std::string>();
      if (!valid_species_name(name)) throw fail("invalid metabolite name '" + name + "'");
      if (net.find_metabolite(name)) throw fail("duplicate metabolite '" + name + "'");
      net.add_metabolite(name);
    }
  }
  for (const auto& r : j["reactions"]) {
    if (!r.is_object() || !r.contains("name") || !r["name"].is_string()) throw fail("reaction needs a string 'name'");
    const std::string name = r["name"].get<std::string>();
    if (!valid_reaction_name(name)) throw fail("invalid reaction name '" + name + "'");
    if (net.find_reaction(name)) throw ParseError(K::duplicate_reaction, 0, "duplicate reaction '" + name + "'");
    Stoichiometry sides[2];
    const char* keys[2] = {"inputs", "outputs"};
    for (int s = 0; s < 2; ++s) {
      if (!r.contains(keys[s])) continue;
      const auto& obj = r[keys[s]];
      if (!obj.is_object()) throw fail(std::string("'") + keys[s] + "' must be an object");
      for (const auto& [mname, c] : obj.items()) {
        if (!c.is_number_integer()) throw fail("coefficient of '" + mname + "' must be an integer");
        const auto v = c.get<std::int64_t>();
        if (v <= 0) throw ParseError(K::non_positive_coefficient, 0, "coefficient must be positive in '" + name + "'");
        if (!valid_species_name(mname)) throw fail("invalid metabolite name '" + mname + "'");
        sides[s][net.add_metabolite(mname)] += v;
      }
    }
    net.add_reaction(name, std::move(sides[0]), std::move(sides[1]));
  }
  if (net.num_reactions() == 0 || net.num_metabolites() == 0) throw fail("network needs at least one reaction and one metabolite");
  return net;
}

inline ReactionNetwork parse_network_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(ParseError::Kind::syntax, 0, e.what());
  }
  return network_from_json(j);
}

/// Reads a network file; `.json` selects the JSON mirror.
inline ReactionNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return json ? parse_network_json(ss.str()) : parse_network(ss.str());
}

/// M x E integer matrix, S(m, j) = output - input coefficient.
inline DenseMatrix<std::int64_t> stoich_matrix(const ReactionNetwork& net) {
  DenseMatrix<std::int64_t> s(net.num_metabolites(), net.num_reactions(), 0);
  for (const auto& r : net.reactions()) {
    for (const auto& [m, c] : r.outputs) s(m, r.id) += c;
    for (const auto& [m, c] : r.inputs) s(m, r.id) -= c;
  }
  return s;
}

struct InputPattern {
  std::vector<std::vector<std::size_t>> children;  // per metabolite, ascending reactions
  std::vector<std::vector<std::size_t>> inputs;    // per reaction, ascending metabolites
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (m, j), by j then m

  bool contains(std::size_t m, std::size_t j) const {
    return std::binary_search(inputs.at(j).begin(), inputs.at(j).end(), m);
  }
  std::size_t size() const noexcept { return edges.size(); }
};

inline InputPattern input_pattern(const ReactionNetwork& net) {
  InputPattern p;
  p.children.resize(net.num_metabolites());
  p.inputs.resize(net.num_reactions());
  for (const auto& r : net.reactions())
    for (const auto& [m, c] : r.inputs) {
      p.inputs[r.id].push_back(m);
      p.children[m].push_back(r.id);
      p.edges.emplace_back(m, r.id);
    }
  return p;
}

struct SingleChild {
  std::size_t reaction;
  std::size_t mother;
  friend bool operator==(const SingleChild&, const SingleChild&) = default;
  friend auto operator<=>(const SingleChild&, const SingleChild&) = default;
};

/// All pairs (j, m) where j is the only child of m; sorted.
inline std::vector<SingleChild> single_children(const ReactionNetwork& net) {
  const auto p = input_pattern(net);
  std::vector<SingleChild> out;
  for (std::size_t m = 0; m < p.children.size(); ++m)
    if (p.children[m].size() == 1) out.push_back({p.children[m][0], m});
  std::sort(out.begin(), out.end());
  return out;
}

struct RankReport {
  std::size_t rank = 0;
  std::size_t metabolites = 0;
  bool exact = false;  // fraction-free rank over Q instead of rank mod p
  bool full() const noexcept { return rank == metabolites; }
};

inline constexpr std::size_t kExactRankLimit = 64;

/// Rank of S; exact when E + M <= 64, otherwise modulo p.
inline RankReport stoich_rank(const ReactionNetwork& net, const BigInt& p) {
  const auto s = stoich_matrix(net);
  RankReport rep;
  rep.metabolites = net.num_metabolites();
  if (net.num_reactions() + net.num_metabolites() <= kExactRankLimit) {
    rep.rank = exact_rank(s);
    rep.exact = true;
  } else {
    rep.rank = with_prime_field(p, [&](const auto& f) { return rank(f, to_field(f, s)); });
  }
  return rep;
}

/// Throws RankDeficient unless rank S = M.
inline RankReport validate_full_rank(const ReactionNetwork& net, const BigInt& p) {
  require_nonempty(net);
  auto rep = stoich_rank(net, p);
  if (!rep.full()) throw RankDeficient(rep.rank, rep.metabolites);
  return rep;
}

}  // namespace influx
