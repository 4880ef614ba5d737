#pragma once

// Analysis report (JSON, schema v1), influence graph DOT export, heatmap CSV,
// and JSON renderings of comparison, Okada and numcheck results.

#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "influx/augment.hpp"
#include "influx/graphkit.hpp"
#include "influx/influence.hpp"
#include "influx/network.hpp"
#include "influx/numcheck.hpp"

namespace influx {

inline constexpr const char* kReportSchema = "v1";

inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string network_digest(const ReactionNetwork& net) { return "fnv1a64:" + fnv1a_hex(to_dsl(net)); }

struct Named {
  std::size_t index = 0;
  std::string name;
  friend bool operator==(const Named&, const Named&) = default;
};

struct ReportClass {
  std::vector<Named> members;
  bool self_influential = false;
  std::vector<Named> direct;
  std::vector<Named> indirect;
  friend bool operator==(const ReportClass&, const ReportClass&) = default;
};

struct ReportReaction {
  Named reaction;
  std::size_t class_index = 0;
  std::vector<Named> influenced_reactions;
  std::vector<Named> influenced_metabolites;
  friend bool operator==(const ReportReaction&, const ReportReaction&) = default;
};

struct AnalysisReport {
  std::string schema = kReportSchema;
  std::string digest;
  std::vector<std::string> reactions;
  std::vector<std::string> metabolites;
  std::uint64_t seed = 0;
  unsigned prime_bits = 127;
  unsigned repeats = 1;
  bool extended = false;
  bool regular = false;
  std::vector<std::string> primes;
  double false_zero_bound = 0;
  std::vector<std::vector<int>> matrix;  // rows reactions then metabolites
  std::vector<ReportClass> classes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<ReportReaction> sets;
  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

namespace detail {

inline std::vector<Named> named(const std::vector<std::size_t>& ids, const std::vector<std::string>& names) {
  std::vector<Named> out;
  for (std::size_t i : ids) out.push_back({i, names.at(i)});
  return out;
}

inline std::vector<std::string> reaction_names(const ReactionNetwork& net) {
  std::vector<std::string> out;
  for (const auto& r : net.reactions()) out.push_back(r.name);
  return out;
}

inline std::vector<std::string> metabolite_names(const ReactionNetwork& net) {
  std::vector<std::string> out;
  for (const auto& m : net.metabolites()) out.push_back(m.name);
  return out;
}

inline nlohmann::json to_json(const Named& n) { return {{"index", n.index}, {"name", n.name}}; }

inline nlohmann::json to_json(const std::vector<Named>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& n : v) a.push_back(to_json(n));
  return a;
}

inline Named named_from_json(const nlohmann::json& j) { return {j.at("index").get<std::size_t>(), j.at("name").get<std::string>()}; }

inline std::vector<Named> named_list_from_json(const nlohmann::json& j) {
  std::vector<Named> out;
  for (const auto& e : j) out.push_back(named_from_json(e));
  return out;
}

}  // namespace detail

inline AnalysisReport build_report(const ReactionNetwork& net, const InfluenceConfig& cfg, const InfluenceMatrix& infl,
                                   const FullInfluenceGraph& full) {
  AnalysisReport rep;
  rep.digest = network_digest(net);
  rep.reactions = detail::reaction_names(net);
  rep.metabolites = detail::metabolite_names(net);
  rep.seed = cfg.seed;
  rep.prime_bits = cfg.prime_bits;
  rep.repeats = cfg.repeats;
  rep.extended = cfg.extended;
  rep.regular = true;
  rep.primes = infl.primes;
  rep.false_zero_bound = infl.false_zero_bound;
  rep.matrix.assign(infl.rows(), std::vector<int>(infl.cols(), 0));
  for (std::size_t r = 0; r < infl.rows(); ++r)
    for (std::size_t c = 0; c < infl.cols(); ++c) rep.matrix[r][c] = infl.at(r, c) ? 1 : 0;
  const auto& g = full.graph;
  for (std::size_t c = 0; c < g.classes.size(); ++c) {
    ReportClass rc;
    rc.members = detail::named(g.classes[c].members, rep.reactions);
    rc.self_influential = g.classes[c].self_influential;
    rc.direct = detail::named(full.annotations[c].direct, rep.metabolites);
    rc.indirect = detail::named(full.annotations[c].indirect, rep.metabolites);
    rep.classes.push_back(std::move(rc));
  }
  rep.edges = g.edges;
  for (std::size_t j = 0; j < net.num_reactions(); ++j) {
    const auto sets = influence_sets(full, j);
    rep.sets.push_back({{j, rep.reactions[j]}, g.class_of[j], detail::named(sets.reactions, rep.reactions),
                        detail::named(sets.metabolites, rep.metabolites)});
  }
  return rep;
}

inline nlohmann::json to_json(const AnalysisReport& rep) {
  using nlohmann::json;
  json j;
  j["schema"] = rep.schema;
  j["network"] = {{"digest", rep.digest}, {"reactions", rep.reactions}, {"metabolites", rep.metabolites}};
  j["config"] = {{"seed", rep.seed}, {"prime_bits", rep.prime_bits}, {"repeats", rep.repeats}, {"extended", rep.extended}};
  j["regular"] = rep.regular;
  j["primes"] = rep.primes;
  j["false_zero_bound"] = rep.false_zero_bound;
  json rows = json::array(), cols = json::array();
  for (std::size_t i = 0; i < rep.reactions.size(); ++i) rows.push_back({{"index", i}, {"kind", "reaction"}, {"name", rep.reactions[i]}});
  for (std::size_t i = 0; i < rep.metabolites.size(); ++i)
    rows.push_back({{"index", rep.reactions.size() + i}, {"kind", "metabolite"}, {"name", rep.metabolites[i]}});
  const std::size_t ncols = rep.matrix.empty() ? 0 : rep.matrix[0].size();
  for (std::size_t i = 0; i < ncols; ++i) cols.push_back(rows[i]);
  j["influence"] = {{"rows", rows}, {"columns", cols}, {"matrix", rep.matrix}};
  json classes = json::array();
  for (std::size_t c = 0; c < rep.classes.size(); ++c) {
    const auto& rc = rep.classes[c];
    classes.push_back({{"index", c},
                       {"members", detail::to_json(rc.members)},
                       {"self_influential", rc.self_influential},
                       {"direct_metabolites", detail::to_json(rc.direct)},
                       {"indirect_metabolites", detail::to_json(rc.indirect)}});
  }
  j["classes"] = classes;
  json edges = json::array();
  for (const auto& [a, b] : rep.edges) edges.push_back({{"from", a}, {"to", b}});
  j["edges"] = edges;
  json sets = json::array();
  for (const auto& s : rep.sets)
    sets.push_back({{"index", s.reaction.index},
                    {"name", s.reaction.name},
                    {"class", s.class_index},
                    {"influenced_reactions", detail::to_json(s.influenced_reactions)},
                    {"influenced_metabolites", detail::to_json(s.influenced_metabolites)}});
  j["reactions"] = sets;
  return j;
}

/// Inverse of to_json; throws ParseError on schema problems.
inline AnalysisReport report_from_json(const nlohmann::json& j) {
  try {
    AnalysisReport rep;
    rep.schema = j.at("schema").get<std::string>();
    if (rep.schema != kReportSchema) throw ParseError(ParseError::Kind::schema, 0, "unsupported report schema '" + rep.schema + "'");
    const auto& net = j.at("network");
    rep.digest = net.at("digest").get<std::string>();
    rep.reactions = net.at("reactions").get<std::vector<std::string>>();
    rep.metabolites = net.at("metabolites").get<std::vector<std::string>>();
    const auto& cfg = j.at("config");
    rep.seed = cfg.at("seed").get<std::uint64_t>();
    rep.prime_bits = cfg.at("prime_bits").get<unsigned>();
    rep.repeats = cfg.at("repeats").get<unsigned>();
    rep.extended = cfg.at("extended").get<bool>();
    rep.regular = j.at("regular").get<bool>();
    rep.primes = j.at("primes").get<std::vector<std::string>>();
    rep.false_zero_bound = j.at("false_zero_bound").get<double>();
    rep.matrix = j.at("influence").at("matrix").get<std::vector<std::vector<int>>>();
    for (const auto& c : j.at("classes"))
      rep.classes.push_back({detail::named_list_from_json(c.at("members")), c.at("self_influential").get<bool>(),
                             detail::named_list_from_json(c.at("direct_metabolites")),
                             detail::named_list_from_json(c.at("indirect_metabolites"))});
    for (const auto& e : j.at("edges")) rep.edges.emplace_back(e.at("from").get<std::size_t>(), e.at("to").get<std::size_t>());
    for (const auto& s : j.at("reactions"))
      rep.sets.push_back({{s.at("index").get<std::size_t>(), s.at("name").get<std::string>()}, s.at("class").get<std::size_t>(),
                          detail::named_list_from_json(s.at("influenced_reactions")),
                          detail::named_list_from_json(s.at("influenced_metabolites"))});
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ParseError::Kind::schema, 0, std::string("malformed report: ") + e.what());
  }
}

namespace detail {

inline std::string record_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '{' || c == '}' || c == '|' || c == '<' || c == '>' || c == '"' || c == '\\' || c == ' ') out += '\\';
    out += c;
  }
  return out;
}

inline std::string class_title(const ReportClass& c) {
  if (c.members.size() == 1) return record_escape(c.members[0].name);
  std::string s = "⟨";
  for (std::size_t i = 0; i < c.members.size(); ++i) s += (i ? "," : "") + record_escape(c.members[i].name);
  return s + "⟩";
}

inline std::string class_field(const ReportClass& c) {
  std::string s = "{" + class_title(c) + "|\\{";
  for (std::size_t i = 0; i < c.direct.size(); ++i) s += (i ? "," : "") + record_escape(c.direct[i].name);
  return s + "\\}}";
}

}  // namespace detail

/// Full influence graph: one record per class with members on top and the
/// direct metabolites below. Self-influential singletons are set in bold.
/// Two or more sinks hanging only off the same class, none of them
/// self-influential, are drawn as one multi-column record.
inline std::string to_dot(const AnalysisReport& rep) {
  const std::size_t k = rep.classes.size();
  std::vector<std::vector<std::size_t>> preds(k), succs(k);
  for (const auto& [a, b] : rep.edges) {
    succs[a].push_back(b);
    preds[b].push_back(a);
  }
  std::vector<std::size_t> level(k, 0);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t p : preds[c]) level[c] = std::max(level[c], level[p] + 1);

  std::map<std::size_t, std::vector<std::size_t>> groups;  // parent -> coalesced sinks
  for (std::size_t c = 0; c < k; ++c)
    if (succs[c].empty() && preds[c].size() == 1 && !rep.classes[c].self_influential) groups[preds[c][0]].push_back(c);
  std::vector<bool> grouped(k, false);
  for (auto it = groups.begin(); it != groups.end();) {
    if (it->second.size() < 2) {
      it = groups.erase(it);
      continue;
    }
    for (std::size_t c : it->second) grouped[c] = true;
    ++it;
  }

  std::ostringstream out;
  out << "digraph influence {\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=record, fontname=\"Helvetica\"];\n";
  for (std::size_t c = 0; c < k; ++c) {
    if (grouped[c]) continue;
    const auto& cls = rep.classes[c];
    out << "  c" << c << " [label=\"" << detail::class_field(cls) << "\"";
    if (cls.members.size() == 1 && cls.self_influential) out << ", fontname=\"Helvetica-Bold\"";
    out << "];\n";
  }
  for (const auto& [parent, sinks] : groups) {
    out << "  g" << parent << " [label=\"";
    for (std::size_t i = 0; i < sinks.size(); ++i) out << (i ? "|" : "") << detail::class_field(rep.classes[sinks[i]]);
    out << "\"];\n";
  }
  for (const auto& [a, b] : rep.edges) {
    if (grouped[b]) continue;
    out << "  c" << a << " -> c" << b << ";\n";
  }
  for (const auto& [parent, sinks] : groups) out << "  c" << parent << " -> g" << parent << ";\n";
  std::map<std::size_t, std::vector<std::size_t>> by_level;
  for (std::size_t c = 0; c < k; ++c)
    if (!grouped[c]) by_level[level[c]].push_back(c);
  for (const auto& [lvl, cs] : by_level) {
    if (cs.size() < 2) continue;
    out << "  { rank=same;";
    for (std::size_t c : cs) out << " c" << c << ";";
    out << " }\n";
  }
  out << "}\n";
  return out.str();
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

/// Rows reactions then metabolites, columns the perturbations; cells 0/1.
inline std::string to_heatmap_csv(const AnalysisReport& rep) {
  std::ostringstream out;
  std::vector<std::string> rows = rep.reactions;
  rows.insert(rows.end(), rep.metabolites.begin(), rep.metabolites.end());
  out << "row";
  const std::size_t ncols = rep.matrix.empty() ? 0 : rep.matrix[0].size();
  for (std::size_t c = 0; c < ncols; ++c) out << "," << detail::csv_field(rows[c]);
  out << "\n";
  for (std::size_t r = 0; r < rep.matrix.size(); ++r) {
    out << detail::csv_field(rows[r]);
    for (int v : rep.matrix[r]) out << "," << v;
    out << "\n";
  }
  return out.str();
}

namespace detail {

inline std::string index_name(const ReactionNetwork& net, std::size_t idx) {
  return idx < net.num_reactions() ? net.reaction(idx).name : net.metabolite(idx - net.num_reactions()).name;
}

inline nlohmann::json names_of_reactions(const ReactionNetwork& net, const std::vector<std::size_t>& ids) {
  nlohmann::json a = nlohmann::json::array();
  for (std::size_t j : ids) a.push_back(net.reaction(j).name);
  return a;
}

}  // namespace detail

inline nlohmann::json to_json(const ReactionNetwork& net0, const ReactionNetwork& net1, const AugmenticityReport& rep) {
  using nlohmann::json;
  const auto& w = rep.witness;
  json j;
  j["schema"] = kReportSchema;
  j["networks"] = {network_digest(net0), network_digest(net1)};
  j["status"] = rep.status();
  j["hypothesis_verified"] = rep.hypothesis_verified;
  json new_m = json::array();
  for (std::size_t m : w.new_metabolites) new_m.push_back(net1.metabolite(m).name);
  j["new_metabolites"] = new_m;
  j["new_reactions"] = detail::names_of_reactions(net1, w.new_reactions);
  if (w.partial_selection) {
    json sel = json::object();
    for (std::size_t m : w.new_metabolites) sel[net1.metabolite(m).name] = net1.reaction((*w.partial_selection)[m]).name;
    j["partial_selection"] = {{"children", sel}, {"determinant", w.partial_det.str()}};
  } else {
    j["partial_selection"] = nullptr;
  }
  auto entries = [&](const std::vector<InfluenceEntry>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back({{"perturbed", detail::index_name(net0, e.col)}, {"responding", detail::index_name(net0, e.row)}});
    return a;
  };
  j["violations"] = rep.hypothesis_verified ? entries(rep.losses) : json::array();
  j["informational_losses"] = rep.hypothesis_verified ? json::array() : entries(rep.losses);
  j["gains"] = entries(rep.gains);
  json lump = json::array();
  for (const auto& l : rep.lumpings) {
    json merged = json::array();
    for (const auto& c : l.merged_classes) merged.push_back(detail::names_of_reactions(net0, c));
    lump.push_back({{"class", detail::names_of_reactions(net1, l.members)}, {"size", l.members.size()}, {"merged", merged}});
  }
  j["lumpings"] = lump;
  return j;
}

inline nlohmann::json to_json(const ReactionNetwork& net, const std::vector<std::size_t>& e0, const std::vector<std::size_t>& m0,
                              const OkadaReport& rep) {
  using nlohmann::json;
  json j;
  j["reactions"] = detail::names_of_reactions(net, e0);
  json ms = json::array();
  for (std::size_t m : m0) ms.push_back(net.metabolite(m).name);
  j["metabolites"] = ms;
  j["status"] = to_string(rep.status);
  if (rep.witness)
    j["witness"] = {{"metabolite", net.metabolite(rep.witness->first).name}, {"reaction", net.reaction(rep.witness->second).name}};
  j["dimension_defect"] = rep.dimension_defect;
  if (rep.status == OkadaStatus::passed) {
    j["contained"] = rep.contained();
    j["strict"] = rep.strict;
    j["escaped_reactions"] = detail::names_of_reactions(net, rep.escaped_reactions);
    json em = json::array();
    for (std::size_t m : rep.escaped_metabolites) em.push_back(net.metabolite(m).name);
    j["escaped_metabolites"] = em;
  }
  return j;
}

inline nlohmann::json to_json(const NumcheckSummary& s) {
  return {{"models", s.models},
          {"records", s.records},
          {"entries", s.entries},
          {"structural_nonzeros", s.structural_nonzeros},
          {"hard_violations", s.hard_violations},
          {"soft_misses", s.soft_misses},
          {"soft_miss_rate", s.soft_miss_rate()},
          {"flux_balance_failures", s.flux_balance_failures},
          {"max_relative_imbalance", s.max_relative_imbalance}};
}

/// One line per classified entry.
inline std::string numcheck_csv(const ReactionNetwork& net, const NumcheckSummary& s) {
  std::ostringstream out;
  out << "model,perturbed,kind,responding,value,structural,observed\n";
  char buf[32];
  for (std::size_t i = 0; i < s.checks.size(); ++i) {
    const auto& c = s.checks[i];
    const bool is_reaction = c.row < net.num_reactions();
    std::snprintf(buf, sizeof buf, "%.6e", c.value);
    out << s.model_of[i] << "," << detail::csv_field(net.reaction(c.column).name) << "," << (is_reaction ? "reaction" : "metabolite")
        << "," << detail::csv_field(detail::index_name(net, c.row)) << "," << buf << "," << (c.structural ? 1 : 0) << ","
        << to_string(c.observed) << "\n";
  }
  return out.str();
}

}  // namespace influx
