// influx: structural sensitivity analysis of reaction networks.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "influx/augment.hpp"
#include "influx/graphkit.hpp"
#include "influx/influence.hpp"
#include "influx/network.hpp"
#include "influx/numcheck.hpp"
#include "influx/oracle.hpp"
#include "influx/random_network.hpp"
#include "influx/report.hpp"

namespace fs = std::filesystem;
using namespace influx;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kParse = 2,
  kRank = 3,
  kDegenerate = 4,
  kBudget = 5,
  kViolation = 6,
  kHardViolation = 7,
  kUsage = 64,
};

struct Options {
  std::uint64_t seed = 0;
  unsigned prime_bits = 127;
  unsigned repeats = 1;
  bool extended = false;
  std::string out_dir = ".";
  std::string format = "all";
  std::uint64_t budget = kDefaultEnumerationBudget;
};

InfluenceConfig influence_config(const Options& o, bool extended) {
  InfluenceConfig c;
  c.seed = o.seed;
  c.prime_bits = o.prime_bits;
  c.repeats = o.repeats;
  c.extended = extended;
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ';'))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_analyze(const std::vector<std::string>& paths, const Options& o) {
  for (const auto& path : paths) {
    const auto net = load_network(path);
    const auto cfg = influence_config(o, o.extended);
    const auto infl = influence_matrix(net, cfg);
    const auto full = metabolite_annotations(infl, condense_and_reduce(infl));
    const auto rep = build_report(net, cfg, infl, full);
    const fs::path dir = paths.size() > 1 ? fs::path(o.out_dir) / fs::path(path).stem() : fs::path(o.out_dir);
    if (o.format == "json" || o.format == "all") write_file(dir / "report.json", dump(to_json(rep)));
    if (o.format == "dot" || o.format == "all") write_file(dir / "graph.dot", to_dot(rep));
    if (o.format == "csv" || o.format == "all") write_file(dir / "heatmap.csv", to_heatmap_csv(rep));
    std::cout << path << ": regular, " << net.num_reactions() << " reactions, " << net.num_metabolites() << " metabolites, "
              << rep.classes.size() << " classes, " << rep.edges.size() << " edges -> " << dir.string() << "\n";
  }
  return kOk;
}

struct VerifyOutcome {
  std::size_t oracle_mismatches = 0;
  std::size_t transitivity = 0;
  std::size_t single_child = 0;
  bool ok() const { return oracle_mismatches + transitivity + single_child == 0; }
};

VerifyOutcome verify_network(const ReactionNetwork& net, const Options& o, std::uint64_t seed, bool inject_fault) {
  VerifyOutcome v;
  auto cfg = influence_config(o, true);
  cfg.seed = seed;
  auto infl = influence_matrix(net, cfg);
  if (inject_fault) infl.set(0, 0, !infl.at(0, 0));
  const auto exact = oracle_influence_matrix(net, true, o.budget);
  for (std::size_t i = 0; i < infl.bits().size(); ++i) v.oracle_mismatches += infl.bits()[i] != exact.bits()[i];
  v.transitivity = transitivity_violations(infl).size();
  for (const auto& sc : single_children(net)) {
    for (std::size_t b = 0; b < net.num_reactions(); ++b) v.single_child += infl.flux(b, sc.reaction);
    for (std::size_t m = 0; m < net.num_metabolites(); ++m) v.single_child += infl.metabolite(m, sc.reaction) != (m == sc.mother);
  }
  return v;
}

int cmd_verify(const std::vector<std::string>& paths, std::size_t random_count, bool inject_fault, const Options& o) {
  std::size_t failed = 0, total = 0;
  auto report = [&](const std::string& label, const VerifyOutcome& v) {
    ++total;
    if (!v.ok()) ++failed;
    std::cout << label << ": " << (v.ok() ? "pass" : "FAIL") << " (oracle mismatches " << v.oracle_mismatches << ", transitivity "
              << v.transitivity << ", single-child " << v.single_child << ")\n";
  };
  for (const auto& path : paths) report(path, verify_network(load_network(path), o, o.seed, inject_fault));
  CounterRng rng = CounterRng(o.seed).split(7);
  for (std::size_t i = 0; i < random_count; ++i) {
    const auto net = random_network(rng, {});
    const auto v = verify_network(net, o, o.seed + i, inject_fault);
    if (!v.ok()) std::cout << to_dsl(net);
    report("random #" + std::to_string(i), v);
  }
  std::cout << (total - failed) << "/" << total << " networks passed\n";
  return failed ? kFailure : kOk;
}

int cmd_compare(const std::string& p0, const std::string& p1, const Options& o) {
  const auto net0 = load_network(p0), net1 = load_network(p1);
  const auto w = is_augmentation(net0, net1, {}, o.budget);
  const auto infl0 = influence_matrix(net0, influence_config(o, o.extended));
  const auto infl1 = influence_matrix(net1, influence_config(o, o.extended));
  const auto rep = check_augmenticity(net0, net1, infl0, infl1, w);
  const auto j = to_json(net0, net1, rep);
  write_file(fs::path(o.out_dir) / "compare.json", dump(j));
  std::cout << p0 << " -> " << p1 << ": " << rep.status() << ", " << rep.violations() << " violations, " << rep.gains.size()
            << " gained influences\n";
  for (const auto& l : rep.lumpings) {
    std::cout << "  lumped class of " << l.members.size() << " reactions absorbs " << l.merged_classes.size() << " classes:";
    for (std::size_t m : l.members) std::cout << " " << net1.reaction(m).name;
    std::cout << "\n";
  }
  return rep.violations() ? kViolation : kOk;
}

int cmd_numcheck(const std::string& path, const NumcheckConfig& ncfg, const Options& o) {
  ncfg.tol.validate();
  const auto net = load_network(path);
  const auto infl = influence_matrix(net, influence_config(o, false));
  const auto sum = run_numcheck(net, infl, ncfg);
  write_file(fs::path(o.out_dir) / "numcheck.json", dump(to_json(sum)));
  write_file(fs::path(o.out_dir) / "numcheck.csv", numcheck_csv(net, sum));
  std::cout << path << ": " << sum.records << " perturbations over " << sum.models << " models, " << sum.hard_violations
            << " hard violations, soft-miss rate " << sum.soft_miss_rate() << ", flux balance failures " << sum.flux_balance_failures
            << "\n";
  if (sum.hard_violations || sum.flux_balance_failures) return kHardViolation;
  return sum.soft_miss_rate() >= ncfg.max_soft_miss_rate ? kFailure : kOk;
}

int cmd_okada(const std::string& path, const std::string& reactions, const std::string& metabolites, std::size_t probes,
              const Options& o) {
  const auto net = load_network(path);
  const auto infl = influence_matrix(net, influence_config(o, false));
  CounterRng prng = CounterRng(o.seed).split(3);
  const BigInt p = random_prime(o.prime_bits, prng);
  nlohmann::json out = nlohmann::json::array();
  std::size_t escaped = 0, passed = 0;
  auto run = [&](const std::vector<std::size_t>& e0, const std::vector<std::size_t>& m0) {
    const auto rep = okada_check(net, e0, m0, infl, p);
    passed += rep.status == OkadaStatus::passed;
    escaped += rep.status == OkadaStatus::passed && !rep.contained();
    out.push_back(to_json(net, e0, m0, rep));
  };
  if (!reactions.empty() || !metabolites.empty()) {
    std::vector<std::size_t> e0, m0;
    for (const auto& n : split_list(reactions)) e0.push_back(net.reaction_id(n));
    for (const auto& n : split_list(metabolites)) m0.push_back(net.metabolite_id(n));
    run(e0, m0);
  }
  CounterRng rng = CounterRng(o.seed).split(4);
  for (std::size_t i = 0; i < probes; ++i) {
    const auto probe = random_okada_probe(net, rng);
    run(probe.reactions, probe.metabolites);
  }
  write_file(fs::path(o.out_dir) / "okada.json", dump(out));
  std::cout << path << ": " << out.size() << " subsets, " << passed << " passed both conditions, " << escaped << " containment violations\n";
  return escaped ? kViolation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural sensitivity analysis of reaction networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Random seed")->envname("INFLUX_SEED");
  app.add_option("--prime-bits", o.prime_bits, "Primes are drawn from [2^b, 2^(b+1))")->check(CLI::Range(8u, 4096u));
  app.add_option("--repeats", o.repeats, "Independent evaluations")->check(CLI::Range(1u, 1000u));
  app.add_flag("--extended", o.extended, "Add metabolite perturbation columns");
  app.add_option("--out-dir", o.out_dir, "Output directory");
  app.add_option("--format", o.format, "Output files")->check(CLI::IsMember({"dot", "json", "csv", "all"}));
  app.add_option("--budget", o.budget, "Child-selection enumeration budget");

  auto* analyze = app.add_subcommand("analyze", "Influence matrix, classes and graph");
  std::vector<std::string> paths;
  analyze->add_option("paths", paths, "Network files")->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "Check the randomized matrix against the exact oracle");
  std::vector<std::string> verify_paths;
  std::size_t random_count = 0;
  bool inject_fault = false;
  verify->add_option("paths", verify_paths, "Network files")->check(CLI::ExistingFile);
  verify->add_option("--random", random_count, "Also verify this many random small networks");
  verify->add_flag("--inject-fault", inject_fault, "Flip one matrix entry before checking");

  auto* compare = app.add_subcommand("compare", "Persistence of influences under augmentation");
  std::string base, augmented;
  compare->add_option("base", base, "Smaller network")->required()->check(CLI::ExistingFile);
  compare->add_option("augmented", augmented, "Larger network")->required()->check(CLI::ExistingFile);

  auto* numcheck = app.add_subcommand("numcheck", "Finite perturbations of random affine models");
  std::string numcheck_path;
  NumcheckConfig ncfg;
  numcheck->add_option("path", numcheck_path, "Network file")->required()->check(CLI::ExistingFile);
  numcheck->add_option("--models", ncfg.models, "Random models");
  numcheck->add_option("--step", ncfg.step, "Perturbation step");
  numcheck->add_option("--tol-zero", ncfg.tol.zero, "Relative zero threshold");
  numcheck->add_option("--tol-nonzero", ncfg.tol.nonzero, "Relative nonzero threshold");

  auto* okada = app.add_subcommand("okada", "Okada upper estimate on subnetworks");
  std::string okada_path, okada_reactions, okada_metabolites;
  std::size_t probes = 0;
  okada->add_option("path", okada_path, "Network file")->required()->check(CLI::ExistingFile);
  okada->add_option("--reactions", okada_reactions, "Reactions of the subnetwork, separated by ';'");
  okada->add_option("--metabolites", okada_metabolites, "Metabolites of the subnetwork, separated by ';'");
  okada->add_option("--probes", probes, "Random subnetwork probes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(paths, o);
    if (*verify) return cmd_verify(verify_paths, random_count, inject_fault, o);
    if (*compare) return cmd_compare(base, augmented, o);
    if (*numcheck) {
      ncfg.seed = o.seed;
      return cmd_numcheck(numcheck_path, ncfg, o);
    }
    if (*okada) return cmd_okada(okada_path, okada_reactions, okada_metabolites, probes, o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const RankDeficient& e) {
    std::cerr << "rank deficient: " << e.what() << "\n";
    return kRank;
  } catch (const StructurallySingular& e) {
    std::cerr << "structural degeneracy: " << e.what() << "\n";
    return kDegenerate;
  } catch (const InconsistentAnnotation& e) {
    std::cerr << "inconsistent influence pattern: " << e.what() << "\n";
    return kDegenerate;
  } catch (const EnumerationBudgetExceeded& e) {
    std::cerr << "enumeration budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const NotRegular& e) {
    std::cerr << "not regular: " << e.what() << "\n";
    return kDegenerate;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
