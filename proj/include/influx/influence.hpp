#pragma once

// The block matrix B = [[-I, R], [S, 0]] with random rate entries, and the
// boolean zero pattern of its inverse.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "influx/errors.hpp"
#include "influx/gf.hpp"
#include "influx/linalg.hpp"
#include "influx/network.hpp"
#include "influx/rng.hpp"

namespace influx {

struct InfluenceConfig {
  std::uint64_t seed = 0;
  unsigned prime_bits = 127;
  unsigned repeats = 1;
  bool extended = false;
  unsigned max_retries = 8;
  unsigned switch_prime_after = 4;

  void validate() const {
    if (prime_bits < 8) throw ConfigError("prime_bits must be >= 8");
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    if (max_retries < 1) throw ConfigError("max_retries must be >= 1");
    if (switch_prime_after < 1) throw ConfigError("switch_prime_after must be >= 1");
  }
};

/// Rate values aligned with InputPattern::edges.
template <PrimeField F>
using RateSample = std::vector<typename F::value_type>;

template <PrimeField F>
RateSample<F> sample_rates(const F& f, const InputPattern& pattern, CounterRng& rng) {
  RateSample<F> out;
  out.reserve(pattern.edges.size());
  for (std::size_t i = 0; i < pattern.edges.size(); ++i) out.push_back(f.random_nonzero(rng));
  return out;
}

/// (E+M) x (E+M); reactions first, then metabolites.
template <PrimeField F>
FieldMatrix<F> assemble_b(const F& f, const DenseMatrix<std::int64_t>& s, const InputPattern& pattern, const RateSample<F>& rates) {
  const std::size_t m_count = s.rows(), e_count = s.cols(), n = e_count + m_count;
  FieldMatrix<F> b(n, n, f.zero());
  const auto minus_one = f.neg(f.one());
  for (std::size_t j = 0; j < e_count; ++j) b(j, j) = minus_one;
  for (std::size_t k = 0; k < pattern.edges.size(); ++k) {
    const auto [m, j] = pattern.edges[k];
    b(j, e_count + m) = rates[k];
  }
  for (std::size_t m = 0; m < m_count; ++m)
    for (std::size_t j = 0; j < e_count; ++j)
      if (s(m, j) != 0) b(e_count + m, j) = f.from_int(s(m, j));
  return b;
}

/// The M x M product S R.
template <PrimeField F>
FieldMatrix<F> assemble_sr(const F& f, const DenseMatrix<std::int64_t>& s, const InputPattern& pattern, const RateSample<F>& rates) {
  const std::size_t m_count = s.rows();
  FieldMatrix<F> sr(m_count, m_count, f.zero());
  for (std::size_t k = 0; k < pattern.edges.size(); ++k) {
    const auto [mc, j] = pattern.edges[k];
    for (std::size_t mr = 0; mr < m_count; ++mr)
      if (s(mr, j) != 0) sr(mr, mc) = f.add(sr(mr, mc), f.mul(f.from_int(s(mr, j)), rates[k]));
  }
  return sr;
}

class InfluenceMatrix {
 public:
  InfluenceMatrix() = default;
  InfluenceMatrix(std::size_t reactions, std::size_t metabolites, bool extended)
      : e_(reactions), m_(metabolites), extended_(extended), bits_((reactions + metabolites) * (extended ? reactions + metabolites : reactions), 0) {}

  std::size_t num_reactions() const noexcept { return e_; }
  std::size_t num_metabolites() const noexcept { return m_; }
  bool extended() const noexcept { return extended_; }
  /// Rows: reactions 0..E-1 then metabolites E..E+M-1.
  std::size_t rows() const noexcept { return e_ + m_; }
  /// Columns: reactions, then metabolites in extended mode.
  std::size_t cols() const noexcept { return extended_ ? e_ + m_ : e_; }

  bool at(std::size_t row, std::size_t col) const { return bits_.at(row * cols() + col) != 0; }
  void set(std::size_t row, std::size_t col, bool v = true) { bits_.at(row * cols() + col) = v ? 1 : 0; }

  /// Perturbing reaction `source` changes flux `target`.
  bool flux(std::size_t target, std::size_t source) const { return at(target, source); }
  /// Perturbing reaction `source` changes concentration `target`.
  bool metabolite(std::size_t target, std::size_t source) const { return at(e_ + target, source); }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  std::vector<std::string> primes;  // decimal
  unsigned evaluations = 0;
  double false_zero_bound = 0;      // per zero entry, across all evaluations

  bool same_pattern(const InfluenceMatrix& o) const {
    return e_ == o.e_ && m_ == o.m_ && extended_ == o.extended_ && bits_ == o.bits_;
  }

 private:
  std::size_t e_ = 0, m_ = 0;
  bool extended_ = false;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

// Pulls successive primes from one stream, so retries and repeats stay
// reproducible.
class PrimeSource {
 public:
  PrimeSource(unsigned bits, CounterRng rng) : bits_(bits), rng_(rng) {}
  BigInt next() {
    BigInt p = random_prime(bits_, rng_);
    distinct_.insert(p);
    return p;
  }
  std::size_t distinct() const noexcept { return distinct_.size(); }

 private:
  unsigned bits_;
  CounterRng rng_;
  std::set<BigInt> distinct_;
};

// Keeps drawing rate samples until `attempt` accepts one; switches prime
// every `switch_prime_after` failures, throws after `max_retries`.
template <class Attempt>
BigInt sample_until(const InfluenceConfig& cfg, PrimeSource& primes, CounterRng& rng, Attempt&& attempt) {
  BigInt p = primes.next();
  for (unsigned failures = 0;;) {
    const bool ok = with_prime_field(p, [&](const auto& f) { return attempt(f, rng); });
    if (ok) return p;
    ++failures;
    if (failures >= cfg.max_retries) throw StructurallySingular(failures, primes.distinct());
    if (failures % cfg.switch_prime_after == 0) p = primes.next();
  }
}

inline CounterRng rank_stream(const CounterRng& root) { return root.split(0xffffffffffffffffULL); }

}  // namespace detail

/// Zero pattern of B^-1 from `repeats` independent (prime, sample) draws.
inline InfluenceMatrix influence_matrix(const ReactionNetwork& net, const InfluenceConfig& cfg) {
  cfg.validate();
  const CounterRng root(cfg.seed);
  {
    CounterRng rr = detail::rank_stream(root);
    validate_full_rank(net, random_prime(cfg.prime_bits, rr));
  }
  const auto s = stoich_matrix(net);
  const auto pattern = input_pattern(net);
  const std::size_t e = net.num_reactions(), m = net.num_metabolites();
  InfluenceMatrix out(e, m, cfg.extended);
  double bound = 1;
  for (unsigned rep = 0; rep < cfg.repeats; ++rep) {
    const CounterRng stream = root.split(rep);
    detail::PrimeSource primes(cfg.prime_bits, stream.split(1));
    CounterRng rng = stream.split(2);
    const BigInt p = detail::sample_until(cfg, primes, rng, [&](const auto& f, CounterRng& r) {
      const auto rates = sample_rates(f, pattern, r);
      const auto inv = try_invert(f, assemble_b(f, s, pattern, rates));
      if (!inv) return false;
      for (std::size_t row = 0; row < out.rows(); ++row)
        for (std::size_t col = 0; col < out.cols(); ++col)
          if (!f.is_zero((*inv)(row, col))) out.set(row, col);
      return true;
    });
    out.primes.push_back(p.str());
    ++out.evaluations;
    bound *= std::min(1.0, double(m) / static_cast<double>(p - 1));
  }
  out.false_zero_bound = bound;
  return out;
}

struct RegularityVerdict {
  bool regular = false;
  std::string prime;  // prime that certified regularity, if any
  unsigned attempts = 0;
};

/// Regular iff det(SR) is nonzero at some sample. A nonzero value certifies;
/// `max_retries` zero values over two or more primes mark a degenerate candidate.
inline RegularityVerdict is_regular(const ReactionNetwork& net, const InfluenceConfig& cfg) {
  cfg.validate();
  const CounterRng root(cfg.seed);
  {
    CounterRng rr = detail::rank_stream(root);
    validate_full_rank(net, random_prime(cfg.prime_bits, rr));
  }
  const auto s = stoich_matrix(net);
  const auto pattern = input_pattern(net);
  const CounterRng stream = root.split(0);
  detail::PrimeSource primes(cfg.prime_bits, stream.split(1));
  CounterRng rng = stream.split(2);
  RegularityVerdict v;
  try {
    const BigInt p = detail::sample_until(cfg, primes, rng, [&](const auto& f, CounterRng& r) {
      ++v.attempts;
      const auto rates = sample_rates(f, pattern, r);
      return !f.is_zero(det(f, assemble_sr(f, s, pattern, rates)));
    });
    v.regular = true;
    v.prime = p.str();
  } catch (const StructurallySingular&) {
    v.regular = false;
  }
  return v;
}

/// Index into InputPattern::edges of the rate r_{jm}. Without a metabolite,
/// the reaction must have exactly one input.
inline std::size_t rate_index(const ReactionNetwork& net, const InputPattern& pattern, const std::string& reaction,
                              const std::optional<std::string>& metabolite = std::nullopt) {
  const std::size_t j = net.reaction_id(reaction);
  std::size_t m;
  if (metabolite) {
    m = net.metabolite_id(*metabolite);
  } else {
    if (pattern.inputs[j].size() != 1) throw InvalidNetwork("reaction '" + reaction + "' does not have a unique input");
    m = pattern.inputs[j][0];
  }
  const auto it = std::find(pattern.edges.begin(), pattern.edges.end(), std::make_pair(m, j));
  if (it == pattern.edges.end())
    throw InvalidNetwork("'" + net.metabolite(m).name + "' is not an input of '" + reaction + "'");
  return std::size_t(it - pattern.edges.begin());
}

/// sum_k coeff_k * r_k = 0 over rate indices.
struct LinearRelation {
  std::vector<std::pair<std::size_t, std::int64_t>> terms;
};

/// det B at one random point satisfying each relation (the last variable of
/// the relation is solved for; zero is allowed there). An empty relation
/// gives a generic point.
inline std::vector<BigInt> det_b_factor_probe(const ReactionNetwork& net, const std::vector<LinearRelation>& relations,
                                              const InfluenceConfig& cfg) {
  cfg.validate();
  const auto s = stoich_matrix(net);
  const auto pattern = input_pattern(net);
  const CounterRng root(cfg.seed);
  CounterRng prng = root.split(1);
  const BigInt p = random_prime(cfg.prime_bits, prng);
  return with_prime_field(p, [&](const auto& f) {
    std::vector<BigInt> out;
    for (std::size_t i = 0; i < relations.size(); ++i) {
      CounterRng rng = root.split(100 + i);
      auto rates = sample_rates(f, pattern, rng);
      const auto& terms = relations[i].terms;
      if (!terms.empty()) {
        const auto [last, c_last] = terms.back();
        if (c_last == 0) throw ConfigError("relation has zero coefficient on its last variable");
        auto acc = f.zero();
        for (std::size_t t = 0; t + 1 < terms.size(); ++t)
          acc = f.add(acc, f.mul(f.from_int(terms[t].second), rates.at(terms[t].first)));
        rates.at(last) = f.mul(f.neg(acc), f.inv(f.from_int(c_last)));
      }
      out.push_back(f.to_big_value(det(f, assemble_b(f, s, pattern, rates))));
    }
    return out;
  });
}

}  // namespace influx
