#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "influx/gf.hpp"
#include "influx/network.hpp"

namespace influx {

struct PrimeSizeReport {
  double bound = 0;          // E (E+M)^2 ln(1 + max_j |S_j|_1)
  double log2_margin = 0;    // log2(p / bound)
  bool sufficient = false;   // p >= 2^40 * bound
  std::int64_t max_column_norm = 0;
  std::string warning;
};

inline constexpr double kPrimeMarginLog2 = 40;

inline double prime_size_bound(std::size_t reactions, std::size_t metabolites, std::int64_t max_column_norm) {
  const double e = double(reactions), n = double(reactions + metabolites);
  return e * n * n * std::log1p(double(max_column_norm));
}

inline PrimeSizeReport check_prime_size(const ReactionNetwork& net, const BigInt& p) {
  const auto s = stoich_matrix(net);
  PrimeSizeReport rep;
  for (std::size_t j = 0; j < s.cols(); ++j) {
    std::int64_t norm = 0;
    for (std::size_t m = 0; m < s.rows(); ++m) norm += std::llabs(s(m, j));
    rep.max_column_norm = std::max(rep.max_column_norm, norm);
  }
  rep.bound = prime_size_bound(net.num_reactions(), net.num_metabolites(), rep.max_column_norm);
  const double log2_p = std::log2(static_cast<double>(p));
  rep.log2_margin = rep.bound > 0 ? log2_p - std::log2(rep.bound) : INFINITY;
  rep.sufficient = rep.log2_margin >= kPrimeMarginLog2;
  if (!rep.sufficient)
    rep.warning = "prime of " + std::to_string(bit_length(p)) + " bits exceeds the unlucky-prime bound " +
                  std::to_string(rep.bound) + " by only 2^" + std::to_string(rep.log2_margin) +
                  "; zero entries may be false, raise --prime-bits";
  return rep;
}

}  // namespace influx
