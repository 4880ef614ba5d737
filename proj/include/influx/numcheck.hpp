#pragma once

// Floating-point finite-perturbation harness with affine rate laws
//   r_j(eps, x) = c_j + kappa_j * eps_j + sum_m k_jm x_m,
// where the perturbation of reaction j forces its rate by kappa_j * eps_j.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "influx/errors.hpp"
#include "influx/influence.hpp"
#include "influx/network.hpp"
#include "influx/rng.hpp"

namespace influx {

struct AffineRateModel {
  Eigen::VectorXd c;      // E
  Eigen::VectorXd kappa;  // E, forcing scale
  Eigen::MatrixXd k;      // E x M, zero unless m is an input of j
  Eigen::VectorXd x_star; // constructed steady state
};

struct ResponseRecord {
  std::size_t reaction = 0;  // perturbed reaction
  double step = 0;
  Eigen::VectorXd x0;
  Eigen::VectorXd x1;
  Eigen::VectorXd dx;   // x1 - x0
  Eigen::VectorXd phi;  // flux change including the forced term
  double flux_imbalance = 0;  // max |S phi|
};

inline constexpr double kMaxCondition = 1e12;
inline constexpr unsigned kModelRetries = 16;

namespace detail {

inline Eigen::MatrixXd to_eigen(const DenseMatrix<std::int64_t>& s) {
  Eigen::MatrixXd out(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) out(Eigen::Index(i), Eigen::Index(j)) = double(s(i, j));
  return out;
}

inline double condition_number(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 1;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  return smallest == 0 ? INFINITY : sv(0) / smallest;
}

}  // namespace detail

/// Jacobian S K of the steady-state equations with respect to x.
inline Eigen::MatrixXd jacobian(const ReactionNetwork& net, const AffineRateModel& model) {
  return detail::to_eigen(stoich_matrix(net)) * model.k;
}

/// Rates k_jm = +-U[0.5, 2], x* ~ U[0.5, 2], and c = rho - K x* with rho a
/// random kernel vector of S, so that S r(0, x*) = 0. Redraws while the
/// Jacobian is numerically singular.
inline AffineRateModel random_affine_model(const ReactionNetwork& net, std::uint64_t seed) {
  const auto s_int = stoich_matrix(net);
  const Eigen::MatrixXd s = detail::to_eigen(s_int);
  const auto pattern = input_pattern(net);
  const Eigen::Index e = Eigen::Index(net.num_reactions()), m = Eigen::Index(net.num_metabolites());
  const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(s).kernel();
  const bool trivial_kernel = kernel.cols() == 1 && kernel.norm() == 0;
  const CounterRng root(seed);
  for (unsigned attempt = 0; attempt < kModelRetries; ++attempt) {
    CounterRng rng = root.split(attempt);
    AffineRateModel model;
    model.k = Eigen::MatrixXd::Zero(e, m);
    for (const auto& [mm, j] : pattern.edges) {
      const double mag = rng.uniform(0.5, 2.0);
      model.k(Eigen::Index(j), Eigen::Index(mm)) = rng.below(std::uint64_t(2)) ? mag : -mag;
    }
    model.x_star = Eigen::VectorXd(m);
    for (Eigen::Index i = 0; i < m; ++i) model.x_star(i) = rng.uniform(0.5, 2.0);
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(e);
    if (!trivial_kernel)
      for (Eigen::Index b = 0; b < kernel.cols(); ++b) rho += rng.uniform(-1.0, 1.0) * kernel.col(b);
    model.c = rho - model.k * model.x_star;
    model.kappa = Eigen::VectorXd(e);
    for (Eigen::Index j = 0; j < e; ++j) model.kappa(j) = rng.uniform(0.5, 2.0);
    if (detail::condition_number(s * model.k) <= kMaxCondition) return model;
  }
  throw SingularJacobian("no well-conditioned affine model in " + std::to_string(kModelRetries) + " attempts");
}

/// Solves S r(eps, x) = 0 for x.
inline Eigen::VectorXd steady_state(const ReactionNetwork& net, const AffineRateModel& model, const Eigen::VectorXd& eps) {
  const Eigen::MatrixXd s = detail::to_eigen(stoich_matrix(net));
  const Eigen::MatrixXd jac = s * model.k;
  if (detail::condition_number(jac) > kMaxCondition) throw SingularJacobian("steady-state Jacobian is numerically singular");
  const Eigen::VectorXd rhs = -s * (model.c + model.kappa.cwiseProduct(eps));
  return jac.fullPivLu().solve(rhs);
}

inline Eigen::VectorXd steady_state(const ReactionNetwork& net, const AffineRateModel& model) {
  return steady_state(net, model, Eigen::VectorXd::Zero(Eigen::Index(net.num_reactions())));
}

/// Steady states at eps = 0 and eps = step * e_j. The difference is solved
/// directly from S K dx = -S kappa_j step e_j, which the affine model makes
/// exact, so that structural zeros are not buried in cancellation.
inline ResponseRecord finite_perturbation(const ReactionNetwork& net, const AffineRateModel& model, std::size_t reaction,
                                          double step = 0.05) {
  const Eigen::MatrixXd s = detail::to_eigen(stoich_matrix(net));
  const Eigen::Index e = Eigen::Index(net.num_reactions());
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(e);
  eps(Eigen::Index(reaction)) = step;
  ResponseRecord rec;
  rec.reaction = reaction;
  rec.step = step;
  rec.x0 = steady_state(net, model);
  rec.x1 = steady_state(net, model, eps);
  const Eigen::VectorXd forced = model.kappa.cwiseProduct(eps);
  rec.dx = (s * model.k).fullPivLu().solve(-s * forced);
  rec.phi = model.k * rec.dx + forced;
  rec.flux_imbalance = rec.phi.size() ? (s * rec.phi).cwiseAbs().maxCoeff() : 0.0;
  return rec;
}

struct Tolerances {
  double zero = 1e-8;
  double nonzero = 1e-4;

  void validate() const {
    if (!(zero > 0) || !(nonzero > 0)) throw ConfigError("tolerances must be positive");
    if (zero > 1e-3 * nonzero) throw ConfigError("tol_zero must be at most 1e-3 * tol_nonzero");
  }
};

enum class EntryClass { zero, nonzero, ambiguous };

inline const char* to_string(EntryClass c) {
  switch (c) {
    case EntryClass::zero: return "zero";
    case EntryClass::nonzero: return "nonzero";
    case EntryClass::ambiguous: return "ambiguous";
  }
  return "";
}

struct EntryCheck {
  std::size_t row;     // influence matrix row: reactions, then metabolites
  std::size_t column;  // perturbed reaction
  double value;
  bool structural;
  EntryClass observed;
  bool hard_violation() const { return !structural && observed != EntryClass::zero; }
  bool soft_miss() const { return structural && observed != EntryClass::nonzero; }
};

struct PatternComparison {
  std::vector<EntryCheck> entries;
  std::size_t hard_violations = 0;
  std::size_t soft_misses = 0;
  std::size_t structural_nonzeros = 0;
};

/// Classifies |phi_j| and |dx_m| against scale = max(1, |x0|_inf).
inline PatternComparison compare_patterns(const ResponseRecord& rec, const InfluenceMatrix& infl, const Tolerances& tol = {}) {
  tol.validate();
  const double scale = std::max(1.0, rec.x0.size() ? rec.x0.cwiseAbs().maxCoeff() : 0.0);
  PatternComparison out;
  auto classify = [&](std::size_t row, double v) {
    const double a = std::abs(v);
    const EntryClass c = a < tol.zero * scale ? EntryClass::zero : (a > tol.nonzero * scale ? EntryClass::nonzero : EntryClass::ambiguous);
    EntryCheck chk{row, rec.reaction, v, infl.at(row, rec.reaction), c};
    out.hard_violations += chk.hard_violation();
    out.soft_misses += chk.soft_miss();
    out.structural_nonzeros += chk.structural;
    out.entries.push_back(chk);
  };
  const std::size_t e = infl.num_reactions();
  for (std::size_t j = 0; j < e; ++j) classify(j, rec.phi(Eigen::Index(j)));
  for (std::size_t m = 0; m < infl.num_metabolites(); ++m) classify(e + m, rec.dx(Eigen::Index(m)));
  return out;
}

struct NumcheckConfig {
  std::uint64_t seed = 0;
  unsigned models = 20;
  double step = 0.05;
  Tolerances tol;
  double max_soft_miss_rate = 0.05;
};

struct NumcheckSummary {
  std::size_t models = 0;
  std::size_t records = 0;
  std::size_t entries = 0;
  std::size_t structural_nonzeros = 0;
  std::size_t hard_violations = 0;
  std::size_t soft_misses = 0;
  std::size_t flux_balance_failures = 0;  // |S phi|_inf > 1e-8 max(1, |phi|_inf)
  double max_relative_imbalance = 0;
  std::vector<EntryCheck> checks;
  std::vector<std::size_t> model_of;  // per check

  double soft_miss_rate() const { return structural_nonzeros ? double(soft_misses) / double(structural_nonzeros) : 0.0; }
};

/// Every reaction perturbed in each of `models` random affine models.
inline NumcheckSummary run_numcheck(const ReactionNetwork& net, const InfluenceMatrix& infl, const NumcheckConfig& cfg) {
  cfg.tol.validate();
  if (!(cfg.step > 0)) throw ConfigError("step must be positive");
  NumcheckSummary sum;
  const CounterRng root(cfg.seed);
  for (unsigned i = 0; i < cfg.models; ++i) {
    const auto model = random_affine_model(net, root.split(i).next());
    ++sum.models;
    for (std::size_t j = 0; j < net.num_reactions(); ++j) {
      const auto rec = finite_perturbation(net, model, j, cfg.step);
      ++sum.records;
      const double phi_norm = rec.phi.size() ? rec.phi.cwiseAbs().maxCoeff() : 0.0;
      const double rel = rec.flux_imbalance / std::max(1.0, phi_norm);
      sum.max_relative_imbalance = std::max(sum.max_relative_imbalance, rel);
      sum.flux_balance_failures += rel > 1e-8;
      const auto cmp = compare_patterns(rec, infl, cfg.tol);
      sum.entries += cmp.entries.size();
      sum.structural_nonzeros += cmp.structural_nonzeros;
      sum.hard_violations += cmp.hard_violations;
      sum.soft_misses += cmp.soft_misses;
      for (const auto& c : cmp.entries) {
        sum.checks.push_back(c);
        sum.model_of.push_back(i);
      }
    }
  }
  return sum;
}

}  // namespace influx
