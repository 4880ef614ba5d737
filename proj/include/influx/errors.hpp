#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace influx {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  enum class Kind { syntax, duplicate_reaction, non_positive_coefficient, schema };

  ParseError(Kind kind, std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), kind_(kind), line_(line) {}

  Kind kind() const noexcept { return kind_; }
  /// 1-based source line, 0 when not tied to a line (JSON input).
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

class InvalidNetwork : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  RankDeficient(std::size_t rank, std::size_t metabolites)
      : Error("stoichiometric matrix has rank " + std::to_string(rank) + " < " +
              std::to_string(metabolites) + " metabolites"),
        rank_(rank),
        metabolites_(metabolites) {}

  std::size_t rank() const noexcept { return rank_; }
  std::size_t metabolites() const noexcept { return metabolites_; }

 private:
  std::size_t rank_;
  std::size_t metabolites_;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("inverse of zero in prime field") {}
};

class SingularMatrix : public Error {
 public:
  SingularMatrix() : Error("matrix is singular") {}
};

/// Every sampled B was singular, across at least two primes.
class StructurallySingular : public Error {
 public:
  StructurallySingular(unsigned attempts, std::size_t primes)
      : Error("B singular in all " + std::to_string(attempts) + " samples over " +
              std::to_string(primes) +
              " primes; det(SR) is probably identically zero (confirm with the oracle)"),
        attempts_(attempts) {}

  unsigned attempts() const noexcept { return attempts_; }

 private:
  unsigned attempts_;
};

class EnumerationBudgetExceeded : public Error {
 public:
  explicit EnumerationBudgetExceeded(std::uint64_t budget)
      : Error("child selection enumeration exceeded budget of " + std::to_string(budget)) {}
};

class NotRegular : public Error {
 public:
  NotRegular() : Error("network is not regular: no kernel-free child selection exists") {}
};

class InconsistentAnnotation : public Error {
 public:
  using Error::Error;
};

class AugmentationError : public Error {
 public:
  enum class Kind { missing_metabolite, missing_reaction, stoichiometry_mismatch, old_reaction_touches_new_metabolite };

  AugmentationError(Kind kind, std::string reaction, std::string metabolite, const std::string& what)
      : Error(what), kind_(kind), reaction_(std::move(reaction)), metabolite_(std::move(metabolite)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& reaction() const noexcept { return reaction_; }
  const std::string& metabolite() const noexcept { return metabolite_; }

 private:
  Kind kind_;
  std::string reaction_;
  std::string metabolite_;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace influx
