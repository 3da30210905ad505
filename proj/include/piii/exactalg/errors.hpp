#pragma once
#include <stdexcept>
#include <string>

namespace piii::exactalg {

struct AlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivisionByZero : AlgebraError {
  DivisionByZero() : AlgebraError("division by zero rational function") {}
  explicit DivisionByZero(const std::string& what) : AlgebraError(what) {}
};

struct SubstitutionPole : AlgebraError {
  std::string factor;
  explicit SubstitutionPole(std::string f)
      : AlgebraError("denominator vanishes identically after substitution: " + f), factor(std::move(f)) {}
};

struct UncoveredIndeterminate : AlgebraError {
  std::string name;
  explicit UncoveredIndeterminate(std::string n)
      : AlgebraError("indeterminate not covered by derivation: " + n), name(std::move(n)) {}
};

struct NonlinearError : AlgebraError {
  using AlgebraError::AlgebraError;
};

struct ParseError : AlgebraError {
  using AlgebraError::AlgebraError;
};

struct RingError : AlgebraError {
  using AlgebraError::AlgebraError;
};

}  // namespace piii::exactalg
