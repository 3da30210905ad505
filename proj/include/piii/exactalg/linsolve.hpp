#pragma once
#include <map>
#include <vector>

#include "piii/exactalg/ratfun.hpp"

namespace piii::exactalg {

struct LinearSolution {
  enum class Status { unique, family, inconsistent };
  Status status = Status::unique;
  std::vector<Symbol> unknowns;
  std::vector<Symbol> free;           // parameters of the family
  std::map<Symbol, RatFun> values;    // every unknown; free ones map to themselves
  std::vector<RatFun> contradictions; // reduced nonzero equations when inconsistent
  bool verified = false;              // back-substitution gave all zeros

  bool consistent() const { return status != Status::inconsistent; }
  // Values with the free parameters replaced.
  std::map<Symbol, RatFun> specialize(const Bindings& freevals) const;
};

// Equations are RatFuns meant to vanish, each of degree <= 1 jointly in the
// unknowns. Throws NonlinearError otherwise.
LinearSolution solve_linear(const std::vector<Symbol>& unknowns, const std::vector<RatFun>& equations);

}  // namespace piii::exactalg
