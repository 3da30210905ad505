#pragma once
#include <map>
#include <set>

#include "piii/exactalg/ratfun.hpp"

namespace piii::exactalg {

// A derivation D with D(wrt) = 1, D(dep) = image, D(const) = 0.
class DerivationSpec {
 public:
  explicit DerivationSpec(Symbol wrt) : wrt_(wrt) {}
  DerivationSpec& dependent(Symbol s, RatFun image);
  DerivationSpec& constant(Symbol s);
  DerivationSpec& constants(std::initializer_list<Symbol> ss) {
    for (Symbol s : ss) constant(s);
    return *this;
  }

  Symbol wrt() const { return wrt_; }
  const std::map<Symbol, RatFun>& images() const { return images_; }
  const std::set<Symbol>& constant_set() const { return constants_; }
  bool covers(Symbol s) const { return s == wrt_ || images_.count(s) || constants_.count(s); }
  const RatFun& image(Symbol s) const;

  RatFun apply(const RatFun& f) const;

 private:
  void claim(Symbol s);
  Symbol wrt_;
  std::map<Symbol, RatFun> images_;
  std::set<Symbol> constants_;
};

inline RatFun apply_derivation(const DerivationSpec& D, const RatFun& f) { return D.apply(f); }

}  // namespace piii::exactalg
