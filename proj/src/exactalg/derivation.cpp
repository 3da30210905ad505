#include "piii/exactalg/derivation.hpp"

#include "piii/exactalg/errors.hpp"

namespace piii::exactalg {

void DerivationSpec::claim(Symbol s) {
  if (covers(s)) throw RingError("indeterminate assigned twice in derivation: " + s.name());
}

DerivationSpec& DerivationSpec::dependent(Symbol s, RatFun image) {
  claim(s);
  images_.emplace(s, std::move(image));
  return *this;
}

DerivationSpec& DerivationSpec::constant(Symbol s) {
  claim(s);
  constants_.insert(s);
  return *this;
}

const RatFun& DerivationSpec::image(Symbol s) const {
  auto it = images_.find(s);
  if (it == images_.end()) throw UncoveredIndeterminate(s.name());
  return it->second;
}

namespace {

RatFun apply_poly(const DerivationSpec& D, const Poly& p) {
  RatFun acc;
  for (Symbol s : p.variables()) {
    if (s == D.wrt()) {
      acc += RatFun(p.derivative(s));
    } else if (D.constant_set().count(s)) {
      continue;
    } else {
      auto it = D.images().find(s);
      if (it == D.images().end()) throw UncoveredIndeterminate(s.name());
      if (!it->second.is_zero()) acc += RatFun(p.derivative(s)) * it->second;
    }
  }
  return acc;
}

}  // namespace

RatFun DerivationSpec::apply(const RatFun& f) const {
  for (Symbol s : f.variables())
    if (!covers(s)) throw UncoveredIndeterminate(s.name());
  RatFun dn = apply_poly(*this, f.num());
  if (f.den().is_one()) return dn;
  RatFun dd = apply_poly(*this, f.den());
  RatFun den(f.den());
  if (dd.is_zero()) return dn / den;
  return (dn * den - RatFun(f.num()) * dd) / (den * den);
}

}  // namespace piii::exactalg
