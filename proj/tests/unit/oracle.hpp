// Independent helpers for tests: exact point evaluation without any gcd,
// and small random generators.
#pragma once
#include <map>
#include <random>

#include "piii/exactalg/parse.hpp"
#include "piii/exactalg/ratfun.hpp"

namespace oracle {
using namespace piii::exactalg;

inline GaussRat eval_poly(const Poly& p, const std::map<Symbol, GaussRat>& at) {
  GaussRat acc;
  for (auto& t : p.terms()) {
    GaussRat v = t.c;
    for (int k = 0; k < t.m.n; ++k) v *= at.at(Symbol::from_index(t.m.var[k])).pow(t.m.exp[k]);
    acc += v;
  }
  return acc;
}

inline GaussRat eval(const RatFun& f, const std::map<Symbol, GaussRat>& at) {
  return eval_poly(f.num(), at) / eval_poly(f.den(), at);
}

struct Rng {
  std::mt19937_64 g{12345};
  long small(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); }
  GaussRat rat() {
    long d = small(1, 7);
    return GaussRat::frac(small(-9, 9), d);
  }
  GaussRat gauss() { return GaussRat(rat().re(), rat().re()); }
  Poly poly(const std::vector<Symbol>& vars, int maxdeg, int nterms, bool cplx = false) {
    std::vector<Term> ts;
    for (int k = 0; k < nterms; ++k) {
      Monomial m;
      for (Symbol s : vars) m = m * Monomial::of(s, static_cast<unsigned>(small(0, maxdeg)));
      ts.push_back({m, cplx ? gauss() : rat()});
    }
    return Poly::from_terms(ts);
  }
  std::map<Symbol, GaussRat> point(const std::vector<Symbol>& vars) {
    std::map<Symbol, GaussRat> m;
    for (Symbol s : vars) m[s] = GaussRat::frac(small(-30, 30), small(1, 11)) + GaussRat(small(1, 3) * 7);
    return m;
  }
};

inline RatFun P(const char* s) { return parse(s); }

}  // namespace oracle
