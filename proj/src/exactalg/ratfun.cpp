#include "piii/exactalg/ratfun.hpp"

#include <algorithm>
#include <functional>

#include "piii/exactalg/errors.hpp"

namespace piii::exactalg {

RatFun normalize(const Poly& num, const Poly& den) { return RatFun(num, den); }

RatFun::RatFun(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw DivisionByZero();
  if (num.is_zero()) {
    den_ = Poly(1);
    return;
  }
  if (den.is_constant()) {
    num_ = num.scaled(den.constant_value().inverse());
    den_ = Poly(1);
    return;
  }
  auto g = gcd_cofactors(num, den);
  GaussRat inv = g.bbar.lc().inverse();
  num_ = g.abar.scaled(inv);
  den_ = g.bbar.scaled(inv);
}

GaussRat RatFun::constant_value() const {
  if (!is_constant()) throw RingError("rational function is not constant: " + str());
  return num_.constant_value();
}

std::vector<Symbol> RatFun::variables() const {
  auto a = num_.variables(), b = den_.variables();
  std::vector<Symbol> r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

RatFun RatFun::operator-() const { return RatFun(-num_, den_, Raw{}); }

RatFun operator+(const RatFun& a, const RatFun& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) {
    if (a.den_.is_one()) return RatFun(a.num_ + b.num_, Poly(1), RatFun::Raw{});
    return RatFun(a.num_ + b.num_, a.den_);
  }
  if (a.den_.is_one()) return RatFun(a.num_ * b.den_ + b.num_, b.den_, RatFun::Raw{});
  if (b.den_.is_one()) return RatFun(b.num_ * a.den_ + a.num_, a.den_, RatFun::Raw{});
  auto g = gcd_cofactors(a.den_, b.den_);
  Poly n = a.num_ * g.bbar + b.num_ * g.abar;
  if (n.is_zero()) return RatFun();
  Poly d = a.den_ * g.bbar;
  if (g.g.is_one()) return RatFun(n, d, RatFun::Raw{});  // already coprime, den monic
  // gcd(n, d) = gcd(n, g)
  auto h = gcd_cofactors(n, g.g);
  if (h.g.is_one()) return RatFun(n, d, RatFun::Raw{});
  Poly dd = *d.divide_exact(h.g);
  GaussRat inv = dd.lc().inverse();
  return RatFun(h.abar.scaled(inv), dd.scaled(inv), RatFun::Raw{});
}

RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }

RatFun operator*(const RatFun& a, const RatFun& b) {
  if (a.is_zero() || b.is_zero()) return RatFun();
  if (a.den_.is_one() && b.den_.is_one()) return RatFun(a.num_ * b.num_, Poly(1), RatFun::Raw{});
  auto g1 = gcd_cofactors(a.num_, b.den_);
  auto g2 = gcd_cofactors(b.num_, a.den_);
  Poly n = g1.abar * g2.abar;
  Poly d = g2.bbar * g1.bbar;
  GaussRat inv = d.lc().inverse();
  return RatFun(n.scaled(inv), d.scaled(inv), RatFun::Raw{});
}

RatFun RatFun::inverse() const {
  if (is_zero()) throw DivisionByZero();
  GaussRat inv = num_.lc().inverse();
  return RatFun(den_.scaled(inv), num_.scaled(inv), Raw{});
}

RatFun operator/(const RatFun& a, const RatFun& b) { return a * b.inverse(); }

RatFun RatFun::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  return RatFun(num_.pow(static_cast<unsigned>(e)), den_.pow(static_cast<unsigned>(e)), Raw{});
}

RatFun RatFun::derivative(Symbol s) const {
  if (den_.is_one()) return RatFun(num_.derivative(s), Poly(1), Raw{});
  Poly dn = num_.derivative(s), dd = den_.derivative(s);
  if (dd.is_zero()) return RatFun(dn, den_);
  return RatFun(dn * den_ - num_ * dd, den_ * den_);
}

std::complex<double> RatFun::eval(const std::function<std::complex<double>(Symbol)>& val) const {
  return num_.eval(val) / den_.eval(val);
}

std::string RatFun::str() const {
  if (den_.is_one()) return num_.str();
  auto wrap = [](const Poly& p) {
    std::string s = p.str();
    bool atom = p.size() == 1 && (p.lc().is_one() || p.lm().is_one()) && !p.lc().needs_parens() &&
                (p.lm().is_one() || p.lm().n == 1) && s.find('-') == std::string::npos &&
                s.find('/') == std::string::npos && s.find('*') == std::string::npos;
    return atom ? s : "(" + s + ")";
  };
  return wrap(num_) + "/" + wrap(den_);
}

// -------------------------------------------------------------- substitute

namespace {

void check_levels(const Bindings& b) {
  for (auto& [s, v] : b) {
    Level l = s.level();
    if (l == Level::neutral) continue;
    for (Symbol u : v.variables()) {
      Level lu = u.level();
      if (lu != Level::neutral && lu != l)
        throw RingError("binding mixes theta-level and alpha-level symbols: " + s.name() + " -> " + v.str());
    }
  }
}

}  // namespace

// p(b) = N / D with D = prod den_v^{deg_v p}; returns N, writes D.
Poly substitute_poly_num(const Poly& p, const Bindings& b, Poly* den_out) {
  std::vector<std::pair<Symbol, const RatFun*>> active;
  for (auto& [s, v] : b)
    if (p.contains(s)) active.emplace_back(s, &v);
  if (active.empty()) {
    *den_out = Poly(1);
    return p;
  }
  std::vector<unsigned> maxdeg;
  for (auto& [s, v] : active) maxdeg.push_back(p.degree(s));
  // cache powers
  std::vector<std::vector<Poly>> npow(active.size()), dpow(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) {
    npow[k].push_back(Poly(1));
    dpow[k].push_back(Poly(1));
    for (unsigned e = 1; e <= maxdeg[k]; ++e) {
      npow[k].push_back(npow[k].back() * active[k].second->num());
      dpow[k].push_back(dpow[k].back() * active[k].second->den());
    }
  }
  // group terms by exponent tuple of the active symbols
  std::map<std::vector<unsigned>, std::vector<Term>> buckets;
  for (auto& t : p.terms()) {
    std::vector<unsigned> key(active.size());
    Monomial rest = t.m;
    for (std::size_t k = 0; k < active.size(); ++k) {
      key[k] = t.m.degree(active[k].first);
      rest = rest.without(active[k].first);
    }
    buckets[key].push_back({rest, t.c});
  }
  Poly acc;
  for (auto& [key, terms] : buckets) {
    Poly part = Poly::from_terms(terms);
    for (std::size_t k = 0; k < active.size(); ++k) {
      part = part * npow[k][key[k]];
      if (!active[k].second->den().is_one()) part = part * dpow[k][maxdeg[k] - key[k]];
    }
    acc += part;
  }
  Poly den(1);
  for (std::size_t k = 0; k < active.size(); ++k) den = den * dpow[k][maxdeg[k]];
  *den_out = den;
  return acc;
}

namespace {

// Horner in the active symbols, so cancellation happens step by step instead
// of in one large gcd at the end.
RatFun horner(const Poly& p, const std::vector<std::pair<Symbol, const RatFun*>>& active, std::size_t k) {
  if (p.is_zero()) return RatFun();
  while (k < active.size() && !p.contains(active[k].first)) ++k;
  if (k == active.size()) return RatFun(p);
  Symbol s = active[k].first;
  const RatFun& v = *active[k].second;
  std::map<unsigned, std::vector<Term>, std::greater<>> parts;
  for (auto& t : p.terms()) {
    unsigned e = t.m.degree(s);
    parts[e].push_back({t.m.without(s), t.c});
  }
  unsigned top = parts.begin()->first;
  RatFun acc;
  for (unsigned e = top + 1; e-- > 0;) {
    acc = acc * v;
    auto it = parts.find(e);
    if (it != parts.end()) acc = acc + horner(Poly::from_terms(it->second), active, k + 1);
  }
  return acc;
}

}  // namespace

RatFun substitute(const RatFun& f, const Bindings& b) {
  check_levels(b);
  std::vector<std::pair<Symbol, const RatFun*>> active;
  for (auto& [s, v] : b)
    if (f.contains(s)) active.emplace_back(s, &v);
  if (active.empty()) return f;
  RatFun n = horner(f.num(), active, 0);
  RatFun d = horner(f.den(), active, 0);
  if (d.is_zero()) throw SubstitutionPole(f.den().str());
  return n / d;
}

}  // namespace piii::exactalg
