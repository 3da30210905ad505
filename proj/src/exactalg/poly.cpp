#include "piii/exactalg/poly.hpp"

#include <algorithm>
#include <sstream>

#include "piii/exactalg/errors.hpp"

namespace piii::exactalg {

// ---------------------------------------------------------------- Monomial

Monomial Monomial::of(Symbol s, unsigned e) {
  Monomial m;
  if (e == 0) return m;
  if (e > 255) throw RingError("exponent overflow");
  m.n = 1;
  m.var[0] = s.index();
  m.exp[0] = static_cast<std::uint8_t>(e);
  m.deg = static_cast<std::uint16_t>(e);
  return m;
}

unsigned Monomial::degree(Symbol s) const {
  for (int k = 0; k < n; ++k)
    if (var[k] == s.index()) return exp[k];
  return 0;
}

bool Monomial::divides(const Monomial& o) const {
  if (deg > o.deg || n > o.n) return false;
  int j = 0;
  for (int k = 0; k < n; ++k) {
    while (j < o.n && o.var[j] < var[k]) ++j;
    if (j == o.n || o.var[j] != var[k] || o.exp[j] < exp[k]) return false;
    ++j;
  }
  return true;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  int i = 0, j = 0, k = 0;
  auto push = [&](std::uint8_t v, unsigned e) {
    if (k == kMaxMonoVars) throw RingError("too many variables in one monomial");
    if (e > 255) throw RingError("exponent overflow");
    r.var[k] = v;
    r.exp[k] = static_cast<std::uint8_t>(e);
    ++k;
  };
  while (i < a.n || j < b.n) {
    if (j == b.n || (i < a.n && a.var[i] < b.var[j])) {
      push(a.var[i], a.exp[i]);
      ++i;
    } else if (i == a.n || b.var[j] < a.var[i]) {
      push(b.var[j], b.exp[j]);
      ++j;
    } else {
      push(a.var[i], unsigned(a.exp[i]) + b.exp[j]);
      ++i;
      ++j;
    }
  }
  r.n = static_cast<std::uint8_t>(k);
  r.deg = static_cast<std::uint16_t>(a.deg + b.deg);
  return r;
}

Monomial operator/(const Monomial& a, const Monomial& b) {
  Monomial r;
  int j = 0, k = 0;
  for (int i = 0; i < a.n; ++i) {
    unsigned e = a.exp[i];
    if (j < b.n && b.var[j] == a.var[i]) {
      e -= b.exp[j];
      ++j;
    }
    if (e) {
      r.var[k] = a.var[i];
      r.exp[k] = static_cast<std::uint8_t>(e);
      ++k;
    }
  }
  r.n = static_cast<std::uint8_t>(k);
  r.deg = static_cast<std::uint16_t>(a.deg - b.deg);
  return r;
}

bool operator==(const Monomial& a, const Monomial& b) {
  if (a.n != b.n || a.deg != b.deg) return false;
  for (int k = 0; k < a.n; ++k)
    if (a.var[k] != b.var[k] || a.exp[k] != b.exp[k]) return false;
  return true;
}

Monomial Monomial::without(Symbol s) const {
  Monomial r;
  int k = 0;
  for (int i = 0; i < n; ++i) {
    if (var[i] == s.index()) continue;
    r.var[k] = var[i];
    r.exp[k] = exp[i];
    r.deg = static_cast<std::uint16_t>(r.deg + exp[i]);
    ++k;
  }
  r.n = static_cast<std::uint8_t>(k);
  return r;
}

std::string Monomial::str() const {
  std::string s;
  for (int k = 0; k < n; ++k) {
    if (k) s += '*';
    s += Symbol::from_index(var[k]).name();
    if (exp[k] > 1) s += "^" + std::to_string(exp[k]);
  }
  return s.empty() ? "1" : s;
}

int grlex_cmp(const Monomial& a, const Monomial& b) {
  if (a.deg != b.deg) return a.deg < b.deg ? -1 : 1;
  int i = 0, j = 0;
  while (i < a.n && j < b.n) {
    if (a.var[i] == b.var[j]) {
      if (a.exp[i] != b.exp[j]) return a.exp[i] < b.exp[j] ? -1 : 1;
      ++i;
      ++j;
    } else {
      // the one carrying the more significant variable is larger
      return a.var[i] < b.var[j] ? 1 : -1;
    }
  }
  if (i < a.n) return 1;
  if (j < b.n) return -1;
  return 0;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  int i = 0, j = 0, k = 0;
  while (i < a.n && j < b.n) {
    if (a.var[i] == b.var[j]) {
      r.var[k] = a.var[i];
      r.exp[k] = std::min(a.exp[i], b.exp[j]);
      r.deg = static_cast<std::uint16_t>(r.deg + r.exp[k]);
      ++k;
      ++i;
      ++j;
    } else if (a.var[i] < b.var[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  r.n = static_cast<std::uint8_t>(k);
  return r;
}

// -------------------------------------------------------------------- Poly

namespace {

std::vector<Term> merge_add(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
  std::vector<Term> r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c = (i == a.size()) ? -1 : (j == b.size()) ? 1 : grlex_cmp(a[i].m, b[j].m);
    if (c > 0) {
      r.push_back(a[i++]);
    } else if (c < 0) {
      r.push_back(b[j++]);
      if (subtract) r.back().c = -r.back().c;
    } else {
      GaussRat s = subtract ? a[i].c - b[j].c : a[i].c + b[j].c;
      if (!s.is_zero()) r.push_back({a[i].m, std::move(s)});
      ++i;
      ++j;
    }
  }
  return r;
}

std::vector<Term> merge_move(std::vector<Term>&& a, std::vector<Term>&& b) {
  if (a.empty()) return std::move(b);
  if (b.empty()) return std::move(a);
  std::vector<Term> r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c = (i == a.size()) ? -1 : (j == b.size()) ? 1 : grlex_cmp(a[i].m, b[j].m);
    if (c > 0) {
      r.push_back(std::move(a[i++]));
    } else if (c < 0) {
      r.push_back(std::move(b[j++]));
    } else {
      a[i].c += b[j].c;
      if (!a[i].c.is_zero()) r.push_back(std::move(a[i]));
      ++i;
      ++j;
    }
  }
  return r;
}

}  // namespace

Poly::Poly(const GaussRat& c) {
  if (!c.is_zero()) terms_.push_back({Monomial{}, c});
}

Poly Poly::var(Symbol s, unsigned e) { return monomial(Monomial::of(s, e), GaussRat(1)); }

Poly Poly::monomial(const Monomial& m, GaussRat c) {
  Poly p;
  if (!c.is_zero()) p.terms_.push_back({m, std::move(c)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return grlex_cmp(x.m, y.m) > 0; });
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().m == t.m) {
      p.terms_.back().c += t.c;
      if (p.terms_.back().c.is_zero()) p.terms_.pop_back();
    } else if (!t.c.is_zero()) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

GaussRat Poly::constant_value() const {
  if (terms_.empty()) return GaussRat(0);
  if (!terms_[0].m.is_one() || terms_.size() != 1) throw RingError("polynomial is not constant");
  return terms_[0].c;
}

bool Poly::has_complex_coeffs() const {
  for (auto& t : terms_)
    if (!t.c.is_real()) return true;
  return false;
}

unsigned Poly::degree(Symbol s) const {
  unsigned d = 0;
  for (auto& t : terms_) d = std::max(d, t.m.degree(s));
  return d;
}

unsigned Poly::total_degree() const { return terms_.empty() ? 0 : terms_[0].m.deg; }

std::vector<Symbol> Poly::variables() const {
  std::vector<bool> seen(256, false);
  for (auto& t : terms_)
    for (int k = 0; k < t.m.n; ++k) seen[t.m.var[k]] = true;
  std::vector<Symbol> r;
  for (int i = 0; i < 256; ++i)
    if (seen[i]) r.push_back(Symbol::from_index(static_cast<std::uint8_t>(i)));
  return r;
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return {};
  Monomial m = terms_[0].m;
  for (std::size_t k = 1; k < terms_.size() && m.n; ++k) m = mono_gcd(m, terms_[k].m);
  return m;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.c = -t.c;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge_add(terms_, o.terms_, false);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge_add(terms_, o.terms_, true);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) {
  *this = *this * o;
  return *this;
}

Poly Poly::mul_monomial(const Monomial& m, const GaussRat& c) const {
  Poly r;
  if (c.is_zero()) return r;
  r.terms_.reserve(terms_.size());
  for (auto& t : terms_) r.terms_.push_back({t.m * m, t.c * c});
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.terms_.empty() || b.terms_.empty()) return Poly();
  const Poly& small = a.size() <= b.size() ? a : b;
  const Poly& big = a.size() <= b.size() ? b : a;
  if (small.size() == 1) return big.mul_monomial(small.terms_[0].m, small.terms_[0].c);
  std::vector<std::vector<Term>> lists;
  lists.reserve(small.size());
  for (auto& t : small.terms_) lists.push_back(big.mul_monomial(t.m, t.c).terms_);
  while (lists.size() > 1) {
    std::vector<std::vector<Term>> next;
    next.reserve((lists.size() + 1) / 2);
    for (std::size_t k = 0; k + 1 < lists.size(); k += 2)
      next.push_back(merge_move(std::move(lists[k]), std::move(lists[k + 1])));
    if (lists.size() % 2) next.push_back(std::move(lists.back()));
    lists.swap(next);
  }
  Poly r;
  r.terms_ = std::move(lists[0]);
  return r;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t k = 0; k < a.terms_.size(); ++k)
    if (a.terms_[k].m != b.terms_[k].m || a.terms_[k].c != b.terms_[k].c) return false;
  return true;
}

Poly Poly::scaled(const GaussRat& c) const {
  if (c.is_zero()) return Poly();
  Poly r = *this;
  if (c.is_one()) return r;
  for (auto& t : r.terms_) t.c *= c;
  return r;
}

Poly Poly::div_monomial(const Monomial& m) const {
  Poly r = *this;
  if (m.is_one()) return r;
  for (auto& t : r.terms_) t.m = t.m / m;
  return r;
}

Poly Poly::pow(unsigned e) const {
  Poly base = *this, acc(1);
  while (e) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

Poly Poly::monic() const {
  if (terms_.empty() || lc().is_one()) return *this;
  return scaled(lc().inverse());
}

std::optional<Poly> Poly::divide_exact(const Poly& b) const {
  if (b.is_zero()) throw DivisionByZero();
  if (is_zero()) return Poly();
  if (b.is_monomial()) {
    const Monomial& bm = b.lm();
    for (auto& t : terms_)
      if (!bm.divides(t.m)) return std::nullopt;
    return div_monomial(bm).scaled(b.lc().inverse());
  }
  if (total_degree() < b.total_degree()) return std::nullopt;
  // per-variable degree bounds on the quotient
  std::array<int, 256> bound;
  bound.fill(-1);
  for (auto& t : terms_)
    for (int k = 0; k < t.m.n; ++k) bound[t.m.var[k]] = std::max<int>(bound[t.m.var[k]], t.m.exp[k]);
  std::array<int, 256> bdeg{};
  for (auto& t : b.terms_)
    for (int k = 0; k < t.m.n; ++k) bdeg[t.m.var[k]] = std::max<int>(bdeg[t.m.var[k]], t.m.exp[k]);
  for (int v = 0; v < 256; ++v) {
    if (bdeg[v] == 0) continue;
    if (bound[v] < bdeg[v]) return std::nullopt;
  }
  for (int v = 0; v < 256; ++v)
    if (bound[v] >= 0) bound[v] -= bdeg[v];

  std::map<Monomial, GaussRat, GrlexGreater> r;
  for (auto& t : terms_) r.emplace(t.m, t.c);
  GaussRat binv = b.lc().inverse();
  std::vector<Term> quo;
  while (!r.empty()) {
    auto it = r.begin();
    if (!b.lm().divides(it->first)) return std::nullopt;
    Monomial m = it->first / b.lm();
    for (int k = 0; k < m.n; ++k)
      if (bound[m.var[k]] < m.exp[k]) return std::nullopt;
    GaussRat c = it->second * binv;
    r.erase(it);
    for (std::size_t k = 1; k < b.terms_.size(); ++k) {
      Monomial key = m * b.terms_[k].m;
      GaussRat prod = c * b.terms_[k].c;
      auto jt = r.find(key);
      if (jt == r.end()) {
        r.emplace(key, -prod);
      } else {
        jt->second -= prod;
        if (jt->second.is_zero()) r.erase(jt);
      }
    }
    quo.push_back({m, std::move(c)});
  }
  Poly q;
  q.terms_ = std::move(quo);  // produced in descending order
  return q;
}

Poly Poly::derivative(Symbol s) const {
  std::vector<Term> out;
  for (auto& t : terms_) {
    unsigned e = t.m.degree(s);
    if (!e) continue;
    Monomial m = t.m / Monomial::of(s, 1);
    out.push_back({m, t.c * GaussRat(static_cast<long>(e))});
  }
  return from_terms(std::move(out));
}

Poly Poly::coefficient(Symbol s, unsigned k) const {
  std::vector<Term> out;
  for (auto& t : terms_)
    if (t.m.degree(s) == k) out.push_back({t.m.without(s), t.c});
  return from_terms(std::move(out));
}

std::complex<double> Poly::eval(const std::function<std::complex<double>(Symbol)>& val) const {
  std::map<std::uint8_t, std::complex<double>> cache;
  std::complex<double> acc = 0;
  for (auto& t : terms_) {
    std::complex<double> v = t.c.to_complex();
    for (int k = 0; k < t.m.n; ++k) {
      auto it = cache.find(t.m.var[k]);
      if (it == cache.end()) it = cache.emplace(t.m.var[k], val(Symbol::from_index(t.m.var[k]))).first;
      std::complex<double> p = 1;
      for (int e = 0; e < t.m.exp[k]; ++e) p *= it->second;
      v *= p;
    }
    acc += v;
  }
  return acc;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto& t : terms_) {
    std::string ts;
    if (t.m.is_one()) {
      ts = t.c.str();
    } else if (t.c.is_one()) {
      ts = t.m.str();
    } else if (t.c == GaussRat(-1)) {
      ts = "-" + t.m.str();
    } else if (t.c.needs_parens()) {
      ts = "(" + t.c.str() + ")*" + t.m.str();
    } else {
      ts = t.c.str() + "*" + t.m.str();
    }
    if (first) {
      out = ts;
      first = false;
    } else if (ts[0] == '-') {
      out += " - " + ts.substr(1);
    } else {
      out += " + " + ts;
    }
  }
  return out;
}

}  // namespace piii::exactalg
