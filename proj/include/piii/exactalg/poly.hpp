#pragma once
#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "piii/exactalg/gauss_rat.hpp"
#include "piii/exactalg/symbol.hpp"

namespace piii::exactalg {

constexpr int kMaxMonoVars = 16;

// Sparse exponent vector: variables sorted by registry index, exponents > 0.
struct Monomial {
  std::uint8_t n = 0;
  std::uint16_t deg = 0;
  std::array<std::uint8_t, kMaxMonoVars> var{};
  std::array<std::uint8_t, kMaxMonoVars> exp{};

  static Monomial of(Symbol s, unsigned e = 1);
  unsigned degree(Symbol s) const;
  bool divides(const Monomial& o) const;
  bool is_one() const { return n == 0; }

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  // a / b, requires b.divides(a)
  friend Monomial operator/(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b);
  friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }
  Monomial without(Symbol s) const;
  std::string str() const;
};

// Graded lex: returns <0, 0, >0.
int grlex_cmp(const Monomial& a, const Monomial& b);
struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return grlex_cmp(a, b) > 0; }
};
Monomial mono_gcd(const Monomial& a, const Monomial& b);

struct Term {
  Monomial m;
  GaussRat c;
};

// Multivariate polynomial over Q(i); terms strictly descending in grlex.
class Poly {
 public:
  Poly() = default;
  Poly(long c) : Poly(GaussRat(c)) {}  // NOLINT(implicit)
  Poly(const GaussRat& c);             // NOLINT(implicit)
  static Poly var(Symbol s, unsigned e = 1);
  static Poly monomial(const Monomial& m, GaussRat c);
  // Terms need not be sorted; like terms are combined.
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.is_one()); }
  bool is_one() const { return terms_.size() == 1 && terms_[0].m.is_one() && terms_[0].c.is_one(); }
  bool is_monomial() const { return terms_.size() == 1; }
  GaussRat constant_value() const;  // requires is_constant
  const Term& lead() const { return terms_.front(); }
  const GaussRat& lc() const { return terms_.front().c; }
  const Monomial& lm() const { return terms_.front().m; }
  bool has_complex_coeffs() const;

  unsigned degree(Symbol s) const;
  unsigned total_degree() const;
  std::vector<Symbol> variables() const;
  bool contains(Symbol s) const { return degree(s) > 0; }
  // Minimal exponents over all terms.
  Monomial monomial_content() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly scaled(const GaussRat& c) const;
  Poly mul_monomial(const Monomial& m, const GaussRat& c) const;
  Poly div_monomial(const Monomial& m) const;  // requires m divides every term
  Poly pow(unsigned e) const;
  Poly monic() const;  // divides by lc; zero stays zero

  // Exact division; nullopt when b does not divide *this.
  std::optional<Poly> divide_exact(const Poly& b) const;

  Poly derivative(Symbol s) const;
  // Coefficient of s^k (as polynomial in the remaining variables).
  Poly coefficient(Symbol s, unsigned k) const;
  // Evaluate numerically; missing symbols throw.
  std::complex<double> eval(const std::function<std::complex<double>(Symbol)>& val) const;

  std::string str() const;

 private:
  std::vector<Term> terms_;
  friend class PolyBuilder;
};

Poly gcd(const Poly& a, const Poly& b);

struct GcdWithCofactors {
  Poly g, abar, bbar;  // a = g*abar, b = g*bbar; g monic
};
GcdWithCofactors gcd_cofactors(const Poly& a, const Poly& b);

}  // namespace piii::exactalg
