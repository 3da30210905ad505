#pragma once
#include <map>
#include <string>

#include "piii/exactalg/poly.hpp"

namespace piii::exactalg {

// Canonical num/den: gcd is a unit, den monic under grlex.
class RatFun {
 public:
  RatFun() : den_(1) {}
  RatFun(long c) : num_(c), den_(1) {}              // NOLINT(implicit)
  RatFun(const GaussRat& c) : num_(c), den_(1) {}   // NOLINT(implicit)
  RatFun(const Poly& p) : num_(p), den_(1) {}       // NOLINT(implicit)
  RatFun(const Poly& num, const Poly& den);         // normalizes
  static RatFun var(Symbol s) { return RatFun(Poly::var(s)); }
  static RatFun var(std::string_view name) { return var(Symbol::intern(name)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_one(); }
  GaussRat constant_value() const;  // requires is_constant
  std::vector<Symbol> variables() const;
  bool contains(Symbol s) const { return num_.contains(s) || den_.contains(s); }

  RatFun operator-() const;
  friend RatFun operator+(const RatFun& a, const RatFun& b);
  friend RatFun operator-(const RatFun& a, const RatFun& b);
  friend RatFun operator*(const RatFun& a, const RatFun& b);
  friend RatFun operator/(const RatFun& a, const RatFun& b);
  RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
  RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
  RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
  RatFun& operator/=(const RatFun& o) { return *this = *this / o; }
  friend bool operator==(const RatFun& a, const RatFun& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const RatFun& a, const RatFun& b) { return !(a == b); }
  // Independent equality test by cross multiplication.
  bool equals_cross(const RatFun& o) const { return num_ * o.den_ == o.num_ * den_; }

  RatFun inverse() const;
  RatFun pow(long e) const;
  RatFun derivative(Symbol s) const;
  std::complex<double> eval(const std::function<std::complex<double>(Symbol)>& val) const;

  std::string str() const;

 private:
  struct Raw {};
  RatFun(Poly n, Poly d, Raw) : num_(std::move(n)), den_(std::move(d)) {}
  Poly num_, den_;
};

// normalize(num/den); throws DivisionByZero on den = 0.
RatFun normalize(const Poly& num, const Poly& den);

using Bindings = std::map<Symbol, RatFun>;
// Simultaneous substitution. Throws SubstitutionPole if the denominator
// vanishes identically, RingError on theta/alpha level mixing.
RatFun substitute(const RatFun& f, const Bindings& b);
Poly substitute_poly_num(const Poly& p, const Bindings& b, Poly* den_out);

}  // namespace piii::exactalg
