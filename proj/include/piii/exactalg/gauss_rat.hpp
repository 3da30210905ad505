#pragma once
#include <gmpxx.h>

#include <complex>
#include <string>

namespace piii::exactalg {

// Exact element of Q(i).
class GaussRat {
 public:
  GaussRat() = default;
  GaussRat(long v) : re_(v) {}  // NOLINT(implicit)
  GaussRat(mpq_class re, mpq_class im = 0);
  static GaussRat i() { return GaussRat(0, 1); }
  static GaussRat frac(long p, long q);

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return sgn(im_) == 0 && re_ == 1; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_integer() const { return is_real() && re_.get_den() == 1; }

  GaussRat operator-() const;
  GaussRat conj() const { return GaussRat(re_, -im_); }
  GaussRat inverse() const;  // throws DivisionByZero on 0

  GaussRat& operator+=(const GaussRat& o);
  GaussRat& operator-=(const GaussRat& o);
  GaussRat& operator*=(const GaussRat& o);
  GaussRat& operator/=(const GaussRat& o) { return *this *= o.inverse(); }

  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
  friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
  friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

  GaussRat pow(long e) const;
  // Correctly rounded when numerator and denominator fit in 53 bits.
  std::complex<double> to_complex() const;

  // Canonical text: "3/2", "-i", "1/2+3*i", "-2*i".
  std::string str() const;
  // True if str() needs parentheses when used as a product factor.
  bool needs_parens() const { return sgn(re_) != 0 && sgn(im_) != 0; }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

}  // namespace piii::exactalg
