#include "piii/exactalg/gauss_rat.hpp"

#include "piii/exactalg/errors.hpp"

namespace piii::exactalg {

GaussRat::GaussRat(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussRat GaussRat::frac(long p, long q) {
  if (q == 0) throw DivisionByZero();
  return GaussRat(mpq_class(p, q));
}

GaussRat GaussRat::operator-() const {
  GaussRat r;
  r.re_ = -re_;
  r.im_ = -im_;
  return r;
}

GaussRat GaussRat::inverse() const {
  if (is_zero()) throw DivisionByZero();
  if (is_real()) return GaussRat(1 / re_);
  mpq_class n = re_ * re_ + im_ * im_;
  return GaussRat(re_ / n, -im_ / n);
}

GaussRat& GaussRat::operator+=(const GaussRat& o) {
  re_ += o.re_;
  if (sgn(o.im_) != 0) im_ += o.im_;
  return *this;
}

GaussRat& GaussRat::operator-=(const GaussRat& o) {
  re_ -= o.re_;
  if (sgn(o.im_) != 0) im_ -= o.im_;
  return *this;
}

GaussRat& GaussRat::operator*=(const GaussRat& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class r = re_ * o.re_ - im_ * o.im_;
  mpq_class i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

GaussRat GaussRat::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  GaussRat base = *this, acc(1);
  while (e) {
    if (e & 1) acc *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return acc;
}

std::string GaussRat::str() const {
  if (sgn(im_) == 0) return re_.get_str();
  std::string imag;
  if (im_ == 1)
    imag = "i";
  else if (im_ == -1)
    imag = "-i";
  else
    imag = im_.get_str() + "*i";
  if (sgn(re_) == 0) return imag;
  return re_.get_str() + (imag[0] == '-' ? "" : "+") + imag;
}

}  // namespace piii::exactalg

namespace piii::exactalg {

namespace {
double rounded(const mpq_class& x) {
  // both parts exact as doubles: IEEE division rounds correctly
  if (mpz_sizeinbase(x.get_num_mpz_t(), 2) <= 53 && mpz_sizeinbase(x.get_den_mpz_t(), 2) <= 53)
    return x.get_num().get_d() / x.get_den().get_d();
  return x.get_d();
}
}  // namespace

std::complex<double> GaussRat::to_complex() const { return {rounded(re_), rounded(im_)}; }

}  // namespace piii::exactalg
