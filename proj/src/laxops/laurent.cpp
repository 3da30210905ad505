#include "piii/laxops/laurent.hpp"

namespace piii::laxops {

RatFun Laurent::coeff(int k) const {
  auto it = c_.find(k);
  return it == c_.end() ? RatFun() : it->second;
}

void Laurent::set(int k, const RatFun& v) {
  if (v.is_zero())
    c_.erase(k);
  else
    c_[k] = v;
}

Laurent Laurent::operator-() const {
  Laurent r;
  for (auto& [k, v] : c_) r.c_[k] = -v;
  return r;
}

Laurent operator+(const Laurent& a, const Laurent& b) {
  Laurent r = a;
  for (auto& [k, v] : b.c_) r.set(k, r.coeff(k) + v);
  return r;
}

Laurent operator-(const Laurent& a, const Laurent& b) { return a + (-b); }

Laurent operator*(const Laurent& a, const Laurent& b) {
  Laurent r;
  for (auto& [i, u] : a.c_)
    for (auto& [j, v] : b.c_) r.set(i + j, r.coeff(i + j) + u * v);
  return r;
}

bool operator==(const Laurent& a, const Laurent& b) { return a.c_ == b.c_; }

Laurent Laurent::scaled(const RatFun& s) const {
  Laurent r;
  if (s.is_zero()) return r;
  for (auto& [k, v] : c_) r.c_[k] = v * s;
  return r;
}

Laurent Laurent::z_dz() const {
  Laurent r;
  for (auto& [k, v] : c_)
    if (k) r.c_[k] = v * RatFun(k);
  return r;
}

Laurent Laurent::at_inverse_z() const {
  Laurent r;
  for (auto& [k, v] : c_) r.c_[-k] = v;
  return r;
}

Laurent Laurent::at_scaled_z(const exactalg::GaussRat& lambda) const {
  Laurent r;
  for (auto& [k, v] : c_) r.set(k, v * RatFun(lambda.pow(k)));
  return r;
}

Laurent Laurent::map(const std::function<RatFun(const RatFun&)>& f) const {
  Laurent r;
  for (auto& [k, v] : c_) r.set(k, f(v));
  return r;
}

std::string Laurent::str() const {
  if (c_.empty()) return "0";
  std::string s;
  for (auto& [k, v] : c_) {
    if (!s.empty()) s += " + ";
    s += "(" + v.str() + ")";
    if (k) s += "*z^" + (k < 0 ? "(" + std::to_string(k) + ")" : std::to_string(k));
  }
  return s;
}

Mat2 Mat2::identity() {
  Mat2 r;
  r(0, 0) = Laurent(RatFun(1));
  r(1, 1) = Laurent(RatFun(1));
  return r;
}

bool Mat2::is_zero() const {
  for (auto& e : m)
    if (!e.is_zero()) return false;
  return true;
}

Mat2 Mat2::map(const std::function<Laurent(const Laurent&)>& f) const {
  Mat2 r;
  for (int k = 0; k < 4; ++k) r.m[k] = f(m[k]);
  return r;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int k = 0; k < 4; ++k) r.m[k] = a.m[k] + b.m[k];
  return r;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int k = 0; k < 4; ++k) r.m[k] = a.m[k] - b.m[k];
  return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

bool operator==(const Mat2& a, const Mat2& b) { return a.m == b.m; }

Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

Laurent trace(const Mat2& a) { return a(0, 0) + a(1, 1); }

Laurent det(const Mat2& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

}  // namespace piii::laxops
