#pragma once
#include <array>
#include <functional>
#include <map>
#include <string>

#include "piii/exactalg/derivation.hpp"
#include "piii/exactalg/ratfun.hpp"

namespace piii::laxops {

using exactalg::RatFun;

// Laurent polynomial in z with rational-function coefficients.
class Laurent {
 public:
  Laurent() = default;
  Laurent(const RatFun& c) { set(0, c); }  // NOLINT(implicit)
  static Laurent mono(const RatFun& c, int k) {
    Laurent l;
    l.set(k, c);
    return l;
  }

  const std::map<int, RatFun>& coeffs() const { return c_; }
  RatFun coeff(int k) const;
  void set(int k, const RatFun& v);
  bool is_zero() const { return c_.empty(); }
  int min_exp() const { return c_.empty() ? 0 : c_.begin()->first; }
  int max_exp() const { return c_.empty() ? 0 : c_.rbegin()->first; }

  Laurent operator-() const;
  friend Laurent operator+(const Laurent& a, const Laurent& b);
  friend Laurent operator-(const Laurent& a, const Laurent& b);
  friend Laurent operator*(const Laurent& a, const Laurent& b);
  friend bool operator==(const Laurent& a, const Laurent& b);
  Laurent scaled(const RatFun& s) const;
  Laurent z_dz() const;                                          // z d/dz
  Laurent at_inverse_z() const;                                  // f(1/z)
  Laurent at_scaled_z(const exactalg::GaussRat& lambda) const;   // f(lambda z)
  Laurent map(const std::function<RatFun(const RatFun&)>& f) const;
  std::string str() const;

 private:
  std::map<int, RatFun> c_;
};

// Row-major 2x2: m[0]=11, m[1]=12, m[2]=21, m[3]=22.
struct Mat2 {
  std::array<Laurent, 4> m;
  Laurent& operator()(int i, int j) { return m[2 * i + j]; }
  const Laurent& operator()(int i, int j) const { return m[2 * i + j]; }
  static Mat2 identity();
  bool is_zero() const;
  Mat2 map(const std::function<Laurent(const Laurent&)>& f) const;
};

Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(const Mat2& a, const Mat2& b);
bool operator==(const Mat2& a, const Mat2& b);
Mat2 commutator(const Mat2& a, const Mat2& b);  // ab - ba
Laurent trace(const Mat2& a);
Laurent det(const Mat2& a);

}  // namespace piii::laxops
