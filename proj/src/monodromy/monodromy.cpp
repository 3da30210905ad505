#include "piii/monodromy/monodromy.hpp"

#include <cmath>

namespace piii::monodromy {

using exactalg::Bindings;
using exactalg::GaussRat;
using exactalg::Symbol;

namespace {

RatFun V(Symbol s) { return RatFun::var(s); }
const RatFun kI{GaussRat::i()};

bool zero(const RatFun& f) { return f.is_zero(); }

}  // namespace

Mat mat_mul(const Mat& x, const Mat& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

Mat mat_inverse_det1(const Mat& x) { return {x[3], -x[1], -x[2], x[0]}; }

std::string to_string(const Point& x) { return "(" + x[0].str() + ", " + x[1].str() + ", " + x[2].str() + ")"; }

namespace sym {
Symbol x(int k) { return Symbol::intern("x" + std::to_string(k)); }
Symbol l(int k) { return Symbol::intern("l" + std::to_string(k)); }
Symbol a(int k) { return Symbol::intern("a" + std::to_string(k)); }
Symbol e() { return Symbol::intern("e"); }
}  // namespace sym

// ------------------------------------------------------------- surfaces

RatFun CubicSurface::eval(const Point& x) const {
  return x[0] * x[1] * x[2] + x[0] * x[0] + x[1] * x[1] + p1 * x[0] + p2 * x[1] + p0;
}

Point CubicSurface::gradient(const Point& x) const {
  return {x[1] * x[2] + x[0] * 2 + p1, x[0] * x[2] + x[1] * 2 + p2, x[0] * x[1]};
}

RatFun CubicSurface::polynomial() const { return eval({V(sym::x(1)), V(sym::x(2)), V(sym::x(3))}); }

std::string CubicSurface::str() const { return polynomial().str(); }

CubicSurface surface(Family f, const RatFun& alpha, const RatFun& beta) {
  if (zero(alpha)) throw MonodromyError("alpha must be nonzero");
  if (f == Family::D7) return {f, alpha, RatFun(1), RatFun()};
  if (zero(beta)) throw MonodromyError("beta must be nonzero");
  return {f, RatFun(1) + alpha * beta, alpha + beta, alpha * beta};
}

SingularLocus singular_points(const CubicSurface& S) {
  // dF/dx3 = x1 x2, so x1 = 0 or x2 = 0.
  SingularLocus out;
  const RatFun four(4), two(2);
  // x1 = 0, x2 != 0: dF/dx2 gives x2 = -p2/2, F gives p2^2 = 4 p0, dF/dx1 gives x3 = -p1/x2.
  if (!zero(S.p2) && zero(S.p2 * S.p2 - four * S.p0)) {
    RatFun x2 = -S.p2 / two;
    out.points.push_back({RatFun(), x2, -S.p1 / x2});
  }
  // x2 = 0, x1 != 0: symmetric with p1 <-> p2.
  if (!zero(S.p1) && zero(S.p1 * S.p1 - four * S.p0)) {
    RatFun x1 = -S.p1 / two;
    out.points.push_back({x1, RatFun(), -S.p2 / x1});
  }
  // x1 = x2 = 0: needs p1 = p2 = 0 and F = p0 = 0, then every x3 works.
  if (zero(S.p1) && zero(S.p2) && zero(S.p0)) out.degenerate_axis = true;
  return out;
}

// ------------------------------------------------------------- D6 data

MonodromyDataD6 MonodromyDataD6::symbolic() {
  MonodromyDataD6 m;
  m.alpha = V(exactalg::sym::alpha());
  m.a1 = V(sym::a(1)), m.a2 = V(sym::a(2));
  m.l1 = V(sym::l(1)), m.l2 = V(sym::l(2)), m.l3 = V(sym::l(3)), m.l4 = V(sym::l(4));
  return m;
}

Mat MonodromyDataD6::top0() const {
  return {alpha, alpha * a2, a1 / alpha, (RatFun(1) + a1 * a2) / alpha};
}

Mat MonodromyDataD6::link() const { return {l1, l2, l3, l4}; }

RatFun MonodromyDataD6::beta() const {
  return l1 * l4 * alpha + l2 * l4 * a1 / alpha - l1 * l3 * alpha * a2 - l2 * l3 * (RatFun(1) + a1 * a2) / alpha;
}

Mat MonodromyDataD6::top_inf() const { return mat_mul(mat_mul(link(), top0()), mat_inverse_det1(link())); }

MonodromyDataD6 complete_infinity(MonodromyDataD6 m) {
  Mat T = m.top_inf();
  if (zero(T[0])) throw MonodromyError("beta = 0 is excluded");
  m.b2 = T[1] / T[0];
  m.b1 = T[2] * T[0];
  return m;
}

namespace {

void check_d6(const MonodromyDataD6& m) {
  if (zero(m.alpha)) throw MonodromyError("alpha must be nonzero");
  if (!zero(m.l1 * m.l4 - m.l2 * m.l3 - 1)) throw MonodromyError("link determinant must be 1");
}

Point embed_point(const MonodromyDataD6& m) {
  return {m.l1 * m.l4 - 1, m.alpha * m.a2 * m.l1 * m.l3 - m.alpha * m.l1 * m.l4,
          (RatFun(1) + m.a1 * m.a2) / m.alpha + m.alpha};
}

}  // namespace

Embedding embed_d6(const MonodromyDataD6& m) {
  check_d6(m);
  Embedding out;
  out.beta = m.beta();
  if (zero(out.beta)) throw MonodromyError("beta = 0 is excluded");
  out.x = embed_point(m);
  out.F = surface(Family::D6, m.alpha, out.beta).eval(out.x);
  out.on_surface = out.F.is_zero();
  return out;
}

RatFun embed_d6_chart_identity() {
  MonodromyDataD6 m = MonodromyDataD6::symbolic();
  m.l4 = (RatFun(1) + m.l2 * m.l3) / m.l1;
  return surface(Family::D6, m.alpha, m.beta()).eval(embed_point(m));
}

double embed_d6_numeric_residual(const NumericD6& m) {
  using C = std::complex<double>;
  C l4 = (1.0 + m.l2 * m.l3) / m.l1;
  C al = m.alpha;
  C beta = m.l1 * l4 * al + m.l2 * l4 * m.a1 / al - m.l1 * m.l3 * al * m.a2 - m.l2 * m.l3 * (1.0 + m.a1 * m.a2) / al;
  C x1 = m.l1 * l4 - 1.0, x2 = al * m.a2 * m.l1 * m.l3 - al * m.l1 * l4, x3 = (1.0 + m.a1 * m.a2) / al + al;
  C F = x1 * x2 * x3 + x1 * x1 + x2 * x2 + (1.0 + al * beta) * x1 + (al + beta) * x2 + al * beta;
  return std::abs(F);
}

// ------------------------------------------------------------- D7 data

MonodromyDataD7 MonodromyDataD7::symbolic() {
  return {V(sym::e()), V(sym::l(1)), V(sym::l(2)), V(sym::l(3)), V(sym::l(4))};
}

Mat MonodromyDataD7::link() const { return {l1, l2, l3, l4}; }

Mat d7_top_inf(const RatFun& e) {
  Mat formal{RatFun(), -kI, -kI, RatFun()};
  Mat stokes{RatFun(1), RatFun(), e, RatFun(1)};
  return mat_mul(formal, stokes);
}

RatFun d7_alpha_formula(const RatFun& l12, const RatFun& l14, const RatFun& l34, const RatFun& e) {
  return -kI * l14 * e + kI * l12 - kI * l34;
}

D7Stokes d7_alpha_and_stokes(const MonodromyDataD7& m) {
  if (!zero(m.l1 * m.l4 - m.l2 * m.l3 - 1)) throw MonodromyError("link determinant must be 1");
  D7Stokes out;
  out.top0 = mat_mul(mat_mul(mat_inverse_det1(m.link()), d7_top_inf(m.e)), m.link());
  out.alpha = out.top0[0];
  if (zero(out.alpha)) throw MonodromyError("alpha = 0: excluded locus");
  out.c2 = out.top0[1] / out.alpha;
  out.c1 = out.alpha * out.top0[2];
  out.alpha_identity = out.alpha == d7_alpha_formula(m.l1 * m.l2, m.l1 * m.l4, m.l3 * m.l4, m.e);
  Mat rebuilt{out.alpha, out.alpha * out.c2, out.c1 / out.alpha, (RatFun(1) + out.c1 * out.c2) / out.alpha};
  out.reconstruction = rebuilt == out.top0;
  return out;
}

bool d7_invariant_relations(const RatFun& l12, const RatFun& l14, const RatFun& l23, const RatFun& l34) {
  return zero(l14 - l23 - 1) && zero(l12 * l34 - l14 * l23);
}

D7Invariants d7_invariants(const MonodromyDataD7& m) {
  D7Invariants out{m.l1 * m.l2, m.l1 * m.l4, m.l2 * m.l3, m.l3 * m.l4, false};
  out.relations_hold = d7_invariant_relations(out.l12, out.l14, out.l23, out.l34);
  return out;
}

AlgebraicPointCheck d7_algebraic_point_check() {
  // top0 at alpha = 1 with c1 c2 = -3: (1, c2; c1, 1 + c1 c2), trace 2 + c1 c2.
  AlgebraicPointCheck out;
  RatFun c1c2(-3);
  out.trace_top0 = RatFun(1) + (RatFun(1) + c1c2);
  Mat ti = d7_top_inf(-kI);
  out.trace_top_inf = ti[0] + ti[3];
  out.traces_equal = out.trace_top0 == out.trace_top_inf;
  Mat cube = mat_mul(ti, mat_mul(ti, ti));
  out.order_three = cube == Mat{RatFun(1), RatFun(), RatFun(), RatFun(1)};
  return out;
}

// ------------------------------------------------------------- automorphisms

std::string to_string(Sigma s) {
  switch (s) {
    case Sigma::s1: return "sigma1";
    case Sigma::s2: return "sigma2";
    case Sigma::s3: return "sigma3";
    case Sigma::s4: return "sigma4";
  }
  return "?";
}

Sigma parse_sigma(const std::string& s) {
  if (s == "sigma1" || s == "s1" || s == "1") return Sigma::s1;
  if (s == "sigma2" || s == "s2" || s == "2") return Sigma::s2;
  if (s == "sigma3" || s == "s3" || s == "3") return Sigma::s3;
  if (s == "sigma4" || s == "s4" || s == "4") return Sigma::s4;
  throw MonodromyError("unknown automorphism: " + s);
}

namespace {

struct SigmaMap {
  RatFun alpha, beta;
  std::array<RatFun, 3> c;  // x'_k = c_k x_k
};

SigmaMap sigma_map(Sigma s, const RatFun& al, const RatFun& be) {
  switch (s) {
    case Sigma::s1: {
      RatFun k = (al * be).inverse();
      return {al.inverse(), be.inverse(), {k, k, RatFun(1)}};
    }
    case Sigma::s2: return {-al, -be, {RatFun(1), RatFun(-1), RatFun(-1)}};
    case Sigma::s3: return {al.inverse(), be, {al.inverse(), al.inverse(), RatFun(1)}};
    case Sigma::s4: return {be, al, {RatFun(1), RatFun(1), RatFun(1)}};
  }
  throw MonodromyError("unknown automorphism");
}

}  // namespace

AutomorphismReport automorphism_action(Sigma s, const RatFun& alpha, const RatFun& beta, const Point& x) {
  if (zero(alpha) || zero(beta)) throw MonodromyError("alpha and beta must be nonzero");
  SigmaMap m = sigma_map(s, alpha, beta);
  AutomorphismReport r;
  r.sigma = s;
  r.alpha = m.alpha;
  r.beta = m.beta;
  for (int k = 0; k < 3; ++k) r.image[k] = m.c[k] * x[k];

  Point X{V(sym::x(1)), V(sym::x(2)), V(sym::x(3))};
  Point img{m.c[0] * X[0], m.c[1] * X[1], m.c[2] * X[2]};
  Point swapped{img[1], img[0], img[2]};
  CubicSurface src = surface(Family::D6, alpha, beta), dst = surface(Family::D6, m.alpha, m.beta);
  r.scale = m.c[0] * m.c[1] * m.c[2];
  RatFun F = src.eval(X);
  r.discrepancy = dst.eval(img) / r.scale - F;
  r.discrepancy_after_swap = dst.eval(swapped) / r.scale - F;
  r.preserved = r.discrepancy.is_zero();
  return r;
}

// ------------------------------------------------------------- reducible locus

std::vector<ReducibleComponent> reducible_locus(const RatFun& alpha, const RatFun& beta) {
  if (zero(alpha) || zero(beta)) throw MonodromyError("alpha and beta must be nonzero");
  std::vector<ReducibleComponent> out;
  RatFun x3 = alpha + alpha.inverse();
  // alpha = beta: top0 and L triangular of the same kind (the x1 = 0 point).
  if (zero(alpha - beta)) {
    out.push_back({2, true, "(l3:a1)", {RatFun(), -alpha, x3}});
    out.push_back({3, false, "(l2:a2)", {RatFun(), -alpha, x3}});
  }
  // alpha = 1/beta: L anti-triangular (the x2 = 0 point).
  if (zero(alpha * beta - 1)) {
    out.push_back({1, false, "(l4:a2)", {RatFun(-1), RatFun(), x3}});
    out.push_back({4, true, "(l1:a1)", {RatFun(-1), RatFun(), x3}});
  }
  return out;
}

MonodromyDataD6 reducible_member(const ReducibleComponent& c, const RatFun& alpha, const RatFun& u,
                                 const RatFun& v) {
  MonodromyDataD6 m;
  m.alpha = alpha;
  RatFun one(1);
  switch (c.zero_link) {
    case 2: m.l1 = one, m.l4 = one, m.l3 = u; break;
    case 3: m.l1 = one, m.l4 = one, m.l2 = u; break;
    case 1: m.l2 = one, m.l3 = -one, m.l4 = u; break;
    case 4: m.l2 = one, m.l3 = -one, m.l1 = u; break;
    default: throw MonodromyError("zero_link must be 1..4");
  }
  (c.top0_lower ? m.a1 : m.a2) = v;
  return complete_infinity(m);
}

}  // namespace piii::monodromy
