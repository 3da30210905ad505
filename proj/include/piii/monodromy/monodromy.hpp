#pragma once
#include <array>
#include <complex>
#include <string>
#include <vector>

#include "piii/exactalg/errors.hpp"
#include "piii/exactalg/ratfun.hpp"
#include "piii/laxops/lax.hpp"

namespace piii::monodromy {

using exactalg::RatFun;
using laxops::Family;

struct MonodromyError : exactalg::AlgebraError {
  using AlgebraError::AlgebraError;
};

// Row-major 2x2 over RatFun.
using Mat = std::array<RatFun, 4>;
Mat mat_mul(const Mat& x, const Mat& y);
Mat mat_inverse_det1(const Mat& x);  // assumes det = 1

using Point = std::array<RatFun, 3>;
std::string to_string(const Point& x);

namespace sym {
exactalg::Symbol x(int k);  // x1, x2, x3
exactalg::Symbol l(int k);  // l1..l4 (link entries)
exactalg::Symbol a(int k);  // a1, a2 (Stokes at 0, D6)
exactalg::Symbol e();       // Stokes at infinity, D7
}  // namespace sym

// x1 x2 x3 + x1^2 + x2^2 + p1 x1 + p2 x2 + p0 = 0
struct CubicSurface {
  Family family = Family::D6;
  RatFun p1, p2, p0;

  RatFun eval(const Point& x) const;
  Point gradient(const Point& x) const;
  RatFun polynomial() const;  // in the symbols x1, x2, x3
  std::string str() const;
};

// D6: (1 + alpha beta, alpha + beta, alpha beta); D7: (alpha, 1, 0). beta is
// ignored for D7. Zero parameters throw MonodromyError.
CubicSurface surface(Family f, const RatFun& alpha, const RatFun& beta = RatFun(1));

struct SingularLocus {
  std::vector<Point> points;
  bool degenerate_axis = false;  // p1 = p2 = p0 = 0: the whole x3-axis is singular
};
// Case analysis on dF/dx3 = x1 x2; zero tests are exact, so symbolic
// coefficients give the generic answer.
SingularLocus singular_points(const CubicSurface& S);

struct MonodromyDataD6 {
  RatFun alpha, a1, a2, b1, b2, l1, l2, l3, l4;
  static MonodromyDataD6 symbolic();  // b1, b2 left zero; see complete_infinity
  Mat top0() const;
  Mat link() const;
  RatFun beta() const;   // (1,1) entry of L top0 L^-1
  Mat top_inf() const;   // L top0 L^-1
};
// Fills b1, b2 from top_inf = (beta, beta b2; b1/beta, (1 + b1 b2)/beta).
MonodromyDataD6 complete_infinity(MonodromyDataD6 m);

struct Embedding {
  Point x;
  RatFun beta;
  RatFun F;  // F_{alpha,beta}(x)
  bool on_surface = false;
};
// Throws MonodromyError unless det L = 1, alpha != 0 and beta != 0.
Embedding embed_d6(const MonodromyDataD6& m);
// F on the chart l1 != 0 after l4 = (1 + l2 l3)/l1, all other data symbolic.
RatFun embed_d6_chart_identity();

struct NumericD6 {
  std::complex<double> alpha, a1, a2, l1, l2, l3;  // l4 from det L = 1
};
double embed_d6_numeric_residual(const NumericD6& m);

struct MonodromyDataD7 {
  RatFun e, l1, l2, l3, l4;
  static MonodromyDataD7 symbolic();
  Mat link() const;
};
// (0 -i; -i 0)(1 0; e 1)
Mat d7_top_inf(const RatFun& e);
// alpha = -i l14 e + i l12 - i l34
RatFun d7_alpha_formula(const RatFun& l12, const RatFun& l14, const RatFun& l34, const RatFun& e);

struct D7Stokes {
  RatFun alpha, c1, c2;
  Mat top0;               // L^-1 top_inf L
  bool alpha_identity = false;  // alpha equals the closed formula
  bool reconstruction = false;  // (alpha, alpha c2; c1/alpha, (1 + c1 c2)/alpha) == top0
};
// Throws MonodromyError if det L != 1 or alpha = 0 (excluded locus).
D7Stokes d7_alpha_and_stokes(const MonodromyDataD7& m);

struct D7Invariants {
  RatFun l12, l14, l23, l34;
  bool relations_hold = false;  // l14 - l23 = 1 and l12 l34 - l14 l23 = 0
};
D7Invariants d7_invariants(const MonodromyDataD7& m);
bool d7_invariant_relations(const RatFun& l12, const RatFun& l14, const RatFun& l23, const RatFun& l34);

// Algebraic solutions sit at alpha = 1, c1 c2 = -3, e = -i: top0 and top_inf
// must then be conjugate in SL2 (equal traces) and of order three.
struct AlgebraicPointCheck {
  RatFun trace_top0, trace_top_inf;
  bool traces_equal = false;
  bool order_three = false;
};
AlgebraicPointCheck d7_algebraic_point_check();

enum class Sigma { s1, s2, s3, s4 };
std::string to_string(Sigma s);
Sigma parse_sigma(const std::string& s);

struct AutomorphismReport {
  Sigma sigma;
  RatFun alpha, beta;  // image parameters
  Point image;         // image of the given point
  // Symbolic check with x1, x2, x3 free: every sigma scales coordinates
  // diagonally, x'_k = c_k x_k, so F' = c1 c2 c3 F is the expected identity.
  RatFun scale;        // c1 c2 c3
  RatFun discrepancy;  // F'(x') / scale - F(x), zero iff the surface is preserved
  RatFun discrepancy_after_swap;  // same with x1' and x2' exchanged
  bool preserved = false;
};
AutomorphismReport automorphism_action(Sigma s, const RatFun& alpha, const RatFun& beta, const Point& x);

// One irreducible component of the reducible locus: the link has one zero
// entry, top0 is triangular, and the component is the projective line of the
// two remaining off-diagonal coordinates.
struct ReducibleComponent {
  int zero_link = 0;        // 1..4: which l_k vanishes
  bool top0_lower = false;  // lower triangular (a2 = 0) or upper (a1 = 0)
  std::string coordinate;   // e.g. "(l3:a1)"
  Point singular_point;     // image in the cubic surface
};
// Empty unless alpha = beta^{+-1}; four components when alpha = beta = +-1.
std::vector<ReducibleComponent> reducible_locus(const RatFun& alpha, const RatFun& beta);
// Member of the component with projective coordinate (u : v), normalized.
MonodromyDataD6 reducible_member(const ReducibleComponent& c, const RatFun& alpha, const RatFun& u,
                                 const RatFun& v);

}  // namespace piii::monodromy
