#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "piii/monodromy/monodromy.hpp"

using namespace piii::exactalg;
using namespace piii::monodromy;
using piii::laxops::Family;
using oracle::P;

namespace {

using C = std::complex<double>;

C cval(const RatFun& f) { return f.constant_value().to_complex(); }

// Newton on grad F = 0 from many starts; returns the distinct roots with F = 0.
std::vector<std::array<C, 3>> numeric_singular(C p1, C p2, C p0, std::mt19937_64& g) {
  std::uniform_real_distribution<double> U(-3, 3);
  std::vector<std::array<C, 3>> found;
  for (int start = 0; start < 200; ++start) {
    C x1(U(g), U(g)), x2(U(g), U(g)), x3(U(g), U(g));
    for (int it = 0; it < 60; ++it) {
      C g1 = x2 * x3 + 2.0 * x1 + p1, g2 = x1 * x3 + 2.0 * x2 + p2, g3 = x1 * x2;
      // Jacobian of the gradient (the Hessian)
      C H[3][3] = {{2.0, x3, x2}, {x3, 2.0, x1}, {x2, x1, 0.0}};
      C r[3] = {-g1, -g2, -g3};
      // Cramer
      auto det3 = [](C m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
      };
      C D = det3(H);
      if (std::abs(D) < 1e-14) break;
      C d[3];
      for (int k = 0; k < 3; ++k) {
        C M[3][3];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) M[i][j] = j == k ? r[i] : H[i][j];
        d[k] = det3(M) / D;
      }
      x1 += d[0], x2 += d[1], x3 += d[2];
    }
    C g1 = x2 * x3 + 2.0 * x1 + p1, g2 = x1 * x3 + 2.0 * x2 + p2, g3 = x1 * x2;
    C F = x1 * x2 * x3 + x1 * x1 + x2 * x2 + p1 * x1 + p2 * x2 + p0;
    if (std::abs(g1) + std::abs(g2) + std::abs(g3) > 1e-10 || std::abs(F) > 1e-8) continue;
    bool dup = false;
    for (auto& f : found)
      if (std::abs(f[0] - x1) + std::abs(f[1] - x2) + std::abs(f[2] - x3) < 1e-6) dup = true;
    if (!dup) found.push_back({x1, x2, x3});
  }
  return found;
}

bool same_points(std::vector<Point> a, std::vector<Point> b) {
  if (a.size() != b.size()) return false;
  for (auto& p : a) {
    bool hit = false;
    for (auto& q : b)
      if (p[0] == q[0] && p[1] == q[1] && p[2] == q[2]) hit = true;
    if (!hit) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("monodromy") {
  TEST_CASE("surfaces") {
    RatFun al = P("alpha"), be = P("beta");
    auto S = surface(Family::D6, al, be);
    CHECK(S.p1 == P("1 + alpha*beta"));
    CHECK(S.p2 == P("alpha + beta"));
    CHECK(S.p0 == P("alpha*beta"));
    auto T = surface(Family::D7, al);
    CHECK(T.p1 == al);
    CHECK(T.p2 == RatFun(1));
    CHECK(T.p0.is_zero());
    auto U = surface(Family::D6, RatFun(1), RatFun(1));
    CHECK(U.p1 == RatFun(2));
    CHECK(U.p2 == RatFun(2));
    CHECK(U.p0 == RatFun(1));
    CHECK_THROWS_AS(surface(Family::D6, RatFun(0), be), MonodromyError);
    CHECK_THROWS_AS(surface(Family::D6, al, RatFun(0)), MonodromyError);
    CHECK_THROWS_AS(surface(Family::D7, RatFun(0)), MonodromyError);
    // dF/dx3 = x1 x2 structurally
    for (auto& s : {S, T}) {
      RatFun F = s.polynomial();
      CHECK(F.derivative(piii::monodromy::sym::x(3)) == P("x1*x2"));
    }
  }

  TEST_CASE("singular points, listed cases") {
    RatFun al = P("alpha");
    auto s1 = singular_points(surface(Family::D6, al, al));
    CHECK(same_points(s1.points, {{RatFun(), -al, al + al.inverse()}}));
    auto s2 = singular_points(surface(Family::D6, RatFun(1), RatFun(1)));
    CHECK(same_points(s2.points, {{RatFun(), RatFun(-1), RatFun(2)}, {RatFun(-1), RatFun(), RatFun(2)}}));
    auto s3 = singular_points(surface(Family::D6, RatFun(-1), RatFun(-1)));
    CHECK(same_points(s3.points, {{RatFun(), RatFun(1), RatFun(-2)}, {RatFun(-1), RatFun(), RatFun(-2)}}));
    auto s4 = singular_points(surface(Family::D6, al, al.inverse()));
    CHECK(same_points(s4.points, {{RatFun(-1), RatFun(), al + al.inverse()}}));
    CHECK(singular_points(surface(Family::D7, al)).points.empty());
    // every returned point is on the surface with vanishing gradient
    for (auto& [a, b] : {std::pair{al, al}, {RatFun(1), RatFun(1)}, {RatFun(-1), RatFun(-1)}, {al, al.inverse()}}) {
      auto S = surface(Family::D6, a, b);
      for (auto& x : singular_points(S).points) {
        CHECK(S.eval(x).is_zero());
        for (auto& g : S.gradient(x)) CHECK(g.is_zero());
      }
    }
    // degenerate family flag
    CubicSurface Z{Family::D6, RatFun(), RatFun(), RatFun()};
    CHECK(singular_points(Z).degenerate_axis);
  }

  TEST_CASE("singular points, random parameters") {
    oracle::Rng rng;
    int checked = 0;
    while (checked < 100) {
      GaussRat a = rng.gauss(), b = rng.gauss();
      if (a.is_zero() || b.is_zero() || (a - b).is_zero() || (a * b - GaussRat(1)).is_zero()) continue;
      ++checked;
      CHECK(singular_points(surface(Family::D6, RatFun(a), RatFun(b))).points.empty());
      CHECK(singular_points(surface(Family::D7, RatFun(a))).points.empty());
    }
  }

  TEST_CASE("singular points agree with numeric gradient root finding") {
    std::mt19937_64 g(7);
    for (auto [a, b] : {std::pair{P("3/2"), P("2/3")}, {P("2"), P("2")}, {P("1/3 + i"), P("1/5")}, {P("1"), P("1")}}) {
      auto S = surface(Family::D6, a, b);
      auto exact = singular_points(S).points;
      auto num = numeric_singular(cval(S.p1), cval(S.p2), cval(S.p0), g);
      INFO("alpha=", a.str(), " beta=", b.str());
      CHECK(num.size() == exact.size());
      for (auto& x : exact) {
        bool hit = false;
        for (auto& y : num)
          if (std::abs(y[0] - cval(x[0])) + std::abs(y[1] - cval(x[1])) + std::abs(y[2] - cval(x[2])) < 1e-6) hit = true;
        CHECK(hit);
      }
    }
  }

  TEST_CASE("D6 embedding") {
    CHECK(embed_d6_chart_identity().is_zero());
    // direct-sum data lands on the singular point
    MonodromyDataD6 m;
    m.alpha = P("alpha");
    m.a1 = m.a2 = m.l2 = m.l3 = RatFun();
    m.l1 = m.l4 = RatFun(1);
    Embedding e = embed_d6(m);
    CHECK(e.beta == m.alpha);
    CHECK(e.on_surface);
    CHECK(e.x[0].is_zero());
    CHECK(e.x[1] == -m.alpha);
    CHECK(e.x[2] == m.alpha + m.alpha.inverse());
    // invariant violation
    MonodromyDataD6 bad = m;
    bad.l4 = RatFun(2);
    CHECK_THROWS_AS(embed_d6(bad), MonodromyError);
    // numeric sampling
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> U(-2, 2);
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
      NumericD6 d{C(U(g), U(g)), C(U(g), U(g)), C(U(g), U(g)), C(0.5 + std::abs(U(g)), U(g)), C(U(g), U(g)), C(U(g), U(g))};
      worst = std::max(worst, embed_d6_numeric_residual(d));
    }
    MESSAGE("max |F| over numeric samples: ", worst);
    CHECK(worst < 1e-12);
    // exact random samples satisfying both relations
    oracle::Rng rng;
    for (int k = 0; k < 20; ++k) {
      MonodromyDataD6 r;
      r.alpha = RatFun(rng.gauss() + GaussRat(5));
      r.a1 = RatFun(rng.gauss()), r.a2 = RatFun(rng.gauss());
      r.l1 = RatFun(rng.rat() + GaussRat(11)), r.l2 = RatFun(rng.rat()), r.l3 = RatFun(rng.rat());
      r.l4 = (RatFun(1) + r.l2 * r.l3) / r.l1;
      if (r.beta().is_zero()) continue;
      CHECK(embed_d6(r).on_surface);
    }
  }

  TEST_CASE("D7 alpha and Stokes data") {
    auto m = MonodromyDataD7::symbolic();
    m.l4 = (RatFun(1) + m.l2 * m.l3) / m.l1;
    D7Stokes s = d7_alpha_and_stokes(m);
    CHECK(s.alpha_identity);
    CHECK(s.reconstruction);
    CHECK(s.alpha == d7_alpha_formula(m.l1 * m.l2, m.l1 * m.l4, m.l3 * m.l4, m.e));
    CHECK(d7_invariants(m).relations_hold);
    // trivial Stokes point: l12 = l14 = 1/2, l23 = l34 = -1/2, e = 0
    MonodromyDataD7 p{RatFun(), RatFun(1), P("1/2"), RatFun(-1), P("1/2")};
    auto inv = d7_invariants(p);
    CHECK(inv.l12 == P("1/2"));
    CHECK(inv.l14 == P("1/2"));
    CHECK(inv.l23 == P("-1/2"));
    CHECK(inv.l34 == P("-1/2"));
    CHECK(inv.relations_hold);
    D7Stokes t = d7_alpha_and_stokes(p);
    CHECK(t.alpha == P("i"));
    CHECK(t.c1.is_zero());
    CHECK(t.c2.is_zero());
    CHECK(t.reconstruction);
    // identity link and e = 0 is excluded
    MonodromyDataD7 id{RatFun(), RatFun(1), RatFun(), RatFun(), RatFun(1)};
    CHECK_THROWS_AS(d7_alpha_and_stokes(id), MonodromyError);
    MonodromyDataD7 bad{RatFun(), RatFun(2), RatFun(), RatFun(), RatFun(1)};
    CHECK_THROWS_AS(d7_alpha_and_stokes(bad), MonodromyError);
  }

  TEST_CASE("D7 algebraic point consistency") {
    auto c = d7_algebraic_point_check();
    CHECK(c.trace_top0 == RatFun(-1));
    CHECK(c.traces_equal);
    CHECK(c.order_three);
  }

  TEST_CASE("automorphism actions") {
    RatFun al = P("alpha"), be = P("beta");
    Point x{P("x1"), P("x2"), P("x3")};
    auto r1 = automorphism_action(Sigma::s1, al, be, x);
    CHECK(r1.preserved);
    CHECK(r1.scale == P("1/(alpha^2*beta^2)"));
    auto r2 = automorphism_action(Sigma::s2, al, be, x);
    CHECK(r2.preserved);
    CHECK(r2.scale == RatFun(1));
    CHECK(automorphism_action(Sigma::s4, al, be, x).preserved);
    // sigma3 as printed exchanges the roles of the x1 and x2 coefficients
    auto r3 = automorphism_action(Sigma::s3, al, be, x);
    MESSAGE("sigma3 discrepancy: ", r3.discrepancy.str());
    CHECK_FALSE(r3.preserved);
    CHECK(r3.discrepancy == P("-(1 - alpha)*(1 - beta)*(x1 - x2)"));
    CHECK(r3.discrepancy_after_swap.is_zero());
    // images of a concrete point
    Point y{RatFun(1), RatFun(2), RatFun(3)};
    auto r = automorphism_action(Sigma::s2, P("2"), P("3"), y);
    CHECK(r.image[1] == RatFun(-2));
    CHECK(r.alpha == RatFun(-2));
  }

  TEST_CASE("reducible locus") {
    RatFun al = P("alpha");
    CHECK(reducible_locus(al, P("beta")).empty());
    CHECK(reducible_locus(P("2"), P("3")).empty());
    auto c1 = reducible_locus(al, al);
    REQUIRE(c1.size() == 2);
    CHECK(c1[0].coordinate == "(l3:a1)");
    CHECK(c1[1].coordinate == "(l2:a2)");
    CHECK(reducible_locus(al, al.inverse()).size() == 2);
    CHECK(reducible_locus(RatFun(1), RatFun(1)).size() == 4);
    CHECK(reducible_locus(RatFun(-1), RatFun(-1)).size() == 4);
    // every component: generic members have the right beta, are reducible,
    // and map to the component's singular point
    for (auto [a, b] : {std::pair{al, al}, {al, al.inverse()}, {RatFun(1), RatFun(1)}, {RatFun(-1), RatFun(-1)}}) {
      auto S = surface(Family::D6, a, b);
      auto sing = singular_points(S).points;
      for (auto& c : reducible_locus(a, b)) {
        INFO("component ", c.coordinate, " at alpha=", a.str(), " beta=", b.str());
        MonodromyDataD6 m = reducible_member(c, a, P("u"), P("v"));
        CHECK(m.beta() == b);
        Mat ti = m.top_inf();
        // the invariant line of top0 is carried to an invariant line of top_inf
        bool upper_right = c.zero_link == 1 || c.zero_link == 2;  // image line is E2, else E1
        CHECK((upper_right ? ti[1] : ti[2]).is_zero());
        Embedding e = embed_d6(m);
        CHECK(e.on_surface);
        CHECK(e.x == c.singular_point);
        bool listed = false;
        for (auto& p : sing) listed = listed || p == c.singular_point;
        CHECK(listed);
      }
    }
  }
}
