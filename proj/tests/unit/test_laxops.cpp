#include <cmath>
#include <chrono>

#include "doctest.h"
#include "oracle.hpp"
#include "piii/laxops/lax.hpp"

using namespace piii::exactalg;
using namespace piii::laxops;
using oracle::P;

namespace {

RatFun subst_all(const RatFun& f, const ChartState& s) { return substitute(f, s.bindings()); }

// Flow transported by a gauge T depending on the generators: B~ = T^{-1}(B T + D(T)).
Mat2 apply_D(const Mat2& M, const DerivationSpec& D) {
  return M.map([&](const Laurent& e) { return e.map([&](const RatFun& c) { return D.apply(c); }); });
}

}  // namespace

TEST_SUITE("laxops") {
  TEST_CASE("operators on the four charts are trace free and respect their range") {
    for (auto [f, c] : {std::pair{Family::D6, Chart::ST1}, {Family::D6, Chart::ST0}, {Family::D7, Chart::C0},
                        {Family::D7, Chart::CM1}}) {
      auto L = build_operator(ChartState::symbolic(f, c));
      CHECK(L.trace_free());
      CHECK(L.respects_range());
    }
    auto L6 = build_operator(ChartState::symbolic(Family::D6));
    CHECK(L6.m(1, 0) == Laurent::mono(RatFun(1), 1) + Laurent::mono(-P("q"), 0));
    CHECK(L6.m(0, 0) == Laurent::mono(P("a"), -1));
    CHECK(L6.m(0, 1).coeff(1) == P("t^2/4"));
    CHECK(L6.m(0, 1).coeff(0) == P("q*t^2/4 + t*thetainf/2"));
    CHECK(L6.m(0, 1).coeff(-2) == P("(a^2 - t^2/4)/q"));
    CHECK(L6.m(0, 1).coeff(-1) == P("((a^2 - t^2/4)/q - a - t*(theta0/2 - 1/2))/q"));
    auto L7 = build_operator(ChartState::symbolic(Family::D7));
    CHECK(L7.m(1, 0) == Laurent::mono(RatFun(1), 0) + Laurent::mono(-P("q"), -1));
    CHECK(L7.m(0, 1).coeff(1) == RatFun(1));
    CHECK(L7.m(0, 1).coeff(2).is_zero());
    CHECK(L7.m(0, 1).coeff(0) == P("-t*theta/(2*q) + (a^2 - t^2/4)/q^2"));
  }

  TEST_CASE("q = 0 is outside every principal chart") {
    auto s = ChartState::symbolic(Family::D6);
    s.q = RatFun(0);
    CHECK_THROWS_AS(build_operator(s), ChartDomainError);
    auto s7 = ChartState::symbolic(Family::D7);
    s7.q = RatFun(0);
    CHECK_THROWS_AS(build_operator(s7), ChartDomainError);
  }

  TEST_CASE("self commutator: zero flow, B = A") {
    DerivationSpec D(Symbol::intern("s"));
    D.constants({sym::q(), sym::a(), sym::t(), sym::theta0(), sym::thetainf()});
    auto L = build_operator(ChartState::symbolic(Family::D6));
    ZMatrixOperator B = L;
    B.kind = OpKind::deformation;
    Mat2 R = commutation_residual(L, B, D);
    CHECK(R == L.m.map([](const Laurent& e) { return -e.z_dz(); }));
    // z-constant A gives zero
    ZMatrixOperator C;
    C.m(0, 1) = Laurent(P("q"));
    C.m(1, 0) = Laurent(P("a"));
    ZMatrixOperator CB = C;
    CB.kind = OpKind::deformation;
    CHECK(commutation_residual(C, CB, D).is_zero());
  }

  TEST_CASE("derived D7 flow") {
    auto t0 = std::chrono::steady_clock::now();
    IsoFlow r = derive_isomonodromy_flow(Family::D7);
    MESSAGE("D7 derivation ms: ",
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count());
    CHECK(r.flow.image(sym::q()) == P("(q + 2*a)/t"));
    CHECK(r.flow.image(sym::a()) == P("(-t^2 - theta*t*q + 4*a^2 + 2*q*a + 2*q^3)/(2*t*q)"));
    auto L = build_operator(ChartState::symbolic(Family::D7));
    CHECK(commutation_residual(L, r.B, r.flow).is_zero());
    CHECK(r.B.trace_free());
  }

  TEST_CASE("derived D6 flow") {
    IsoFlow r = derive_isomonodromy_flow(Family::D6);
    CHECK(r.flow.image(sym::q()) == P("(4*a - q)/t"));
    CHECK(r.flow.image(sym::a()) == P("(4*a^2 - t^2 + q*(t - a - t*theta0) + q^3*t*thetainf + q^4*t^2)/(t*q)"));
    auto L = build_operator(ChartState::symbolic(Family::D6));
    CHECK(commutation_residual(L, r.B, r.flow).is_zero());
  }

  TEST_CASE("shrunk deformation window is inconsistent") {
    CHECK_THROWS_AS(derive_isomonodromy_flow(Family::D6, std::pair{-1, 0}), DerivationFailure);
  }

  TEST_CASE("second order reduction") {
    CHECK(reduce_to_second_order(expected_flow(Family::D7), Family::D7).is_zero());
    CHECK(reduce_to_second_order(expected_flow(Family::D6), Family::D6).is_zero());
    // theta0 -> theta0 + 1 in the flow
    DerivationSpec shifted(sym::t());
    shifted.dependent(sym::q(), expected_dq(Family::D6))
        .dependent(sym::a(), substitute(expected_da(Family::D6), {{sym::theta0(), P("theta0 + 1")}}))
        .constants({sym::theta0(), sym::thetainf()});
    RatFun r = reduce_to_second_order(shifted, Family::D6);
    MESSAGE("shifted residual: ", r.str());
    CHECK(r == P("-4/t"));
  }

  TEST_CASE("elimination consistency for D6") {
    auto D = expected_flow(Family::D6);
    RatFun q = P("q"), a = P("a"), t = P("t");
    RatFun direct = D.apply(D.apply(q));
    // q' = (4a - q)/t  =>  q'' = (4a' - q')/t - (4a - q)/t^2
    RatFun via_a = (D.apply(a) * 4 - D.apply(q)) / t - (a * 4 - q) / (t * t);
    CHECK(direct == via_a);
  }

  TEST_CASE("inverse coordinate satisfies the swapped equation") {
    RatFun r = swapped_inverse_equation_check(true);
    CHECK(r.is_zero());
    RatFun c = swapped_inverse_equation_check(false);
    CHECK_FALSE(c.is_zero());
    // spot value at (t, q, a) = (1, 2, 1), theta0 = thetainf = 0, q' = (4a - q)/t = 2
    Bindings pt{{sym::t(), RatFun(1)}, {sym::q(), RatFun(2)}, {qprime_symbol(), RatFun(2)},
                {sym::theta0(), RatFun(0)}, {sym::thetainf(), RatFun(0)}};
    CHECK(substitute(r, pt).is_zero());
    CHECK(std::abs(substitute(c, pt).constant_value().to_complex()) > 1e-12);
  }

  TEST_CASE("gauge between an operator and itself is scalar") {
    for (Family f : {Family::D6, Family::D7}) {
      auto L = build_operator(ChartState::symbolic(f));
      GaugeResult g = gauge_solve(L, L, GaugeShape::window(-1, 1));
      REQUIRE(g.T);
      CHECK(*g.T == Mat2::identity());
      CHECK(g.identity_holds);
      CHECK(g.det_ok);
    }
  }

  TEST_CASE("gauge with no solution returns none") {
    auto L = build_operator(ChartState::symbolic(Family::D6));
    auto s2 = ChartState::symbolic(Family::D6);
    s2.a = P("a + 1");
    GaugeResult g = gauge_solve(L, build_operator(s2), GaugeShape::window(-1, 1));
    CHECK_FALSE(g.T.has_value());
  }

  TEST_CASE("chart transfer round trips") {
    for (auto [f, c1, c2] : {std::tuple{Family::D6, Chart::ST1, Chart::ST0}, {Family::D7, Chart::C0, Chart::CM1}}) {
      auto s = ChartState::symbolic(f, c1);
      auto tr = chart_transfer_with_gauge(s, c2);
      MESSAGE(to_string(c2), " q=", tr.state.q.str(), " a=", tr.state.a.str());
      auto back = chart_transfer(tr.state, c1);
      CHECK(back.q == s.q);
      CHECK(back.a == s.a);
      auto s0 = ChartState::symbolic(f, c2);
      auto back2 = chart_transfer(chart_transfer(s0, c1), c2);
      CHECK(back2.q == s0.q);
      CHECK(back2.a == s0.a);
      // gauge_solve recovers an automorphism between the two normal forms
      GaugeShape sh = GaugeShape::window(-1, 1);
      sh.zeros = {{1, 0, -1}, {1, 0, 0}, {1, 0, 1}};
      GaugeResult g = gauge_solve(build_operator(s), build_operator(tr.state), sh);
      REQUIRE(g.T);
      CHECK(g.det_ok);
    }
  }

  TEST_CASE("chart transfer on random exact states") {
    oracle::Rng rng;
    for (int k = 0; k < 20; ++k) {
      ChartState s = ChartState::symbolic(Family::D6, Chart::ST1);
      s.q = RatFun(rng.gauss());
      if (s.q.is_zero()) continue;
      s.a = RatFun(rng.gauss());
      s.t = RatFun(rng.gauss());
      s.theta0 = RatFun(rng.gauss());
      s.thetainf = RatFun(rng.gauss());
      auto back = chart_transfer(chart_transfer(s, Chart::ST0), Chart::ST1);
      CHECK(back.q == s.q);
      CHECK(back.a == s.a);
    }
    ChartState z = ChartState::symbolic(Family::D6, Chart::ST1);
    z.q = RatFun(0);
    CHECK_THROWS_AS(chart_transfer(z, Chart::ST0), ChartDomainError);
  }

  TEST_CASE("chart transfer preserves isomonodromy") {
    for (auto [f, c2] : {std::pair{Family::D6, Chart::ST0}, {Family::D7, Chart::CM1}}) {
      IsoFlow r = derive_isomonodromy_flow(f);
      auto s = ChartState::symbolic(f);
      auto tr = chart_transfer_with_gauge(s, c2);
      auto Lt = build_operator(tr.state);
      const Mat2& T = tr.T;
      Mat2 Tinv;
      Tinv(0, 0) = T(1, 1);
      Tinv(0, 1) = -T(0, 1);
      Tinv(1, 0) = -T(1, 0);
      Tinv(1, 1) = T(0, 0);
      RatFun dinv = det(T).coeff(0).inverse();
      Tinv = Tinv.map([&](const Laurent& e) { return e.scaled(dinv); });
      ZMatrixOperator Bt;
      Bt.kind = OpKind::deformation;
      Bt.m = Tinv * (r.B.m * T + apply_D(T, r.flow));
      CHECK(commutation_residual(Lt, Bt, r.flow).is_zero());
    }
  }
}
