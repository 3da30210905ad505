#include <cmath>
#include <complex>

#include "doctest.h"
#include "oracle.hpp"
#include "piii/special/special.hpp"

using namespace piii::exactalg;
using namespace piii::special;
using oracle::P;

namespace {

using C = std::complex<double>;
RatFun dsym() { return RatFun::var(sym::d()); }

bool all_zero(const std::vector<RatFun>& v) {
  for (auto& r : v)
    if (!r.is_zero()) return false;
  return true;
}

C eval_at(const RatFun& f, C q, C t) {
  return f.eval([&](Symbol s) -> C {
    if (s == sym::q()) return q;
    if (s == sym::t()) return t;
    throw std::runtime_error("unexpected symbol " + s.name());
  });
}

}  // namespace

TEST_SUITE("special") {
  TEST_CASE("D7 algebraic base family lies on t^2 = 2 q^3 with a = -q/6") {
    AlgebraicFamily F = d7_algebraic_family();
    CHECK(F.a == P("-q/6"));
    CHECK(F.b0 == P("1/36 - q/2"));
    CHECK(F.bm1 == P("q*(1/36 - q/2)"));
    CHECK(F.chart_consistent);
    CHECK(F.flow_holds);
    CHECK(reduce_mod_curve(F.curve).is_zero());
    CHECK(reduce_mod_curve(P("t^3").num()) == P("2*q^3*t").num());
    CHECK_FALSE(zero_mod_curve(P("t^2 - q^3")));
    // a = (t q' - q)/2 with q' = 2q/(3t) from differentiating the curve
    CHECK(((P("t") * P("2*q/(3*t)") - P("q")) / 2) == F.a);
  }

  TEST_CASE("D7 algebraic family reaches other integers by Backlund words") {
    AlgebraicFamily F1 = d7_algebraic_family(GaussRat(1));
    CHECK(F1.chart_consistent);
    CHECK(F1.flow_holds);
    // q -> t (theta q - 2a + t)/(2 q^2) at theta = 0, a = -q/6
    CHECK(zero_mod_curve(F1.q - P("t*(q/3 + t)/(2*q^2)")));
    for (long n : {-2L, -1L, 2L}) {
      AlgebraicFamily F = d7_algebraic_family(GaussRat(n));
      CHECK_MESSAGE(F.flow_holds, "theta = ", n);
      CHECK(F.chart_consistent);
    }
    CHECK_THROWS_AS(d7_algebraic_family(GaussRat::frac(1, 2)), SpecialError);
  }

  TEST_CASE("D7 algebraic branches satisfy the second-order equation numerically") {
    RatFun qp = RatFun::var(piii::laxops::qprime_symbol());
    double worst = 0, branch_dev = 0;
    for (int k = 0; k <= 20; ++k) {
      double t = 1.0 + k / 20.0;
      C q = std::cbrt(t * t / 2.0);
      C q1 = 2.0 * q / (3.0 * t), q2 = -2.0 * q / (9.0 * t * t);
      RatFun rhs = piii::laxops::second_order_rhs(piii::laxops::Family::D7, P("t"), P("q"), qp, RatFun(), RatFun());
      C r = rhs.eval([&](Symbol s) -> C {
        if (s == sym::q()) return q;
        if (s == sym::t()) return t;
        return q1;
      });
      worst = std::max(worst, std::abs(q2 - r));
      branch_dev = std::max(branch_dev, std::abs(d7_algebraic_branch(0, std::log(t)) - q));
    }
    CHECK(worst < 1e-10);
    CHECK(branch_dev < 1e-12);
    // the three branches are permuted by a cube root of unity
    C w = d7_algebraic_branch(1, 0.3) / d7_algebraic_branch(0, 0.3);
    CHECK(std::abs(w * w * w - 1.0) < 1e-12);
  }

  TEST_CASE("D6 constant solutions follow from theta_inf q^2 = theta0 - 1") {
    auto has = [](const std::vector<GaussRat>& v, const GaussRat& x) {
      return std::find(v.begin(), v.end(), x) != v.end();
    };
    auto all4 = d6_constant_solutions(GaussRat(1), GaussRat(0));
    CHECK(all4.size() == 4);
    auto pm1 = d6_constant_solutions(GaussRat(2), GaussRat(1));
    CHECK(pm1.size() == 2);
    CHECK(has(pm1, GaussRat(1)));
    CHECK(has(pm1, GaussRat(-1)));
    auto pmi = d6_constant_solutions(GaussRat(2), GaussRat(-1));
    CHECK(pmi.size() == 2);
    CHECK(has(pmi, GaussRat::i()));
    CHECK(d6_constant_solutions(GaussRat(2), GaussRat(5)).empty());

    oracle::Rng rng;
    for (int k = 0; k < 20; ++k) {
      GaussRat th0 = rng.rat(), thi = rng.rat();
      if (k % 3 == 0) thi = th0 - GaussRat(1);
      if (k % 3 == 1) thi = GaussRat(1) - th0;
      auto sols = d6_constant_solutions(th0, thi);
      for (GaussRat c : {GaussRat(1), GaussRat(-1), GaussRat::i(), -GaussRat::i()})
        CHECK(d6_constant_residual(c, th0, thi).is_zero() == has(sols, c));
    }
  }

  TEST_CASE("reducible presence tables") {
    auto has = [](const std::vector<EpsPair>& v, EpsPair e) { return std::find(v.begin(), v.end(), e) != v.end(); };
    // alpha = beta != +-1 with generic d: theta0 = 2d + 2, theta_inf = 2d
    GaussRat d = GaussRat::frac(1, 3);
    auto v = reducible_presence(d * GaussRat(2) + GaussRat(2), d * GaussRat(2));
    CHECK(v.size() == 1);
    CHECK(has(v, {1, 1}));
    v = reducible_presence(d * GaussRat(2), d * GaussRat(2));
    CHECK(v.size() == 1);
    CHECK(has(v, {-1, -1}));
    // alpha = beta^-1 != +-1
    v = reducible_presence(GaussRat::frac(7, 3), -GaussRat::frac(1, 3));
    CHECK(v.size() == 1);
    CHECK(has(v, {1, -1}));
    v = reducible_presence(GaussRat::frac(-7, 3), GaussRat::frac(1, 3));
    CHECK(v.size() == 1);
    CHECK(has(v, {-1, 1}));
    // alpha = beta = +-1
    v = reducible_presence(GaussRat(3), GaussRat(1));
    CHECK(has(v, {1, 1}));
    CHECK(has(v, {1, -1}));
    CHECK_FALSE(has(v, {-1, 1}));
    CHECK_FALSE(has(v, {-1, -1}));
    v = reducible_presence(GaussRat(0), GaussRat(0));
    CHECK(v.size() == 2);
    CHECK(has(v, {-1, 1}));
    CHECK(has(v, {-1, -1}));
    v = reducible_presence(GaussRat(1), GaussRat(1));
    CHECK(v.size() == 2);
    CHECK(has(v, {1, -1}));
    CHECK(has(v, {-1, -1}));
    // no reducible modules off alpha = beta^{+-1}
    CHECK(reducible_presence(GaussRat::frac(1, 2), GaussRat::frac(1, 10)).empty());
    CHECK(reducible_presence(GaussRat(1), GaussRat::i()).empty());
  }

  TEST_CASE("Riccati equations derived from the reducible Lax operator") {
    for (EpsPair e : {EpsPair{1, 1}, EpsPair{1, -1}, EpsPair{-1, 1}, EpsPair{-1, -1}}) {
      RiccatiResult R = riccati_isomonodromy(e, dsym());
      CAPTURE(to_string(e));
      CHECK(R.middle == P("4*d + 1"));
      RatFun expected = P("q^2") * (-2 * e.e2) - P("(4*d + 1)/t*q") - RatFun(2 * e.e1);
      CHECK(R.rhs == expected);
      CHECK(R.piii_consistent);
      // isomonodromy: B makes the commutation residual vanish
      piii::exactalg::DerivationSpec D(sym::t());
      D.dependent(sym::q(), R.rhs).constant(sym::d());
      piii::laxops::ZMatrixOperator L = reducible_standard_form(e, dsym(), RatFun(1), -P("q"), P("t"));
      piii::laxops::ZMatrixOperator B{piii::laxops::OpKind::deformation, R.B, -1, 1};
      CHECK(piii::laxops::commutation_residual(L, B, D).is_zero());
    }
    // parameter dictionary, derived by the solve
    RiccatiResult R = riccati_isomonodromy({1, 1}, dsym());
    CHECK(R.theta0 == P("2*d + 2"));
    CHECK(R.thetainf == P("2*d"));
    CHECK(riccati_isomonodromy({1, -1}, dsym()).thetainf == P("-2*d"));
    CHECK(riccati_isomonodromy({-1, 1}, dsym()).theta0 == P("-2*d"));
    // the "4d - 1" middle coefficient is not what the operator produces
    CHECK(R.rhs != P("-2*q^2 - (4*d - 1)/t*q - 2"));
    CHECK_THROWS_AS(reducible_standard_form({1, 1}, dsym(), RatFun(), RatFun(), P("t")), SpecialError);
  }

  TEST_CASE("q = (e2/2) y'/y linearizes the Riccati equation") {
    for (EpsPair e : {EpsPair{1, 1}, EpsPair{1, -1}, EpsPair{-1, 1}, EpsPair{-1, -1}}) {
      for (const char* m : {"4*d + 1", "4*d - 1"}) {
        RatFun lin = riccati_to_linear(e, P(m));
        RatFun bessel = P("y2") + P(m) / P("t") * P("y1") + P("y") * (4 * e.e1 * e.e2);
        CHECK(lin == bessel);
      }
    }
  }

  TEST_CASE("Frobenius series of y'' + (c/t) y' + lambda y = 0") {
    CHECK_THROWS_AS(bessel_frobenius(RatFun(1), RatFun(4), 0), SpecialError);

    auto [u, v] = bessel_frobenius(RatFun(1), RatFun(4), 40);
    CHECK(u.rho.is_zero());
    CHECK(v.rho.is_zero());
    CHECK((u.log_flag || v.log_flag));
    CHECK(all_zero(frobenius_residuals(u, RatFun(1), RatFun(4))));
    CHECK(all_zero(frobenius_residuals(v, RatFun(1), RatFun(4))));

    RatFun c = P("4*d - 1");
    auto [s1, s2] = bessel_frobenius(c, RatFun(4), 40);
    CHECK(s1.rho.is_zero());
    CHECK(s2.rho == RatFun(1) - c);
    CHECK(all_zero(frobenius_residuals(s1, c, RatFun(4))));
    CHECK(all_zero(frobenius_residuals(s2, c, RatFun(4))));
    for (int k = 2; k <= 40; ++k)
      CHECK(s1.coeffs[k] == -RatFun(4) * s1.coeffs[k - 2] / (RatFun(k) * (RatFun(k - 1) + c)));

    // lambda = 0: constants and t^(1 - c)
    auto [z1, z2] = bessel_frobenius(RatFun(3) / 2, RatFun(), 6);
    CHECK(all_zero(std::vector<RatFun>(z1.coeffs.begin() + 1, z1.coeffs.end())));
    CHECK(all_zero(std::vector<RatFun>(z2.coeffs.begin() + 1, z2.coeffs.end())));
    CHECK(z2.rho == RatFun(-1) / 2);

    // odd gap: no log; even gap: log
    auto [o1, o2] = bessel_frobenius(RatFun(2), RatFun(4), 40);
    CHECK_FALSE(o1.log_flag);
    CHECK_FALSE(o2.log_flag);
    auto [e1, e2] = bessel_frobenius(RatFun(3), RatFun(4), 20);
    CHECK(e2.log_flag);
    CHECK(all_zero(frobenius_residuals(e2, RatFun(3), RatFun(4))));
    auto [f1, f2] = bessel_frobenius(RatFun(-1), RatFun(4), 20);
    CHECK(f1.log_flag);
    CHECK(f2.rho == RatFun(2));
    CHECK(all_zero(frobenius_residuals(f1, RatFun(-1), RatFun(4))));

    // c = 2, lambda = 4: sin(2t)/(2t) and cos(2t)/t
    for (double t : {0.3, 0.9, 1.7}) {
      CHECK(std::abs(series_value(o1, t) - std::sin(2 * t) / (2 * t)) < 1e-12);
      CHECK(std::abs(series_value(o2, t) - std::cos(2 * t) / t) < 1e-12);
      double dy = (2 * t * std::cos(2 * t) - std::sin(2 * t)) / (2 * t * t);
      CHECK(std::abs(series_derivative(o1, t) - dy) < 1e-12);
    }
    // c = 1, lambda = 4: J0(2t) and the log solution solve the ODE numerically
    for (double t : {0.4, 1.1}) {
      double h = 1e-4;
      auto y = [&](double s) { return series_value(v.log_flag ? v : u, s); };
      C ypp = (y(t + h) - 2.0 * y(t) + y(t - h)) / (h * h);
      C res = ypp + series_derivative(v.log_flag ? v : u, t) / t + 4.0 * y(t);
      CHECK(std::abs(res) < 1e-5);
    }
  }

  TEST_CASE("Riccati series solutions") {
    RiccatiSeries S = riccati_solution({1, 1}, RatFun(GaussRat::frac(1, 4)), GaussRat(1), GaussRat(), 30);
    REQUIRE(S.q_formal.has_value());
    CHECK(all_zero(riccati_series_residuals(S)));
    for (double t : {0.5, 1.0, 1.5}) CHECK(std::abs(S.q_at(t) - (1.0 / std::tan(2 * t) - 0.5 / t)) < 1e-12);

    // both Frobenius solutions mixed (integer exponent gap)
    RiccatiSeries M = riccati_solution({1, 1}, RatFun(GaussRat::frac(1, 4)), GaussRat(1), GaussRat(1), 30);
    REQUIRE(M.q_formal.has_value());
    CHECK(all_zero(riccati_series_residuals(M)));

    // symbolic d: exact at series level for every sign pair
    for (EpsPair e : {EpsPair{1, 1}, EpsPair{1, -1}, EpsPair{-1, 1}, EpsPair{-1, -1}}) {
      RiccatiSeries T = riccati_solution(e, dsym(), GaussRat(1), GaussRat(), 12);
      REQUIRE(T.q_formal.has_value());
      CHECK(all_zero(riccati_series_residuals(T)));
      RiccatiSeries T2 = riccati_solution(e, dsym(), GaussRat(), GaussRat(1), 12);
      CHECK(all_zero(riccati_series_residuals(T2)));
    }
    CHECK_THROWS_AS(riccati_solution({1, 1}, dsym(), GaussRat(), GaussRat(), 10), SpecialError);

    // a log solution has no Laurent expansion for q
    RiccatiSeries L = riccati_solution({1, 1}, RatFun(), GaussRat(1), GaussRat(), 10);
    CHECK_FALSE(L.q_formal.has_value());
    CHECK_THROWS_AS(riccati_series_residuals(L), SpecialError);

    // pole of q at a zero of y: y = sin(2t)/(2t) vanishes at t = pi/2
    C near = S.q_at(std::acos(-1.0) / 2 + 1e-6);
    CHECK(std::abs(near) > 1e4);
  }
}
