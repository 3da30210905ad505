#include "doctest.h"
#include "oracle.hpp"
#include "piii/exactalg/derivation.hpp"
#include "piii/exactalg/errors.hpp"
#include "piii/exactalg/linsolve.hpp"

using namespace piii::exactalg;
using oracle::P;

TEST_SUITE("exactalg") {
  TEST_CASE("gauss rationals") {
    GaussRat a = GaussRat::frac(3, 4), b(mpq_class(1, 2), mpq_class(-5, 3));
    CHECK((a + b) - b == a);
    CHECK(b * b.inverse() == GaussRat(1));
    CHECK(GaussRat::i() * GaussRat::i() == GaussRat(-1));
    CHECK(b.str() == "1/2-5/3*i");
    CHECK(parse_number(b.str()) == b);
    CHECK(parse_number("-i") == -GaussRat::i());
    CHECK(parse_number("1/2+3/4i") == GaussRat(mpq_class(1, 2), mpq_class(3, 4)));
    CHECK(parse_number("0.25") == GaussRat::frac(1, 4));
    CHECK_THROWS_AS(GaussRat(0).inverse(), DivisionByZero);
  }

  TEST_CASE("normalize examples") {
    CHECK(P("(q^2-1)/(q-1)") == P("q+1"));
    CHECK((P("t/q") * P("q/t")) == RatFun(1));
    RatFun f = P("((2*a-t-theta0*q)^2-t^2*q^4)/(2*a-t-theta0*q+t*q^2)");
    CHECK(f == P("2*a-t-theta0*q-t*q^2"));
    CHECK(f.den().is_one());
    CHECK_THROWS_AS(RatFun(Poly(1), Poly()), DivisionByZero);
    CHECK_THROWS_AS(P("1/(q-q)"), DivisionByZero);
    // den monic, idempotent
    RatFun g = P("(2*q+4)/(6*q^2*t-3)");
    CHECK(g.den().lc().is_one());
    CHECK(RatFun(g.num(), g.den()) == g);
  }

  TEST_CASE("gcd with planted factors") {
    oracle::Rng R;
    std::vector<Symbol> vs = {sym::q(), sym::a(), sym::t(), sym::theta0()};
    for (int k = 0; k < 25; ++k) {
      bool cplx = k % 3 == 0;
      Poly g = R.poly(vs, 2, 4, cplx), x = R.poly(vs, 2, 4, cplx), y = R.poly(vs, 2, 4, cplx);
      if (g.is_zero() || x.is_zero() || y.is_zero()) continue;
      auto res = gcd_cofactors(g * x, g * y);
      CHECK(res.g.lc().is_one());
      CHECK(res.g * res.abar == g * x);
      CHECK(res.g * res.bbar == g * y);
      CHECK(res.g.divide_exact(g.monic()).has_value());
    }
  }

  TEST_CASE("field axioms on random rational functions") {
    oracle::Rng R;
    std::vector<Symbol> vs = {sym::q(), sym::t(), sym::a()};
    int checked = 0;
    for (int k = 0; k < 1000; ++k) {
      auto mk = [&] {
        Poly n = R.poly(vs, 1, 2, k % 5 == 0), d = R.poly(vs, 1, 2);
        if (d.is_zero()) d = Poly(1);
        return RatFun(n, d);
      };
      RatFun x = mk(), y = mk(), z = mk();
      CHECK(((x + y) + z) == (x + (y + z)));
      CHECK(((x * y) * z) == (x * (y * z)));
      CHECK((x * (y + z)) == (x * y + x * z));
      if (!x.is_zero()) CHECK((x * x.inverse()) == RatFun(1));
      CHECK((x - x).is_zero());
      CHECK((x + y).equals_cross(y + x));
      ++checked;
    }
    CHECK(checked == 1000);
  }

  TEST_CASE("normalize agrees with point evaluation") {
    oracle::Rng R;
    std::vector<Symbol> vs = {sym::q(), sym::a(), sym::t()};
    for (int k = 0; k < 40; ++k) {
      Poly n = R.poly(vs, 2, 3), d = R.poly(vs, 2, 3), c = R.poly(vs, 1, 2);
      if (d.is_zero() || c.is_zero()) continue;
      RatFun f(n * c, d * c);
      auto pt = R.point(vs);
      GaussRat dv = oracle::eval_poly(d * c, pt);
      if (dv.is_zero() || oracle::eval_poly(f.den(), pt).is_zero()) continue;
      CHECK(oracle::eval(f, pt) == oracle::eval_poly(n * c, pt) / dv);
    }
  }

  TEST_CASE("substitute") {
    CHECK(substitute(P("q^2"), {{sym::q(), P("t+1")}}) == P("t^2+2*t+1"));
    CHECK_THROWS_AS(substitute(P("1/q"), {{sym::q(), RatFun(0)}}), SubstitutionPole);
    CHECK_THROWS_AS(substitute(P("alpha+beta"), {{sym::alpha(), P("theta0")}}), RingError);
    CHECK_THROWS_AS(parse("exp(theta0)"), ParseError);
    // homomorphism on random data
    oracle::Rng R;
    std::vector<Symbol> vs = {sym::q(), sym::a()};
    Bindings b{{sym::q(), P("(t+a)/(t-1)")}, {sym::a(), P("t*a^2")}};
    for (int k = 0; k < 20; ++k) {
      RatFun f(R.poly(vs, 2, 3)), g(R.poly(vs, 2, 3));
      CHECK(substitute(f + g, b) == substitute(f, b) + substitute(g, b));
      CHECK(substitute(f * g, b) == substitute(f, b) * substitute(g, b));
    }
  }

  TEST_CASE("derivations") {
    Symbol q = sym::q(), a = sym::a(), t = sym::t();
    DerivationSpec D6(t);
    D6.dependent(q, P("(4*a-q)/t"))
        .dependent(a, P("(4*a^2-t^2+q*(t-a-t*theta0)+q^3*t*thetainf+q^4*t^2)/(t*q)"))
        .constants({sym::theta0(), sym::thetainf()});
    CHECK(D6.apply(P("q^2")) == P("2*q*(4*a-q)/t"));
    DerivationSpec D7(t);
    D7.dependent(q, P("(q+2*a)/t")).dependent(a, P("(-t^2-theta*t*q+4*a^2+2*q*a+2*q^3)/(2*t*q)")).constant(sym::theta());
    CHECK(D7.apply(P("t*q")) == P("q+(q+2*a)"));
    CHECK(D7.apply(P("theta")).is_zero());
    CHECK_THROWS_AS(D7.apply(P("z*q")), UncoveredIndeterminate);
    CHECK_THROWS_AS(DerivationSpec(t).constant(q).constant(q), RingError);
    oracle::Rng R;
    std::vector<Symbol> vs = {q, a, t};
    for (int k = 0; k < 30; ++k) {
      RatFun f(R.poly(vs, 2, 3)), g(R.poly(vs, 2, 3));
      CHECK(D6.apply(f * g) == D6.apply(f) * g + f * D6.apply(g));
      if (!g.is_zero()) CHECK(D6.apply(f / g) == (D6.apply(f) * g - f * D6.apply(g)) / (g * g));
    }
  }

  TEST_CASE("solve_linear") {
    Symbol x = Symbol::intern("x"), y = Symbol::intern("y");
    auto s1 = solve_linear({x}, {P("x-q")});
    CHECK(s1.status == LinearSolution::Status::unique);
    CHECK(s1.values[x] == P("q"));
    CHECK(s1.verified);
    auto s2 = solve_linear({x, y}, {P("x+y-1"), P("x-y-1")});
    CHECK(s2.values[x] == RatFun(1));
    CHECK(s2.values[y] == RatFun(0));
    auto s3 = solve_linear({x, y}, {P("x+y-1"), P("2*x+2*y-3")});
    CHECK(s3.status == LinearSolution::Status::inconsistent);
    auto s4 = solve_linear({x, y}, {P("q*x+t*y")});
    CHECK(s4.status == LinearSolution::Status::family);
    CHECK(s4.free.size() == 1);
    CHECK(s4.verified);
    CHECK_THROWS_AS(solve_linear({x, y}, {P("x*y-1")}), NonlinearError);
    CHECK_THROWS_AS(solve_linear({x}, {P("x^2-1")}), NonlinearError);
    CHECK_THROWS_AS(solve_linear({x}, {P("1/x")}), NonlinearError);
  }

  TEST_CASE("print/parse round trip") {
    oracle::Rng R;
    std::vector<Symbol> vs = {sym::q(), sym::t(), sym::theta0()};
    for (int k = 0; k < 50; ++k) {
      Poly d = R.poly(vs, 2, 3, true);
      if (d.is_zero()) continue;
      RatFun f(R.poly(vs, 2, 3, true), d);
      CHECK(parse(f.str()) == f);
    }
  }

  TEST_CASE("conversion to double is correctly rounded") {
    CHECK(GaussRat::frac(1, 5).to_complex() == std::complex<double>(0.2, 0));
    CHECK(GaussRat(mpq_class(1, 3), mpq_class(-7, 10)).to_complex() == std::complex<double>(1.0 / 3, -0.7));
    mpq_class big(mpz_class("123456789012345678901234567890"), mpz_class("7"));
    big.canonicalize();
    CHECK(GaussRat(big, 0).to_complex().real() == doctest::Approx(123456789012345678901234567890.0 / 7));
  }
}
