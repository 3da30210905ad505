#include "piii/special/special.hpp"

#include <cmath>
#include <map>

#include "piii/backlund/backlund.hpp"

namespace piii::special {

using exactalg::Bindings;
using exactalg::DerivationSpec;
using exactalg::LinearSolution;
using exactalg::Symbol;
using laxops::Laurent;
using laxops::Mat2;
namespace sym = exactalg::sym;

namespace {

RatFun V(Symbol s) { return RatFun::var(s); }
RatFun frac(long p, long q) { return RatFun(GaussRat::frac(p, q)); }

// Coefficients of the numerator of f as a polynomial in the given symbols.
std::vector<RatFun> coefficients_in(const RatFun& f, const std::vector<Symbol>& vars) {
  std::map<std::vector<unsigned>, Poly> parts;
  for (const auto& term : f.num().terms()) {
    std::vector<unsigned> key;
    exactalg::Monomial rest = term.m;
    for (Symbol s : vars) {
      key.push_back(term.m.degree(s));
      rest = rest.without(s);
    }
    parts[key] += Poly::monomial(rest, term.c);
  }
  std::vector<RatFun> out;
  for (auto& [k, p] : parts) out.push_back(RatFun(p));
  return out;
}

bool integer_constant(const RatFun& f, long* out) {
  if (!f.is_constant()) return false;
  GaussRat v = f.constant_value();
  if (!v.is_integer()) return false;
  *out = v.re().get_num().get_si();
  return true;
}

std::complex<double> constant_complex(const RatFun& f, const char* what) {
  if (!f.is_constant()) throw SpecialError(std::string(what) + " must be a constant for numeric evaluation");
  return f.constant_value().to_complex();
}

}  // namespace

// ------------------------------------------------------------- D7 algebraic family

Poly reduce_mod_curve(const Poly& p) {
  // t^2 -> 2 q^3, one power of t at a time; remainder has degree <= 1 in t.
  Symbol t = sym::t(), q = sym::q();
  Poly out;
  for (const auto& term : p.terms()) {
    unsigned e = term.m.degree(t);
    exactalg::Monomial rest = term.m.without(t);
    Poly mono = Poly::monomial(rest, term.c) * Poly::var(t, e % 2);
    out += mono * (Poly(2) * Poly::var(q, 3)).pow(e / 2);
  }
  return out;
}

bool zero_mod_curve(const RatFun& f) {
  if (!reduce_mod_curve(f.den()).is_zero() && reduce_mod_curve(f.num()).is_zero()) return true;
  return false;
}

AlgebraicFamily d7_algebraic_family(const GaussRat& theta) {
  if (!theta.is_integer()) throw SpecialError("the algebraic family exists for integer theta only, got " + theta.str());
  long n = theta.re().get_num().get_si();
  AlgebraicFamily F;
  F.theta = n;
  RatFun q = V(sym::q()), t = V(sym::t());
  F.curve = t.num() * t.num() - Poly(2) * Poly::var(sym::q(), 3);

  laxops::ChartState base = laxops::ChartState::symbolic(laxops::Family::D7);
  base.q = q;
  base.a = -q * frac(1, 6);
  base.t = t;
  base.theta0 = RatFun();

  laxops::ChartState s = base;
  if (n != 0) {
    backlund::BacklundWord w = backlund::BacklundWord::parse("s2+ s1+", laxops::Family::D7).pow(static_cast<int>(n));
    F.word = w.str();
    s = backlund::apply_state(w, base);
  }
  F.q = s.q;
  F.a = s.a;
  F.t = s.t;

  const RatFun t2 = s.t * s.t;
  RatFun bm1_chart = (s.a * s.a - t2 * frac(1, 4)) / s.q;
  RatFun b0_chart = -s.t * s.theta0 / (s.q * 2) + bm1_chart / s.q;
  if (n == 0) {
    F.b0 = frac(1, 36) - q * frac(1, 2);
    F.bm1 = q * F.b0;
    F.chart_consistent = zero_mod_curve(F.bm1 - bm1_chart) && zero_mod_curve(F.b0 - b0_chart);
  } else {
    F.bm1 = bm1_chart;
    F.b0 = b0_chart;
    // The image state must stay inside the chart on the curve.
    F.chart_consistent = !reduce_mod_curve(s.q.num()).is_zero() && !s.theta0.is_zero() &&
                         s.theta0 == RatFun(GaussRat(n));
  }

  // Flow of the base point: differentiate t^2 = 2 q^3.
  DerivationSpec D(sym::t());
  D.dependent(sym::q(), q * 2 / (t * 3));
  GaussRat sigma = (s.t / t).constant_value();
  Bindings img{{sym::q(), s.q}, {sym::a(), s.a}, {sym::t(), s.t}, {sym::theta(), s.theta0}};
  RatFun rq = D.apply(s.q) - RatFun(sigma) * exactalg::substitute(laxops::expected_dq(laxops::Family::D7), img);
  RatFun ra = D.apply(s.a) - RatFun(sigma) * exactalg::substitute(laxops::expected_da(laxops::Family::D7), img);
  F.flow_holds = zero_mod_curve(rq) && zero_mod_curve(ra);
  return F;
}

std::complex<double> d7_algebraic_branch(int j, std::complex<double> t_tilde) {
  const double pi = std::acos(-1.0);
  std::complex<double> w = std::exp(std::complex<double>(0, 2 * pi * j / 3.0));
  return w * std::exp(2.0 * t_tilde / 3.0) / std::cbrt(2.0);
}

// ------------------------------------------------------------- constants

std::vector<GaussRat> d6_constant_solutions(const GaussRat& theta0, const GaussRat& thetainf) {
  std::vector<GaussRat> out;
  if (thetainf == theta0 - GaussRat(1)) {
    out.push_back(GaussRat(1));
    out.push_back(GaussRat(-1));
  }
  if (-thetainf == theta0 - GaussRat(1)) {
    out.push_back(GaussRat::i());
    out.push_back(-GaussRat::i());
  }
  return out;
}

RatFun d6_constant_residual(const GaussRat& c, const GaussRat& theta0, const GaussRat& thetainf) {
  // q' = 0 for a constant, so the residual is 0 - rhs.
  return -laxops::second_order_rhs(laxops::Family::D6, V(sym::t()), RatFun(c), RatFun(), RatFun(theta0),
                                   RatFun(thetainf));
}

// ------------------------------------------------------------- reducible families

std::string to_string(EpsPair e) { return "(" + std::to_string(e.e1) + "," + std::to_string(e.e2) + ")"; }

std::vector<EpsPair> reducible_presence(const GaussRat& theta0, const GaussRat& thetainf) {
  std::vector<EpsPair> out;
  if (!theta0.is_real() || !thetainf.is_real()) return out;
  GaussRat diff = theta0 - thetainf, sum = theta0 + thetainf;
  auto even = [](const GaussRat& x) { return x.is_integer() && x.re().get_num() % 2 == 0; };
  bool alpha_eq_beta = even(diff), alpha_eq_inv = even(sum);
  const mpq_class two(2), zero(0);
  if (alpha_eq_beta) {
    if (diff.re() >= two) out.push_back({1, 1});
  }
  if (alpha_eq_inv) {
    if (sum.re() >= two) out.push_back({1, -1});
    if (sum.re() <= zero) out.push_back({-1, 1});
  }
  if (alpha_eq_beta) {
    if (diff.re() <= zero) out.push_back({-1, -1});
  }
  return out;
}

laxops::ZMatrixOperator reducible_standard_form(EpsPair e, const RatFun& d, const RatFun& c1, const RatFun& c0,
                                                const RatFun& t) {
  if (c1.is_zero() && c0.is_zero()) throw SpecialError("standard form needs (c1, c0) != (0, 0)");
  laxops::ZMatrixOperator L;
  L.kind = laxops::OpKind::lax;
  L.lo = -1, L.hi = 1;
  Laurent h = Laurent::mono(-t * e.e1 * frac(1, 2), -1) + Laurent::mono(-d, 0) + Laurent::mono(-t * e.e2 * frac(1, 2), 1);
  Laurent c = Laurent::mono(c1, 1) + Laurent::mono(c0, 0);
  L.m = laxops::sl2(h, Laurent(), c);
  return L;
}

RiccatiResult riccati_isomonodromy(EpsPair e, const RatFun& d) {
  if (d.contains(sym::t()) || d.contains(sym::q())) throw SpecialError("d must be constant along the family");
  RatFun q = V(sym::q()), t = V(sym::t());
  laxops::ZMatrixOperator L = reducible_standard_form(e, d, RatFun(1), -q, t);

  Symbol Dq = Symbol::intern("Dq");
  DerivationSpec D(sym::t());
  D.dependent(sym::q(), V(Dq));
  for (Symbol s : d.variables()) D.constant(s);

  std::vector<Symbol> unknowns;
  Laurent parts[3];
  const char* names[3] = {"RH_", "RE1_", "RE2_"};
  for (int p = 0; p < 3; ++p)
    for (int i = -1; i <= 1; ++i) {
      Symbol u = Symbol::intern(std::string(names[p]) + (i < 0 ? "m1" : std::to_string(i)));
      unknowns.push_back(u);
      parts[p] = parts[p] + Laurent::mono(V(u), i);
    }
  unknowns.push_back(Dq);
  laxops::ZMatrixOperator B;
  B.kind = laxops::OpKind::deformation;
  B.lo = -1, B.hi = 1;
  B.m = laxops::sl2(parts[0], parts[1], parts[2]);

  std::vector<RatFun> eqs;
  laxops::collect_coefficients(laxops::commutation_residual(L, B, D), eqs);
  LinearSolution sol = exactalg::solve_linear(unknowns, eqs);
  if (!sol.consistent())
    throw laxops::DerivationFailure("reducible commutation equations are inconsistent", sol.contradictions);
  for (Symbol fr : sol.free)
    if (fr == Dq || sol.values[Dq].contains(fr))
      throw laxops::DerivationFailure("q' is not determined by the reducible commutation equations", eqs);

  Bindings zero;
  for (Symbol fr : sol.free) zero[fr] = RatFun();
  auto vals = sol.specialize(zero);
  Bindings bind(vals.begin(), vals.end());

  RiccatiResult R;
  R.eps = e;
  R.d = d;
  R.rhs = vals[Dq];
  R.B = B.m.map([&](const Laurent& x) { return x.map([&](const RatFun& c) { return exactalg::substitute(c, bind); }); });
  // rhs = -2 e2 q^2 - (m/t) q - 2 e1 defines m.
  RatFun rest = R.rhs + q * q * (2 * e.e2) + RatFun(2 * e.e1);
  R.middle = -rest * t / q;
  if (R.middle.contains(sym::q()) || R.middle.contains(sym::t()))
    throw laxops::DerivationFailure("derived equation is not of the expected Riccati shape: q' = " + R.rhs.str(), eqs);

  // Match q'' (from the Riccati) against the second-order D6 equation.
  Symbol T0 = Symbol::intern("Rtheta0"), TI = Symbol::intern("Rthetainf");
  DerivationSpec Dr(sym::t());
  Dr.dependent(sym::q(), R.rhs);
  for (Symbol s : d.variables()) Dr.constant(s);
  RatFun qpp = Dr.apply(R.rhs);
  RatFun mismatch = qpp - laxops::second_order_rhs(laxops::Family::D6, t, q, R.rhs, V(T0), V(TI));
  std::vector<RatFun> match = coefficients_in(mismatch, {sym::q(), sym::t()});
  LinearSolution th = exactalg::solve_linear({T0, TI}, match);
  if (th.status != LinearSolution::Status::unique)
    throw laxops::DerivationFailure("no unique PIII(D6) parameters match the Riccati family", match);
  R.theta0 = th.values[T0];
  R.thetainf = th.values[TI];
  R.piii_consistent =
      (qpp - laxops::second_order_rhs(laxops::Family::D6, t, q, R.rhs, R.theta0, R.thetainf)).is_zero();
  return R;
}

RatFun riccati_to_linear(EpsPair e, const RatFun& middle) {
  Symbol Y = Symbol::intern("y"), Y1 = Symbol::intern("y1"), Y2 = Symbol::intern("y2");
  RatFun y = V(Y), y1 = V(Y1), y2 = V(Y2), t = V(sym::t());
  RatFun half_e2 = frac(e.e2, 2);
  RatFun q = half_e2 * y1 / y;
  RatFun qp = half_e2 * (y2 / y - y1 * y1 / (y * y));
  RatFun rhs = -q * q * (2 * e.e2) - middle / t * q - RatFun(2 * e.e1);
  return (qp - rhs) * y * 2 / RatFun(e.e2);
}

// ------------------------------------------------------------- series

namespace {

PowerSeries plain_series(const RatFun& rho, const RatFun& c, const RatFun& lambda, int N) {
  PowerSeries s;
  s.rho = rho;
  s.N = N;
  s.coeffs.assign(N + 1, RatFun());
  s.coeffs[0] = RatFun(1);
  for (int k = 1; k <= N; ++k) {
    if (k < 2) continue;
    RatFun den = (rho + k) * (rho + k - 1 + c);
    if (den.is_zero()) throw SpecialError("Frobenius recurrence hits a resonance at k = " + std::to_string(k));
    s.coeffs[k] = -lambda * s.coeffs[k - 2] / den;
  }
  return s;
}

}  // namespace

std::pair<PowerSeries, PowerSeries> bessel_frobenius(const RatFun& c, const RatFun& lambda, int N) {
  if (N < 1) throw SpecialError("series order must be at least 1");
  RatFun other = RatFun(1) - c;
  long m = 0;
  if (!integer_constant(other, &m)) return {plain_series(RatFun(), c, lambda, N), plain_series(other, c, lambda, N)};

  // Resonant: exponents differ by the integer |1 - c|.
  long gap = std::labs(m);
  RatFun rho_big = m >= 0 ? other : RatFun(), rho_small = m >= 0 ? RatFun() : other;
  PowerSeries big = plain_series(rho_big, c, lambda, N);

  PowerSeries small;
  small.rho = rho_small;
  small.N = N;
  small.coeffs.assign(N + 1, RatFun());
  small.partner_rho = rho_big;
  small.partner_coeffs = big.coeffs;
  auto a = [&](long j) { return j >= 0 && j <= N ? big.coeffs[j] : RatFun(); };
  RatFun C;
  if (gap == 0) {
    C = RatFun(1);
  } else {
    small.coeffs[0] = RatFun(1);
  }
  // b_k k (k - gap) + lambda b_{k-2} = -C a_{k-gap} (2(k - gap) + gap)
  for (long k = 1; k <= N; ++k) {
    RatFun prev = k >= 2 ? small.coeffs[k - 2] : RatFun();
    if (k == gap) {
      // The coefficient of b_gap vanishes; this row fixes C, b_gap stays 0.
      C = -lambda * prev / (RatFun(gap) * a(0));
      continue;
    }
    RatFun src = C.is_zero() ? RatFun() : C * a(k - gap) * (2 * (k - gap) + gap);
    small.coeffs[k] = (-lambda * prev - src) / RatFun(k * (k - gap));
  }
  small.log_flag = !C.is_zero();
  small.log_coeff = C;
  if (!small.log_flag) small.partner_coeffs.clear();
  // Order: exponent 0 first, then 1 - c.
  if (m >= 0) return {small, big};
  return {big, small};
}

std::vector<RatFun> frobenius_residuals(const PowerSeries& s, const RatFun& c, const RatFun& lambda) {
  std::vector<RatFun> out;
  long gap = 0;
  if (s.log_flag) {
    RatFun g = s.partner_rho - s.rho;
    if (!integer_constant(g, &gap)) throw SpecialError("log partner must sit an integer step above");
  }
  for (int k = 0; k <= s.N; ++k) {
    RatFun r = (s.rho + k) * (s.rho + k - 1 + c) * s.coeffs[k];
    if (k >= 2) r += lambda * s.coeffs[k - 2];
    if (s.log_flag && k - gap >= 0 && k - gap < static_cast<long>(s.partner_coeffs.size()))
      r += s.log_coeff * s.partner_coeffs[k - gap] * (2 * (k - gap) + gap);
    out.push_back(r);
  }
  // The partner itself must solve the equation (its ln t coefficient).
  if (s.log_flag)
    for (std::size_t k = 0; k < s.partner_coeffs.size(); ++k) {
      RatFun r = (s.partner_rho + long(k)) * (s.partner_rho + long(k) - 1 + c) * s.partner_coeffs[k];
      if (k >= 2) r += lambda * s.partner_coeffs[k - 2];
      out.push_back(r);
    }
  return out;
}

namespace {

// sum coeffs[k] t^(k + rho) and its derivative.
std::pair<std::complex<double>, std::complex<double>> eval_part(const std::vector<RatFun>& cs, std::complex<double> rho,
                                                                std::complex<double> t) {
  std::complex<double> v = 0, dv = 0, lt = std::log(t);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (cs[k].is_zero()) continue;
    std::complex<double> ck = constant_complex(cs[k], "series coefficient");
    std::complex<double> e = rho + double(k);
    std::complex<double> p = std::exp(e * lt);
    v += ck * p;
    dv += ck * e * p / t;
  }
  return {v, dv};
}

}  // namespace

std::complex<double> series_value(const PowerSeries& s, std::complex<double> t) {
  auto [v, dv] = eval_part(s.coeffs, constant_complex(s.rho, "exponent"), t);
  if (s.log_flag) {
    auto [pv, pdv] = eval_part(s.partner_coeffs, constant_complex(s.partner_rho, "exponent"), t);
    v += constant_complex(s.log_coeff, "log coefficient") * std::log(t) * pv;
  }
  return v;
}

std::complex<double> series_derivative(const PowerSeries& s, std::complex<double> t) {
  auto [v, dv] = eval_part(s.coeffs, constant_complex(s.rho, "exponent"), t);
  if (s.log_flag) {
    auto [pv, pdv] = eval_part(s.partner_coeffs, constant_complex(s.partner_rho, "exponent"), t);
    dv += constant_complex(s.log_coeff, "log coefficient") * (pv / t + std::log(t) * pdv);
  }
  return dv;
}

std::complex<double> RiccatiSeries::q_at(std::complex<double> t) const {
  std::complex<double> y = mix1.to_complex() * series_value(y1, t) + mix2.to_complex() * series_value(y2, t);
  std::complex<double> dy =
      mix1.to_complex() * series_derivative(y1, t) + mix2.to_complex() * series_derivative(y2, t);
  return 0.5 * double(eps.e2) * dy / y;
}

RiccatiSeries riccati_solution(EpsPair e, const RatFun& d, const GaussRat& mix1, const GaussRat& mix2, int N) {
  RiccatiResult R = riccati_isomonodromy(e, d);
  RiccatiSeries S;
  S.eps = e;
  S.d = d;
  S.middle = R.middle;
  S.mix1 = mix1;
  S.mix2 = mix2;
  auto pair = bessel_frobenius(R.middle, RatFun(4 * e.e1 * e.e2), N);
  S.y1 = pair.first;
  S.y2 = pair.second;

  bool use1 = !mix1.is_zero(), use2 = !mix2.is_zero();
  if (!use1 && !use2) throw SpecialError("trivial solution: y vanishes identically");

  // Combined series t^r sum Y_k t^k, when it is a plain (log-free) series.
  bool logs = (use1 && S.y1.log_flag) || (use2 && S.y2.log_flag);
  long shift = 0;
  bool comparable = !(use1 && use2) || integer_constant(S.y2.rho - S.y1.rho, &shift);
  if (logs || !comparable) return S;

  RatFun r;
  std::vector<RatFun> Y(N + 1);
  if (use1 && use2) {
    long lo = std::min(0L, shift);
    r = shift >= 0 ? S.y1.rho : S.y2.rho;
    for (int k = 0; k <= N; ++k) {
      RatFun v;
      long k1 = k + lo, k2 = k + lo - shift;  // index into y1, y2
      if (k1 >= 0 && k1 <= N) v += RatFun(mix1) * S.y1.coeffs[k1];
      if (k2 >= 0 && k2 <= N) v += RatFun(mix2) * S.y2.coeffs[k2];
      Y[k] = v;
    }
    // Only orders covered by both series are exact.
    Y.resize(N + 1 - std::labs(shift));
  } else {
    const PowerSeries& s = use1 ? S.y1 : S.y2;
    r = s.rho;
    for (int k = 0; k <= N; ++k) Y[k] = RatFun(use1 ? mix1 : mix2) * s.coeffs[k];
  }
  std::size_t k0 = 0;
  while (k0 < Y.size() && Y[k0].is_zero()) ++k0;
  if (k0 == Y.size()) throw SpecialError("trivial solution: y vanishes through order " + std::to_string(N));

  // y = t^(r + k0) P(t), q = (e2/2) ((r + k0)/t + P'/P)
  std::vector<RatFun> P(Y.begin() + k0, Y.end());
  std::size_t K = P.size();  // P known through t^(K-1); P'/P through t^(K-2)
  std::vector<RatFun> dP(K > 0 ? K - 1 : 0);
  for (std::size_t k = 0; k + 1 < K; ++k) dP[k] = P[k + 1] * long(k + 1);
  std::vector<RatFun> ratio(dP.size());
  RatFun inv0 = P[0].inverse();
  for (std::size_t k = 0; k < dP.size(); ++k) {
    RatFun acc = dP[k];
    for (std::size_t j = 1; j <= k; ++j) acc -= P[j] * ratio[k - j];
    ratio[k] = acc * inv0;
  }
  std::vector<RatFun> qs;
  RatFun half = frac(e.e2, 2);
  qs.push_back(half * (r + long(k0)));
  for (auto& c : ratio) qs.push_back(half * c);
  S.q_formal = qs;
  return S;
}

std::vector<RatFun> riccati_series_residuals(const RiccatiSeries& s) {
  if (!s.q_formal) throw SpecialError("q has no formal Laurent expansion (log term or non-integer exponent gap)");
  const auto& q = *s.q_formal;  // q[i] multiplies t^(i-1)
  long K = static_cast<long>(q.size()) - 2;  // highest exponent known
  auto Q = [&](long j) { return j >= -1 && j <= K ? q[j + 1] : RatFun(); };
  std::vector<RatFun> out;
  // q' + 2 e2 q^2 + (m/t) q + 2 e1, coefficient of t^j for j = -2..K-1
  for (long j = -2; j <= K - 1; ++j) {
    RatFun r = Q(j + 1) * (j + 1);
    RatFun sq;
    for (long i = -1; i <= j + 1; ++i) sq += Q(i) * Q(j - i);
    r += sq * (2 * s.eps.e2);
    r += s.middle * Q(j + 1);
    if (j == 0) r += RatFun(2 * s.eps.e1);
    out.push_back(r);
  }
  return out;
}

}  // namespace piii::special
