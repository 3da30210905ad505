#include "piii/laxops/lax.hpp"

#include <algorithm>

namespace piii::laxops {

using exactalg::Bindings;
using exactalg::GaussRat;
using exactalg::LinearSolution;
namespace sym = exactalg::sym;

namespace {

RatFun V(Symbol s) { return RatFun::var(s); }
RatFun frac(long p, long q) { return RatFun(GaussRat::frac(p, q)); }

std::string idx(int k) { return k < 0 ? "m" + std::to_string(-k) : std::to_string(k); }

}  // namespace

void collect_coefficients(const Mat2& M, std::vector<RatFun>& out) {
  for (auto& e : M.m)
    for (auto& [k, v] : e.coeffs()) out.push_back(v);
}

Mat2 sl2(const Laurent& h, const Laurent& e1, const Laurent& e2) {
  Mat2 r;
  r(0, 0) = h;
  r(0, 1) = e1;
  r(1, 0) = e2;
  r(1, 1) = -h;
  return r;
}

std::string to_string(Family f) { return f == Family::D6 ? "d6" : "d7"; }

std::string to_string(Chart c) {
  switch (c) {
    case Chart::ST1: return "ST1";
    case Chart::ST0: return "ST0";
    case Chart::C0: return "C0";
    case Chart::CM1: return "CM1";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), ::tolower);
  if (l == "d6") return Family::D6;
  if (l == "d7") return Family::D7;
  throw exactalg::ParseError("unknown family '" + s + "'");
}

Chart parse_chart(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), ::toupper);
  if (u == "ST1") return Chart::ST1;
  if (u == "ST0") return Chart::ST0;
  if (u == "C0") return Chart::C0;
  if (u == "CM1") return Chart::CM1;
  throw exactalg::ParseError("unknown chart '" + s + "'");
}

Chart default_chart(Family f) { return f == Family::D6 ? Chart::ST1 : Chart::C0; }

static bool chart_in_family(Family f, Chart c) {
  return f == Family::D6 ? (c == Chart::ST1 || c == Chart::ST0) : (c == Chart::C0 || c == Chart::CM1);
}

ChartState ChartState::symbolic(Family f, Chart c) {
  if (!chart_in_family(f, c)) throw ChartDomainError("chart " + to_string(c) + " does not belong to " + to_string(f));
  ChartState s;
  s.family = f;
  s.chart = c;
  s.q = V(sym::q());
  s.a = V(sym::a());
  s.t = V(sym::t());
  if (f == Family::D6) {
    s.theta0 = V(sym::theta0());
    s.thetainf = V(sym::thetainf());
  } else {
    s.theta0 = V(sym::theta());
  }
  return s;
}

Bindings ChartState::bindings() const {
  Bindings b{{sym::q(), q}, {sym::a(), a}, {sym::t(), t}};
  if (family == Family::D6) {
    b[sym::theta0()] = theta0;
    b[sym::thetainf()] = thetainf;
  } else {
    b[sym::theta()] = theta0;
  }
  return b;
}

bool ZMatrixOperator::respects_range() const {
  for (auto& e : m.m)
    if (!e.is_zero() && (e.min_exp() < lo || e.max_exp() > hi)) return false;
  return true;
}

ZMatrixOperator build_operator(const ChartState& s) {
  if (!chart_in_family(s.family, s.chart))
    throw ChartDomainError("chart " + to_string(s.chart) + " does not belong to " + to_string(s.family));
  if (s.q.is_zero()) throw ChartDomainError("q = 0 lies outside the chart");
  const RatFun &q = s.q, &a = s.a, &t = s.t;
  const RatFun t2 = t * t;
  ZMatrixOperator L;
  L.kind = OpKind::lax;
  Laurent h, b, c;
  switch (s.chart) {
    case Chart::ST1: {
      RatFun bm2 = (a * a - t2 * frac(1, 4)) / q;
      RatFun bm1 = (bm2 - a - t * (s.theta0 - 1) * frac(1, 2)) / q;
      h = Laurent::mono(a, -1);
      b = Laurent::mono(bm2, -2) + Laurent::mono(bm1, -1) +
          Laurent::mono(q * t2 * frac(1, 4) + t * s.thetainf * frac(1, 2), 0) + Laurent::mono(t2 * frac(1, 4), 1);
      c = Laurent::mono(RatFun(1), 1) + Laurent::mono(-q, 0);
      L.lo = -2, L.hi = 1;
      break;
    }
    case Chart::ST0: {
      RatFun b0 = (a * a - t2 * frac(1, 4) - t * s.thetainf * q * frac(1, 2)) / (q * q);
      h = Laurent::mono(a, 1);
      b = Laurent::mono(t2 * frac(1, 4), -2) + Laurent::mono(t * (s.theta0 - 1) * frac(1, 2) + t2 * q * frac(1, 4), -1) +
          Laurent::mono(b0, 0) + Laurent::mono(t * s.thetainf * frac(1, 2) + b0 * q, 1);
      c = Laurent::mono(RatFun(1), 0) + Laurent::mono(-q, 1);
      L.lo = -2, L.hi = 1;
      break;
    }
    case Chart::C0: {
      RatFun bm1 = (a * a - t2 * frac(1, 4)) / q;
      h = Laurent::mono(a, -1);
      b = Laurent::mono(bm1, -1) + Laurent::mono(-t * s.theta0 / (q * 2) + bm1 / q, 0) + Laurent::mono(RatFun(1), 1);
      c = Laurent::mono(RatFun(1), 0) + Laurent::mono(-q, -1);
      L.lo = -1, L.hi = 1;
      break;
    }
    case Chart::CM1: {
      // c = z^{-1} + c0 with c0 = -q; b2, b1 from a^2 + b2 c0 = 0, a + b2 + b1 c0 = 1.
      RatFun b2 = a * a / q;
      RatFun b1 = -(RatFun(1) - a - b2) / q;
      h = Laurent::mono(a, 1);
      b = Laurent::mono(t2 * frac(1, 4), -1) + Laurent::mono(t * s.theta0 * frac(1, 2) + t2 * q * frac(1, 4), 0) +
          Laurent::mono(b1, 1) + Laurent::mono(b2, 2);
      c = Laurent::mono(RatFun(1), -1) + Laurent::mono(-q, 0);
      L.lo = -1, L.hi = 2;
      break;
    }
  }
  L.m = sl2(h, b, c);
  return L;
}

Mat2 commutation_residual(const ZMatrixOperator& L, const ZMatrixOperator& B, const DerivationSpec& D) {
  if (L.kind != OpKind::lax || B.kind != OpKind::deformation)
    throw exactalg::RingError("commutation_residual expects a lax operator and a deformation operator");
  Mat2 DA = L.m.map([&](const Laurent& e) { return e.map([&](const RatFun& c) { return D.apply(c); }); });
  Mat2 zB = B.m.map([](const Laurent& e) { return e.z_dz(); });
  return DA - zB - commutator(L.m, B.m);
}

Symbol theta_symbol_d7() { return sym::theta(); }

RatFun expected_dq(Family f) {
  RatFun q = V(sym::q()), a = V(sym::a()), t = V(sym::t());
  return f == Family::D7 ? (q + a * 2) / t : (a * 4 - q) / t;
}

RatFun expected_da(Family f) {
  RatFun q = V(sym::q()), a = V(sym::a()), t = V(sym::t());
  if (f == Family::D7) {
    RatFun th = V(sym::theta());
    return (-t * t - th * t * q + a * a * 4 + q * a * 2 + q.pow(3) * 2) / (t * q * 2);
  }
  RatFun th0 = V(sym::theta0()), thi = V(sym::thetainf());
  return (a * a * 4 - t * t + q * (t - a - t * th0) + q.pow(3) * t * thi + q.pow(4) * t * t) / (t * q);
}

static DerivationSpec flow_spec(Family f, const RatFun& dq, const RatFun& da) {
  DerivationSpec D(sym::t());
  D.dependent(sym::q(), dq).dependent(sym::a(), da);
  if (f == Family::D6)
    D.constants({sym::theta0(), sym::thetainf()});
  else
    D.constant(sym::theta());
  return D;
}

DerivationSpec expected_flow(Family f) { return flow_spec(f, expected_dq(f), expected_da(f)); }

IsoFlow derive_isomonodromy_flow(Family f, std::optional<std::pair<int, int>> window) {
  auto [lo, hi] = window.value_or(f == Family::D6 ? std::pair{-2, 1} : std::pair{-1, 2});
  ChartState s = ChartState::symbolic(f);
  ZMatrixOperator L = build_operator(s);

  Symbol Dq = Symbol::intern("Dq"), Da = Symbol::intern("Da");
  DerivationSpec D = flow_spec(f, V(Dq), V(Da));

  std::vector<Symbol> unknowns;
  Laurent parts[3];
  const char* names[3] = {"BH_", "BE1_", "BE2_"};
  for (int p = 0; p < 3; ++p)
    for (int i = lo; i <= hi; ++i) {
      Symbol u = Symbol::intern(std::string(names[p]) + idx(i));
      unknowns.push_back(u);
      parts[p] = parts[p] + Laurent::mono(V(u), i);
    }
  unknowns.push_back(Dq);
  unknowns.push_back(Da);

  ZMatrixOperator B;
  B.kind = OpKind::deformation;
  B.lo = lo, B.hi = hi;
  B.m = sl2(parts[0], parts[1], parts[2]);

  std::vector<RatFun> eqs;
  collect_coefficients(commutation_residual(L, B, D), eqs);
  LinearSolution sol = exactalg::solve_linear(unknowns, eqs);
  if (!sol.consistent())
    throw DerivationFailure("commutation equations are inconsistent on window " + std::to_string(lo) + ".." +
                                std::to_string(hi),
                            sol.contradictions);
  for (Symbol fr : sol.free)
    if (sol.values[Dq].contains(fr) || sol.values[Da].contains(fr) || fr == Dq || fr == Da)
      throw DerivationFailure("flow is not determined by the commutation equations", eqs);

  Bindings zero;
  for (Symbol fr : sol.free) zero[fr] = RatFun();
  auto vals = sol.specialize(zero);
  Bindings bind(vals.begin(), vals.end());
  B.m = B.m.map([&](const Laurent& e) { return e.map([&](const RatFun& c) { return exactalg::substitute(c, bind); }); });

  return IsoFlow{flow_spec(f, vals[Dq], vals[Da]), B, eqs.size(), unknowns.size()};
}

Symbol qprime_symbol() { return Symbol::intern("qp"); }

RatFun second_order_rhs(Family f, const RatFun& t, const RatFun& q, const RatFun& qp, const RatFun& th0,
                        const RatFun& thinf) {
  RatFun r = qp * qp / q - qp / t;
  if (f == Family::D7) return r - th0 / t + q * q * 2 / (t * t) - q.inverse();
  return r - (th0 - 1) * 4 / t + thinf * q * q * 4 / t + q.pow(3) * 4 - q.inverse() * 4;
}

RatFun reduce_to_second_order(const DerivationSpec& flow, Family f) {
  RatFun q = V(sym::q()), t = V(sym::t()), qp = V(qprime_symbol());
  RatFun qpp = flow.apply(flow.apply(q));
  RatFun a_of = f == Family::D7 ? (t * qp - q) / 2 : (t * qp + q) / 4;
  RatFun lhs = exactalg::substitute(qpp, {{sym::a(), a_of}});
  RatFun th0 = f == Family::D7 ? V(sym::theta()) : V(sym::theta0());
  RatFun thi = f == Family::D7 ? RatFun() : V(sym::thetainf());
  return lhs - second_order_rhs(f, t, q, qp, th0, thi);
}

RatFun swapped_inverse_equation_check(bool swapped) {
  RatFun q = V(sym::q()), t = V(sym::t()), qp = V(qprime_symbol());
  RatFun th0 = V(sym::theta0()), thi = V(sym::thetainf());
  DerivationSpec D2(sym::t());
  D2.dependent(sym::q(), qp)
      .dependent(qprime_symbol(), second_order_rhs(Family::D6, t, q, qp, th0, thi))
      .constants({sym::theta0(), sym::thetainf()});
  RatFun Q = q.inverse();
  RatFun Qp = D2.apply(Q);
  RatFun Qpp = D2.apply(Qp);
  RatFun nth0 = swapped ? thi + 1 : th0;
  RatFun nthi = swapped ? th0 - 1 : thi;
  return Qpp - second_order_rhs(Family::D6, t, Q, Qp, nth0, nthi);
}

GaugeResult gauge_solve(const ZMatrixOperator& L, const ZMatrixOperator& Lt, const GaugeShape& shape) {
  GaugeResult res;
  if (shape.hi < shape.lo) return res;
  auto forced_zero = [&](int i, int j, int k) {
    return std::find(shape.zeros.begin(), shape.zeros.end(), std::tuple{i, j, k}) != shape.zeros.end();
  };
  std::vector<Symbol> unknowns;
  Mat2 T;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = shape.lo; k <= shape.hi; ++k) {
        if (forced_zero(i, j, k)) continue;
        Symbol u = Symbol::intern("T" + std::to_string(i + 1) + std::to_string(j + 1) + "_" + idx(k));
        unknowns.push_back(u);
        T(i, j) = T(i, j) + Laurent::mono(V(u), k);
      }
  if (unknowns.empty()) return res;

  auto defining = [&](const Mat2& X) {
    return X.map([](const Laurent& e) { return e.z_dz(); }) + L.m * X - X * Lt.m;
  };
  std::vector<RatFun> eqs;
  collect_coefficients(defining(T), eqs);
  LinearSolution sol = exactalg::solve_linear(unknowns, eqs);
  if (!sol.consistent() || sol.free.empty()) return res;
  res.family_dim = sol.free.size();

  auto instantiate = [&](const Bindings& fv) {
    auto vals = sol.specialize(fv);
    Bindings b(vals.begin(), vals.end());
    return T.map([&](const Laurent& e) { return e.map([&](const RatFun& c) { return exactalg::substitute(c, b); }); });
  };
  Laurent dtr = trace(Lt.m) - trace(L.m);
  if (!dtr.is_zero() && (dtr.min_exp() != 0 || dtr.max_exp() != 0 || !dtr.coeff(0).is_constant())) return res;
  GaussRat e = dtr.is_zero() ? GaussRat(0) : dtr.coeff(0).constant_value();
  if (!e.is_integer()) return res;
  res.det_exp = static_cast<int>(e.re().get_num().get_si());
  auto det_ok = [&](const Laurent& d) {
    return !d.is_zero() && d.min_exp() == res.det_exp && d.max_exp() == res.det_exp;
  };

  std::vector<Bindings> trials;
  for (std::size_t j = 0; j < sol.free.size(); ++j) {
    Bindings fv;
    for (std::size_t k = 0; k < sol.free.size(); ++k) fv[sol.free[k]] = RatFun(j == k ? 1 : 0);
    trials.push_back(fv);
  }
  if (sol.free.size() > 1) {
    Bindings all;
    for (Symbol s : sol.free) all[s] = RatFun(1);
    trials.push_back(all);
  }
  Mat2 chosen = instantiate(trials[0]);
  for (auto& fv : trials) {
    Mat2 X = instantiate(fv);
    if (det_ok(det(X))) {
      chosen = X;
      break;
    }
  }
  // Scalar freedom: first nonzero coefficient in (11, 12, 21, 22) x ascending z order becomes 1.
  for (auto& e : chosen.m)
    if (!e.is_zero()) {
      RatFun piv = e.coeffs().begin()->second.inverse();
      chosen = chosen.map([&](const Laurent& x) { return x.scaled(piv); });
      break;
    }
  res.det = det(chosen);
  res.det_ok = det_ok(res.det);
  res.identity_holds = defining(chosen).is_zero();
  res.shape_holds = true;
  for (auto& [i, j, k] : shape.zeros)
    if (!chosen(i, j).coeff(k).is_zero()) res.shape_holds = false;
  if (shape.top_det_zero) {
    RatFun d = chosen(0, 0).coeff(shape.hi) * chosen(1, 1).coeff(shape.hi) -
               chosen(0, 1).coeff(shape.hi) * chosen(1, 0).coeff(shape.hi);
    if (!d.is_zero()) res.shape_holds = false;
  }
  res.T = chosen;
  return res;
}

TransferResult chart_transfer_with_gauge(const ChartState& s, Chart target) {
  if (!chart_in_family(s.family, target))
    throw ChartDomainError("chart " + to_string(target) + " does not belong to " + to_string(s.family));
  ZMatrixOperator L = build_operator(s);
  if (target == s.chart) return {s, Mat2::identity()};

  // T = [[1, v/mu], [0, 1/mu]], Atilde = T^{-1}(z T' + A T):
  // Atilde11 = A11 - v A21, Atilde21 = mu A21.
  int norm_exp = 0, q_exp = 0, h_exp = 0;
  switch (target) {
    case Chart::ST1: norm_exp = 1, q_exp = 0, h_exp = -1; break;
    case Chart::ST0: norm_exp = 0, q_exp = 1, h_exp = 1; break;
    case Chart::C0: norm_exp = 0, q_exp = -1, h_exp = -1; break;
    case Chart::CM1: norm_exp = -1, q_exp = 0, h_exp = 1; break;
  }
  Symbol mu = Symbol::intern("gauge_mu");
  Symbol vs[3] = {Symbol::intern("gauge_v_m1"), Symbol::intern("gauge_v_0"), Symbol::intern("gauge_v_1")};
  Laurent v;
  for (int k = -1; k <= 1; ++k) v = v + Laurent::mono(V(vs[k + 1]), k);
  Laurent t11 = L.m(0, 0) - v * L.m(1, 0);
  Laurent t21 = L.m(1, 0).scaled(V(mu));
  std::vector<RatFun> eqs{t21.coeff(norm_exp) - 1};
  for (auto& [k, c] : t11.coeffs())
    if (k != h_exp) eqs.push_back(c);
  LinearSolution sol = exactalg::solve_linear({mu, vs[0], vs[1], vs[2]}, eqs);
  if (!sol.consistent()) throw ChartDomainError("state lies outside the overlap with chart " + to_string(target));
  Bindings zero;
  for (Symbol fr : sol.free) zero[fr] = RatFun();
  auto vals = sol.specialize(zero);
  RatFun m = vals[mu];
  if (m.is_zero()) throw ChartDomainError("degenerate gauge for chart " + to_string(target));
  Laurent vv = v.map([&](const RatFun& c) { return exactalg::substitute(c, Bindings(vals.begin(), vals.end())); });

  Mat2 T, Tinv;
  T(0, 0) = Laurent(RatFun(1));
  T(0, 1) = vv.scaled(m.inverse());
  T(1, 1) = Laurent(m.inverse());
  Tinv(0, 0) = Laurent(RatFun(1));
  Tinv(0, 1) = -vv;
  Tinv(1, 1) = Laurent(m);
  Mat2 At = Tinv * (T.map([](const Laurent& e) { return e.z_dz(); }) + L.m * T);

  ChartState out = s;
  out.chart = target;
  out.q = -At(1, 0).coeff(q_exp);
  out.a = At(0, 0).coeff(h_exp);
  ZMatrixOperator Lt = build_operator(out);
  if (!(Lt.m == At)) throw exactalg::AlgebraError("gauge image does not match the chart normal form on " + to_string(target));
  return {out, T};
}

}  // namespace piii::laxops
