#include "piii/exactalg/linsolve.hpp"

#include <algorithm>
#include <tuple>

#include "piii/exactalg/errors.hpp"

namespace piii::exactalg {

namespace {

struct Row {
  std::map<int, RatFun> coef;
  RatFun rhs;
  bool pivot = false;
};

std::size_t cost(const RatFun& f) { return f.num().size() + f.den().size(); }

}  // namespace

std::map<Symbol, RatFun> LinearSolution::specialize(const Bindings& freevals) const {
  std::map<Symbol, RatFun> out;
  for (auto& [s, v] : values) {
    auto it = freevals.find(s);
    out[s] = it != freevals.end() ? it->second : substitute(v, freevals);
  }
  return out;
}

LinearSolution solve_linear(const std::vector<Symbol>& unknowns, const std::vector<RatFun>& equations) {
  std::map<std::uint8_t, int> col;
  for (std::size_t k = 0; k < unknowns.size(); ++k) col[unknowns[k].index()] = static_cast<int>(k);

  std::vector<Row> rows;
  for (const RatFun& eq : equations) {
    if (eq.is_zero()) continue;
    for (Symbol s : eq.den().variables())
      if (col.count(s.index())) throw NonlinearError("unknown in denominator: " + s.name());
    std::map<int, std::vector<Term>> parts;
    std::vector<Term> c0;
    for (auto& t : eq.num().terms()) {
      int hit = -1;
      for (int k = 0; k < t.m.n; ++k) {
        auto it = col.find(t.m.var[k]);
        if (it == col.end()) continue;
        if (hit >= 0 || t.m.exp[k] > 1)
          throw NonlinearError("nonlinear occurrence of unknown " + Symbol::from_index(t.m.var[k]).name());
        hit = it->second;
      }
      if (hit < 0)
        c0.push_back(t);
      else
        parts[hit].push_back({t.m.without(unknowns[hit]), t.c});
    }
    Row r;
    for (auto& [k, ts] : parts) r.coef[k] = RatFun(Poly::from_terms(ts));
    r.rhs = RatFun(-Poly::from_terms(c0));
    rows.push_back(std::move(r));
  }

  // Global pivoting: cheapest coefficient first, Markowitz fill-in as tie-break.
  std::vector<int> pivot_row(unknowns.size(), -1);
  for (;;) {
    std::vector<int> colcount(unknowns.size(), 0);
    for (auto& r : rows)
      if (!r.pivot)
        for (auto& [k, v] : r.coef) ++colcount[k];
    int best = -1, bc = -1;
    std::tuple<std::size_t, std::size_t, int> bkey{};
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (rows[r].pivot) continue;
      for (auto& [k, v] : rows[r].coef) {
        std::tuple<std::size_t, std::size_t, int> key{cost(v), (rows[r].coef.size() - 1) * (colcount[k] - 1), k};
        if (best < 0 || key < bkey) best = r, bc = k, bkey = key;
      }
    }
    if (best < 0) break;
    const int c = bc;
    Row& P = rows[best];
    P.pivot = true;
    pivot_row[c] = best;
    RatFun inv = P.coef.at(c).inverse();
    for (auto& [k, v] : P.coef) v = (k == c) ? RatFun(1) : v * inv;
    P.rhs = P.rhs * inv;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == best) continue;
      auto it = rows[r].coef.find(c);
      if (it == rows[r].coef.end()) continue;
      RatFun f = it->second;
      rows[r].coef.erase(it);
      for (auto& [k, v] : P.coef) {
        if (k == c) continue;
        RatFun nv = rows[r].coef.count(k) ? rows[r].coef[k] - f * v : -(f * v);
        if (nv.is_zero())
          rows[r].coef.erase(k);
        else
          rows[r].coef[k] = nv;
      }
      rows[r].rhs = rows[r].rhs - f * P.rhs;
    }
  }

  LinearSolution sol;
  sol.unknowns = unknowns;
  for (auto& r : rows)
    if (!r.pivot && r.coef.empty() && !r.rhs.is_zero()) sol.contradictions.push_back(r.rhs);
  if (!sol.contradictions.empty()) {
    sol.status = LinearSolution::Status::inconsistent;
    return sol;
  }
  for (std::size_t c = 0; c < unknowns.size(); ++c)
    if (pivot_row[c] < 0) sol.free.push_back(unknowns[c]);
  sol.status = sol.free.empty() ? LinearSolution::Status::unique : LinearSolution::Status::family;
  for (std::size_t c = 0; c < unknowns.size(); ++c) {
    if (pivot_row[c] < 0) {
      sol.values[unknowns[c]] = RatFun::var(unknowns[c]);
      continue;
    }
    const Row& r = rows[pivot_row[c]];
    RatFun v = r.rhs;
    for (auto& [k, cf] : r.coef)
      if (k != static_cast<int>(c)) v -= cf * RatFun::var(unknowns[k]);
    sol.values[unknowns[c]] = v;
  }
  Bindings b;
  for (std::size_t c = 0; c < unknowns.size(); ++c)
    if (pivot_row[c] >= 0) b[unknowns[c]] = sol.values[unknowns[c]];
  sol.verified = true;
  for (const RatFun& eq : equations)
    if (!substitute(eq, b).is_zero()) sol.verified = false;
  return sol;
}

}  // namespace piii::exactalg
