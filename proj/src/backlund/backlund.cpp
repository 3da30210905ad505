#include "piii/backlund/backlund.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "piii/exactalg/parse.hpp"

namespace piii::backlund {

using exactalg::Bindings;
using exactalg::GaussRat;
using exactalg::parse;
using exactalg::substitute;
using exactalg::Symbol;
namespace sym = exactalg::sym;
using laxops::Chart;

namespace {

RatFun V(Symbol s) { return RatFun::var(s); }

bool is_d7(Gen g) { return g == Gen::s1p || g == Gen::s2p || g == Gen::B; }

// Action of one letter on (theta0, thetainf, k); T is RatFun or complex.
template <class T>
void letter_params(const Letter& l, T& th0, T& thi, long& k) {
  const long sgn = l.inverse ? -1 : 1;
  switch (l.g) {
    case Gen::s1: th0 = T(2) - th0, thi = -thi, k += 2 * sgn; break;
    case Gen::s2: th0 = th0 + T(sgn), thi = thi + T(sgn); break;
    case Gen::s3: thi = -thi, k += sgn; break;
    case Gen::s4: std::swap(th0, thi); break;
    case Gen::B1: th0 = th0 + T(2 * sgn); break;
    case Gen::B2: thi = thi + T(2 * sgn); break;
    case Gen::B3: k += 4 * sgn; break;
    case Gen::s1p: th0 = -th0, k += 2 * sgn; break;
    case Gen::s2p: th0 = T(1) - th0, k += 2 * sgn; break;
    case Gen::B: k += 4 * sgn; break;
  }
}

Bindings state_bindings(const ChartState& s) { return s.bindings(); }

}  // namespace

Family family_of(Gen g) { return is_d7(g) ? Family::D7 : Family::D6; }

std::string gen_name(Gen g) {
  switch (g) {
    case Gen::s1: return "s1";
    case Gen::s2: return "s2";
    case Gen::s3: return "s3";
    case Gen::s4: return "s4";
    case Gen::B1: return "B1";
    case Gen::B2: return "B2";
    case Gen::B3: return "B3";
    case Gen::s1p: return "s1+";
    case Gen::s2p: return "s2+";
    case Gen::B: return "B";
  }
  return "?";
}

Gen parse_gen(const std::string& s) {
  static const std::map<std::string, Gen> names{
      {"s1", Gen::s1},   {"s2", Gen::s2},   {"s3", Gen::s3},   {"s4", Gen::s4},   {"B1", Gen::B1},
      {"B2", Gen::B2},   {"B3", Gen::B3},   {"s1+", Gen::s1p}, {"s2+", Gen::s2p}, {"s1p", Gen::s1p},
      {"s2p", Gen::s2p}, {"B", Gen::B},     {"b1", Gen::B1},   {"b2", Gen::B2},   {"b3", Gen::B3}};
  auto it = names.find(s);
  if (it == names.end()) throw exactalg::ParseError("unknown Backlund generator '" + s + "'");
  return it->second;
}

BacklundWord BacklundWord::parse(const std::string& text, std::optional<Family> family) {
  BacklundWord w;
  std::istringstream in(text);
  std::string tok;
  std::optional<Family> seen = family;
  while (in >> tok) {
    Letter l{Gen::s1, false};
    int power = 1;
    auto caret = tok.find('^');
    std::string base = tok.substr(0, caret);
    if (caret != std::string::npos) {
      std::string e = tok.substr(caret + 1);
      if (!e.empty() && e.front() == '(' && e.back() == ')') e = e.substr(1, e.size() - 2);
      try {
        std::size_t used = 0;
        power = std::stoi(e, &used);
        if (used != e.size()) throw std::invalid_argument(e);
      } catch (const std::exception&) {
        throw exactalg::ParseError("bad exponent in '" + tok + "'");
      }
    }
    l.g = parse_gen(base);
    if (seen && *seen != family_of(l.g))
      throw exactalg::ParseError("generator " + base + " does not belong to " + laxops::to_string(*seen));
    seen = family_of(l.g);
    if (power < 0) l.inverse = true, power = -power;
    for (int j = 0; j < power; ++j) w.letters.push_back(l);
  }
  w.family = seen.value_or(Family::D6);
  return w;
}

BacklundWord BacklundWord::of(Gen g, bool inverse) { return BacklundWord{family_of(g), {Letter{g, inverse}}}; }

std::string BacklundWord::str() const {
  if (letters.empty()) return "id";
  std::string s;
  for (auto& l : letters) {
    if (!s.empty()) s += ' ';
    s += gen_name(l.g) + (l.inverse ? "^-1" : "");
  }
  return s;
}

BacklundWord BacklundWord::inverse() const {
  BacklundWord r{family, {}};
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) r.letters.push_back(Letter{it->g, !it->inverse});
  return r;
}

BacklundWord BacklundWord::operator*(const BacklundWord& o) const {
  BacklundWord r = *this;
  r.letters.insert(r.letters.end(), o.letters.begin(), o.letters.end());
  return r;
}

BacklundWord BacklundWord::pow(int n) const {
  BacklundWord r{family, {}};
  BacklundWord b = n < 0 ? inverse() : *this;
  for (int j = 0; j < std::abs(n); ++j) r = r * b;
  return r;
}

ParamPoint ParamPoint::symbolic(Family f) {
  if (f == Family::D6) return {V(sym::theta0()), V(sym::thetainf()), 0};
  return {V(sym::theta()), RatFun(), 0};
}

std::string ParamPoint::str(Family f) const {
  std::string s = f == Family::D6 ? "(theta0=" + theta0.str() + ", thetainf=" + thetainf.str()
                                  : "(theta=" + theta0.str();
  return s + ", shift=" + std::to_string(k) + "*i*pi/2)";
}

ParamPoint param_action(const BacklundWord& w, const ParamPoint& p) {
  ParamPoint r = p;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) letter_params(*it, r.theta0, r.thetainf, r.k);
  return r;
}

GaussRat time_factor(long k) {
  static const GaussRat powers[4] = {GaussRat(1), -GaussRat::i(), GaussRat(-1), GaussRat::i()};
  return powers[((k % 4) + 4) % 4];
}

// ------------------------------------------------------------- formulas

namespace {

const char* kS2q = "-(t*q^2 - q*theta0 - t + 2*a)/(q*(t*q^2 + q*thetainf - t + 2*a))";
const char* kS2aNum =
    "8*a^3 - 4*a*q^2*t^2 + 8*a^2*q^2*t - q*t^2 + 2*a*q^4*t^2 - 8*a^2*t + 2*a*t^2 - 4*a^2*q + 4*a*q*t - q^5*t"
    " + q*t^2*theta0 - q^5*t^2*theta0 + q^2*t*theta0^2 - 4*a^2*q*theta0 + 2*a*q^2*theta0 + q^4*t*theta0"
    " - q^2*t*theta0 - q^5*t^2*thetainf - 4*q^4*t*thetainf^2 + 4*a^2*q*thetainf + q*t^2*thetainf"
    " - 2*a*q^2*thetainf - q^4*t*thetainf + q^2*t^2*thetainf + q^3*theta0*thetainf - 4*a*q^3*t*theta0"
    " - 4*a*q*t*thetainf + q^2*t*theta0*thetainf - q^4*t*theta0*thetainf - 2*a*q^2*theta0*thetainf"
    " - 4*a*q^3*t + 2*q^3*t";
const char* kS2aDen = "2*q^2*(t*q^2 + q*thetainf - t + 2*a)^2";
const char* kS4q = "q*(-q^2*t - thetainf*q - t + 2*a)/(-q^2*t - theta0*q - t + 2*a)";
const char* kS4aNum =
    "4*q^2*a*t^2 + q*t^2*theta0 + q^5*t^2*thetainf + 4*q^3*a*t*theta0 - q^5*t^2*theta0"
    " - q^4*t*thetainf*theta0 - q^2*t*theta0*thetainf + 4*q*t*thetainf*a + q^2*t*theta0^2"
    " + q^4*t*thetainf^2 - t^2*q*thetainf - 4*q*theta0*a^2 - 4*a^2*thetainf*q + 2*a*theta0*q^2*thetainf"
    " - 8*a^2*q^2*t + 2*a*q^4*t^2 + 2*a*t^2 - 8*a^2*t + 8*a^3";
const char* kS4aDen = "2*(-q^2*t - theta0*q - t + 2*a)^2";
const char* kB1q =
    "q*(-4*a^2 + 4*a*t - t^2 + theta0^2*q^2 + 2*t*thetainf*q^3 + t^2*q^4)"
    "/((2*a - t - theta0*q + t*q^2)*(2*a - t - theta0*q - t*q^2))";
const char* kB2q =
    "-(2*a + t + thetainf*q + t*q^2)*(2*a - t + thetainf*q + t*q^2)*q"
    "/(4*a*q^2*t + 2*q*t - t^2 - 2*q^3*t - q^2*thetainf^2 + 4*a^2 - 4*a*q - 2*q*t*theta0"
    " - 2*q^2*thetainf + t^2*q^4)";
const char* kS2pq = "-t*(theta*q + 2*a - t)/(2*q^2)";
const char* kS2pa = "t*(4*a^2 - 4*a*t + 2*a*q + 2*theta*a*q + q^2*theta + t^2 - t*q*theta - q*t - 2*q^3)/(4*q^3)";

RatFun ratio(const char* n, const char* d) { return parse(n) / parse(d); }

const exactalg::DerivationSpec& source_flow(Family f) {
  static const exactalg::DerivationSpec d6 = laxops::derive_isomonodromy_flow(Family::D6).flow;
  static const exactalg::DerivationSpec d7 = laxops::derive_isomonodromy_flow(Family::D7).flow;
  return f == Family::D6 ? d6 : d7;
}

RatFun derived_a(Family f, const RatFun& qt) {
  RatFun t = V(sym::t());
  RatFun dq = source_flow(f).apply(qt);
  return f == Family::D6 ? (t * dq + qt) / 4 : (t * dq - qt) / 2;
}

std::vector<RatFun> den_factors(std::initializer_list<const char*> fs) {
  std::vector<RatFun> r;
  for (auto f : fs) r.push_back(parse(f));
  return r;
}

StateMap compute_map(const Letter& l) {
  StateMap m;
  RatFun q = V(sym::q()), a = V(sym::a()), t = V(sym::t());
  RatFun th0 = V(sym::theta0()), thi = V(sym::thetainf());
  RatFun dummy0, dummyi;
  letter_params(l, dummy0, dummyi, m.k);
  m.sigma = time_factor(m.k);
  m.q = q, m.a = a;
  if (l.inverse) {
    switch (l.g) {
      case Gen::s1: case Gen::s1p: case Gen::B3: case Gen::B: case Gen::s4: break;
      case Gen::s3: m.q = q * RatFun(GaussRat::i()), m.a = a * RatFun(GaussRat::i()); return m;
      case Gen::s2p: {
        StateMap fwd = state_map(Letter{Gen::s2p, false});
        fwd.k = m.k, fwd.sigma = m.sigma;
        return fwd;
      }
      case Gen::s2: case Gen::B1: case Gen::B2: {
        // s2^-1 = B3^-1 s1 s2 s1, B1^-1 = s4 s3^-1 s4 s1 s3^-1, B2^-1 = s2^-1 s2^-1 B1.
        const char* word = l.g == Gen::s2 ? "s1 s2 s1" : l.g == Gen::B1 ? "s4 s3^-1 s4 s1 s3^-1" : "s2^-1 s2^-1 B1";
        ChartState s = ChartState::symbolic(Family::D6);
        ChartState r = apply_state(BacklundWord::parse(word), s);
        m.q = r.q, m.a = r.a;
        return m;
      }
    }
    if (l.g != Gen::s4) return m;
  }
  switch (l.g) {
    case Gen::s1: case Gen::B3: case Gen::s1p: case Gen::B: break;
    case Gen::s3: m.q = q * RatFun(-GaussRat::i()), m.a = a * RatFun(-GaussRat::i()); break;
    case Gen::s2:
      m.q = parse(kS2q);
      m.a = derived_a(Family::D6, m.q);
      m.a_derived = true;
      m.exclusions = den_factors({"q", "t*q^2 + q*thetainf - t + 2*a"});
      break;
    case Gen::s4:
      m.q = parse(kS4q);
      m.a = ratio(kS4aNum, kS4aDen);
      m.exclusions = den_factors({"-q^2*t - theta0*q - t + 2*a"});
      break;
    case Gen::B1:
      m.q = parse(kB1q);
      m.a = derived_a(Family::D6, m.q);
      m.a_derived = true;
      m.exclusions = den_factors({"2*a - t - theta0*q + t*q^2", "2*a - t - theta0*q - t*q^2"});
      break;
    case Gen::B2:
      m.q = parse(kB2q);
      m.a = derived_a(Family::D6, m.q);
      m.a_derived = true;
      m.exclusions = {parse(kB2q).den()};
      break;
    case Gen::s2p: {
      Bindings flip{{sym::t(), -t}};
      m.q = substitute(parse(kS2pq), flip);
      m.a = substitute(parse(kS2pa), flip);
      m.exclusions = den_factors({"q"});
      break;
    }
  }
  (void)th0, (void)thi;
  return m;
}

}  // namespace

const StateMap& state_map(const Letter& l) {
  static std::recursive_mutex mu;
  static std::map<std::pair<int, bool>, StateMap> cache;
  std::lock_guard<std::recursive_mutex> lk(mu);
  auto key = std::pair{static_cast<int>(l.g), l.inverse};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  StateMap m = compute_map(l);
  return cache.emplace(key, std::move(m)).first->second;
}

std::vector<PublishedFormula> published_formulas(Gen g) {
  switch (g) {
    case Gen::s2: return {{"q~", parse(kS2q)}, {"a~", ratio(kS2aNum, kS2aDen)}};
    case Gen::s4: return {{"q~", parse(kS4q)}, {"a~", ratio(kS4aNum, kS4aDen)}};
    case Gen::B1: return {{"q~", parse(kB1q)}};
    case Gen::B2: return {{"q~", parse(kB2q)}};
    case Gen::s2p: return {{"q~ (new time)", parse(kS2pq)}, {"a~ (new time)", parse(kS2pa)}};
    default: return {};
  }
}

const std::vector<CriticalCase>& critical_cases() {
  static const std::vector<CriticalCase> cases = [] {
    Symbol th0 = sym::theta0(), thi = sym::thetainf();
    std::vector<CriticalCase> c;
    c.push_back({Gen::s2, "s2 theta0+thetainf=0, type (-1,1)", parse("theta0 + thetainf"),
                 parse("t*q^2 + q*thetainf - t + 2*a"), {{th0, parse("-thetainf")}}, parse("-1/q"), std::nullopt,
                 parse("(-q + 2*a)/(2*q^2)"), {}});
    c.push_back({Gen::B1, "B1 thetainf=theta0, type (-1,-1)", parse("thetainf - theta0"),
                 parse("2*a - t - theta0*q - t*q^2"), {{thi, parse("theta0")}},
                 parse("-q*(2*a - t + theta0*q + t*q^2)/(2*a - t - theta0*q + t*q^2)"),
                 parse("-q*(2*t*q + 2*theta0 + 1)/(2*t*q + 1)"), std::nullopt, {}});
    c.push_back({Gen::B1, "B1 thetainf=-theta0, type (-1,1)", parse("thetainf + theta0"),
                 parse("2*a - t - theta0*q + t*q^2"), {{thi, parse("-theta0")}},
                 parse("q*(-2*a + t - theta0*q + t*q^2)/(2*a - t - theta0*q - t*q^2)"), parse("-q + theta0/t"),
                 std::nullopt, {}});
    c.push_back({Gen::B2, "B2 theta0=thetainf+2, type (1,1)", parse("theta0 - thetainf - 2"),
                 parse("2*a + t + thetainf*q + t*q^2"), {{th0, parse("thetainf + 2")}},
                 parse("-(2*a - t + thetainf*q + t*q^2)*q/(2*a - t - thetainf*q - 2*q + t*q^2)"),
                 parse("t*q/(t + thetainf*q + q)"), std::nullopt,
                 den_factors({"2*a + t + thetainf*q + t*q^2", "2*a - t - thetainf*q - 2*q + t*q^2"})});
    c.push_back({Gen::B2, "B2 theta0=-thetainf, type (-1,1)", parse("theta0 + thetainf"),
                 parse("2*a - t + thetainf*q + t*q^2"), {{th0, parse("-thetainf")}},
                 parse("-(2*a + t + thetainf*q + t*q^2)*q/(2*a + t - thetainf*q - 2*q + t*q^2)"),
                 parse("t*q/(t - thetainf*q - q)"), std::nullopt,
                 den_factors({"2*a - t + thetainf*q + t*q^2", "2*a + t - thetainf*q - 2*q + t*q^2"})});
    return c;
  }();
  return cases;
}

RatFun displayed_denominator(Gen g) {
  auto strip = [](std::string x) {
    auto k = x.rfind("/(");
    return x.substr(k + 1);
  };
  switch (g) {
    case Gen::s2: return parse(strip(kS2q));
    case Gen::s4: return parse(strip(kS4q));
    case Gen::B1: return parse(strip(kB1q));
    case Gen::B2: return parse(strip(kB2q));
    case Gen::s2p: return parse(strip(kS2pq));
    default: return RatFun(1);
  }
}

std::pair<RatFun, RatFun> critical_locus_values(const CriticalCase& c) {
  const StateMap& m = state_map(c.gen);
  RatFun rq = substitute(m.q, c.impose), ra = substitute(m.a, c.impose);
  Symbol a = sym::a();
  auto sol = exactalg::solve_linear({a}, {substitute(c.locus, c.impose)});
  Bindings on{{a, sol.values.at(a)}};
  return {substitute(rq, on), substitute(ra, on)};
}

// ------------------------------------------------------------- apply_state

ChartState apply_state(const BacklundWord& w, const ChartState& s0) {
  if (!w.letters.empty() && s0.family != w.family)
    throw BacklundError("word " + w.str() + " acts on " + laxops::to_string(w.family) + " states");
  ChartState s = s0;
  Chart home = laxops::default_chart(s.family);
  if (s.chart != home) s = laxops::chart_transfer(s, home);
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    const StateMap& m = state_map(*it);
    Bindings b = state_bindings(s);
    RatFun nq, na;
    try {
      nq = substitute(m.q, b);
      na = substitute(m.a, b);
    } catch (const exactalg::SubstitutionPole& pole) {
      bool done = false;
      if (!it->inverse)
        for (auto& c : critical_cases()) {
          if (c.gen != it->g) continue;
          if (!substitute(c.relation, b).is_zero() || !substitute(c.locus, b).is_zero()) continue;
          try {
            nq = substitute(substitute(m.q, c.impose), b);
            na = substitute(substitute(m.a, c.impose), b);
            done = true;
          } catch (const exactalg::SubstitutionPole&) {
          }
          if (done) break;
        }
      if (!done) throw PartialMapError(gen_name(it->g) + (it->inverse ? "^-1" : ""), pole.factor);
    }
    long k = 0;
    letter_params(*it, s.theta0, s.thetainf, k);
    s.q = nq;
    s.a = na;
    s.t = s.t * RatFun(m.sigma);
  }
  return s;
}

// ------------------------------------------------------------- verification

bool Report::pass() const {
  for (auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

laxops::ZMatrixOperator gauge_source_operator(Gen g, const ChartState& s) {
  laxops::ZMatrixOperator L = laxops::build_operator(s);
  switch (g) {
    case Gen::s2:
    case Gen::s2p: {
      laxops::Laurent half(RatFun(GaussRat::frac(1, 2)));
      L.m(0, 0) = L.m(0, 0) + half;
      L.m(1, 1) = L.m(1, 1) + half;
      break;
    }
    case Gen::s3:
      // the chart coefficients pick up the phases of z -> i z
      L.m = L.m.map([](const laxops::Laurent& e) { return e.at_scaled_z(GaussRat::i()); });
      break;
    case Gen::s4:
      L.m = L.m.map([](const laxops::Laurent& e) { return -e.at_inverse_z(); });
      std::swap(L.lo, L.hi);
      L.lo = -L.lo, L.hi = -L.hi;
      break;
    default: break;
  }
  return L;
}

laxops::GaugeShape gauge_shape(Gen g) {
  using laxops::GaugeShape;
  switch (g) {
    case Gen::s2:
    case Gen::s2p: return GaugeShape::window(-2, 0);
    case Gen::s4: return GaugeShape::window(-1, 1);
    case Gen::B1: {
      GaugeShape s = GaugeShape::window(-2, 0);
      s.zeros = {{0, 0, -2}, {1, 0, -2}, {1, 1, -2}};
      return s;
    }
    case Gen::B2: {
      GaugeShape s = GaugeShape::window(-1, 1);
      s.zeros = {{0, 0, -1}, {1, 0, -1}, {1, 1, -1}};
      s.top_det_zero = true;
      return s;
    }
    default: return GaugeShape::window(0, 0);
  }
}

namespace {

ChartState target_state(Family f, const RatFun& q, const RatFun& a, const RatFun& t, const ParamPoint& p) {
  ChartState s = ChartState::symbolic(f);
  s.q = q, s.a = a, s.t = t;
  s.theta0 = p.theta0;
  if (f == Family::D6) s.thetainf = p.thetainf;
  return s;
}

Bindings flow_target_bindings(Family f, const RatFun& q, const RatFun& a, const RatFun& t, const ParamPoint& p) {
  Bindings b{{sym::q(), q}, {sym::a(), a}, {sym::t(), t}};
  if (f == Family::D6) {
    b[sym::theta0()] = p.theta0;
    b[sym::thetainf()] = p.thetainf;
  } else {
    b[sym::theta()] = p.theta0;
  }
  return b;
}

void transport_checks(Report& r, Family f, const RatFun& qt, const RatFun& at, const GaussRat& sigma,
                      const ParamPoint& tgt) {
  RatFun t = V(sym::t());
  RatFun sg(sigma);
  const auto& D = source_flow(f);
  Bindings tb = flow_target_bindings(f, qt, at, t * sg, tgt);
  RatFun rq = D.apply(qt) - sg * substitute(laxops::expected_dq(f), tb);
  RatFun ra = D.apply(at) - sg * substitute(laxops::expected_da(f), tb);
  r.checks.push_back({"transport q'", rq.is_zero(), rq.str()});
  r.checks.push_back({"transport a'", ra.is_zero(), ra.str()});
}

}  // namespace

Report verify_transformation(Gen g, const VerifyOptions& opt) {
  Family f = family_of(g);
  BacklundWord w = BacklundWord::of(g);
  ParamPoint p = ParamPoint::symbolic(f);
  ParamPoint tgt = opt.target_override.value_or(param_action(w, p));
  Report r{w.str(), f, p.str(f), tgt.str(f), {}};
  const StateMap& m = state_map(g);
  if (opt.transport) transport_checks(r, f, m.q, m.a, m.sigma, tgt);
  if (opt.gauge) {
    ChartState src = ChartState::symbolic(f);
    auto L = gauge_source_operator(g, src);
    auto Lt = laxops::build_operator(target_state(f, m.q, m.a, src.t * RatFun(m.sigma), tgt));
    auto shape = gauge_shape(g);
    auto gr = laxops::gauge_solve(L, Lt, shape);
    bool ok = gr.T && gr.det_ok && gr.identity_holds && gr.shape_holds;
    std::string detail = gr.T ? "det T = " + gr.det.str() : "no T on window " + std::to_string(shape.lo) + ".." +
                                                                 std::to_string(shape.hi);
    r.checks.push_back({"gauge transport", ok, ok ? "0" : detail});
    if (gr.T)
      r.checks.push_back({"gauge det T = c z^" + std::to_string(gr.det_exp) + ", c != 0", gr.det_ok, gr.det.str()});
  }
  return r;
}

Report verify_word(const BacklundWord& w) {
  Family f = w.family;
  ParamPoint p = ParamPoint::symbolic(f);
  ParamPoint tgt = param_action(w, p);
  Report r{w.str(), f, p.str(f), tgt.str(f), {}};
  ChartState s = apply_state(w, ChartState::symbolic(f));
  GaussRat sigma = time_factor(tgt.k);
  transport_checks(r, f, s.q, s.a, sigma, tgt);
  return r;
}

// ------------------------------------------------------------- relations

Report group_relations_check() {
  Report r{"relations", Family::D6, "", "", {}};
  auto W = [](const char* s) { return BacklundWord::parse(s); };
  ParamPoint p6 = ParamPoint::symbolic(Family::D6), p7 = ParamPoint::symbolic(Family::D7);
  auto same = [&](const std::string& name, const BacklundWord& x, const BacklundWord& y, const ParamPoint& p) {
    ParamPoint a = param_action(x, p), b = param_action(y, p);
    r.checks.push_back({name, a == b, a == b ? "0" : a.str(x.family) + " vs " + b.str(y.family)});
  };
  BacklundWord id6{Family::D6, {}}, id7{Family::D7, {}};
  same("B3 = s1^2", W("B3"), W("s1 s1"), p6);
  same("B3 = s3^4", W("B3"), W("s3 s3 s3 s3"), p6);
  same("B1 = s3 s1^-1 s4 s3 s4", W("B1"), W("s3 s1^-1 s4 s3 s4"), p6);
  same("B2 = B1^-1 s2^2", W("B2"), W("B1^-1 s2 s2"), p6);
  same("s4^2 = id", W("s4 s4"), id6, p6);
  for (const char* g : {"s1", "s2", "s3", "s4", "B1", "B2"}) {
    BacklundWord x = W(g);
    same(std::string("B3 central with ") + g, W("B3") * x, x * W("B3"), p6);
  }
  same("(s1+)^2 = B", W("s1+ s1+"), W("B"), p7);
  same("(s2+)^2 = B", W("s2+ s2+"), W("B"), p7);
  // s1+ s2+ acts on theta by a translation, so it has infinite order.
  {
    BacklundWord x = W("s1+ s2+");
    ParamPoint cur = p7;
    bool returned = false;
    for (int n = 1; n <= 100; ++n) {
      cur = param_action(x, cur);
      if (cur.theta0 == p7.theta0) returned = true;
    }
    r.checks.push_back({"s1+ s2+ infinite order (n <= 100)", !returned, returned ? "returned" : "0"});
  }
  // state level
  auto same_state = [&](const std::string& name, const BacklundWord& x, const BacklundWord& y) {
    ChartState s = ChartState::symbolic(x.family);
    ChartState a = apply_state(x, s), b = apply_state(y, s);
    bool ok = a.q == b.q && a.a == b.a && a.t == b.t;
    r.checks.push_back({name + " (states)", ok, ok ? "0" : (a.q - b.q).str()});
  };
  same_state("s4^2 = id", W("s4 s4"), id6);
  same_state("B3 = s3^4", W("B3"), W("s3 s3 s3 s3"));
  same_state("(s2+)^2 = B", W("s2+ s2+"), W("B"));
  same_state("B1 = s3 s1^-1 s4 s3 s4", W("B1"), W("s3 s1^-1 s4 s3 s4"));
  return r;
}

Report okamoto_substitution_check(bool wrong_gamma) {
  Report r{"okamoto", Family::D6, "", "", {}};
  Symbol qp = laxops::qprime_symbol();
  RatFun t = V(sym::t()), q = V(sym::q()), Qp = V(qp);
  RatFun th0 = V(sym::theta0()), thi = V(sym::thetainf()), th = V(sym::theta());
  {
    exactalg::DerivationSpec D(sym::t());
    D.dependent(sym::q(), Qp)
        .dependent(qp, laxops::second_order_rhs(Family::D6, t, q, Qp, th0, thi))
        .constants({sym::theta0(), sym::thetainf()});
    // x = t^2, Q = t q, d/dx = (1/(2t)) d/dt
    RatFun x = t * t, Q = t * q;
    RatFun Qx = D.apply(Q) / (t * 2);
    RatFun Qxx = D.apply(Qx) / (t * 2);
    RatFun al = thi * 4, be = -(th0 - 1) * 4, ga = RatFun(wrong_gamma ? -4 : 4), de = RatFun(-4);
    RatFun rhs = Qx * Qx / Q - Qx / x + Q * Q * (ga * Q + al) / (x * x * 4) + be / (x * 4) + de / (Q * 4);
    RatFun res = Qxx - rhs;
    r.checks.push_back({"D6 x=t^2, Q=tq to PIII' with (4 thetainf, -4(theta0-1), 4, -4)", res.is_zero(), res.str()});
  }
  {
    exactalg::DerivationSpec D(sym::t());
    D.dependent(sym::q(), Qp).dependent(qp, laxops::second_order_rhs(Family::D7, t, q, Qp, th, RatFun())).constant(sym::theta());
    // q = -Q, t = -T: d/dT = -d/dt
    RatFun T = -t, Q = -q;
    RatFun Qs = -D.apply(Q);
    RatFun Qss = -D.apply(Qs);
    RatFun rhs = Qs * Qs / Q - Qs / T - th / T - Q * Q * 2 / (T * T) - Q.inverse();
    RatFun res = Qss - rhs;
    r.checks.push_back({"D7 q=-Q, t=-T to PIII'", res.is_zero(), res.str()});
    // (t, q, q') -> (-t, -q, q') applied twice
    Bindings flip{{sym::t(), -t}, {sym::q(), -q}, {qp, Qp}};
    RatFun t2 = substitute(-t, flip), q2 = substitute(-q, flip), qp2 = substitute(Qs, flip);
    bool ok = t2 == t && q2 == q && Qs == Qp && qp2 == Qp;
    r.checks.push_back({"D7 sign change round trip", ok, ok ? "0" : "mismatch"});
  }
  return r;
}

// ------------------------------------------------------------- numerics

numflow::Trajectory solution_map(const BacklundWord& w, const numflow::Trajectory& traj) {
  using numflow::cplx;
  numflow::Trajectory out;
  out.family = traj.family;
  out.params = traj.params;
  {
    long k = 0;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
      letter_params(*it, out.params.theta0, out.params.thetainf, k);
  }
  if (!w.letters.empty() && w.family != traj.family) throw BacklundError("word/trajectory family mismatch");
  const double half_pi = std::acos(-1.0) / 2;
  for (const auto& smp : traj.samples) {
    auto [q, a] = numflow::direct_values(smp);
    cplx t = smp.t, tt = smp.t_tilde;
    numflow::Params p = traj.params;
    bool dropped = false;
    for (auto it = w.letters.rbegin(); it != w.letters.rend() && !dropped; ++it) {
      const StateMap& m = state_map(*it);
      auto val = [&](Symbol s) -> cplx {
        if (s == sym::q()) return q;
        if (s == sym::a()) return a;
        if (s == sym::t()) return t;
        if (s == sym::theta0() || s == sym::theta()) return p.theta0;
        if (s == sym::thetainf()) return p.thetainf;
        throw exactalg::UncoveredIndeterminate(s.name());
      };
      cplx dq = m.q.den().eval(val), da = m.a.den().eval(val);
      cplx nq = m.q.num().eval(val), na = m.a.num().eval(val);
      if (std::abs(dq) < 1e-13 * (1 + std::abs(nq)) || std::abs(da) < 1e-13 * (1 + std::abs(na))) {
        out.events.push_back({"dropped", smp.t, "sample on an excluded locus of " + gen_name(it->g),
                              out.samples.empty() ? 0 : out.samples.size() - 1});
        dropped = true;
        break;
      }
      q = nq / dq, a = na / da;
      long k = 0;
      letter_params(*it, p.theta0, p.thetainf, k);
      t = t * m.sigma.to_complex();
      tt = tt - cplx(0, half_pi * static_cast<double>(k));
    }
    if (dropped) continue;
    out.samples.push_back({tt, t, q, a, numflow::Frame::direct});
  }
  return out;
}

}  // namespace piii::backlund
