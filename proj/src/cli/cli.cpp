#include "piii/cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "piii/backlund/backlund.hpp"
#include "piii/exactalg/parse.hpp"
#include "piii/laxops/lax.hpp"
#include "piii/monodromy/monodromy.hpp"
#include "piii/numflow/numflow.hpp"
#include "piii/special/special.hpp"

namespace piii::cli {

using exactalg::GaussRat;
using exactalg::RatFun;
using json = nlohmann::json;
using laxops::Family;
using numflow::cplx;

namespace {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ------------------------------------------------------------------ values

std::string strip(const std::string& s) {
  std::string r;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) r += c;
  return r;
}

GaussRat parse_exact(const std::string& flag, const std::string& text) {
  try {
    return exactalg::parse_number(strip(text));
  } catch (const exactalg::AlgebraError& e) {
    throw InvalidInput("--" + flag + ": cannot read '" + text + "' as a number (" + e.what() + ")");
  }
}

RatFun exact_fun(const std::string& flag, const std::string& text) { return RatFun(parse_exact(flag, text)); }

int parse_int(const std::string& flag, const std::string& text) {
  GaussRat g = parse_exact(flag, text);
  cplx c = g.to_complex();
  if (c.imag() != 0 || c.real() != std::round(c.real())) throw InvalidInput("--" + flag + ": expected an integer");
  return static_cast<int>(c.real());
}

Family parse_family_flag(const std::string& s) {
  if (s == "d6" || s == "D6") return Family::D6;
  if (s == "d7" || s == "D7") return Family::D7;
  throw InvalidInput("--family: expected d6 or d7, got '" + s + "'");
}

std::string family_name(Family f) { return f == Family::D6 ? "d6" : "d7"; }

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }
cplx cfrom(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw InvalidInput("complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string cstr(cplx z) {
  std::ostringstream o;
  o << std::setprecision(17) << z.real();
  if (z.imag() != 0) o << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return o.str();
}

// ------------------------------------------------------------------ output

struct Output {
  std::ostream& out;
  bool as_json = false;
  std::string file;
  std::vector<std::string> notes;

  void emit(json j, const std::vector<std::pair<std::string, std::string>>& rows) {
    if (!notes.empty()) j["notes"] = notes;
    if (!file.empty()) {
      std::ofstream f(file);
      if (!f) throw InvalidInput("--out: cannot write '" + file + "'");
      f << j.dump(2) << "\n";
    }
    if (as_json) {
      out << j.dump(2) << "\n";
      return;
    }
    std::size_t w = 0;
    for (auto& [k, v] : rows) w = std::max(w, k.size());
    for (auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(w) + 2) << k << v << "\n";
    for (auto& n : notes) out << "note: " << n << "\n";
    if (!file.empty()) out << "wrote " << file << "\n";
  }
};

using Rows = std::vector<std::pair<std::string, std::string>>;

json checks_json(const std::vector<backlund::Check>& cs) {
  json a = json::array();
  for (auto& c : cs) a.push_back({{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}});
  return a;
}

void check_rows(Rows& rows, const std::vector<backlund::Check>& cs) {
  for (auto& c : cs) rows.push_back({c.name, (c.pass ? "PASS" : "FAIL") + (c.pass ? "" : "  " + c.residual)});
}

bool all_pass(const std::vector<backlund::Check>& cs) {
  for (auto& c : cs)
    if (!c.pass) return false;
  return true;
}

json series_json(const special::PowerSeries& s) {
  json c = json::array();
  for (auto& x : s.coeffs) c.push_back(x.str());
  json j{{"rho", s.rho.str()}, {"coeffs", c}, {"N", s.N}, {"logFlag", s.log_flag}};
  if (s.log_flag) j["logCoeff"] = s.log_coeff.str();
  return j;
}

std::string point_str(const monodromy::Point& p) { return monodromy::to_string(p); }

// ------------------------------------------------------------------ options

// Shared flag storage; values are parsed by the handlers before computing.
struct Flags {
  std::string family, theta0, thetainf, theta, out, tol;
  bool json = false;

  std::string element, word, in;
  std::string alpha, beta, e, l1, l2, l3, l4;
  std::string eps1 = "1", eps2 = "1", d, order = "30", mix1 = "1", mix2 = "0";
  std::string t0 = "1", q0, a0, to, plane = "t", samples = "100", swap_threshold, detour_threshold;
  std::vector<std::string> via;
  std::string mode = "fd";
  bool exp_form = false;
};

void common(CLI::App* c, Flags& f, bool params) {
  c->add_flag("--json", f.json, "emit JSON");
  c->add_option("--out", f.out, "also write the JSON report to FILE");
  if (params) {
    c->add_option("--family", f.family, "d6 or d7");
    c->add_option("--theta0", f.theta0, "PIII(D6) theta0");
    c->add_option("--thetainf", f.thetainf, "PIII(D6) thetainf");
    c->add_option("--theta", f.theta, "PIII(D7) theta");
  }
}

void note_decimals(Output& o, std::initializer_list<const std::string*> vals) {
  for (auto* v : vals)
    if (v->find('.') != std::string::npos && v->find_first_of("eE") == std::string::npos) {
      o.notes.push_back("decimal inputs are read as exact fractions (e.g. 0.1 = 1/10)");
      return;
    }
}

// ------------------------------------------------------------------ verify

int verify_isomonodromy(const Flags& fl, Output& o) {
  Family f = parse_family_flag(fl.family.empty() ? "d6" : fl.family);
  laxops::IsoFlow F = laxops::derive_isomonodromy_flow(f);
  laxops::ChartState s = laxops::ChartState::symbolic(f);
  RatFun dq = F.flow.apply(s.q), da = F.flow.apply(s.a);
  std::vector<backlund::Check> cs;
  auto add = [&](const std::string& n, const RatFun& r) { cs.push_back({n, r.is_zero(), r.str()}); };
  add("q' matches the expected flow", dq - laxops::expected_dq(f));
  add("a' matches the expected flow", da - laxops::expected_da(f));
  add("second-order reduction", laxops::reduce_to_second_order(F.flow, f));
  if (f == Family::D6) add("inverse variable equation (swapped parameters)", laxops::swapped_inverse_equation_check());
  bool pass = all_pass(cs);
  json j{{"family", family_name(f)}, {"dq", dq.str()},          {"da", da.str()},
         {"equations", F.equations}, {"unknowns", F.unknowns}, {"checks", checks_json(cs)},
         {"pass", pass}};
  Rows rows{{"family", family_name(f)}, {"q'", dq.str()}, {"a'", da.str()},
            {"equations/unknowns", std::to_string(F.equations) + "/" + std::to_string(F.unknowns)}};
  check_rows(rows, cs);
  rows.push_back({"result", pass ? "PASS" : "FAIL"});
  o.emit(j, rows);
  return pass ? ok : failed;
}

int report_out(const backlund::Report& r, const std::string& param_action, Output& o) {
  bool pass = r.pass();
  json j{{"word", r.word}, {"family", family_name(r.family)}, {"checks", checks_json(r.checks)}, {"pass", pass}};
  if (!param_action.empty()) j["paramAction"] = param_action;
  Rows rows{{"word", r.word}, {"family", family_name(r.family)}};
  if (!param_action.empty()) rows.push_back({"parameters", param_action});
  check_rows(rows, r.checks);
  rows.push_back({"result", pass ? "PASS" : "FAIL"});
  o.emit(j, rows);
  return pass ? ok : failed;
}

std::optional<Family> opt_family(const Flags& fl) {
  if (fl.family.empty()) return std::nullopt;
  return parse_family_flag(fl.family);
}

backlund::BacklundWord parse_word(const std::string& text, std::optional<Family> f) {
  try {
    return backlund::BacklundWord::parse(text, f);
  } catch (const exactalg::AlgebraError& e) {
    throw InvalidInput(std::string("word: ") + e.what());
  }
}

int verify_backlund(const Flags& fl, Output& o) {
  std::string text = !fl.element.empty() ? fl.element : fl.word;
  if (text.empty()) throw InvalidInput("verify backlund needs --element or --word");
  backlund::BacklundWord w = parse_word(text, opt_family(fl));
  std::string action = backlund::param_action(w, backlund::ParamPoint::symbolic(w.family)).str(w.family);
  backlund::Report r = w.letters.size() == 1 && !w.letters[0].inverse ? backlund::verify_transformation(w.letters[0].g)
                                                                      : backlund::verify_word(w);
  r.word = w.str();
  return report_out(r, action, o);
}

int verify_embed(Output& o) {
  std::vector<backlund::Check> cs;
  RatFun id = monodromy::embed_d6_chart_identity();
  cs.push_back({"D6 embedding lies on the cubic surface (chart l1 != 0)", id.is_zero(), id.str()});
  auto m = monodromy::MonodromyDataD7::symbolic();
  m.l4 = (RatFun(1) + m.l2 * m.l3) / m.l1;
  monodromy::D7Stokes s = monodromy::d7_alpha_and_stokes(m);
  cs.push_back({"D7 alpha = -i l14 e + i l12 - i l34", s.alpha_identity, s.alpha.str()});
  cs.push_back({"D7 Stokes reconstruction of top0", s.reconstruction, "top0 mismatch"});
  monodromy::MonodromyDataD7 p{RatFun(), RatFun(1), RatFun(GaussRat::frac(1, 2)), RatFun(-1),
                               RatFun(GaussRat::frac(1, 2))};
  monodromy::D7Stokes t = monodromy::d7_alpha_and_stokes(p);
  bool triv = t.alpha == RatFun(GaussRat::i()) && t.c1.is_zero() && t.c2.is_zero();
  cs.push_back({"D7 trivial-Stokes point gives (alpha, c1, c2) = (i, 0, 0)", triv,
                "(" + t.alpha.str() + ", " + t.c1.str() + ", " + t.c2.str() + ")"});
  backlund::Report r{"monodromy-embed", Family::D6, "", "", cs};
  bool pass = all_pass(cs);
  Rows rows;
  check_rows(rows, cs);
  rows.push_back({"result", pass ? "PASS" : "FAIL"});
  o.emit({{"checks", checks_json(cs)}, {"pass", pass}}, rows);
  return pass ? ok : failed;
}

// ------------------------------------------------------------------ monodromy

int monodromy_singular(const Flags& fl, Output& o) {
  Family f = parse_family_flag(fl.family.empty() ? "d6" : fl.family);
  if (fl.alpha.empty()) throw InvalidInput("--alpha is required");
  RatFun al = exact_fun("alpha", fl.alpha);
  RatFun be = f == Family::D6 ? (fl.beta.empty() ? throw InvalidInput("--beta is required for d6")
                                                  : exact_fun("beta", fl.beta))
                              : RatFun(1);
  monodromy::CubicSurface S;
  try {
    S = monodromy::surface(f, al, be);
  } catch (const monodromy::MonodromyError& e) {
    throw InvalidInput(e.what());
  }
  monodromy::SingularLocus L = monodromy::singular_points(S);
  json pts = json::array();
  Rows rows{{"family", family_name(f)}, {"surface", S.str() + " = 0"}};
  for (auto& p : L.points) {
    pts.push_back(json::array({p[0].str(), p[1].str(), p[2].str()}));
    rows.push_back({"singular point", point_str(p)});
  }
  if (L.points.empty() && !L.degenerate_axis) rows.push_back({"singular point", "none"});
  if (L.degenerate_axis) rows.push_back({"singular locus", "the whole x3-axis"});
  json j{{"family", family_name(f)}, {"alpha", al.str()}, {"surface", S.str()}, {"points", pts},
         {"degenerateAxis", L.degenerate_axis}};
  if (f == Family::D6) j["beta"] = be.str();
  o.emit(j, rows);
  return ok;
}

int monodromy_alpha(const Flags& fl, Output& o) {
  if (fl.l1.empty() || fl.l2.empty() || fl.l3.empty())
    throw InvalidInput("--l1 --l2 --l3 are required (--l4 defaults to (1 + l2 l3)/l1, --e to 0)");
  monodromy::MonodromyDataD7 m;
  m.e = fl.e.empty() ? RatFun() : exact_fun("e", fl.e);
  m.l1 = exact_fun("l1", fl.l1);
  m.l2 = exact_fun("l2", fl.l2);
  m.l3 = exact_fun("l3", fl.l3);
  if (fl.l4.empty()) {
    if (m.l1.is_zero()) throw InvalidInput("--l4 is required when l1 = 0");
    m.l4 = (RatFun(1) + m.l2 * m.l3) / m.l1;
  } else {
    m.l4 = exact_fun("l4", fl.l4);
  }
  monodromy::D7Stokes s;
  try {
    s = monodromy::d7_alpha_and_stokes(m);
  } catch (const monodromy::MonodromyError& e) {
    throw InvalidInput(e.what());
  }
  monodromy::D7Invariants inv = monodromy::d7_invariants(m);
  json j{{"alpha", s.alpha.str()},
         {"c1", s.c1.str()},
         {"c2", s.c2.str()},
         {"invariants", {{"l12", inv.l12.str()}, {"l14", inv.l14.str()}, {"l23", inv.l23.str()}, {"l34", inv.l34.str()}}},
         {"alphaIdentity", s.alpha_identity},
         {"reconstruction", s.reconstruction}};
  Rows rows{{"alpha", s.alpha.str()},
            {"c1", s.c1.str()},
            {"c2", s.c2.str()},
            {"(l12, l14, l23, l34)",
             "(" + inv.l12.str() + ", " + inv.l14.str() + ", " + inv.l23.str() + ", " + inv.l34.str() + ")"},
            {"alpha formula", s.alpha_identity ? "PASS" : "FAIL"},
            {"top0 reconstruction", s.reconstruction ? "PASS" : "FAIL"}};
  o.emit(j, rows);
  return s.alpha_identity && s.reconstruction ? ok : failed;
}

// ------------------------------------------------------------------ special

special::EpsPair eps_of(const Flags& fl) {
  int a = parse_int("eps1", fl.eps1), b = parse_int("eps2", fl.eps2);
  if ((a != 1 && a != -1) || (b != 1 && b != -1)) throw InvalidInput("--eps1/--eps2 must be 1 or -1");
  return {a, b};
}

int special_riccati(const Flags& fl, Output& o) {
  special::EpsPair e = eps_of(fl);
  if (fl.d.empty()) throw InvalidInput("--d is required");
  RatFun d = exact_fun("d", fl.d);
  int N = parse_int("order", fl.order);
  if (N < 1 || N > 400) throw InvalidInput("--order must be in 1..400");
  GaussRat m1 = parse_exact("mix1", fl.mix1), m2 = parse_exact("mix2", fl.mix2);
  note_decimals(o, {&fl.d});
  special::RiccatiResult R = special::riccati_isomonodromy(e, d);
  special::RiccatiSeries S = special::riccati_solution(e, d, m1, m2, N);
  RatFun lin = special::riccati_to_linear(e, R.middle);
  json qf = nullptr;
  if (S.q_formal) {
    qf = json::array();
    for (auto& c : *S.q_formal) qf.push_back(c.str());
  }
  json j{{"eps", {e.e1, e.e2}},
         {"d", d.str()},
         {"riccati", "q' = " + R.rhs.str()},
         {"middle", R.middle.str()},
         {"theta0", R.theta0.str()},
         {"thetainf", R.thetainf.str()},
         {"piiiConsistent", R.piii_consistent},
         {"linear", lin.str()},
         {"series", series_json(S.y1)},
         {"partner", series_json(S.y2)},
         {"mix", {m1.str(), m2.str()}},
         {"qFormal", qf}};
  Rows rows{{"(eps1, eps2)", special::to_string(e)},
            {"riccati", "q' = " + R.rhs.str()},
            {"middle coefficient", R.middle.str()},
            {"PIII(D6) parameters", "(" + R.theta0.str() + ", " + R.thetainf.str() + ")"},
            {"PIII(D6) consistent", R.piii_consistent ? "yes" : "no"},
            {"linear equation", lin.str() + " = 0"},
            {"y1 exponent", S.y1.rho.str()},
            {"y2 exponent", S.y2.rho.str() + (S.y2.log_flag ? " (with log term)" : "")},
            {"order", std::to_string(N)}};
  for (int k = 0; k <= std::min(N, 6); ++k) rows.push_back({"y1[" + std::to_string(k) + "]", S.y1.coeffs[k].str()});
  o.emit(j, rows);
  return R.piii_consistent ? ok : failed;
}

int special_algebraic(const Flags& fl, Output& o) {
  GaussRat th = fl.theta.empty() ? GaussRat(0) : parse_exact("theta", fl.theta);
  special::AlgebraicFamily A;
  try {
    A = special::d7_algebraic_family(th);
  } catch (const special::SpecialError& e) {
    throw InvalidInput(e.what());
  }
  bool pass = A.flow_holds && (A.theta != 0 || A.chart_consistent);
  json j{{"theta", A.theta}, {"curve", A.curve.str()}, {"q", A.q.str()}, {"a", A.a.str()},
         {"t", A.t.str()},   {"word", A.word},        {"flowHolds", A.flow_holds}};
  if (A.theta == 0) j["chart"] = {{"bm1", A.bm1.str()}, {"b0", A.b0.str()}, {"consistent", A.chart_consistent}};
  Rows rows{{"theta", std::to_string(A.theta)},
            {"base curve", A.curve.str() + " = 0"},
            {"q", A.q.str()},
            {"a", A.a.str()},
            {"t", A.t.str()},
            {"word", A.word.empty() ? "(base)" : A.word},
            {"flow holds on the curve", A.flow_holds ? "PASS" : "FAIL"}};
  o.emit(j, rows);
  return pass ? ok : failed;
}

std::pair<GaussRat, GaussRat> d6_exact_params(const Flags& fl) {
  if (fl.theta0.empty() || fl.thetainf.empty()) throw InvalidInput("--theta0 and --thetainf are required");
  return {parse_exact("theta0", fl.theta0), parse_exact("thetainf", fl.thetainf)};
}

int special_constants(const Flags& fl, Output& o) {
  auto [t0, ti] = d6_exact_params(fl);
  note_decimals(o, {&fl.theta0, &fl.thetainf});
  auto cs = special::d6_constant_solutions(t0, ti);
  json a = json::array();
  Rows rows{{"(theta0, thetainf)", "(" + t0.str() + ", " + ti.str() + ")"}};
  bool pass = true;
  for (auto& c : cs) {
    bool z = special::d6_constant_residual(c, t0, ti).is_zero();
    pass = pass && z;
    a.push_back({{"q", c.str()}, {"residualZero", z}});
    rows.push_back({"constant solution", "q = " + c.str() + (z ? "" : "  (residual nonzero)")});
  }
  if (cs.empty()) rows.push_back({"constant solution", "none"});
  o.emit({{"theta0", t0.str()}, {"thetainf", ti.str()}, {"constants", a}}, rows);
  return pass ? ok : failed;
}

int special_presence(const Flags& fl, Output& o) {
  auto [t0, ti] = d6_exact_params(fl);
  note_decimals(o, {&fl.theta0, &fl.thetainf});
  auto ps = special::reducible_presence(t0, ti);
  json a = json::array();
  Rows rows{{"(theta0, thetainf)", "(" + t0.str() + ", " + ti.str() + ")"}};
  for (auto& p : ps) {
    a.push_back({p.e1, p.e2});
    rows.push_back({"reducible family", special::to_string(p)});
  }
  if (ps.empty()) rows.push_back({"reducible family", "none"});
  o.emit({{"theta0", t0.str()}, {"thetainf", ti.str()}, {"families", a}}, rows);
  return ok;
}

// ------------------------------------------------------------------ numerics

numflow::Params numeric_params(Family f, const Flags& fl) {
  if (f == Family::D6) {
    if (fl.theta0.empty() || fl.thetainf.empty()) throw InvalidInput("--theta0 and --thetainf are required for d6");
    return {parse_complex(fl.theta0), parse_complex(fl.thetainf)};
  }
  if (fl.theta.empty()) throw InvalidInput("--theta is required for d7");
  return {parse_complex(fl.theta), 0.0};
}

double parse_positive(const std::string& flag, const std::string& text, double dflt) {
  if (text.empty()) return dflt;
  cplx v = parse_complex(text);
  if (v.imag() != 0 || !(v.real() > 0)) throw InvalidInput("--" + flag + " must be a positive real");
  return v.real();
}

json trajectory_summary(const numflow::Trajectory& tr, Rows& rows) {
  auto [q, a] = numflow::direct_values(tr.samples.back());
  rows.push_back({"samples", std::to_string(tr.samples.size())});
  rows.push_back({"end t", cstr(tr.samples.back().t)});
  rows.push_back({"end t~", cstr(tr.samples.back().t_tilde)});
  rows.push_back({"end q", cstr(q)});
  rows.push_back({"end a", cstr(a)});
  for (auto& e : tr.events) rows.push_back({"event " + e.kind, "t = " + cstr(e.t) + (e.note.empty() ? "" : "  " + e.note)});
  return {};
}

numflow::Trajectory read_trajectory(const std::string& path) {
  if (path.empty()) throw InvalidInput("--in FILE is required");
  std::ifstream f(path);
  if (!f) throw InvalidInput("--in: cannot read '" + path + "'");
  json j;
  try {
    j = json::parse(f);
    return trajectory_from_json(j);
  } catch (const json::exception& e) {
    throw InvalidInput("--in: malformed trajectory JSON (" + std::string(e.what()) + ")");
  }
}

int integrate_cmd(const Flags& fl, Output& o) {
  Family f = parse_family_flag(fl.family.empty() ? "d6" : fl.family);
  numflow::Params p = numeric_params(f, fl);
  if (fl.q0.empty() || fl.a0.empty() || fl.to.empty()) throw InvalidInput("--q0, --a0 and --to are required");
  numflow::Plane plane;
  if (fl.plane == "t") plane = numflow::Plane::t;
  else if (fl.plane == "t-tilde" || fl.plane == "t_tilde") plane = numflow::Plane::t_tilde;
  else throw InvalidInput("--plane: expected t or t-tilde");
  cplx start = parse_complex(fl.t0), end = parse_complex(fl.to);
  cplx q0 = parse_complex(fl.q0), a0 = parse_complex(fl.a0);
  std::vector<cplx> pts{start};
  for (auto& v : fl.via) pts.push_back(parse_complex(v));
  pts.push_back(end);
  int n = parse_int("samples", fl.samples);
  if (n < 1) throw InvalidInput("--samples must be positive");
  numflow::IntegrateOptions opt;
  opt.tol = parse_positive("tol", fl.tol, opt.tol);
  opt.swap_threshold = parse_positive("swap-threshold", fl.swap_threshold, opt.swap_threshold);
  opt.detour_threshold = parse_positive("detour-threshold", fl.detour_threshold, opt.detour_threshold);
  if (plane == numflow::Plane::t && start == 0.0) throw InvalidInput("--t0: t = 0 is a fixed singularity");
  numflow::Initial init{plane == numflow::Plane::t ? std::log(start) : start, q0, a0};
  numflow::Trajectory tr = numflow::integrate(f, p, init, numflow::PathSpec::polyline(pts, n, plane), opt);
  Rows rows{{"family", family_name(f)}};
  trajectory_summary(tr, rows);
  o.emit(trajectory_to_json(tr), rows);
  return ok;
}

int backlund_apply(const Flags& fl, Output& o) {
  std::string text = !fl.word.empty() ? fl.word : fl.element;
  if (text.empty()) throw InvalidInput("--word is required");
  if (!fl.in.empty()) {
    numflow::Trajectory tr = read_trajectory(fl.in);
    backlund::BacklundWord w = parse_word(text, tr.family);
    numflow::Trajectory im = backlund::solution_map(w, tr);
    if (im.samples.empty()) throw InvalidInput("every sample lies on an excluded locus of " + w.str());
    Rows rows{{"word", w.str()}, {"family", family_name(im.family)},
              {"image parameters", cstr(im.params.theta0) + (im.family == Family::D6 ? ", " + cstr(im.params.thetainf) : "")}};
    trajectory_summary(im, rows);
    o.emit(trajectory_to_json(im), rows);
    return ok;
  }
  backlund::BacklundWord w = parse_word(text, opt_family(fl));
  laxops::ChartState s = backlund::apply_state(w, laxops::ChartState::symbolic(w.family));
  std::string action = backlund::param_action(w, backlund::ParamPoint::symbolic(w.family)).str(w.family);
  json j{{"word", w.str()}, {"family", family_name(w.family)}, {"paramAction", action},
         {"q", s.q.str()},  {"a", s.a.str()},                  {"t", s.t.str()}};
  Rows rows{{"word", w.str()}, {"parameters", action}, {"q~", s.q.str()}, {"a~", s.a.str()}, {"t~", s.t.str()}};
  o.emit(j, rows);
  return ok;
}

int residual_cmd(const Flags& fl, Output& o) {
  numflow::Trajectory tr = read_trajectory(fl.in);
  double tol = parse_positive("tol", fl.tol, 1e-7);
  numflow::ResidualReport r;
  if (fl.exp_form) {
    r = numflow::exp_form_check(tr);
  } else if (fl.mode == "fd") {
    r = numflow::residual(tr, numflow::ResidualMode::finite_difference);
  } else if (fl.mode == "first-order") {
    r = numflow::residual(tr, numflow::ResidualMode::first_order);
  } else {
    throw InvalidInput("--mode: expected fd or first-order");
  }
  bool pass = r.pass(tol);
  json per = json::array();
  for (auto& s : r.per_sample) per.push_back({{"index", s.index}, {"value", s.value}});
  json sk = json::array();
  for (auto& t : r.skipped) sk.push_back(cjson(t));
  json j{{"mode", r.mode}, {"max", r.max}, {"tol", tol}, {"pass", pass}, {"evaluated", r.per_sample.size()},
         {"skipped", sk}, {"perSample", per}};
  std::ostringstream m;
  m << std::setprecision(3) << std::scientific << r.max;
  Rows rows{{"mode", r.mode},
            {"max residual", m.str()},
            {"evaluated samples", std::to_string(r.per_sample.size())},
            {"skipped samples", std::to_string(r.skipped.size())},
            {"result", pass ? "PASS" : "FAIL"}};
  o.emit(j, rows);
  return pass ? ok : failed;
}

}  // namespace

// ------------------------------------------------------------------ public

cplx parse_complex(const std::string& text) {
  std::string s = strip(text);
  if (s.empty()) throw InvalidInput("empty number");
  static const std::regex sci(R"(^([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)(([+-])((\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?i)?$)");
  static const std::regex imag_only(R"(^([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?i$)");
  if (s.find_first_of("eE") != std::string::npos) {
    std::smatch m;
    if (std::regex_match(s, m, sci)) {
      double re = std::stod(m[1].str());
      double im = 0;
      if (m[4].matched) im = (m[5].str() == "-" ? -1 : 1) * (m[6].matched ? std::stod(m[6].str()) : 1.0);
      return {re, im};
    }
    if (std::regex_match(s, m, imag_only)) {
      std::string b = m[1].str();
      return {0.0, b.empty() || b == "+" ? 1.0 : b == "-" ? -1.0 : std::stod(b)};
    }
    throw InvalidInput("cannot read '" + text + "' as a complex number");
  }
  try {
    return exactalg::parse_number(s).to_complex();
  } catch (const exactalg::AlgebraError& e) {
    throw InvalidInput("cannot read '" + text + "' as a complex number (" + e.what() + ")");
  }
}

json trajectory_to_json(const numflow::Trajectory& tr) {
  json params = tr.family == Family::D6 ? json{{"theta0", cjson(tr.params.theta0)}, {"thetainf", cjson(tr.params.thetainf)}}
                                        : json{{"theta", cjson(tr.params.theta0)}};
  json samples = json::array();
  for (auto& s : tr.samples)
    samples.push_back({{"t_tilde", cjson(s.t_tilde)},
                       {"q", cjson(s.q)},
                       {"a", cjson(s.a)},
                       {"frame", s.frame == numflow::Frame::direct ? "direct" : "inverted"}});
  json events = json::array();
  for (auto& e : tr.events)
    events.push_back({{"kind", e.kind}, {"t", cjson(e.t)}, {"note", e.note}, {"after_sample", e.after_sample}});
  return {{"family", family_name(tr.family)}, {"params", params}, {"samples", samples}, {"events", events}};
}

numflow::Trajectory trajectory_from_json(const json& j) {
  numflow::Trajectory tr;
  tr.family = parse_family_flag(j.at("family").get<std::string>());
  const json& p = j.at("params");
  if (tr.family == Family::D6) {
    tr.params = {cfrom(p.at("theta0")), cfrom(p.at("thetainf"))};
  } else {
    tr.params = {cfrom(p.at("theta")), 0.0};
  }
  for (auto& s : j.at("samples")) {
    numflow::Sample x;
    x.t_tilde = cfrom(s.at("t_tilde"));
    x.t = std::exp(x.t_tilde);
    x.q = cfrom(s.at("q"));
    x.a = cfrom(s.at("a"));
    std::string fr = s.value("frame", "direct");
    if (fr != "direct" && fr != "inverted") throw InvalidInput("sample frame must be direct or inverted");
    x.frame = fr == "direct" ? numflow::Frame::direct : numflow::Frame::inverted;
    tr.samples.push_back(x);
  }
  if (j.contains("events"))
    for (auto& e : j.at("events"))
      tr.events.push_back({e.at("kind").get<std::string>(), cfrom(e.at("t")), e.value("note", ""),
                           e.value("after_sample", std::size_t{0})});
  return tr;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PIII(D6)/PIII(D7) verification and computation toolkit", "piii"};
  app.require_subcommand(1);
  Flags fl;

  auto* verify = app.add_subcommand("verify", "exact verification suites")->require_subcommand(1);
  auto* v_iso = verify->add_subcommand("isomonodromy", "re-derive the isomonodromic flow");
  common(v_iso, fl, true);
  auto* v_bt = verify->add_subcommand("backlund", "verify a Backlund transformation or word");
  common(v_bt, fl, true);
  v_bt->add_option("--element", fl.element, "generator: s1 s2 s3 s4 B1 B2 B3 s1+ s2+ B");
  v_bt->add_option("--word", fl.word, "word such as 's1 s2^-1 B1' (rightmost acts first)");
  auto* v_grp = verify->add_subcommand("group-relations", "relations among the generators");
  common(v_grp, fl, false);
  auto* v_ok = verify->add_subcommand("okamoto", "Okamoto substitution check");
  common(v_ok, fl, false);
  auto* v_emb = verify->add_subcommand("monodromy-embed", "monodromy embedding identities");
  common(v_emb, fl, false);

  auto* mono = app.add_subcommand("monodromy", "monodromy surfaces")->require_subcommand(1);
  auto* m_sing = mono->add_subcommand("singular", "singular points of the cubic surface");
  common(m_sing, fl, true);
  m_sing->add_option("--alpha", fl.alpha, "formal monodromy at 0");
  m_sing->add_option("--beta", fl.beta, "formal monodromy at infinity (d6)");
  auto* m_alpha = mono->add_subcommand("alpha", "PIII(D7) alpha and Stokes data from the link");
  common(m_alpha, fl, false);
  m_alpha->add_option("--e", fl.e, "Stokes parameter at infinity");
  m_alpha->add_option("--l1", fl.l1);
  m_alpha->add_option("--l2", fl.l2);
  m_alpha->add_option("--l3", fl.l3);
  m_alpha->add_option("--l4", fl.l4, "defaults to (1 + l2 l3)/l1");

  auto* special_cmd = app.add_subcommand("special", "special solutions")->require_subcommand(1);
  auto* s_ric = special_cmd->add_subcommand("riccati", "Riccati family and its Bessel series");
  common(s_ric, fl, false);
  s_ric->add_option("--eps1", fl.eps1, "1 or -1");
  s_ric->add_option("--eps2", fl.eps2, "1 or -1");
  s_ric->add_option("--d", fl.d, "family parameter d");
  s_ric->add_option("--order", fl.order, "series order N");
  s_ric->add_option("--mix1", fl.mix1, "coefficient of the exponent-0 series");
  s_ric->add_option("--mix2", fl.mix2, "coefficient of the partner series");
  auto* s_alg = special_cmd->add_subcommand("algebraic", "PIII(D7) algebraic solutions at integer theta");
  common(s_alg, fl, false);
  s_alg->add_option("--theta", fl.theta, "integer theta");
  auto* s_con = special_cmd->add_subcommand("constants", "constant PIII(D6) solutions");
  common(s_con, fl, false);
  s_con->add_option("--theta0", fl.theta0);
  s_con->add_option("--thetainf", fl.thetainf);
  auto* s_pre = special_cmd->add_subcommand("presence", "reducible families present at (theta0, thetainf)");
  common(s_pre, fl, false);
  s_pre->add_option("--theta0", fl.theta0);
  s_pre->add_option("--thetainf", fl.thetainf);

  auto* integ = app.add_subcommand("integrate", "integrate along a path");
  common(integ, fl, true);
  integ->add_option("--t0", fl.t0, "path start (t, or t~ with --plane t-tilde)");
  integ->add_option("--q0", fl.q0);
  integ->add_option("--a0", fl.a0);
  integ->add_option("--to", fl.to, "path end");
  integ->add_option("--via", fl.via, "intermediate vertices (repeatable)");
  integ->add_option("--plane", fl.plane, "t or t-tilde");
  integ->add_option("--samples", fl.samples, "output intervals");
  integ->add_option("--tol", fl.tol, "local error tolerance");
  integ->add_option("--swap-threshold", fl.swap_threshold);
  integ->add_option("--detour-threshold", fl.detour_threshold);

  auto* bt = app.add_subcommand("backlund", "Backlund transformations")->require_subcommand(1);
  auto* b_apply = bt->add_subcommand("apply", "apply a word symbolically, or to a trajectory with --in");
  common(b_apply, fl, true);
  b_apply->add_option("--word", fl.word);
  b_apply->add_option("--in", fl.in, "trajectory JSON");

  auto* res = app.add_subcommand("residual", "residual of a trajectory against its equation");
  common(res, fl, false);
  res->add_option("--in", fl.in, "trajectory JSON");
  res->add_option("--tol", fl.tol, "pass threshold (default 1e-7)");
  res->add_option("--mode", fl.mode, "fd or first-order");
  res->add_flag("--exp-form", fl.exp_form, "use the t~ form");

  if (args.empty()) {
    err << app.help();
    return invalid_input;
  }
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    // print help for the deepest selected subcommand
    CLI::App* deepest = &app;
    while (!deepest->get_subcommands().empty()) deepest = deepest->get_subcommands().front();
    err << deepest->help();
    return invalid_input;
  }

  Output o{out, fl.json, fl.out, {}};
  try {
    if (v_iso->parsed()) return verify_isomonodromy(fl, o);
    if (v_bt->parsed()) return verify_backlund(fl, o);
    if (v_grp->parsed()) return report_out(backlund::group_relations_check(), "", o);
    if (v_ok->parsed()) return report_out(backlund::okamoto_substitution_check(), "", o);
    if (v_emb->parsed()) return verify_embed(o);
    if (m_sing->parsed()) return monodromy_singular(fl, o);
    if (m_alpha->parsed()) return monodromy_alpha(fl, o);
    if (s_ric->parsed()) return special_riccati(fl, o);
    if (s_alg->parsed()) return special_algebraic(fl, o);
    if (s_con->parsed()) return special_constants(fl, o);
    if (s_pre->parsed()) return special_presence(fl, o);
    if (integ->parsed()) return integrate_cmd(fl, o);
    if (b_apply->parsed()) return backlund_apply(fl, o);
    if (res->parsed()) return residual_cmd(fl, o);
  } catch (const numflow::NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    json j{{"error", "numerical-failure"}, {"message", e.what()},
           {"lastGood", {{"t", cjson(e.last_good.t)}, {"q", cjson(e.last_good.q)}, {"a", cjson(e.last_good.a)}}}};
    if (fl.json) out << j.dump(2) << "\n";
    return numerical_failure;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return invalid_input;
  } catch (const exactalg::AlgebraError& e) {
    err << "invalid input: " << e.what() << "\n";
    return invalid_input;
  }
  err << app.help();
  return invalid_input;
}

}  // namespace piii::cli
