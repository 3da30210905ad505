// Multivariate gcd over Q(i).
//
// Images mod p (p = 1 mod 4, i -> +-sqrt(-1)) are computed with Brown's
// dense evaluation/interpolation algorithm, lifted by CRT and rational
// reconstruction, and accepted only after exact trial division over Q(i).
#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <random>

#include "piii/exactalg/errors.hpp"
#include "piii/exactalg/poly.hpp"

namespace piii::exactalg {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

struct Fp {
  u64 p = 0;
  u64 add(u64 a, u64 b) const {
    u64 r = a + b;
    return r >= p ? r - p : r;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p - b; }
  u64 mul(u64 a, u64 b) const { return static_cast<u64>(static_cast<u128>(a) * b % p); }
  u64 neg(u64 a) const { return a ? p - a : 0; }
  u64 pow(u64 a, u64 e) const {
    u64 r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  u64 inv(u64 a) const { return pow(a, p - 2); }
};

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 sp : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % sp == 0) return n == sp;
  }
  Fp f{n};
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 base : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = f.pow(base % n, d);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = f.mul(x, x);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

struct PrimeInfo {
  u64 p;
  u64 sqrt_m1;  // square root of -1
};

const PrimeInfo& prime_at(std::size_t k) {
  static std::mutex mu;
  static std::vector<PrimeInfo> primes;
  std::lock_guard<std::mutex> lk(mu);
  u64 cand = primes.empty() ? ((1ull << 62) - 3) : primes.back().p - 4;
  while (primes.size() <= k) {
    // cand = 1 mod 4
    while (cand % 4 != 1) --cand;
    if (is_prime(cand)) {
      Fp f{cand};
      u64 r = 0;
      for (u64 c = 2;; ++c) {
        if (f.pow(c, (cand - 1) / 2) == cand - 1) {
          r = f.pow(c, (cand - 1) / 4);
          break;
        }
      }
      primes.push_back({cand, r});
    }
    cand -= 4;
  }
  return primes[k];
}

// ---------------------------------------------------------------- univariate

using UP = std::vector<u64>;  // low -> high, no trailing zeros

void utrim(UP& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
int udeg(const UP& a) { return static_cast<int>(a.size()) - 1; }

u64 ueval(const UP& a, u64 x, const Fp& F) {
  u64 r = 0;
  for (std::size_t k = a.size(); k-- > 0;) r = F.add(F.mul(r, x), a[k]);
  return r;
}

UP umonic(UP a, const Fp& F) {
  if (a.empty()) return a;
  u64 inv = F.inv(a.back());
  for (auto& c : a) c = F.mul(c, inv);
  return a;
}

// remainder of a mod b; optionally quotient
UP udivrem(UP a, const UP& b, const Fp& F, UP* quo = nullptr) {
  int db = udeg(b);
  u64 inv = F.inv(b.back());
  if (quo) quo->assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  for (int k = udeg(a); k >= db; --k) {
    u64 c = F.mul(a[k], inv);
    if (c == 0) continue;
    if (quo) (*quo)[k - db] = c;
    for (int j = 0; j <= db; ++j) a[k - db + j] = F.sub(a[k - db + j], F.mul(c, b[j]));
  }
  a.resize(std::min<std::size_t>(a.size(), static_cast<std::size_t>(std::max(db, 0))));
  utrim(a);
  if (quo) utrim(*quo);
  return a;
}

UP ugcd(UP a, UP b, const Fp& F) {
  utrim(a);
  utrim(b);
  while (!b.empty()) {
    UP r = udivrem(a, b, F);
    a = std::move(b);
    b = std::move(r);
  }
  return umonic(std::move(a), F);
}

UP umul(const UP& a, const UP& b, const Fp& F) {
  if (a.empty() || b.empty()) return {};
  UP r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  utrim(r);
  return r;
}

// -------------------------------------------------------------- multivariate

constexpr int kMaxLocal = 16;
using Exps = std::array<std::uint8_t, kMaxLocal>;
struct MT {
  Exps e;
  u64 c;
};
using MP = std::vector<MT>;  // lex descending, e[0] most significant

int lex_cmp(const Exps& a, const Exps& b) { return std::memcmp(a.data(), b.data(), kMaxLocal); }

bool same_prefix(const Exps& a, const Exps& b, int len) { return std::memcmp(a.data(), b.data(), len) == 0; }

struct Group {
  Exps prefix;  // e[k-1] = 0
  UP u;         // coefficients in x_{k-1}
};

std::vector<Group> groups(const MP& f, int k) {
  std::vector<Group> out;
  for (auto& t : f) {
    if (out.empty() || !same_prefix(out.back().prefix, t.e, k - 1)) {
      Group g;
      g.prefix = t.e;
      g.prefix[k - 1] = 0;
      out.push_back(std::move(g));
    }
    UP& u = out.back().u;
    unsigned j = t.e[k - 1];
    if (u.size() <= j) u.resize(j + 1, 0);
    u[j] = t.c;
  }
  return out;
}

MP from_groups(const std::vector<Group>& gs, int k) {
  MP out;
  for (auto& g : gs)
    for (std::size_t j = g.u.size(); j-- > 0;) {
      if (!g.u[j]) continue;
      MT t{g.prefix, g.u[j]};
      t.e[k - 1] = static_cast<std::uint8_t>(j);
      out.push_back(t);
    }
  return out;
}

MP eval_last(const MP& f, int k, u64 x, const Fp& F) {
  MP out;
  for (auto& g : groups(f, k)) {
    u64 v = ueval(g.u, x, F);
    if (v) out.push_back({g.prefix, v});
  }
  return out;
}

MP mp_monic(MP f, const Fp& F) {
  if (f.empty() || f[0].c == 1) return f;
  u64 inv = F.inv(f[0].c);
  for (auto& t : f) t.c = F.mul(t.c, inv);
  return f;
}

MP mp_scale(MP f, u64 c, const Fp& F) {
  if (c == 1) return f;
  for (auto& t : f) t.c = F.mul(t.c, c);
  return f;
}

MP mp_add(const MP& a, const MP& b, const Fp& F, bool sub = false) {
  MP r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c = i == a.size() ? -1 : j == b.size() ? 1 : lex_cmp(a[i].e, b[j].e);
    if (c > 0) {
      r.push_back(a[i++]);
    } else if (c < 0) {
      r.push_back(b[j++]);
      if (sub) r.back().c = F.neg(r.back().c);
    } else {
      u64 v = sub ? F.sub(a[i].c, b[j].c) : F.add(a[i].c, b[j].c);
      if (v) r.push_back({a[i].e, v});
      ++i;
      ++j;
    }
  }
  return r;
}

// h has no x_{k-1}; returns h * u(x_{k-1})
MP mul_univariate(const MP& h, const UP& u, int k, const Fp& F) {
  MP out;
  for (auto& t : h)
    for (std::size_t j = u.size(); j-- > 0;) {
      if (!u[j]) continue;
      MT m{t.e, F.mul(t.c, u[j])};
      m.e[k - 1] = static_cast<std::uint8_t>(j);
      out.push_back(m);
    }
  return out;
}

UP content_last(const std::vector<Group>& gs, const Fp& F) {
  UP c;
  for (auto& g : gs) {
    c = ugcd(c, g.u, F);
    if (c.size() == 1) break;
  }
  return c;
}

std::vector<Group> divide_groups(std::vector<Group> gs, const UP& c, const Fp& F) {
  if (c.size() <= 1) return gs;
  for (auto& g : gs) {
    UP q;
    udivrem(g.u, c, F, &q);
    g.u = std::move(q);
  }
  return gs;
}

Exps exps_sub(const Exps& a, const Exps& b, int k, bool* ok) {
  Exps r{};
  *ok = true;
  for (int i = 0; i < k; ++i) {
    if (a[i] < b[i]) {
      *ok = false;
      return r;
    }
    r[i] = static_cast<std::uint8_t>(a[i] - b[i]);
  }
  return r;
}

// Does b divide a (vars 0..k-1)?
bool mp_divides(const MP& a, const MP& b, int k, const Fp& F) {
  if (a.empty()) return true;
  if (b.empty()) return false;
  Exps da{}, db{};
  for (auto& t : a)
    for (int i = 0; i < k; ++i) da[i] = std::max(da[i], t.e[i]);
  for (auto& t : b)
    for (int i = 0; i < k; ++i) db[i] = std::max(db[i], t.e[i]);
  for (int i = 0; i < k; ++i)
    if (db[i] > da[i]) return false;
  auto gt = [](const Exps& x, const Exps& y) { return lex_cmp(x, y) > 0; };
  std::map<Exps, u64, decltype(gt)> r(gt);
  for (auto& t : a) r.emplace(t.e, t.c);
  u64 inv = F.inv(b[0].c);
  while (!r.empty()) {
    auto it = r.begin();
    bool ok;
    Exps m = exps_sub(it->first, b[0].e, k, &ok);
    if (!ok) return false;
    for (int i = 0; i < k; ++i)
      if (m[i] > da[i] - db[i]) return false;
    u64 c = F.mul(it->second, inv);
    r.erase(it);
    for (std::size_t j = 1; j < b.size(); ++j) {
      Exps e{};
      for (int i = 0; i < k; ++i) e[i] = static_cast<std::uint8_t>(m[i] + b[j].e[i]);
      u64 prod = F.mul(c, b[j].c);
      auto jt = r.find(e);
      if (jt == r.end()) {
        r.emplace(e, F.neg(prod));
      } else {
        jt->second = F.sub(jt->second, prod);
        if (!jt->second) r.erase(jt);
      }
    }
  }
  return true;
}

MP univariate_to_mp(const UP& u, int k) {
  MP out;
  for (std::size_t j = u.size(); j-- > 0;) {
    if (!u[j]) continue;
    MT t{Exps{}, u[j]};
    t.e[k - 1] = static_cast<std::uint8_t>(j);
    out.push_back(t);
  }
  return out;
}

// Monic (lex) gcd of f, g in Z_p[x_0..x_{k-1}].
MP gcd_rec(const MP& f, const MP& g, int k, const Fp& F, std::mt19937_64& rng) {
  if (f.empty()) return mp_monic(g, F);
  if (g.empty()) return mp_monic(f, F);
  if (k == 1) {
    UP a, b;
    for (auto& t : f) {
      if (a.size() <= t.e[0]) a.resize(t.e[0] + 1, 0);
      a[t.e[0]] = t.c;
    }
    for (auto& t : g) {
      if (b.size() <= t.e[0]) b.resize(t.e[0] + 1, 0);
      b[t.e[0]] = t.c;
    }
    UP h = ugcd(a, b, F);
    MP out;
    for (std::size_t j = h.size(); j-- > 0;)
      if (h[j]) {
        MT t{Exps{}, h[j]};
        t.e[0] = static_cast<std::uint8_t>(j);
        out.push_back(t);
      }
    return out;
  }
  auto gf = groups(f, k), gg = groups(g, k);
  UP cf = content_last(gf, F), cg = content_last(gg, F);
  UP cont = ugcd(cf, cg, F);
  gf = divide_groups(std::move(gf), cf, F);
  gg = divide_groups(std::move(gg), cg, F);
  const UP& lcf = gf[0].u;
  const UP& lcg = gg[0].u;
  UP gamma = ugcd(lcf, lcg, F);
  MP fp = from_groups(gf, k), gp = from_groups(gg, k);
  int degf = 0, degg = 0;
  for (auto& x : gf) degf = std::max(degf, udeg(x.u));
  for (auto& x : gg) degg = std::max(degg, udeg(x.u));
  // Primitive parts free of x_{k-1} on one side: recurse on coefficients
  // is handled by the same loop (bound = 0 + deg gamma).
  int bound = std::min(degf, degg) + udeg(gamma);

  MP H;
  Exps cur{};
  int npts = 0;
  UP modp{1};
  std::uniform_int_distribution<u64> dist(1, F.p - 1);
  for (int attempt = 0; attempt < 4 * (bound + 8) + 64; ++attempt) {
    u64 x = dist(rng);
    if (ueval(lcf, x, F) == 0 || ueval(lcg, x, F) == 0) continue;
    if (!modp.empty() && npts > 0 && ueval(modp, x, F) == 0) continue;
    MP fa = eval_last(fp, k, x, F), ga = eval_last(gp, k, x, F);
    MP h = gcd_rec(fa, ga, k - 1, F, rng);
    bool hconst = true;
    for (int i = 0; i < k - 1; ++i)
      if (h[0].e[i]) hconst = false;
    if (hconst) return mp_monic(univariate_to_mp(cont, k), F);
    u64 gx = ueval(gamma, x, F);
    MP v = mp_scale(h, gx, F);
    bool stable = false;
    int c = npts == 0 ? -1 : lex_cmp(h[0].e, cur);
    if (npts == 0 || c < 0) {
      H = v;
      cur = h[0].e;
      modp = {F.neg(x), 1};
      npts = 1;
    } else if (c > 0) {
      continue;
    } else {
      MP Hx = eval_last(H, k, x, F);
      MP diff = mp_add(v, Hx, F, true);
      if (diff.empty()) {
        stable = true;
      } else {
        u64 s = F.inv(ueval(modp, x, F));
        UP u = modp;
        for (auto& cc : u) cc = F.mul(cc, s);
        H = mp_add(H, mul_univariate(diff, u, k, F), F);
      }
      modp = umul(modp, UP{F.neg(x), 1}, F);
      ++npts;
    }
    if (stable || npts > bound) {
      auto gh = groups(H, k);
      UP ch = content_last(gh, F);
      MP Hp = from_groups(divide_groups(std::move(gh), ch, F), k);
      if (mp_divides(fp, Hp, k, F) && mp_divides(gp, Hp, k, F)) {
        MP res = Hp;
        if (cont.size() > 1) {
          // multiply by content (univariate in x_{k-1}); small, do it naively
          MP acc;
          for (std::size_t j = 0; j < cont.size(); ++j) {
            if (!cont[j]) continue;
            MP part;
            for (auto& t : Hp) {
              MT m{t.e, F.mul(t.c, cont[j])};
              m.e[k - 1] = static_cast<std::uint8_t>(m.e[k - 1] + j);
              part.push_back(m);
            }
            acc = mp_add(acc, part, F);
          }
          res = std::move(acc);
        }
        return mp_monic(std::move(res), F);
      }
      if (npts > bound + 1) npts = 0;  // unlucky run; start over
    }
  }
  throw AlgebraError("modular gcd did not converge");
}

// --------------------------------------------------------------- lifting

struct LocalRing {
  std::vector<Symbol> vars;            // local index -> symbol
  std::array<int, 256> local;          // registry index -> local index or -1
};

bool to_fp(const mpq_class& x, const Fp& F, u64* out) {
  u64 d = mpz_fdiv_ui(x.get_den().get_mpz_t(), F.p);
  if (d == 0) return false;
  u64 n = mpz_fdiv_ui(x.get_num().get_mpz_t(), F.p);
  *out = F.mul(n, F.inv(d));
  return true;
}

bool image(const Poly& f, const LocalRing& R, const Fp& F, u64 ir, MP* out) {
  out->clear();
  out->reserve(f.size());
  for (auto& t : f.terms()) {
    MT m{Exps{}, 0};
    for (int k = 0; k < t.m.n; ++k) m.e[R.local[t.m.var[k]]] = t.m.exp[k];
    u64 re, im = 0;
    if (!to_fp(t.c.re(), F, &re)) return false;
    if (!t.c.is_real() && !to_fp(t.c.im(), F, &im)) return false;
    m.c = F.add(re, F.mul(im, ir));
    if (m.c) out->push_back(m);
  }
  std::sort(out->begin(), out->end(), [](const MT& a, const MT& b) { return lex_cmp(a.e, b.e) > 0; });
  return true;
}

Monomial to_global(const Exps& e, const LocalRing& R) {
  Monomial m;
  for (std::size_t k = 0; k < R.vars.size(); ++k)
    if (e[k]) m = m * Monomial::of(R.vars[k], e[k]);
  return m;
}

using Image = std::map<Monomial, u64, GrlexGreater>;

Image to_image(const MP& h, const LocalRing& R, const Fp& F) {
  Image out;
  for (auto& t : h) out.emplace(to_global(t.e, R), t.c);
  u64 inv = F.inv(out.begin()->second);
  for (auto& kv : out) kv.second = F.mul(kv.second, inv);
  return out;
}

bool ratrecon(const mpz_class& u, const mpz_class& M, mpq_class* out) {
  mpz_class bound = sqrt(mpz_class(M / 2));
  mpz_class r0 = M, r1 = u, s0 = 0, s1 = 1;
  while (r1 > bound) {
    mpz_class qq = r0 / r1;
    mpz_class r2 = r0 - qq * r1;
    r0 = r1;
    r1 = r2;
    mpz_class s2 = s0 - qq * s1;
    s0 = s1;
    s1 = s2;
  }
  if (abs(s1) > bound || s1 == 0) return false;
  mpz_class g = gcd(r1, s1);
  if (g != 1) return false;
  *out = mpq_class(r1, s1);
  out->canonicalize();
  return true;
}

struct Acc {
  mpz_class re, im;
};

// Quick proof that gcd(a, b) is constant: for every common variable v,
// a random univariate image in v with preserved degrees has trivial gcd.
bool provably_coprime(const Poly& a, const Poly& b, const std::vector<Symbol>& common, std::mt19937_64& rng) {
  const PrimeInfo& P = prime_at(0);
  Fp F{P.p};
  std::uniform_int_distribution<u64> dist(1, F.p - 1);
  std::map<std::uint8_t, u64> vals;
  auto collect = [&](const Poly& f) {
    for (auto s : f.variables())
      if (!vals.count(s.index())) vals[s.index()] = dist(rng);
  };
  collect(a);
  collect(b);
  auto uni = [&](const Poly& f, Symbol v, UP* out) {
    out->clear();
    for (auto& t : f.terms()) {
      u64 re, im = 0;
      if (!to_fp(t.c.re(), F, &re)) return false;
      if (!t.c.is_real() && !to_fp(t.c.im(), F, &im)) return false;
      u64 c = F.add(re, F.mul(im, P.sqrt_m1));
      unsigned j = 0;
      for (int k = 0; k < t.m.n; ++k) {
        if (t.m.var[k] == v.index())
          j = t.m.exp[k];
        else
          c = F.mul(c, F.pow(vals[t.m.var[k]], t.m.exp[k]));
      }
      if (out->size() <= j) out->resize(j + 1, 0);
      (*out)[j] = F.add((*out)[j], c);
    }
    utrim(*out);
    return true;
  };
  for (Symbol v : common) {
    UP ua, ub;
    if (!uni(a, v, &ua) || !uni(b, v, &ub)) return false;
    if (udeg(ua) != static_cast<int>(a.degree(v)) || udeg(ub) != static_cast<int>(b.degree(v))) return false;
    if (ugcd(ua, ub, F).size() > 1) return false;
  }
  return true;
}

// a, b nonconstant, free of monomial content. Returns monic gcd + cofactors.
GcdWithCofactors core_gcd(const Poly& a, const Poly& b) {
  thread_local std::mt19937_64 rng(0x5eed1234ULL);
  auto va = a.variables(), vb = b.variables();
  std::vector<Symbol> common, all;
  std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
  std::set_union(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(all));
  if (common.empty() || provably_coprime(a, b, common, rng)) return {Poly(1), a, b};
  if (all.size() > static_cast<std::size_t>(kMaxLocal)) throw AlgebraError("gcd: too many variables");

  LocalRing R;
  R.local.fill(-1);
  R.vars = all;
  std::stable_sort(R.vars.begin(), R.vars.end(), [&](Symbol x, Symbol y) {
    return std::max(a.degree(x), b.degree(x)) > std::max(a.degree(y), b.degree(y));
  });
  for (std::size_t k = 0; k < R.vars.size(); ++k) R.local[R.vars[k].index()] = static_cast<int>(k);
  int k = static_cast<int>(R.vars.size());
  bool cplx = a.has_complex_coeffs() || b.has_complex_coeffs();

  std::map<Monomial, Acc, GrlexGreater> acc;
  mpz_class M = 0;
  Monomial curLM;
  for (std::size_t pi = 1; pi < 400; ++pi) {
    const PrimeInfo& P = prime_at(pi);
    Fp F{P.p};
    MP fa, ga;
    if (!image(a, R, F, P.sqrt_m1, &fa) || !image(b, R, F, P.sqrt_m1, &ga)) continue;
    Image h1 = to_image(gcd_rec(fa, ga, k, F, rng), R, F);
    Image h2;
    if (cplx) {
      u64 r2 = F.neg(P.sqrt_m1);
      if (!image(a, R, F, r2, &fa) || !image(b, R, F, r2, &ga)) continue;
      h2 = to_image(gcd_rec(fa, ga, k, F, rng), R, F);
      if (h1.begin()->first != h2.begin()->first) continue;
    }
    const Monomial& lm = h1.begin()->first;
    if (lm.is_one()) return {Poly(1), a, b};
    // per-monomial residues (re, im)
    std::map<Monomial, std::pair<u64, u64>, GrlexGreater> res;
    if (cplx) {
      u64 inv2 = F.inv(2), inv2r = F.inv(F.mul(2, P.sqrt_m1));
      for (auto& kv : h1) res[kv.first] = {0, 0};
      for (auto& kv : h2) res[kv.first] = {0, 0};
      for (auto& kv : res) {
        u64 x1 = h1.count(kv.first) ? h1[kv.first] : 0;
        u64 x2 = h2.count(kv.first) ? h2[kv.first] : 0;
        kv.second = {F.mul(F.add(x1, x2), inv2), F.mul(F.sub(x1, x2), inv2r)};
      }
    } else {
      for (auto& kv : h1) res[kv.first] = {kv.second, 0};
    }
    int c = M == 0 ? -1 : grlex_cmp(lm, curLM);
    mpz_class pz;
    mpz_set_ui(pz.get_mpz_t(), P.p);
    if (M == 0 || c < 0) {
      acc.clear();
      for (auto& kv : res) {
        Acc x;
        mpz_set_ui(x.re.get_mpz_t(), kv.second.first);
        mpz_set_ui(x.im.get_mpz_t(), kv.second.second);
        acc[kv.first] = x;
      }
      M = pz;
      curLM = lm;
    } else if (c > 0) {
      continue;
    } else {
      // CRT: x = x0 + M * ((r - x0) * M^{-1} mod p)
      u64 Minv = F.inv(mpz_fdiv_ui(M.get_mpz_t(), P.p));
      for (auto& kv : res) acc.emplace(kv.first, Acc{0, 0});
      for (auto& kv : acc) {
        auto it = res.find(kv.first);
        u64 rr = it == res.end() ? 0 : it->second.first;
        u64 ri = it == res.end() ? 0 : it->second.second;
        auto lift = [&](mpz_class& x0, u64 r) {
          u64 x0p = mpz_fdiv_ui(x0.get_mpz_t(), P.p);
          u64 d = F.mul(F.sub(r, x0p), Minv);
          mpz_class dz;
          mpz_set_ui(dz.get_mpz_t(), d);
          x0 += M * dz;
        };
        lift(kv.second.re, rr);
        lift(kv.second.im, ri);
      }
      M *= pz;
    }
    // reconstruct
    std::vector<Term> terms;
    bool ok = true;
    for (auto& kv : acc) {
      mpq_class re, im;
      if (!ratrecon(kv.second.re, M, &re) || !ratrecon(kv.second.im, M, &im)) {
        ok = false;
        break;
      }
      if (sgn(re) || sgn(im)) terms.push_back({kv.first, GaussRat(re, im)});
    }
    if (!ok) continue;
    Poly G = Poly::from_terms(std::move(terms));
    if (G.is_zero() || !G.lc().is_one()) continue;
    auto qa = a.divide_exact(G);
    if (!qa) continue;
    auto qb = b.divide_exact(G);
    if (!qb) continue;
    return {G, std::move(*qa), std::move(*qb)};
  }
  throw AlgebraError("gcd: prime supply exhausted");
}

}  // namespace

GcdWithCofactors gcd_cofactors(const Poly& a, const Poly& b) {
  if (a.is_zero() && b.is_zero()) return {Poly(), Poly(), Poly()};
  if (a.is_zero()) return {b.monic(), Poly(), Poly(b.lc())};
  if (b.is_zero()) return {a.monic(), Poly(a.lc()), Poly()};
  if (a.is_constant() || b.is_constant()) return {Poly(1), a, b};
  Monomial ma = a.monomial_content(), mb = b.monomial_content();
  Monomial mg = mono_gcd(ma, mb);
  Poly a1 = a.div_monomial(ma), b1 = b.div_monomial(mb);
  Monomial ra = ma / mg, rb = mb / mg;
  if (a1.is_constant() || b1.is_constant())
    return {Poly::monomial(mg, GaussRat(1)), a1.mul_monomial(ra, GaussRat(1)), b1.mul_monomial(rb, GaussRat(1))};
  GcdWithCofactors core = core_gcd(a1, b1);
  return {core.g.mul_monomial(mg, GaussRat(1)), core.abar.mul_monomial(ra, GaussRat(1)),
          core.bbar.mul_monomial(rb, GaussRat(1))};
}

Poly gcd(const Poly& a, const Poly& b) { return gcd_cofactors(a, b).g; }

}  // namespace piii::exactalg
