#include "piii/numflow/numflow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "piii/backlund/backlund.hpp"

namespace piii::numflow {

namespace {

const double kPi = std::acos(-1.0);

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

// ------------------------------------------------------------- paths

cplx Segment::at(double s) const {
  if (kind == Kind::line) {
    double L = length();
    return L == 0 ? from : from + (to - from) * (s / L);
  }
  double r = std::abs(from - center);
  double phi0 = std::arg(from - center);
  double sgn = dphi >= 0 ? 1 : -1;
  return center + std::polar(r, phi0 + sgn * s / r);
}

cplx Segment::tangent(double s) const {
  if (kind == Kind::line) {
    double L = length();
    return L == 0 ? cplx(1) : (to - from) / L;
  }
  cplx p = at(s) - center;
  double sgn = dphi >= 0 ? 1 : -1;
  return cplx(0, sgn) * p / std::abs(p);
}

double Segment::length() const {
  if (kind == Kind::line) return std::abs(to - from);
  return std::abs(from - center) * std::abs(dphi);
}

PathSpec PathSpec::line(cplx a, cplx b, int samples, Plane plane) { return polyline({a, b}, samples, plane); }

PathSpec PathSpec::polyline(const std::vector<cplx>& points, int samples, Plane plane) {
  if (points.size() < 2) throw PathError("a polyline needs at least two points");
  PathSpec p;
  p.plane = plane;
  p.samples = samples;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    Segment s;
    s.from = points[k];
    s.to = points[k + 1];
    p.segments.push_back(s);
  }
  return p;
}

PathSpec PathSpec::arc(cplx center, double radius, double phi0, double phi1, int samples, Plane plane) {
  if (radius <= 0) throw PathError("arc radius must be positive");
  PathSpec p;
  p.plane = plane;
  p.samples = samples;
  Segment s;
  s.kind = Segment::Kind::arc;
  s.center = center;
  s.from = center + std::polar(radius, phi0);
  s.to = center + std::polar(radius, phi1);
  s.dphi = phi1 - phi0;
  p.segments.push_back(s);
  return p;
}

PathSpec PathSpec::then(const PathSpec& next) const {
  if (next.plane != plane) throw PathError("cannot join paths in different planes");
  if (std::abs(end() - next.start()) > 1e-12 * (1 + std::abs(end()))) throw PathError("paths do not connect");
  PathSpec p = *this;
  p.samples = samples + next.samples;
  p.segments.insert(p.segments.end(), next.segments.begin(), next.segments.end());
  return p;
}

cplx PathSpec::start() const {
  if (segments.empty()) throw PathError("empty path");
  return segments.front().from;
}

cplx PathSpec::end() const {
  if (segments.empty()) throw PathError("empty path");
  return segments.back().to;
}

double PathSpec::length() const {
  double L = 0;
  for (auto& s : segments) L += s.length();
  return L;
}

void PathSpec::validate() const {
  if (segments.empty()) throw PathError("empty path");
  if (samples < 1) throw PathError("path needs at least one output interval");
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const Segment& s = segments[k];
    if (!finite(s.from) || !finite(s.to)) throw PathError("path has non-finite points");
    if (k > 0 && std::abs(segments[k - 1].to - s.from) > 1e-12 * (1 + std::abs(s.from)))
      throw PathError("path segments do not connect");
    if (plane != Plane::t) continue;
    double dist;
    if (s.kind == Segment::Kind::line) {
      cplx d = s.to - s.from;
      double L2 = std::norm(d);
      double u = L2 == 0 ? 0 : std::clamp(-(std::conj(d) * s.from).real() / L2, 0.0, 1.0);
      dist = std::abs(s.from + d * u);
    } else {
      double r = std::abs(s.from - s.center);
      dist = std::numeric_limits<double>::infinity();
      for (int j = 0; j <= 512; ++j) dist = std::min(dist, std::abs(s.at(s.length() * j / 512.0)));
      if (std::abs(std::abs(s.center) - r) < 1e-14) dist = 0;
    }
    if (dist < 1e-14) throw PathError("path passes through t = 0");
  }
}

// ------------------------------------------------------------- equations

Params frame_params(Family f, const Params& p, Frame fr) {
  if (f == Family::D7 || fr == Frame::direct) return p;
  return {p.thetainf + 1.0, p.theta0 - 1.0};
}

std::pair<cplx, cplx> first_order_rhs(Family f, const Params& p0, Frame fr, cplx t, cplx q, cplx a) {
  Params p = frame_params(f, p0, fr);
  if (f == Family::D7) {
    cplx th = p.theta0;
    return {(q + 2.0 * a) / t, (-t * t - th * t * q + 4.0 * a * a + 2.0 * q * a + 2.0 * q * q * q) / (2.0 * t * q)};
  }
  cplx th0 = p.theta0, thi = p.thetainf;
  cplx q2 = q * q;
  return {(4.0 * a - q) / t,
          (4.0 * a * a - t * t + q * (t - a - t * th0) + q2 * q * t * thi + q2 * q2 * t * t) / (t * q)};
}

cplx second_order_value(Family f, const Params& p, cplx t, cplx q, cplx qp) {
  cplx r = qp * qp / q - qp / t;
  if (f == Family::D7) return r - p.theta0 / t + 2.0 * q * q / (t * t) - 1.0 / q;
  return r - 4.0 * (p.theta0 - 1.0) / t + 4.0 * p.thetainf * q * q / t + 4.0 * q * q * q - 4.0 / q;
}

// ------------------------------------------------------------- integration

namespace {

using State = std::array<cplx, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

class Integrator {
 public:
  Integrator(Family f, const Params& p, Plane plane, const IntegrateOptions& opt, double total_length)
      : f_(f), p_(p), plane_(plane), opt_(opt), hmin_(1e-13 * std::max(total_length, 1e-300)) {}

  Trajectory traj;
  Frame frame = Frame::direct;
  cplx detour_point;
  double detour_radius = 0;
  cplx x;        // path variable (t or t~)
  cplx t_tilde;  // continued logarithm of t
  State y;

  cplx t_of(cplx xv) const { return plane_ == Plane::t ? xv : std::exp(xv); }

  // dY/dx at path variable xv.
  State deriv(cplx xv, const State& s) const {
    cplx t = t_of(xv);
    auto [dq, da] = first_order_rhs(f_, p_, frame, t, s[0], s[1]);
    cplx dtdx = plane_ == Plane::t ? cplx(1) : t;
    return {dq * dtdx, da * dtdx};
  }

  Sample sample() const { return {t_tilde, t_of(x), y[0], y[1], frame}; }
  void record() { traj.samples.push_back(sample()); }

  // Integrates along seg from s0 to s1; output samples at the listed s values.
  // Returns the s reached (== s1 unless a D7 detour was requested at s).
  double run(const Segment& seg, double s0, double s1, const std::vector<double>& outputs, bool allow_detour,
             bool* detour_wanted) {
    double s = s0;
    std::size_t next = 0;
    while (next < outputs.size() && outputs[next] <= s0 + 1e-15) ++next;
    double h = opt_.fixed_step > 0 ? opt_.fixed_step : std::min(s1 - s0, std::max(1e-3, (s1 - s0) / 50));
    if (h <= 0) return s1;
    while (s < s1 - 1e-15 * std::max(1.0, s1)) {
      double target = next < outputs.size() ? std::min(outputs[next], s1) : s1;
      double step = std::min(h, target - s);
      State ynew;
      double err = attempt(seg, s, step, ynew);
      if (opt_.fixed_step > 0) {
        if (!std::isfinite(err)) throw NumericalFailure("fixed step left the domain near t = " + fmt(t_of(x)), sample());
        err = 0;
      }
      if (err <= 1.0) {
        s += step;
        cplx xn = seg.at(s);
        advance_tilde(xn);
        x = xn;
        y = ynew;
        if (next < outputs.size() && std::abs(s - outputs[next]) <= 1e-12 * std::max(1.0, s)) {
          s = outputs[next];
          record();
          ++next;
        }
        maybe_swap();
        if (allow_detour && detour_candidate(seg, s, &detour_point, &detour_radius)) {
          *detour_wanted = true;
          return s;
        }
      }
      double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = opt_.fixed_step > 0 ? opt_.fixed_step : step * fac;
      if (err > 1.0 && h < hmin_)
        throw NumericalFailure("step size underflow near t = " + fmt(t_of(x)), sample());
    }
    return s1;
  }

  // A singular point of the system lies just ahead on a line segment: a zero
  // or a pole of the frame variable (simple for D6, double for D7 poles).
  // Newton-type estimate from q/q'; returns the centre and radius of the detour.
  bool detour_candidate(const Segment& seg, double s, cplx* xs, double* radius) const {
    if (seg.kind != Segment::Kind::line) return false;
    double m = std::abs(y[0]);
    bool pole = m > opt_.detour_threshold;
    bool zero = m < 1.0 / opt_.detour_threshold;
    if (!pole && !zero) return false;
    State d = deriv(x, y);
    if (d[0] == cplx(0)) return false;
    cplx r = y[0] / d[0];
    double order = pole && f_ == Family::D7 ? 2.0 : 1.0;
    *xs = pole ? x + order * r : x - r;
    cplx rel = (*xs - x) / seg.tangent(s);
    if (rel.real() <= 0) return false;  // already behind
    *radius = rel.real();
    return *radius <= opt_.max_detour_radius;
  }

  static std::string fmt(cplx z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
    return buf;
  }

 private:
  double attempt(const Segment& seg, double s, double h, State& out) const {
    auto F = [&](double ss, const State& st) {
      State d = deriv(seg.at(ss), st);
      cplx u = seg.tangent(ss);
      return State{d[0] * u, d[1] * u};
    };
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State r = y;
      for (auto& [c, k] : terms) {
        r[0] += h * c * (*k)[0];
        r[1] += h * c * (*k)[1];
      }
      return r;
    };
    State k1 = F(s, y);
    State k2 = F(s + c2 * h, comb({{a21, &k1}}));
    State k3 = F(s + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
    State k4 = F(s + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    State k5 = F(s + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    State k6 = F(s + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    out = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    State k7 = F(s + h, out);
    double err = 0;
    for (int i = 0; i < 2; ++i) {
      cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = opt_.tol * (1 + std::max(std::abs(y[i]), std::abs(out[i])));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!finite(out[0]) || !finite(out[1]) || !std::isfinite(err)) return std::numeric_limits<double>::infinity();
    // keep t-plane steps short relative to |t| so the continued log stays on branch
    if (plane_ == Plane::t && std::abs(seg.at(s + h) - seg.at(s)) > 0.5 * std::abs(seg.at(s)))
      return std::numeric_limits<double>::infinity();
    return err;
  }

  void advance_tilde(cplx xn) {
    if (plane_ == Plane::t_tilde)
      t_tilde = xn;
    else
      t_tilde += std::log(xn / x);
  }

  void maybe_swap() {
    if (f_ != Family::D6) return;
    if (std::abs(y[0]) <= opt_.swap_threshold) return;
    cplx q = y[0], a = y[1];
    cplx Q = 1.0 / q, A = (q - 2.0 * a) / (2.0 * q * q);
    frame = frame == Frame::direct ? Frame::inverted : Frame::direct;
    char note[96];
    std::snprintf(note, sizeof note, "to %s frame, |q Q - 1| = %.3g", frame == Frame::direct ? "direct" : "inverted",
                  std::abs(q * Q - 1.0));
    traj.events.push_back({"frame-swap", t_of(x), note, traj.samples.size() - 1});
    y = {Q, A};
  }

  Family f_;
  Params p_;
  Plane plane_;
  IntegrateOptions opt_;
  double hmin_;
};

}  // namespace

Trajectory integrate(Family family, const Params& params, const Initial& init, const PathSpec& path,
                     const IntegrateOptions& opt) {
  path.validate();
  if (!(opt.tol > 0)) throw PathError("tolerance must be positive");
  if (init.q == cplx(0)) throw PathError("q0 must be nonzero");
  cplx x0 = path.start();
  cplx t0 = std::exp(init.t_tilde);
  if (path.plane == Plane::t ? std::abs(t0 - x0) > 1e-12 * (1 + std::abs(x0))
                             : std::abs(init.t_tilde - x0) > 1e-12 * (1 + std::abs(x0)))
    throw PathError("initial t~ does not match the path start");

  double total = path.length();
  Integrator I(family, params, path.plane, opt, total);
  I.traj.family = family;
  I.traj.params = params;
  I.x = x0;
  I.t_tilde = init.t_tilde;
  I.y = {init.q, init.a};
  I.record();
  if (total == 0) return std::move(I.traj);

  for (const Segment& seg : path.segments) {
    double L = seg.length();
    if (L == 0) continue;
    int n = std::max(1, static_cast<int>(std::lround(path.samples * L / total)));
    std::vector<double> outs;
    for (int k = 1; k <= n; ++k) outs.push_back(L * k / n);
    double s = 0;
    while (s < L) {
      bool detour = false;
      s = I.run(seg, s, L, outs, true, &detour);
      if (!detour) break;

      // Semicircle centred on the projection of the singular point, on the
      // side away from it, rejoining the line.
      cplx xs = I.detour_point;
      double R = std::max(I.detour_radius, 1e-6);
      double s_end = std::min(s + 2 * R, L);
      cplx xe = seg.at(s_end);
      if (s_end - s < 1e-12) throw NumericalFailure("singular point at the end of the path", I.sample());
      cplx u = seg.tangent(s);
      double side = ((xs - I.x) / u).imag();
      Segment arc;
      arc.kind = Segment::Kind::arc;
      arc.center = (I.x + xe) / 2.0;
      arc.from = I.x;
      arc.to = xe;
      arc.dphi = side > 0 ? kPi : -kPi;  // +pi passes to the right of the direction of travel
      if (path.plane == Plane::t) {
        cplx rel = -arc.center / u;
        bool inside = std::abs(arc.center) < std::abs(xe - I.x) / 2 && (rel.imag() < 0) == (arc.dphi > 0);
        if (inside) throw NumericalFailure("detour would enclose t = 0", I.sample());
      }
      I.traj.events.push_back({"detour", I.t_of(I.x),
                               "semicircle of radius " + std::to_string(std::abs(xe - I.x) / 2) + " around " +
                                   Integrator::fmt(I.t_of(xs)),
                               I.traj.samples.size() - 1});
      bool again = false;
      I.run(arc, 0, arc.length(), {}, false, &again);
      I.x = xe;  // pin to the line exactly
      s = s_end;
      // output points inside the detour are not produced
      if (std::find_if(outs.begin(), outs.end(), [&](double o) { return std::abs(o - s) < 1e-12 * std::max(1.0, s); }) !=
          outs.end())
        I.record();
    }
  }
  return std::move(I.traj);
}

// ------------------------------------------------------------- residuals

namespace {

const double kD1[5][9] = {
    {},
    {-1.0 / 2, 0, 1.0 / 2},
    {1.0 / 12, -2.0 / 3, 0, 2.0 / 3, -1.0 / 12},
    {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0, 3.0 / 4, -3.0 / 20, 1.0 / 60},
    {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280},
};
const double kD2[5][9] = {
    {},
    {1, -2, 1},
    {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12},
    {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90},
    {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560},
};

constexpr double kPoleWindow = 1e8;

struct Stencil {
  bool ok = false;
  bool in_tilde = false;  // differences taken in t~
  cplx h;
};

Stencil stencil_at(const Trajectory& tr, std::size_t i, int m, bool require_tilde) {
  Stencil st;
  auto uniform = [&](auto get) {
    cplx h = get(i + 1) - get(i);
    if (std::abs(h) == 0) return std::optional<cplx>();
    for (int j = -m; j < m; ++j)
      if (std::abs(get(i + j + 1) - get(i + j) - h) > 1e-9 * std::abs(h)) return std::optional<cplx>();
    return std::optional<cplx>(h);
  };
  auto gt = [&](std::size_t k) { return tr.samples[k].t; };
  auto gtt = [&](std::size_t k) { return tr.samples[k].t_tilde; };
  if (!require_tilde)
    if (auto h = uniform(gt)) return {true, false, *h};
  if (auto h = uniform(gtt)) return {true, true, *h};
  return st;
}

// q in the frame of sample i
cplx q_in_frame(const Sample& s, Frame fr) {
  auto [q, a] = direct_values(s);
  return fr == Frame::direct ? q : 1.0 / q;
}

ResidualReport evaluate(const Trajectory& tr, ResidualMode mode, bool tilde_form) {
  if (tr.samples.size() < 5) throw ResidualError("residual needs at least 5 samples");
  ResidualReport rep;
  rep.mode = tilde_form ? "t~-form" : (mode == ResidualMode::first_order ? "first-order" : "finite-difference");
  const std::size_t n = tr.samples.size();
  int m = static_cast<int>(std::min<std::size_t>(4, (n - 1) / 2));
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& c = tr.samples[i];
    if (i < static_cast<std::size_t>(m) || i + m >= n) continue;
    Stencil st = stencil_at(tr, i, m, tilde_form);
    for (const Event& ev : tr.events)
      if (ev.after_sample + m >= i && ev.after_sample < i + m) st.ok = false;  // stencil straddles an event
    // Pole window: differences lose accuracy within a few stencil widths of a
    // pole or zero; |q/q'| estimates that distance.
    if (st.ok)
      for (int j = -m; j <= m && st.ok; ++j) {
        const Sample& s = tr.samples[i + j];
        auto [q, a] = direct_values(s);
        cplx qp = first_order_rhs(tr.family, tr.params, Frame::direct, s.t, q, a).first;
        double hx = st.in_tilde ? std::abs(st.h * s.t) : std::abs(st.h);
        if (std::abs(qp) * 3 * m * hx > std::abs(q)) st.ok = false;
      }
    cplx qc = q_in_frame(c, c.frame);
    if (!st.ok || std::abs(qc) > kPoleWindow || std::abs(qc) < 1.0 / kPoleWindow) {
      rep.skipped.push_back(c.t);
      continue;
    }
    Params p = frame_params(tr.family, tr.params, c.frame);
    cplx d1 = 0, d2 = 0;
    for (int j = -m; j <= m; ++j) {
      const Sample& s = tr.samples[i + j];
      cplx v;
      if (mode == ResidualMode::first_order && !tilde_form) {
        cplx qv = q_in_frame(s, c.frame);
        cplx av;
        if (s.frame == c.frame) {
          av = s.a;
        } else {
          // convert a to the centre's frame with the same involution as q
          av = (s.q - 2.0 * s.a) / (2.0 * s.q * s.q);
        }
        cplx qp = first_order_rhs(tr.family, tr.params, c.frame, s.t, qv, av).first;
        v = st.in_tilde ? qp * s.t : qp;  // derivative w.r.t. the stencil variable
        d2 += kD1[m][j + m] * v;
        if (j == 0) d1 = qp;
      } else {
        v = q_in_frame(s, c.frame);
        d1 += kD1[m][j + m] * v;
        d2 += kD2[m][j + m] * v;
      }
    }
    cplx t = c.t;
    cplx r;
    if (mode == ResidualMode::first_order && !tilde_form) {
      cplx q1 = d1, q2;
      if (st.in_tilde) {
        // d2 / h = d/dt~ (t q') = t q' + t^2 q''
        q2 = (d2 / st.h - t * q1) / (t * t);
      } else {
        q2 = d2 / st.h;
      }
      r = q2 - second_order_value(tr.family, p, t, qc, q1);
    } else {
      cplx D1 = d1 / st.h, D2 = d2 / (st.h * st.h);
      if (tilde_form) {
        cplx e = std::exp(c.t_tilde);
        cplx rhs = tr.family == Family::D7
                       ? D1 * D1 / qc - p.theta0 * e + 2.0 * qc * qc - e * e / qc
                       : D1 * D1 / qc - 4.0 * (p.theta0 - 1.0) * e + 4.0 * p.thetainf * qc * qc * e +
                             4.0 * qc * qc * qc * e * e - 4.0 * e * e / qc;
        r = D2 - rhs;
      } else {
        cplx q1 = D1, q2 = D2;
        if (st.in_tilde) {
          q1 = D1 / t;
          q2 = (D2 - D1) / (t * t);
        }
        r = q2 - second_order_value(tr.family, p, t, qc, q1);
      }
    }
    double v = std::abs(r);
    rep.per_sample.push_back({i, v});
    rep.max = std::max(rep.max, v);
  }
  return rep;
}

}  // namespace

ResidualReport residual(const Trajectory& traj, ResidualMode mode) { return evaluate(traj, mode, false); }

ResidualReport exp_form_check(const Trajectory& traj) {
  if (traj.samples.empty()) throw ResidualError("empty trajectory");
  ResidualReport r = evaluate(traj, ResidualMode::finite_difference, true);
  if (r.per_sample.empty()) throw ResidualError("no stencil is uniform in t~; the t~-form needs a t~-plane path");
  return r;
}

BacklundResidual backlund_residual_check(const backlund::BacklundWord& w, const Trajectory& traj, double threshold) {
  BacklundResidual out;
  out.image = backlund::solution_map(w, traj);
  out.report = residual(out.image);
  out.pass = out.report.pass(threshold);
  return out;
}

double max_sample_jump(const Trajectory& traj) {
  double m = 0;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    auto [q0, a0] = direct_values(traj.samples[k - 1]);
    auto [q1, a1] = direct_values(traj.samples[k]);
    m = std::max(m, std::abs(q1 - q0));
  }
  return m;
}

}  // namespace piii::numflow
