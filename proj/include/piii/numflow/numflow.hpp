#pragma once
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "piii/numflow/trajectory.hpp"

namespace piii::backlund {
struct BacklundWord;
}

namespace piii::numflow {

struct PathError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalFailure : std::runtime_error {
  Sample last_good;
  NumericalFailure(const std::string& what, Sample last) : std::runtime_error(what), last_good(last) {}
};

struct ResidualError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Paths live in the t-plane or in the t~-plane (t = exp(t~)).
enum class Plane { t, t_tilde };

struct Segment {
  enum class Kind { line, arc } kind = Kind::line;
  cplx from, to;     // endpoints
  cplx center;       // arc only
  double dphi = 0;   // arc only: signed sweep angle
  cplx at(double s) const;      // s in [0, length()]
  cplx tangent(double s) const; // d/ds, unit modulus
  double length() const;
};

struct PathSpec {
  Plane plane = Plane::t;
  std::vector<Segment> segments;
  int samples = 100;  // output intervals over the whole path

  static PathSpec line(cplx a, cplx b, int samples = 100, Plane plane = Plane::t);
  static PathSpec polyline(const std::vector<cplx>& points, int samples = 100, Plane plane = Plane::t);
  // Circle arc around center from angle phi0 to phi1 (radians, signed sweep).
  static PathSpec arc(cplx center, double radius, double phi0, double phi1, int samples = 100,
                      Plane plane = Plane::t);
  PathSpec then(const PathSpec& next) const;  // concatenation; endpoints must match

  cplx start() const;
  cplx end() const;
  double length() const;
  // Throws PathError when a t-plane path meets t = 0, is empty, or is not connected.
  void validate() const;
};

struct Initial {
  cplx t_tilde;  // t0 = exp(t_tilde)
  cplx q, a;
};

struct IntegrateOptions {
  double tol = 1e-12;            // local error per step, mixed absolute/relative
  double swap_threshold = 1e3;   // D6: invert the frame when |q| (or |Q|) exceeds this
  // Detour around a singular point ahead on a line when |q| < 1/threshold
  // (zero of the frame variable) or, for D7, |q| > threshold (pole).
  double detour_threshold = 1e2;
  double max_detour_radius = 0.25;
  double fixed_step = 0;  // > 0: constant steps without error control (order checks)
};

// Adaptive Dormand-Prince 5(4) on the (q, a) system along the path.
Trajectory integrate(Family family, const Params& params, const Initial& init, const PathSpec& path,
                     const IntegrateOptions& opt = {});

// d/dt (q, a) in the given frame; the inverted frame is the D6 system at
// (thetainf + 1, theta0 - 1).
std::pair<cplx, cplx> first_order_rhs(Family f, const Params& p, Frame fr, cplx t, cplx q, cplx a);
Params frame_params(Family f, const Params& p, Frame fr);
// q'' predicted by the second-order equation.
cplx second_order_value(Family f, const Params& p, cplx t, cplx q, cplx qp);

struct SampleResidual {
  std::size_t index;
  double value;
};

struct ResidualReport {
  double max = 0;
  std::vector<SampleResidual> per_sample;
  std::vector<cplx> skipped;  // t of samples left out (pole windows, detours, non-uniform spacing)
  std::string mode;
  bool pass(double tol) const { return !per_sample.empty() && max < tol; }
};

enum class ResidualMode {
  finite_difference,  // q' and q'' from central differences of q
  first_order         // q' from the first-order system, q'' from differences of it
};

// Central differences (up to 8th order) in t, or in t~ with the chain rule,
// whichever the samples are uniform in. Needs >= 5 samples.
ResidualReport residual(const Trajectory& traj, ResidualMode mode = ResidualMode::finite_difference);
// The t~-form Q'' = Q'^2/Q - 4(theta0-1)e^t~ + 4 thetainf Q^2 e^t~ + 4 Q^3 e^2t~ - 4 e^2t~/Q (D6),
// Q'' = Q'^2/Q - theta e^t~ + 2 Q^2 - e^2t~/Q (D7); samples must be uniform in t~.
ResidualReport exp_form_check(const Trajectory& traj);

struct BacklundResidual {
  Trajectory image;
  ResidualReport report;
  bool pass = false;
};
BacklundResidual backlund_residual_check(const backlund::BacklundWord& w, const Trajectory& traj,
                                         double threshold = 1e-7);

// Largest |q_{k+1} - q_k| (direct frame, ignoring frame swaps and detours).
double max_sample_jump(const Trajectory& traj);

}  // namespace piii::numflow
