#pragma once
#include <complex>
#include <string>
#include <vector>

#include "piii/laxops/lax.hpp"

namespace piii::numflow {

using cplx = std::complex<double>;
using laxops::Family;

// inverted: (q, a) hold the inverse-chart pair Q = 1/q, A = (q - 2a)/(2q^2).
enum class Frame { direct, inverted };

struct Sample {
  cplx t_tilde;  // t = exp(t_tilde), continued along the path
  cplx t;
  cplx q, a;
  Frame frame = Frame::direct;
};

struct Event {
  std::string kind;  // "frame-swap", "detour", "dropped"
  cplx t;
  std::string note;
  std::size_t after_sample = 0;  // index of the last sample recorded before the event
};

struct Params {
  cplx theta0 = 0, thetainf = 0;  // D7: theta0 holds theta
};

struct Trajectory {
  Family family = Family::D6;
  Params params;
  std::vector<Sample> samples;
  std::vector<Event> events;
};

// Direct-frame (q, a) of a sample.
inline std::pair<cplx, cplx> direct_values(const Sample& s) {
  if (s.frame == Frame::direct) return {s.q, s.a};
  return {1.0 / s.q, (s.q - 2.0 * s.a) / (2.0 * s.q * s.q)};
}

}  // namespace piii::numflow
