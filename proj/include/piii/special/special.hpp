#pragma once
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "piii/exactalg/errors.hpp"
#include "piii/exactalg/linsolve.hpp"
#include "piii/laxops/lax.hpp"

namespace piii::special {

using exactalg::GaussRat;
using exactalg::Poly;
using exactalg::RatFun;

struct SpecialError : exactalg::AlgebraError {
  using AlgebraError::AlgebraError;
};

// ------------------------------------------------------------- D7 algebraic family

// Reduces every power t^(2k+r) to (2 q^3)^k t^r.
Poly reduce_mod_curve(const Poly& p);
bool zero_mod_curve(const RatFun& f);

struct AlgebraicFamily {
  long theta = 0;
  Poly curve;              // t^2 - 2 q^3, the base solution curve
  RatFun q, a, t;          // state as functions of the base point (q, t) on the curve
  RatFun bm1, b0;          // chart coefficients (theta = 0 only)
  bool chart_consistent = false;  // bm1, b0 match the C0 chart formulas mod the curve
  bool flow_holds = false;        // D7 flow holds mod the curve
  std::string word;               // Backlund word used for theta != 0
};
// Base family theta = 0: q^3 = t^2/2, a = -q/6. Other integers are reached by
// (s2+ s1+)^theta. Throws SpecialError for theta outside Z (as a GaussRat).
AlgebraicFamily d7_algebraic_family(const GaussRat& theta = GaussRat(0));
// Branch j of q(t~) = e^{2 pi i j/3} e^{2 t~/3} / 2^{1/3}.
std::complex<double> d7_algebraic_branch(int j, std::complex<double> t_tilde);

// ------------------------------------------------------------- constants

// Constants q with q^4 = 1 solving PIII(D6): +-1 iff thetainf = theta0 - 1,
// +-i iff -thetainf = theta0 - 1.
std::vector<GaussRat> d6_constant_solutions(const GaussRat& theta0, const GaussRat& thetainf);
// PIII(D6) residual of the constant c (exact, as a function of t).
RatFun d6_constant_residual(const GaussRat& c, const GaussRat& theta0, const GaussRat& thetainf);

// ------------------------------------------------------------- reducible families

struct EpsPair {
  int e1 = 1, e2 = 1;
  friend bool operator==(EpsPair a, EpsPair b) { return a.e1 == b.e1 && a.e2 == b.e2; }
};
std::string to_string(EpsPair e);

// Families (eps1, eps2) present in M(theta0, thetainf); parameters must be
// real rationals for the inequalities to apply (non-real ones give empty).
std::vector<EpsPair> reducible_presence(const GaussRat& theta0, const GaussRat& thetainf);

// z d/dz + (-(e1 t/z + e2 t z)/2 - d, 0; c1 z + c0, (e1 t/z + e2 t z)/2 + d)
laxops::ZMatrixOperator reducible_standard_form(EpsPair e, const RatFun& d, const RatFun& c1, const RatFun& c0,
                                                const RatFun& t);

struct RiccatiResult {
  EpsPair eps;
  RatFun d;
  RatFun rhs;             // q' = rhs(q, t)
  RatFun middle;          // coefficient m with rhs = -2 e2 q^2 - (m/t) q - 2 e1
  RatFun theta0, thetainf;  // PIII(D6) parameters matched by the solve
  bool piii_consistent = false;  // differentiated Riccati satisfies PIII(D6) there
  laxops::Mat2 B;         // deformation matrix (B_-1 z^-1 + B_0 + B_1 z)
};
// Lower-left entry z - q; solves the commutation equations with a
// deformation window -1..1, then matches the second-order equation.
RiccatiResult riccati_isomonodromy(EpsPair e, const RatFun& d);

// q = (e2/2) y'/y turns "q' - rhs" into (e2/(2y)) (y'' + (m/t) y' + 4 e1 e2 y);
// returns y'' + (m/t) y' + 4 e1 e2 y in the symbols y, y1 = y', y2 = y''.
RatFun riccati_to_linear(EpsPair e, const RatFun& middle);

// ------------------------------------------------------------- series

// y = t^rho * sum coeffs[k] t^k  (+ log_coeff * ln t * partner)
struct PowerSeries {
  RatFun rho;
  std::vector<RatFun> coeffs;  // k = 0..N
  int N = 0;
  bool log_flag = false;
  RatFun log_coeff;                   // C in C y_partner ln t
  RatFun partner_rho;                 // exponent of the partner series
  std::vector<RatFun> partner_coeffs;
};

// Frobenius pair of y'' + (c/t) y' + lambda y = 0 at t = 0, exponents 0 and
// 1 - c. When 1 - c is an integer the smaller exponent may need a log term;
// log_flag records it. Throws SpecialError for N < 1.
std::pair<PowerSeries, PowerSeries> bessel_frobenius(const RatFun& c, const RatFun& lambda, int N);
// Coefficient residuals of the ODE for the series through order N (all zero
// means the recurrence holds exactly).
std::vector<RatFun> frobenius_residuals(const PowerSeries& s, const RatFun& c, const RatFun& lambda);

// Numeric value of a series (and its t-derivative) at t > 0 on the real
// branch of ln t and t^rho.
std::complex<double> series_value(const PowerSeries& s, std::complex<double> t);
std::complex<double> series_derivative(const PowerSeries& s, std::complex<double> t);

struct RiccatiSeries {
  EpsPair eps;
  RatFun d, middle;
  PowerSeries y1, y2;         // Frobenius pair of the linear equation
  GaussRat mix1, mix2;        // y = mix1 y1 + mix2 y2
  // Formal q = (e2/2) y'/y = sum_{k >= -1} q_k t^k when y has no log part.
  std::optional<std::vector<RatFun>> q_formal;  // index 0 is the t^-1 coefficient
  std::complex<double> q_at(std::complex<double> t) const;
};
// Uses the middle coefficient derived by riccati_isomonodromy. Throws
// SpecialError if y vanishes identically through order N.
RiccatiSeries riccati_solution(EpsPair e, const RatFun& d, const GaussRat& mix1, const GaussRat& mix2, int N);
// Riccati residual coefficients of the formal q series through order N - 2.
std::vector<RatFun> riccati_series_residuals(const RiccatiSeries& s);

}  // namespace piii::special
