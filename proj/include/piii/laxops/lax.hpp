#pragma once
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "piii/exactalg/derivation.hpp"
#include "piii/exactalg/errors.hpp"
#include "piii/exactalg/linsolve.hpp"
#include "piii/laxops/laurent.hpp"

namespace piii::laxops {

using exactalg::DerivationSpec;
using exactalg::Symbol;

enum class Family { D6, D7 };
// D6: ST1 (c = z - q), ST0 (c = 1 - q z). D7: C0 (c0 != 0), CM1 (c_{-1} != 0).
enum class Chart { ST1, ST0, C0, CM1 };

std::string to_string(Family f);
std::string to_string(Chart c);
Family parse_family(const std::string& s);
Chart parse_chart(const std::string& s);
Chart default_chart(Family f);

struct ChartDomainError : exactalg::AlgebraError {
  using AlgebraError::AlgebraError;
};

struct DerivationFailure : exactalg::AlgebraError {
  std::vector<RatFun> residual_system;
  DerivationFailure(const std::string& what, std::vector<RatFun> sys)
      : AlgebraError(what), residual_system(std::move(sys)) {}
};

// Generators may be symbolic or exact constants. For D7, theta0 holds the
// single parameter theta and thetainf is unused.
struct ChartState {
  Family family = Family::D6;
  Chart chart = Chart::ST1;
  RatFun q, a, t, theta0, thetainf;

  static ChartState symbolic(Family f, Chart c);
  static ChartState symbolic(Family f) { return symbolic(f, default_chart(f)); }
  exactalg::Bindings bindings() const;  // generic symbol -> value
};

enum class OpKind { lax, deformation };

struct ZMatrixOperator {
  OpKind kind = OpKind::lax;
  Mat2 m;
  int lo = 0, hi = 0;  // declared z-exponent range
  bool respects_range() const;
  bool trace_free() const { return trace(m).is_zero(); }
};

ZMatrixOperator build_operator(const ChartState& s);
// (h, e1; e2, -h)
Mat2 sl2(const Laurent& h, const Laurent& e1, const Laurent& e2);
// Appends every z-coefficient of every entry.
void collect_coefficients(const Mat2& M, std::vector<RatFun>& out);

// D(A) - z d/dz B - [A, B]
Mat2 commutation_residual(const ZMatrixOperator& L, const ZMatrixOperator& B, const DerivationSpec& D);

// Symbols of the generic flow ring.
Symbol theta_symbol_d7();  // theta
// The expected flows on the default charts, written out.
DerivationSpec expected_flow(Family f);
RatFun expected_dq(Family f);
RatFun expected_da(Family f);

struct IsoFlow {
  DerivationSpec flow;
  ZMatrixOperator B;
  std::size_t equations = 0;
  std::size_t unknowns = 0;
};

// Solves the commutation equations for the B coefficients and D(q), D(a).
// window defaults to -2..1 (D6) and -1..2 (D7).
IsoFlow derive_isomonodromy_flow(Family f, std::optional<std::pair<int, int>> window = std::nullopt);

// Symbol standing for q' in second-order residuals.
Symbol qprime_symbol();
RatFun second_order_rhs(Family f, const RatFun& t, const RatFun& q, const RatFun& qp, const RatFun& th0,
                        const RatFun& thinf);
RatFun reduce_to_second_order(const DerivationSpec& flow, Family f);

// Residual of Q = 1/q against the D6 equation with (theta0 - 1) and thetainf
// exchanged; swapped = false is the unswapped control.
RatFun swapped_inverse_equation_check(bool swapped = true);

struct GaugeShape {
  int lo = 0, hi = 0;
  std::vector<std::tuple<int, int, int>> zeros;  // (row, col, exponent) forced to 0
  bool top_det_zero = false;                     // det of the top coefficient must vanish (checked after)
  static GaugeShape window(int lo, int hi) { return {lo, hi, {}, false}; }
};

struct GaugeResult {
  std::optional<Mat2> T;
  Laurent det;
  // z (det T)'/det T = tr Atilde - tr A forces det T = c z^e with e that
  // trace difference; det_ok means it has exactly this form with c != 0.
  int det_exp = 0;
  bool det_ok = false;
  bool identity_holds = false;        // z T' + A T - T Atilde == 0 re-evaluated
  bool shape_holds = false;
  std::size_t family_dim = 0;
};

GaugeResult gauge_solve(const ZMatrixOperator& L, const ZMatrixOperator& Ltilde, const GaugeShape& shape);

struct TransferResult {
  ChartState state;
  Mat2 T;  // bundle automorphism: z T' + A T = T Atilde
};
TransferResult chart_transfer_with_gauge(const ChartState& s, Chart target);
inline ChartState chart_transfer(const ChartState& s, Chart target) { return chart_transfer_with_gauge(s, target).state; }

}  // namespace piii::laxops
