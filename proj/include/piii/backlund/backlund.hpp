#pragma once
#include <optional>
#include <string>
#include <vector>

#include "piii/laxops/lax.hpp"
#include "piii/numflow/trajectory.hpp"

namespace piii::backlund {

using exactalg::RatFun;
using laxops::ChartState;
using laxops::Family;

// B is (s1+)^2 = (s2+)^2 for D7; B3 the D6 analogue.
enum class Gen { s1, s2, s3, s4, B1, B2, B3, s1p, s2p, B };

struct Letter {
  Gen g;
  bool inverse = false;
  friend bool operator==(const Letter& x, const Letter& y) { return x.g == y.g && x.inverse == y.inverse; }
};

Family family_of(Gen g);
std::string gen_name(Gen g);
Gen parse_gen(const std::string& s);  // "s1", "s2+", "s1p", "B1", ...

// Letters compose like functions: the rightmost letter acts first.
struct BacklundWord {
  Family family = Family::D6;
  std::vector<Letter> letters;

  static BacklundWord parse(const std::string& text, std::optional<Family> family = std::nullopt);
  static BacklundWord of(Gen g, bool inverse = false);
  std::string str() const;
  BacklundWord inverse() const;
  BacklundWord operator*(const BacklundWord& o) const;  // this after o
  BacklundWord pow(int n) const;
};

struct BacklundError : exactalg::AlgebraError {
  using AlgebraError::AlgebraError;
};

// Raised when a state sits on an excluded locus without a published override.
struct PartialMapError : BacklundError {
  std::string factor;
  PartialMapError(const std::string& word, std::string f)
      : BacklundError(word + " is not defined here: denominator factor " + f + " vanishes"), factor(std::move(f)) {}
};

// Parameters plus the t-tilde shift k (units of i*pi/2).
struct ParamPoint {
  RatFun theta0, thetainf;
  long k = 0;
  friend bool operator==(const ParamPoint& x, const ParamPoint& y) {
    return x.theta0 == y.theta0 && x.thetainf == y.thetainf && x.k == y.k;
  }
  static ParamPoint symbolic(Family f);
  std::string str(Family f) const;
};

ParamPoint param_action(const BacklundWord& w, const ParamPoint& p);

// t_new = sigma * t_old, sigma = (-i)^k.
exactalg::GaussRat time_factor(long k);

struct StateMap {
  RatFun q, a;                       // in (q, a, t, theta-params), t the source time
  long k = 0;                        // t-tilde shift
  exactalg::GaussRat sigma{1};       // t_new = sigma t
  std::vector<RatFun> exclusions;    // denominator factors
  bool a_derived = false;            // a from (t D(q~) + q~)/4 (D6) or (t D(q~) - q~)/2 (D7)
};

// Single letter. Inverses of s2, B1, B2 are composites computed once.
const StateMap& state_map(const Letter& l);
inline const StateMap& state_map(Gen g) { return state_map(Letter{g, false}); }

// Published formulas, kept for comparison with the maps actually used.
struct PublishedFormula {
  std::string label;
  RatFun value;
};
std::vector<PublishedFormula> published_formulas(Gen g);

// Critical cases: parameter relation, locus, the binding that imposes the
// relation, and published/derived values.
struct CriticalCase {
  Gen gen;
  std::string name;
  RatFun relation;                 // vanishes on the critical parameters
  RatFun locus;                    // vanishes on the reducible locus
  exactalg::Bindings impose;       // parameter substitution realizing the relation
  std::optional<RatFun> published_reduced_q;  // generic map after imposing the relation
  std::optional<RatFun> published_locus_q;    // value on the locus as displayed
  std::optional<RatFun> published_locus_a;
  // Displayed factorization of the generic denominator of q~ once the relation
  // holds; one factor is shared with the numerator, so it cancels in q~.
  std::vector<RatFun> published_den_factors;
};
const std::vector<CriticalCase>& critical_cases();
// Denominator of the displayed generic q~ formula, as printed (not reduced).
RatFun displayed_denominator(Gen g);

// q~, a~ of the generic map restricted to a critical case, evaluated on its locus.
std::pair<RatFun, RatFun> critical_locus_values(const CriticalCase& c);

ChartState apply_state(const BacklundWord& w, const ChartState& s);

struct Check {
  std::string name;
  bool pass = false;
  std::string residual;  // "0" or the offending expression
};

struct Report {
  std::string word;
  Family family = Family::D6;
  std::string from, to;
  std::vector<Check> checks;
  bool pass() const;
};

struct VerifyOptions {
  bool transport = true;
  bool gauge = true;
  std::optional<ParamPoint> target_override;  // for controls
};

Report verify_transformation(Gen g, const VerifyOptions& opt = {});

// Composite words: derivation transport of apply_state on a generic state.
Report verify_word(const BacklundWord& w);

Report group_relations_check();
Report okamoto_substitution_check(bool wrong_gamma = false);

// Gauge data used by the gauge transport of a generator.
laxops::ZMatrixOperator gauge_source_operator(Gen g, const ChartState& s);
laxops::GaugeShape gauge_shape(Gen g);

// Pointwise image of a numeric trajectory; samples on excluded loci are dropped
// with an event record.
numflow::Trajectory solution_map(const BacklundWord& w, const numflow::Trajectory& traj);

}  // namespace piii::backlund
