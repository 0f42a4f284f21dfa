#pragma once

#include <functional>
#include <string>

#include "sturmkit/errors.hpp"
#include "sturmkit/expr.hpp"
#include "sturmkit/principality.hpp"
#include "sturmkit/solution_map.hpp"

namespace sturmkit {

/// Which disconjugate generator the coefficient-raising construction uses,
/// keyed by which reciprocal-square masses of the base solution are finite.
enum class GeneratorCase { both_finite, left_finite, right_finite };
const char* to_string(GeneratorCase c);

/// A strictly increasing map g on the open range (-L1, L2) of the base
/// coordinate, with strictly positive Schwarzian derivative Sg, together with
/// the disconjugacy witness behind it: a positive solution w of
/// w'' + R w = 0 with R > 0 on the same range.  All expressions are in the
/// range variable (Expr's `x` plays the role of the coordinate t).
struct Generator {
  GeneratorCase tag = GeneratorCase::both_finite;
  Expr g;
  Expr Sg;
  Expr witness_w;
  Expr witness_R;
  double t_lo = 0.0;  // -L1 (-inf allowed when the tag permits)
  double t_hi = 0.0;  // L2 (+inf allowed when the tag permits)
};

/// Build the generator for the given masses.  The tag dictates which masses
/// must be finite: both_finite needs both, left_finite needs only L1,
/// right_finite only L2.  Finite masses must be strictly positive.
/// The returned expressions are validated by sampling: g' > 0, Sg > 0, and
/// the witness residual |w'' + R w| stays below 1e-8 of its local scale.
Generator make_generator(GeneratorCase tag, double L1, double L2);

/// The coordinate map of a positive solution: f(x) = signed reciprocal-square
/// mass from x0, realized numerically on a truncated window, together with
/// the extrapolated full masses toward the true ends and their verdicts.
struct SchwarzianMap {
  SolutionMap map;
  double L1 = 0.0;  // left mass (+inf when divergent, NaN when undecided)
  double L2 = 0.0;  // right mass
  Verdict left = Verdict::undecided;
  Verdict right = Verdict::undecided;
  std::function<double(double)> u;
  std::function<double(double)> p;  // coefficient of the base equation; may be empty
};

struct ConstructOptions {
  LadderOptions ladder{};
  double edge_margin = 1e-4;      // stand-off from finite interval ends
  double infinite_window = 64.0;  // half-width factor toward infinite ends
  double map_rel = 1e-12;         // mass quadrature tolerance for the map
  int grid_points = 240;          // verification grid size per parametrization
  double residual_tol = 1e-6;     // normalized |v'' + P v| allowance
};

/// Classify the endpoint masses of u over (a, b) and realize its coordinate
/// map on the truncated window.  When p is supplied it is carried along so
/// that the Schwarzian of the map can use the exact identity (see below).
SchwarzianMap make_schwarzian_map(std::function<double(double)> u, double a, double b,
                                  double x0, const ConstructOptions& opts = {},
                                  std::function<double(double)> p = {});

/// Schwarzian derivative of a closed-form map by exact symbolic
/// differentiation:  Sf = f'''/f' - (3/2)(f''/f')^2.
/// Throws DomainError where f' vanishes.
double schwarzian(const Expr& f, double x, const ParamBinding& params = {});

/// Schwarzian derivative of a solution coordinate map.  When the map carries
/// the coefficient p of its base equation the exact identity Sf = 2p applies;
/// otherwise the value comes from finite differences of log f', whose
/// derivative data the map provides in closed form.
double schwarzian(const SchwarzianMap& f, double x);

/// The composition law: S(g o f)(x) = Sf(x) + Sg(f(x)) f'(x)^2.
/// Throws DomainError when f(x) leaves the generator's range.
double compose_schwarzian(const Generator& g, const SchwarzianMap& f, double x);

/// A constructed pair (P, v) with P strictly above the base coefficient and
/// v a positive solution of v'' + P v = 0, demonstrating that the two-zero
/// conclusion fails for the raised equation.  All margins and residuals are
/// measured on a verification grid over the truncated window.
struct CounterexampleResult {
  std::string kind;  // "schwarzian" | "chuaqui" | "steinmetz"
  GeneratorCase generator_case = GeneratorCase::both_finite;  // schwarzian route
  std::function<double(double)> P;
  std::function<double(double)> v;
  double L1 = 0.0, L2 = 0.0;  // masses used (inf on divergent sides)
  double window_lo = 0.0, window_hi = 0.0;
  double k = 0.0;          // cosine-route frequency (0 elsewhere)
  double c = 0.0;          // power-product mixing coefficient (0 elsewhere)
  double alpha = 0.0;      // power-product exponent (0 elsewhere)
  double safety = 0.0;     // safety factor applied to a smallness bound (0 if none)
  double residual_max = 0.0;       // max |v'' + P v| / (1 + |P v|) over the grid
  double positivity_margin = 0.0;  // min v over the grid
  double ordering_margin = 0.0;    // min (P - p) over the grid
  std::string detail;
};

/// Raise the coefficient through a disconjugate generator composed with the
/// coordinate map of u: P = p + (1/2) Sg(f) f'^2 and v = u / sqrt(g'(f)).
/// The generator case follows the endpoint mass pattern in `report`.
/// Refuses (RefusalError) when both masses diverge -- then a positive
/// solution w of w'' + R w = 0 with R > 0 would have to exist on the whole
/// line, which concavity forbids -- or when any endpoint is undecided.
CounterexampleResult build_comparison_counterexample(
    const std::function<double(double)>& p, const std::function<double(double)>& u, double a,
    double b, double x0, const PrincipalityReport& report, const ConstructOptions& opts = {});

/// A combination c1 u + c2 u f (c2 != 0, hence independent of u) that stays
/// positive across the whole interval, demonstrating that zero separation
/// fails when some endpoint mass is finite.
struct SeparationCounterexample {
  double c1 = 1.0, c2 = 0.0;
  std::function<double(double)> v;
  double L1 = 0.0, L2 = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  double positivity_margin = 0.0;  // min v/u over the grid (about 1/2 by design)
  std::string detail;
};

/// Pick c2/c1 in the admissible open interval (-1/L2, 1/L1): the midpoint of
/// the finite side when one mass diverges, 1/(2(L1+L2)) when both are finite.
/// Refuses when both masses diverge (separation then genuinely holds) or when
/// any endpoint is undecided.
SeparationCounterexample build_separation_counterexample(
    const std::function<double(double)>& u, double a, double b, double x0,
    const PrincipalityReport& report, const ConstructOptions& opts = {});

/// The cosine construction: P = p + k^2/u^4 and v = u cos(k f), positive
/// because |k f| stays below pi/2 when k = 0.9 (pi/2) / max(L1, L2).
/// Requires both masses finite; refuses otherwise.
CounterexampleResult chuaqui_counterexample(const std::function<double(double)>& p,
                                            const std::function<double(double)>& u, double a,
                                            double b, double x0,
                                            const PrincipalityReport& report,
                                            const ConstructOptions& opts = {});

/// The power-product construction: with u2 = u1 (1 - c f) a second positive
/// solution (Wronskian exactly -c), v = u1^alpha u2^(1-alpha) solves
/// v'' + P v = 0 with P = p + alpha(1-alpha) c^2 / (u1^2 u2^2).
/// Requires 0 < alpha < 1 and c != 0; u2 must keep its sign through the end
/// of the interval on the side where c f grows, which bounds |c| by the
/// reciprocal of that side's mass (HypothesisError otherwise, reporting the
/// first sign change).  Refuses when both masses diverge.
CounterexampleResult steinmetz_counterexample(const std::function<double(double)>& p,
                                              const std::function<double(double)>& u1, double a,
                                              double b, double x0,
                                              const PrincipalityReport& report, double alpha,
                                              double c, const ConstructOptions& opts = {});

/// Same, choosing c automatically: 0.9 of the largest admissible magnitude,
/// positive when the right mass is finite, negative otherwise.
CounterexampleResult steinmetz_counterexample(const std::function<double(double)>& p,
                                              const std::function<double(double)>& u1, double a,
                                              double b, double x0,
                                              const PrincipalityReport& report, double alpha,
                                              const ConstructOptions& opts = {});

struct ConvexityReport {
  bool concave = false;
  double min_second_difference = 0.0;
  double max_second_difference = 0.0;
  int grid_points = 0;
};

/// Concavity of the comparison ratio in the base coordinate: with y = f(x),
/// the ratio v/u as a function of y has second derivative -(P - p) u^3 v, so
/// it must be concave wherever u, v > 0 and P >= p.  Checks second divided
/// differences of v/u on a uniform grid in y against the +1e-8 allowance.
ConvexityReport relative_convexity_check(const std::function<double(double)>& u,
                                         const std::function<double(double)>& v,
                                         const std::function<double(double)>& p,
                                         const std::function<double(double)>& P, double a,
                                         double b, double x0, const ConstructOptions& opts = {});

}  // namespace sturmkit
