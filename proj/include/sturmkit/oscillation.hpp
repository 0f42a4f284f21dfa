#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sturmkit/errors.hpp"
#include "sturmkit/ode.hpp"
#include "sturmkit/principality.hpp"

namespace sturmkit {

/// Result of counting sign changes of a solution through its oscillation
/// phase.  `reliable` is false when the phase advanced too far between two
/// sample points for the count to be unambiguous; callers should then
/// re-integrate the offending combination on its own step sequence.
struct ZeroCount {
  long count = 0;
  bool reliable = true;
  double phase_start = 0.0;
  double phase_end = 0.0;
};

/// Count the zeros of the trajectory's solution in (lo, hi].  The count walks
/// the continuous phase atan2(u, u') along the accepted steps; zeros are
/// exactly the upward crossings of integer multiples of pi.
ZeroCount count_zeros(const Trajectory& traj, double lo, double hi);

/// Zero count for the combination base + ratio * companion, where both
/// trajectories solve the same equation.  The combination is evaluated
/// through the stored dense output, so no extra integration is needed, but
/// the result may come back unreliable when the combination oscillates
/// faster than either ingredient was sampled.
ZeroCount count_zeros_combo(const Trajectory& base, const Trajectory& companion, double ratio,
                            double lo, double hi);

/// Locate the zeros counted by count_zeros, in ascending order.  Each zero is
/// bracketed by a sign change and bisected to full precision of the dense
/// output.
std::vector<double> locate_zeros(const Trajectory& traj, double lo, double hi);

enum class CheckStatus { pass, fail_witness, inconclusive };
const char* to_string(CheckStatus s);

/// Boundary certificate for one more sign change beyond a window edge.  With
/// sigma the sign of v at the edge, A = sigma*v/u and B the oriented Wronskian
/// sigma*(v u' - u v') (negated at the left edge): if B > 0 and the
/// reciprocal-square mass of u from the edge to the endpoint either diverges
/// or exceeds A/B, then v/u is driven through zero beyond the edge, so v must
/// vanish there even though no grid point can see it.
struct TailCertificate {
  bool certified = false;   // one sign change beyond the edge is guaranteed
  bool borderline = false;  // too close to call either way; blocks witness claims
  double boundary_ratio = 0.0;  // A: sigma * v/u at the window edge
  double boundary_flux = 0.0;   // B: oriented Wronskian at the window edge
  Verdict tail_verdict = Verdict::undecided;  // mass of u from edge to endpoint
  double tail_mass = std::numeric_limits<double>::quiet_NaN();  // when finite
};

/// Inputs for the comparison check: a base equation u'' + p u = 0 with a
/// known positive solution u on (a, b), and a second coefficient P >= p.
struct ComparisonInput {
  std::function<double(double)> p;   // base coefficient
  std::function<double(double)> P;   // comparison coefficient, nowhere below p
  std::function<double(double)> u;   // positive solution of the base equation
  std::function<double(double)> du;  // derivative of u
  double a = 0.0, b = 0.0;           // interval ends; either may be infinite
  double x0 = 0.0;                   // matching point for the compared solution
};

struct ComparisonOptions {
  OdeOptions ode{};                // integrator settings for the compared solutions
  double edge_margin = 1e-4;       // window offset from finite interval ends
  double infinite_window = 64.0;   // window half-width factor for infinite ends
  int hypothesis_samples = 10000;  // coefficient-ordering sample count
  int residual_samples = 64;       // sample count for the does-u-solve-it check
  int sweep_magnitudes = 61;       // ratio magnitudes per sign in the witness sweep
  LadderOptions ladder{};          // endpoint mass classification settings
};

/// Verdict of the comparison check.  pass: the solution of the second
/// equation matched to u at x0 was shown to change sign at least twice
/// (counted sign changes in the window plus certified ones beyond the
/// edges).  fail_witness: some solution of the second equation robustly has
/// fewer than two sign changes, so the two-zero conclusion fails for this
/// input (the expected outcome when u is not principal at both ends).
/// inconclusive: neither could be established.
struct ComparisonReport {
  CheckStatus status = CheckStatus::inconclusive;
  double window_lo = 0.0, window_hi = 0.0;
  // True when the usable range fell short of the window: either the
  // integration stopped early, or the trajectory sank below its accumulated
  // error envelope and its sign stopped being data before the edge.
  bool window_truncated = false;
  long matched_zero_count = 0;    // sign changes of the matched solution in-window
  std::vector<double> matched_zeros;
  TailCertificate left_tail, right_tail;
  long established = 0;  // matched in-window count plus certified tail zeros
  bool witness_found = false;
  double witness_ratio = 0.0;   // companion/base mix of the witness (0: matched)
  long witness_zero_count = 0;  // total sign changes established for the witness
  std::string detail;
};

ComparisonReport check_comparison(const ComparisonInput& in, const ComparisonOptions& opts = {});

struct SeparationOptions {
  double edge_margin = 1e-4;       // window offset from finite interval ends
  double infinite_window = 64.0;   // window half-width factor for infinite ends
  int hypothesis_samples = 10000;  // positivity sample count
  int sweep_magnitudes = 61;       // ratio magnitudes per sign in the witness sweep
  double map_rel = 1e-12;          // mass-map quadrature tolerance
  LadderOptions ladder{};          // endpoint mass classification settings
};

/// Verdict of the separation check for a positive solution u of some
/// second-order equation on (a, b).  Checked property: every solution
/// independent of u changes sign in (a, b).  Solutions are u times an affine
/// function of the reciprocal-square mass map f, so the property holds
/// exactly when f covers all of the real line, i.e. when the mass of u
/// diverges at both ends.  pass: both endpoint masses classified divergent
/// (with sample zeros of independent combinations exhibited).  fail_witness:
/// a combination c1*u + c2*u*f was found whose root -c1/c2 lies outside the
/// extrapolated range of f, so it never vanishes.  inconclusive: an endpoint
/// classification came back undecided.
struct SeparationReport {
  CheckStatus status = CheckStatus::inconclusive;
  double window_lo = 0.0, window_hi = 0.0;
  PrincipalityReport principality;
  std::vector<double> sample_zeros;  // exhibited zeros of independent combinations
  bool witness_found = false;
  double witness_c1 = 0.0, witness_c2 = 0.0;
  double witness_root = std::numeric_limits<double>::quiet_NaN();  // -c1/c2
  std::string detail;
};

SeparationReport check_separation(const std::function<double(double)>& u, double a, double b,
                                  double x0, const SeparationOptions& opts = {});

}  // namespace sturmkit
