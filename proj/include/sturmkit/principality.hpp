#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "sturmkit/errors.hpp"
#include "sturmkit/ode.hpp"

namespace sturmkit {

enum class Verdict { finite, divergent, undecided };
enum class GrowthModel { none, power, logarithmic };
enum class End { left, right };

const char* to_string(Verdict v);
const char* to_string(GrowthModel m);
const char* to_string(End e);

/// Tuning for the truncation ladder and its classifier.
struct LadderOptions {
  int rungs = 8;
  double eps_ratio = 0.25;      // finite endpoint: truncation gap shrink per rung
  double t_factor = 2.0;        // infinite endpoint: window growth per rung
  double eps0_cap = 0.1;        // largest starting truncation gap
  double eps0 = -1.0;           // <0: derived from the interval
  double quad_rel = 1e-9;       // relative tolerance per rung integral
  double exponent_band = 0.02;  // |exponent| below this: try the log model
  double log_rms = 1e-3;        // relative RMS acceptance for the log model
  double fast_shrink = 0.8;     // all increment ratios below: finite
  double fast_grow = 1.25;      // all increment ratios above: divergent
  OdeOptions ode;               // used by principal_ratio_check
};

/// Classification of the reciprocal-square mass of u toward one endpoint:
/// whether the integral of 1/u^2 from x0 to that endpoint converges.
struct EndpointReport {
  End end = End::right;
  Verdict verdict = Verdict::undecided;
  GrowthModel model = GrowthModel::none;
  /// Growth exponent of the truncated mass (power model); 0 for the log
  /// model; +inf when the ladder overflowed outright.
  double exponent = 0.0;
  /// Extrapolated total mass when finite; +inf when divergent; NaN otherwise.
  double value = 0.0;
  /// Misfit of the selected growth model on the tail rungs (scatter of the
  /// increment log-ratios, or the linear-fit RMS for the logarithmic model);
  /// NaN when no model was selected.
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
  /// The verdict was reproduced from a second base point.
  bool base_point_invariant = true;
  std::vector<double> cuts;  // truncation points, nearest endpoint last
  std::vector<double> mass;  // cumulative truncated mass per cut
};

struct PrincipalityReport {
  EndpointReport left, right;
  bool principal = false;  // both endpoint masses divergent
  bool decided = true;     // no endpoint came back undecided
};

/// Classify one endpoint (bound may be +-inf).  u must be positive on the
/// open interval between x0 and the endpoint; a zero of u in that range makes
/// a rung integral blow up, which surfaces as NumericError.
EndpointReport classify_endpoint_mass(const std::function<double(double)>& u, double bound,
                                      End end, double x0, const LadderOptions& opts = {});

/// Classify both endpoints of (a, b) and report whether u satisfies the
/// principal boundary condition (infinite reciprocal-square mass) at both.
PrincipalityReport classify_principality(const std::function<double(double)>& u, double a,
                                         double b, double x0,
                                         const LadderOptions& opts = {});

/// Independent cross-check of principality at one endpoint through a second
/// solution: with uhat(x0) = u(x0), uhat'(x0) = u'(x0) + 1/u(x0), the ratio
/// uhat/u equals 1 plus the reciprocal-square mass, so u is principal at the
/// endpoint exactly when |uhat/u - 1| grows without bound (verdict divergent,
/// equivalently u/uhat tends to zero).
struct RatioCheckReport {
  Verdict verdict = Verdict::undecided;
  GrowthModel model = GrowthModel::none;
  double exponent = 0.0;
  bool ratio_monotone = false;  // sampled |uhat/u - 1| was nondecreasing
  bool window_truncated = false;  // the sweep stopped before the deepest cut
  std::vector<double> cuts;
  std::vector<double> ratio;  // |uhat/u - 1| at each cut
};

RatioCheckReport principal_ratio_check(const std::function<double(double)>& p,
                                       const std::function<double(double)>& u, double x0,
                                       double u0, double du0, double bound, End end,
                                       const LadderOptions& opts = {});

}  // namespace sturmkit
