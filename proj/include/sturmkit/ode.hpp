#pragma once

#include <functional>
#include <vector>

#include "sturmkit/errors.hpp"

namespace sturmkit {

struct OdeOptions {
  /// Used for both the absolute and relative component of the error norm.
  double tol = 1e-10;
  /// Budget of step attempts per sweep direction.
  long max_steps = 2'000'000;
};

/// One accepted integrator step, with endpoint values and second derivatives
/// for cubic Hermite reconstruction of u and u' anywhere inside.
struct StepRec {
  double x0, x1;
  double u0, du0, ddu0;
  double u1, du1, ddu1;
};

/// Numerical solution of u'' + p(x) u = 0 over the part of [a, b] that was
/// reachable from the anchor.  Steps are stored in ascending x order.
class Trajectory {
 public:
  double u(double x) const;
  double du(double x) const;

  /// Reached span (may be narrower than requested when a sweep stopped at
  /// the step-size floor, typically because p blows up toward an endpoint).
  double left() const { return left_; }
  double right() const { return right_; }
  bool left_complete() const { return left_complete_; }
  bool right_complete() const { return right_complete_; }
  double requested_left() const { return requested_left_; }
  double requested_right() const { return requested_right_; }

  double anchor_x() const { return anchor_x_; }
  const std::vector<StepRec>& steps() const { return steps_; }

 private:
  friend Trajectory solve_ivp(const std::function<double(double)>&, double, double, double,
                              double, double, const OdeOptions&);
  std::vector<StepRec> steps_;
  double anchor_x_ = 0.0, anchor_u_ = 0.0, anchor_du_ = 0.0;
  double left_ = 0.0, right_ = 0.0;
  double requested_left_ = 0.0, requested_right_ = 0.0;
  bool left_complete_ = true, right_complete_ = true;
};

/// Integrate u'' + p(x) u = 0 with u(x0) = u0, u'(x0) = du0 across [a, b]
/// (requires a <= x0 <= b; both finite).  Dormand-Prince 5(4) with adaptive
/// steps; a step is also rejected when the oscillation phase advances too far
/// for unambiguous zero counting.  Sweeps that cannot reach an endpoint stop
/// early and are marked incomplete instead of raising.
Trajectory solve_ivp(const std::function<double(double)>& p, double x0, double u0,
                     double du0, double a, double b, const OdeOptions& opts = {});

}  // namespace sturmkit
