#pragma once

#include <functional>

#include "sturmkit/errors.hpp"

namespace sturmkit {

/// Outcome of an adaptive integration.
struct QuadResult {
  double value = 0.0;
  /// Accumulated panel error estimates (parent-vs-children differences of
  /// accepted panels).
  double error_estimate = 0.0;
  long evaluations = 0;
  /// False when some panel had to be accepted at the subdivision width limit
  /// without meeting its tolerance share.
  bool tolerance_met = true;
};

/// Adaptive Gauss-Legendre integration over a finite interval.  A panel is
/// accepted when its parent-vs-children difference meets a tolerance share
/// proportional to the panel width, or a relative bound on the panel value.
/// Throws NumericError if the evaluation budget is exhausted or a bound is
/// non-finite, and propagates exceptions from the integrand.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-9, double abs_tol = 0.0);

/// Convenience wrapper returning just the value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-9, double abs_tol = 0.0);

}  // namespace sturmkit
