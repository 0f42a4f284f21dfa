#pragma once

#include <functional>
#include <vector>

#include "sturmkit/errors.hpp"

namespace sturmkit {

/// The increasing map f(x): the signed reciprocal-square mass of u from a
/// base point, restricted to a truncated window [lo, hi] on which u is
/// positive.  Mass values are anchored at precomputed knots (clustered toward
/// the window edges, where 1/u^2 is steep) and every query integrates only
/// the short gap from the nearest knot, so there is no interpolation error
/// and no cancellation when differencing nearby arguments.
class SolutionMap {
 public:
  SolutionMap() = default;

  double x0() const { return x0_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double f_lo() const { return knot_f_.front(); }
  double f_hi() const { return knot_f_.back(); }

  /// f(x) for x in [lo, hi].
  double f(double x) const;
  /// f'(x) = 1/u(x)^2.
  double df(double x) const;
  /// f(x + dx) - f(x) by local quadrature, accurate even for tiny dx.
  double f_increment(double x, double dx) const;
  /// The unique x with f(x) = y, for y in [f(lo), f(hi)].
  double inverse(double y) const;

 private:
  friend SolutionMap build_solution_map(std::function<double(double)> u, double lo,
                                        double hi, double x0, double rel_tol);
  std::function<double(double)> u_;
  double x0_ = 0.0, lo_ = 0.0, hi_ = 0.0;
  double rel_ = 1e-12;
  std::vector<double> knot_x_;  // ascending, first == lo, last == hi
  std::vector<double> knot_f_;  // f at the knots

  double local_mass(double from, double to) const;
};

/// Build the map for u over [lo, hi] anchored at x0 (lo <= x0 <= hi).
/// Requires u > 0 on the window; a sign change surfaces as HypothesisError
/// (when seen at a knot) or NumericError (when the mass integral blows up).
SolutionMap build_solution_map(std::function<double(double)> u, double lo, double hi,
                               double x0, double rel_tol = 1e-12);

}  // namespace sturmkit
