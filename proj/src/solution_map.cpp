#include "sturmkit/solution_map.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sturmkit/quadrature.hpp"

namespace sturmkit {

double SolutionMap::local_mass(double from, double to) const {
  if (from == to) return 0.0;
  QuadResult q = integrate_adaptive(
      [this](double t) {
        double v = u_(t);
        return 1.0 / (v * v);
      },
      from, to, rel_, 0.0);
  if (!q.tolerance_met)
    throw NumericError("mass integral could not be computed reliably near x=" +
                       std::to_string(0.5 * (from + to)));
  return q.value;
}

double SolutionMap::f(double x) const {
  double slack = 1e-12 * (1.0 + std::fabs(x));
  if (x < lo_ - slack || x > hi_ + slack)
    throw NumericError("x=" + std::to_string(x) + " outside the map window [" +
                       std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
  x = std::clamp(x, lo_, hi_);
  // Integrate from the nearest knot.
  auto it = std::lower_bound(knot_x_.begin(), knot_x_.end(), x);
  std::size_t j = it - knot_x_.begin();
  if (j == knot_x_.size()) --j;
  if (j > 0 && x - knot_x_[j - 1] < knot_x_[j] - x) --j;
  return knot_f_[j] + local_mass(knot_x_[j], x);
}

double SolutionMap::df(double x) const {
  double v = u_(x);
  if (!(v > 0)) throw HypothesisError("u must be positive inside the window");
  return 1.0 / (v * v);
}

double SolutionMap::f_increment(double x, double dx) const {
  return local_mass(x, x + dx);
}

double SolutionMap::inverse(double y) const {
  double ylo = knot_f_.front(), yhi = knot_f_.back();
  double slack = 1e-12 * (1.0 + std::fabs(y));
  if (y < ylo - slack || y > yhi + slack)
    throw NumericError("y=" + std::to_string(y) + " outside the map range [" +
                       std::to_string(ylo) + ", " + std::to_string(yhi) + "]");
  y = std::clamp(y, ylo, yhi);

  auto it = std::lower_bound(knot_f_.begin(), knot_f_.end(), y);
  std::size_t j = it - knot_f_.begin();
  if (j == knot_f_.size()) --j;
  if (j > 0) --j;  // bracket [j, j+1]
  double a = knot_x_[j], b = knot_x_[std::min(j + 1, knot_x_.size() - 1)];
  double fa = knot_f_[j] - y;
  if (fa > 0 || a == b) return a;

  // Safeguarded Newton on g(x) = f(x) - y, tracking f by local increments.
  double x = 0.5 * (a + b);
  double gx = fa + local_mass(a, x);
  for (int iter = 0; iter < 200; ++iter) {
    if (std::fabs(gx) <= 1e-13 * (1.0 + std::fabs(y))) return x;
    if (gx > 0)
      b = x;
    else
      a = x;
    double v = u_(x);
    double step = -gx * v * v;  // Newton: g' = 1/u^2
    double xn = x + step;
    if (!(xn > a && xn < b)) xn = 0.5 * (a + b);  // bisect when Newton escapes
    if (b - a < 1e-15 * (1.0 + std::fabs(x))) return x;
    gx += local_mass(x, xn);
    x = xn;
  }
  return x;
}

SolutionMap build_solution_map(std::function<double(double)> u, double lo, double hi,
                               double x0, double rel_tol) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw NumericError("map window must be a finite nonempty interval");
  if (!(lo <= x0 && x0 <= hi)) throw NumericError("base point must lie inside the window");

  SolutionMap m;
  m.u_ = std::move(u);
  m.lo_ = lo;
  m.hi_ = hi;
  m.x0_ = x0;
  m.rel_ = rel_tol;

  // Knots clustered geometrically toward both window edges, where 1/u^2 can
  // be steep; queries then only ever integrate short, well-resolved gaps.
  std::set<double> knots{lo, hi, x0};
  double span_l = x0 - lo, span_r = hi - x0;
  for (int j = 1; j <= 45; ++j) {
    double w = std::pow(0.5, j);
    if (span_l > 0) knots.insert(lo + span_l * w);
    if (span_r > 0) knots.insert(hi - span_r * w);
  }
  m.knot_x_.assign(knots.begin(), knots.end());

  for (double x : m.knot_x_) {
    double v = m.u_(x);
    if (!std::isfinite(v)) throw NumericError("u evaluated non-finite inside the window");
    if (!(v > 0)) throw HypothesisError("u must be positive on the window");
  }

  // Accumulate f at the knots from the anchor outward.
  std::size_t i0 =
      std::lower_bound(m.knot_x_.begin(), m.knot_x_.end(), x0) - m.knot_x_.begin();
  m.knot_f_.assign(m.knot_x_.size(), 0.0);
  double acc = 0.0;
  for (std::size_t j = i0; j + 1 < m.knot_x_.size(); ++j) {
    acc += m.local_mass(m.knot_x_[j], m.knot_x_[j + 1]);
    m.knot_f_[j + 1] = acc;
  }
  acc = 0.0;
  for (std::size_t j = i0; j > 0; --j) {
    acc -= m.local_mass(m.knot_x_[j - 1], m.knot_x_[j]);
    m.knot_f_[j - 1] = acc;
  }
  return m;
}

}  // namespace sturmkit
