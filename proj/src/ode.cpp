#include "sturmkit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sturmkit {
namespace {

struct State {
  double u, du;
};

inline State deriv(double p, const State& y) { return {y.du, -p * y.u}; }

inline bool finite(const State& y) { return std::isfinite(y.u) && std::isfinite(y.du); }

// Quintic two-point Hermite on [0,1] from values, first and second
// derivatives at both ends (slopes scaled by the step width h).  Its O(h^6)
// interior error matches the fifth-order stepper, so dense queries are as
// accurate as the step endpoints.
inline double hermite5(double t, double h, double y0, double dy0, double ddy0, double y1,
                       double dy1, double ddy1) {
  double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  double a0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  double a1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  double a2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  double b0 = 10 * t3 - 15 * t4 + 6 * t5;
  double b1 = -4 * t3 + 7 * t4 - 3 * t5;
  double b2 = 0.5 * (t3 - 2 * t4 + t5);
  return a0 * y0 + a1 * h * dy0 + a2 * h * h * ddy0 + b0 * y1 + b1 * h * dy1 +
         b2 * h * h * ddy1;
}

// d/dx of hermite5 (chain rule through t = (x - x0)/h).
inline double hermite5_deriv(double t, double h, double y0, double dy0, double ddy0,
                             double y1, double dy1, double ddy1) {
  double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  double da0 = -30 * t2 + 60 * t3 - 30 * t4;
  double da1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  double da2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  double db0 = 30 * t2 - 60 * t3 + 30 * t4;
  double db1 = -12 * t2 + 28 * t3 - 15 * t4;
  double db2 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  return (da0 * y0 + da1 * h * dy0 + da2 * h * h * ddy0 + db0 * y1 + db1 * h * dy1 +
          db2 * h * h * ddy1) /
         h;
}

inline double step_u(const StepRec& s, double t) {
  return hermite5(t, s.x1 - s.x0, s.u0, s.du0, s.ddu0, s.u1, s.du1, s.ddu1);
}

inline double step_du(const StepRec& s, double t) {
  return hermite5_deriv(t, s.x1 - s.x0, s.u0, s.du0, s.ddu0, s.u1, s.du1, s.ddu1);
}

// The oscillation phase atan2(u, u') must advance less than 0.45*pi between
// quarter points and 0.9*pi across the whole step, so that zero counting by
// phase unwrapping is unambiguous.
bool phase_ok(const StepRec& s) {
  double prev = std::atan2(s.u0, s.du0);
  double total = 0.0;
  for (int i = 1; i <= 4; ++i) {
    double t = 0.25 * i;
    double uu = step_u(s, t);
    double dd = step_du(s, t);
    double th = std::atan2(uu, dd);
    double delta = std::remainder(th - prev, 2 * M_PI);
    if (std::fabs(delta) >= 0.45 * M_PI) return false;
    total += std::fabs(delta);
    prev = th;
  }
  return total < 0.9 * M_PI;
}

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

inline State axpy(const State& y, double h, double c1, const State& k1, double c2 = 0,
                  const State& k2 = {}, double c3 = 0, const State& k3 = {}, double c4 = 0,
                  const State& k4 = {}, double c5 = 0, const State& k5 = {}, double c6 = 0,
                  const State& k6 = {}) {
  return {y.u + h * (c1 * k1.u + c2 * k2.u + c3 * k3.u + c4 * k4.u + c5 * k5.u + c6 * k6.u),
          y.du +
              h * (c1 * k1.du + c2 * k2.du + c3 * k3.du + c4 * k4.du + c5 * k5.du +
                   c6 * k6.du)};
}

void sweep(const std::function<double(double)>& p, double x0, State y, double target,
           const OdeOptions& opts, std::vector<StepRec>& out, bool& complete,
           double& reached) {
  complete = true;
  reached = x0;
  if (target == x0) return;
  double dir = target > x0 ? 1.0 : -1.0;
  double x = x0;
  double p0 = p(x);
  State k1 = deriv(p0, y);
  double span = std::fabs(target - x0);
  double h = dir * std::min({span, 0.01 / std::sqrt(1.0 + std::fabs(p0)),
                             0.1 * (1.0 + std::fabs(x0))});
  long attempts = 0;
  while (true) {
    if (++attempts > opts.max_steps)
      throw NumericError("step budget exhausted before reaching the target");
    if ((target - x) * dir <= 0.0) break;
    bool last = false;
    if ((x + h - target) * dir >= 0.0) {
      h = target - x;
      last = true;
    }
    if (!last && std::fabs(h) < 1e-13 * (1.0 + std::fabs(x))) {
      complete = false;
      break;
    }

    State k2 = deriv(p(x + kA21 * h), axpy(y, h, kA21, k1));
    State k3 = deriv(p(x + 0.3 * h), axpy(y, h, kA31, k1, kA32, k2));
    State k4 = deriv(p(x + 0.8 * h), axpy(y, h, kA41, k1, kA42, k2, kA43, k3));
    State k5 =
        deriv(p(x + 8.0 / 9.0 * h), axpy(y, h, kA51, k1, kA52, k2, kA53, k3, kA54, k4));
    State k6 =
        deriv(p(x + h), axpy(y, h, kA61, k1, kA62, k2, kA63, k3, kA64, k4, kA65, k5));
    State y5 = axpy(y, h, kB1, k1, 0.0, k2, kB3, k3, kB4, k4, kB5, k5, kB6, k6);
    State k7 = deriv(p(x + h), y5);

    bool ok = finite(y5) && finite(k2) && finite(k3) && finite(k4) && finite(k5) &&
              finite(k6) && finite(k7);
    double err = std::numeric_limits<double>::infinity();
    StepRec rec{};
    if (ok) {
      double eu = h * (kE1 * k1.u + kE3 * k3.u + kE4 * k4.u + kE5 * k5.u + kE6 * k6.u +
                       kE7 * k7.u);
      double edu = h * (kE1 * k1.du + kE3 * k3.du + kE4 * k4.du + kE5 * k5.du +
                        kE6 * k6.du + kE7 * k7.du);
      double su = opts.tol * (1.0 + std::max(std::fabs(y.u), std::fabs(y5.u)));
      double sdu = opts.tol * (1.0 + std::max(std::fabs(y.du), std::fabs(y5.du)));
      err = std::sqrt(0.5 * ((eu / su) * (eu / su) + (edu / sdu) * (edu / sdu)));
      rec = StepRec{x, x + h, y.u, y.du, k1.du, y5.u, y5.du, k7.du};
      ok = err <= 1.0 && phase_ok(rec);
    }

    if (ok) {
      out.push_back(rec);
      x = x + h;
      reached = x;
      y = y5;
      k1 = k7;
      if (last || (target - x) * dir <= 0.0) break;
      double fac = err > 1e-300 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      double fac = 0.5;
      if (std::isfinite(err) && err > 1.0) fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      h *= fac;
    }
  }
}

}  // namespace

double Trajectory::u(double x) const {
  if (steps_.empty()) {
    if (x == anchor_x_) return anchor_u_;
    throw NumericError("x outside the computed span");
  }
  double slack = 1e-9 * (1.0 + std::fabs(x));
  if (x < left_ - slack || x > right_ + slack)
    throw NumericError("x=" + std::to_string(x) + " outside the computed span [" +
                       std::to_string(left_) + ", " + std::to_string(right_) + "]");
  x = std::clamp(x, left_, right_);
  auto it = std::lower_bound(steps_.begin(), steps_.end(), x,
                             [](const StepRec& s, double v) { return s.x1 < v; });
  if (it == steps_.end()) --it;
  const StepRec& s = *it;
  double h = s.x1 - s.x0;
  if (h == 0.0) return s.u0;
  return step_u(s, (x - s.x0) / h);
}

double Trajectory::du(double x) const {
  if (steps_.empty()) {
    if (x == anchor_x_) return anchor_du_;
    throw NumericError("x outside the computed span");
  }
  double slack = 1e-9 * (1.0 + std::fabs(x));
  if (x < left_ - slack || x > right_ + slack)
    throw NumericError("x=" + std::to_string(x) + " outside the computed span [" +
                       std::to_string(left_) + ", " + std::to_string(right_) + "]");
  x = std::clamp(x, left_, right_);
  auto it = std::lower_bound(steps_.begin(), steps_.end(), x,
                             [](const StepRec& s, double v) { return s.x1 < v; });
  if (it == steps_.end()) --it;
  const StepRec& s = *it;
  double h = s.x1 - s.x0;
  if (h == 0.0) return s.du0;
  return step_du(s, (x - s.x0) / h);
}

Trajectory solve_ivp(const std::function<double(double)>& p, double x0, double u0,
                     double du0, double a, double b, const OdeOptions& opts) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(x0))
    throw NumericError("the integration window and anchor must be finite");
  if (!(a <= x0 && x0 <= b))
    throw NumericError("anchor x0 must lie inside the integration window");
  if (!std::isfinite(u0) || !std::isfinite(du0))
    throw NumericError("initial values must be finite");

  Trajectory t;
  t.anchor_x_ = x0;
  t.anchor_u_ = u0;
  t.anchor_du_ = du0;
  t.requested_left_ = a;
  t.requested_right_ = b;

  std::vector<StepRec> left_steps, right_steps;
  sweep(p, x0, {u0, du0}, a, opts, left_steps, t.left_complete_, t.left_);
  sweep(p, x0, {u0, du0}, b, opts, right_steps, t.right_complete_, t.right_);

  // Left-sweep steps run right-to-left; normalize and reverse.
  for (auto& s : left_steps) {
    std::swap(s.x0, s.x1);
    std::swap(s.u0, s.u1);
    std::swap(s.du0, s.du1);
    std::swap(s.ddu0, s.ddu1);
  }
  std::reverse(left_steps.begin(), left_steps.end());
  t.steps_ = std::move(left_steps);
  t.steps_.insert(t.steps_.end(), right_steps.begin(), right_steps.end());
  return t;
}

}  // namespace sturmkit
