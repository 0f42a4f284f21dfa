#include "sturmkit/quadrature.hpp"

#include <array>
#include <cmath>
#include <string>

namespace sturmkit {
namespace {

constexpr int kPoints = 10;
constexpr int kMaxDepth = 64;
constexpr long kMaxEvaluations = 8'000'000;

struct Rule {
  std::array<double, kPoints> node;    // on [-1, 1]
  std::array<double, kPoints> weight;  // sums to 2
};

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// Nodes are the roots of P_n, found by Newton iteration from the Chebyshev
// initial guesses; weights follow from the derivative.
Rule build_rule() {
  Rule r;
  const int n = kPoints;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      double step = p / dp;
      x -= step;
      if (std::fabs(step) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    r.node[i] = x;
    r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const Rule& rule() {
  static const Rule r = build_rule();
  return r;
}

struct Worker {
  const std::function<double(double)>& f;
  double rel_tol;
  double abs_tol;
  double total_length;
  double whole_estimate = 0.0;
  long evaluations = 0;
  double error_estimate = 0.0;
  bool tolerance_met = true;

  double panel(double a, double b) {
    const Rule& r = rule();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      double x = mid + half * r.node[i];
      double y = f(x);
      if (!std::isfinite(y))
        throw NumericError("integrand evaluated to a non-finite value at x=" +
                           std::to_string(x));
      sum += r.weight[i] * y;
    }
    evaluations += kPoints;
    if (evaluations > kMaxEvaluations)
      throw NumericError("quadrature evaluation budget exhausted");
    return half * sum;
  }

  double refine(double a, double b, double coarse, int depth) {
    double mid = 0.5 * (a + b);
    double left = panel(a, mid);
    double right = panel(mid, b);
    double fine = left + right;
    double diff = std::fabs(fine - coarse);
    double share = (b - a) / total_length;
    double allow = std::max({rel_tol * std::fabs(fine),
                             rel_tol * std::fabs(whole_estimate) * share,
                             abs_tol * share});
    if (diff <= allow) {
      error_estimate += diff;
      return fine;
    }
    if (depth >= kMaxDepth || (b - a) < 1e-15 * (1.0 + std::fabs(a) + std::fabs(b))) {
      error_estimate += diff;
      tolerance_met = false;
      return fine;
    }
    return refine(a, mid, left, depth + 1) + refine(mid, b, right, depth + 1);
  }
};

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw NumericError("integration bounds must be finite");
  if (a == b) return {0.0, 0.0, 0, true};
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  Worker w{f, rel_tol, abs_tol, b - a};
  double coarse = w.panel(a, b);
  w.whole_estimate = coarse;
  double value = w.refine(a, b, coarse, 0);
  return {sign * value, w.error_estimate, w.evaluations, w.tolerance_met};
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
  return integrate_adaptive(f, a, b, rel_tol, abs_tol).value;
}

}  // namespace sturmkit
