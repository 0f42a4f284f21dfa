#include "sturmkit/construct.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

namespace sturmkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

using Fn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Windows, screens, verification grids
// ---------------------------------------------------------------------------

double window_edge(double bound, double x0, End end, double margin, double inf_factor) {
  double dir = end == End::right ? 1.0 : -1.0;
  if (std::isfinite(bound)) {
    double e = bound - dir * margin;
    if (dir * (e - x0) <= 0.0)
      throw UsageError("window margin leaves no room between the base point and the end " +
                       fmt(bound));
    return e;
  }
  return x0 + dir * inf_factor * std::max(1.0, std::abs(x0));
}

struct Window {
  double lo, hi;
};

Window make_window(double a, double b, double x0, const ConstructOptions& opts) {
  if (!(a < b)) throw UsageError("the interval is empty: a = " + fmt(a) + ", b = " + fmt(b));
  if (!std::isfinite(x0) || !(a < x0 && x0 < b))
    throw UsageError("the base point x0 = " + fmt(x0) + " must lie strictly inside the interval");
  return {window_edge(a, x0, End::left, opts.edge_margin, opts.infinite_window),
          window_edge(b, x0, End::right, opts.edge_margin, opts.infinite_window)};
}

double mass_of(const EndpointReport& r) {
  if (r.verdict == Verdict::finite) return r.value;
  if (r.verdict == Verdict::divergent) return kInf;
  return std::numeric_limits<double>::quiet_NaN();
}

std::string end_diagnostics(const EndpointReport& r) {
  std::string s = std::string(to_string(r.end)) + " endpoint mass is " + to_string(r.verdict);
  s += std::string(" (growth model ") + to_string(r.model) + ", exponent " + fmt(r.exponent) + ")";
  return s;
}

void refuse_undecided(const PrincipalityReport& rep) {
  if (rep.left.verdict == Verdict::undecided)
    throw RefusalError("cannot certify the endpoint masses: " + end_diagnostics(rep.left));
  if (rep.right.verdict == Verdict::undecided)
    throw RefusalError("cannot certify the endpoint masses: " + end_diagnostics(rep.right));
}

// The base pair must actually solve u'' + p u = 0; checked by a high-order
// finite-difference residual at interior probe points.
void screen_solves(const Fn& p, const Fn& u, double lo, double hi) {
  double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int j = 0; j < 32; ++j) {
    double x = mid + 0.8 * half * std::cos(kPi * (j + 0.5) / 32.0);
    double dist = std::min(x - lo, hi - x);
    double h = std::min(1e-3 * (1.0 + std::abs(x)), 0.2 * dist);
    double d2 =
        (-u(x + 2 * h) + 16 * u(x + h) - 30 * u(x) + 16 * u(x - h) - u(x - 2 * h)) / (12 * h * h);
    double pu = p(x) * u(x);
    if (!(std::abs(d2 + pu) <= 1e-4 * (1.0 + std::abs(pu))))
      throw HypothesisError("the base function does not solve its stated equation near x = " +
                            fmt(x) + " (residual " + fmt(d2 + pu) + ")");
  }
}

// Sample points for margin and residual checks: a uniform grid in x plus the
// pullback of a uniform grid in the map coordinate, which concentrates points
// where the mass accumulates fastest.
std::vector<double> verification_grid(const SolutionMap& map, int n) {
  double lo = map.lo(), hi = map.hi();
  double w = hi - lo;
  double xa = lo + 1e-3 * w, xb = hi - 1e-3 * w;
  int m = std::max(8, n / 2);
  std::vector<double> g;
  g.reserve(2 * static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) g.push_back(xa + (xb - xa) * i / (m - 1.0));
  double ya = map.f(xa), yb = map.f(xb);
  for (int i = 0; i < m; ++i) g.push_back(map.inverse(ya + (yb - ya) * i / (m - 1.0)));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end(),
                      [](double s, double t) { return std::abs(s - t) <= 1e-12 * (1.0 + std::abs(s)); }),
          g.end());
  return g;
}

// Five-point finite-difference residual of v'' + P v at x, normalized by the
// local scale of the equation.  The step is refined through a short ladder:
// when the solution has steep high derivatives (a power singularity just past
// the interval, say) the first step's truncation error masquerades as a
// residual, and halving the step shrinks it by 16x per rung; a genuinely
// nonzero residual is step-independent, so the smallest estimate is honest
// either way.
double fd_residual(const Fn& v, const Fn& P, double x, double lo, double hi, double tol) {
  double dist = std::min(x - lo, hi - x);
  double h = std::min(5e-3 * (1.0 + std::abs(x)), 0.2 * dist);
  double Pv = P(x) * v(x);
  double best = kInf;
  for (int rung = 0; rung < 5; ++rung, h *= 0.5) {
    double d2 = (-v(x + 2 * h) + 16 * v(x + h) - 30 * v(x) + 16 * v(x - h) - v(x - 2 * h)) /
                (12 * h * h);
    best = std::min(best, std::abs(d2 + Pv) / (1.0 + std::abs(Pv)));
    if (best <= 0.125 * tol) break;
  }
  return best;
}

// Measure margins and the residual over the grid and reject silently broken
// constructions.  All three checks are redundant for a correct build; they
// exist so that a wrong input pair or a tolerance failure cannot produce a
// confidently wrong result.  The coefficient ordering is checked on the
// additive raise term P - p, which every construction knows in closed form:
// evaluating it directly avoids the cancellation in res.P(x) - p(x), which
// rounds to zero wherever the term falls under one ulp of p.  The term may
// legitimately underflow to zero toward an infinite end (it usually decays
// like a power of u); only a negative value or an identically zero term
// betrays a broken construction.
void verify_counterexample(CounterexampleResult& res, const Fn& gap,
                           const SolutionMap& map, const ConstructOptions& opts) {
  std::vector<double> grid = verification_grid(map, opts.grid_points);
  double min_v = kInf, min_gap = kInf, max_gap = -kInf, max_res = 0.0;
  double argmin_v = grid.front(), argmin_gap = grid.front();
  for (double x : grid) {
    double vx = res.v(x);
    if (vx < min_v) {
      min_v = vx;
      argmin_v = x;
    }
    double gx = gap(x);
    if (gx < min_gap) {
      min_gap = gx;
      argmin_gap = x;
    }
    max_gap = std::max(max_gap, gx);
    // Even the refined stencil needs room: points closer to the edge than 1%
    // of the window cap the step so hard that map noise divided by h^2
    // swamps the estimate, so those points contribute margins only.
    if (std::min(x - map.lo(), map.hi() - x) >= 0.01 * (map.hi() - map.lo()))
      max_res = std::max(max_res,
                         fd_residual(res.v, res.P, x, map.lo(), map.hi(), opts.residual_tol));
  }
  res.positivity_margin = min_v;
  res.ordering_margin = min_gap;
  res.residual_max = max_res;
  if (!(min_v > 0.0))
    throw NumericError("the constructed solution failed positivity near x = " + fmt(argmin_v));
  if (min_gap < 0.0)
    throw NumericError("the constructed coefficient dips below the base coefficient near x = " +
                       fmt(argmin_gap) + " (difference " + fmt(min_gap) + ")");
  if (!(max_gap > 0.0))
    throw NumericError("the constructed coefficient never rises above the base coefficient");
  if (!(max_res <= opts.residual_tol))
    throw NumericError("the constructed solution residual " + fmt(max_res) +
                       " exceeds the allowance " + fmt(opts.residual_tol));
}

void validate_generator(const Generator& gen) {
  double lo = gen.t_lo, hi = gen.t_hi;
  double clip_lo = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi - 100.0 : -50.0);
  double clip_hi = std::isfinite(hi) ? hi : (std::isfinite(lo) ? lo + 100.0 : 50.0);
  double span = clip_hi - clip_lo;
  Expr gp = gen.g.diff();
  Expr wpp = gen.witness_w.diff().diff();
  for (int i = 0; i < 41; ++i) {
    double t = clip_lo + span * (i + 0.5) / 41.0;
    double gpv = gp.eval(t);
    double sgv = gen.Sg.eval(t);
    double wv = gen.witness_w.eval(t);
    double rv = gen.witness_R.eval(t);
    double res = wpp.eval(t) + rv * wv;
    if (!(gpv > 0.0) || !(sgv > 0.0) || !(wv > 0.0) || !(rv > 0.0) ||
        !(std::abs(res) <= 1e-8 * (1.0 + std::abs(rv * wv))))
      throw NumericError("generator validation failed at t = " + fmt(t));
  }
}

SchwarzianMap assemble_map(Fn u, const Window& win, double x0, const ConstructOptions& opts, Fn p,
                           const PrincipalityReport& rep) {
  SchwarzianMap out;
  out.map = build_solution_map(u, win.lo, win.hi, x0, opts.map_rel);
  out.left = rep.left.verdict;
  out.right = rep.right.verdict;
  out.L1 = mass_of(rep.left);
  out.L2 = mass_of(rep.right);
  // The realized window mass can never exceed the extrapolated full mass.
  if (rep.left.verdict == Verdict::finite && -out.map.f_lo() > out.L1 * (1.0 + 1e-5) + 1e-9)
    throw NumericError("the window mass " + fmt(-out.map.f_lo()) +
                       " exceeds the extrapolated left endpoint mass " + fmt(out.L1));
  if (rep.right.verdict == Verdict::finite && out.map.f_hi() > out.L2 * (1.0 + 1e-5) + 1e-9)
    throw NumericError("the window mass " + fmt(out.map.f_hi()) +
                       " exceeds the extrapolated right endpoint mass " + fmt(out.L2));
  out.u = std::move(u);
  out.p = std::move(p);
  return out;
}

std::string mass_text(double L) { return std::isfinite(L) ? fmt(L) : "infinity"; }

}  // namespace

// ---------------------------------------------------------------------------
// Generators and Schwarzian derivatives
// ---------------------------------------------------------------------------

const char* to_string(GeneratorCase c) {
  switch (c) {
    case GeneratorCase::both_finite: return "both-finite";
    case GeneratorCase::left_finite: return "left-finite";
    case GeneratorCase::right_finite: return "right-finite";
  }
  return "?";
}

Generator make_generator(GeneratorCase tag, double L1, double L2) {
  if (std::isnan(L1) || std::isnan(L2))
    throw UsageError("generator masses must be numbers (possibly infinite), not NaN");
  auto need_finite = [](double L, const char* side) {
    if (!(std::isfinite(L) && L > 0.0))
      throw UsageError(std::string("the ") + side +
                       " mass must be finite and positive for this generator, got " + fmt(L));
  };
  Expr t = Expr::variable();
  Generator gen;
  gen.tag = tag;
  switch (tag) {
    case GeneratorCase::both_finite: {
      need_finite(L1, "left");
      need_finite(L2, "right");
      double om = kPi / (L1 + L2);
      Expr arg = Expr::constant(om) * (t + Expr::constant(L1));
      gen.g = -cot(arg);
      gen.Sg = Expr::constant(2.0 * om * om);
      gen.witness_w = sin(arg);
      gen.witness_R = Expr::constant(om * om);
      gen.t_lo = -L1;
      gen.t_hi = L2;
      break;
    }
    case GeneratorCase::left_finite: {
      need_finite(L1, "left");
      Expr s = t + Expr::constant(L1);
      gen.g = log(s);
      gen.Sg = Expr::constant(0.5) * pow(s, Expr::constant(-2.0));
      gen.witness_w = sqrt(s);
      gen.witness_R = Expr::constant(0.25) * pow(s, Expr::constant(-2.0));
      gen.t_lo = -L1;
      gen.t_hi = std::isfinite(L2) ? L2 : kInf;
      break;
    }
    case GeneratorCase::right_finite: {
      need_finite(L2, "right");
      Expr s = Expr::constant(L2) - t;
      gen.g = -log(s);
      gen.Sg = Expr::constant(0.5) * pow(s, Expr::constant(-2.0));
      gen.witness_w = sqrt(s);
      gen.witness_R = Expr::constant(0.25) * pow(s, Expr::constant(-2.0));
      gen.t_lo = std::isfinite(L1) ? -L1 : -kInf;
      gen.t_hi = L2;
      break;
    }
  }
  validate_generator(gen);
  return gen;
}

SchwarzianMap make_schwarzian_map(Fn u, double a, double b, double x0,
                                  const ConstructOptions& opts, Fn p) {
  if (!u) throw UsageError("a base function is required");
  Window win = make_window(a, b, x0, opts);
  PrincipalityReport rep = classify_principality(u, a, b, x0, opts.ladder);
  return assemble_map(std::move(u), win, x0, opts, std::move(p), rep);
}

double schwarzian(const Expr& f, double x, const ParamBinding& params) {
  Expr f1 = f.diff();
  Expr f2 = f1.diff();
  Expr f3 = f2.diff();
  double d1 = f1.eval(x, params);
  if (d1 == 0.0) throw DomainError("Schwarzian undefined where the first derivative vanishes");
  double r2 = f2.eval(x, params) / d1;
  return f3.eval(x, params) / d1 - 1.5 * r2 * r2;
}

double schwarzian(const SchwarzianMap& f, double x) {
  if (f.p) return 2.0 * f.p(x);
  double lo = f.map.lo(), hi = f.map.hi();
  double dist = std::min(x - lo, hi - x);
  if (!(dist > 0.0))
    throw UsageError("the point x = " + fmt(x) + " lies outside the realized window");
  // With g = log f' the Schwarzian is g'' - g'^2/2, which needs only first
  // and second differences of a closed-form quantity (no quadrature noise).
  double h = std::min(1e-3 * (1.0 + std::abs(x)), 0.2 * dist);
  auto g = [&f](double t) { return std::log(f.map.df(t)); };
  double gm2 = g(x - 2 * h), gm1 = g(x - h), g0 = g(x), gp1 = g(x + h), gp2 = g(x + 2 * h);
  double g1 = (gm2 - 8 * gm1 + 8 * gp1 - gp2) / (12 * h);
  double g2 = (-gm2 + 16 * gm1 - 30 * g0 + 16 * gp1 - gp2) / (12 * h * h);
  return g2 - 0.5 * g1 * g1;
}

double compose_schwarzian(const Generator& g, const SchwarzianMap& f, double x) {
  double t = f.map.f(x);
  if (!(t > g.t_lo && t < g.t_hi))
    throw DomainError("the map value f(x) = " + fmt(t) + " lies outside the generator range (" +
                      fmt(g.t_lo) + ", " + fmt(g.t_hi) + ")");
  double fp = f.map.df(x);
  return schwarzian(f, x) + g.Sg.eval(t) * fp * fp;
}

// ---------------------------------------------------------------------------
// Counterexample builders
// ---------------------------------------------------------------------------

CounterexampleResult build_comparison_counterexample(const Fn& p, const Fn& u, double a, double b,
                                                     double x0, const PrincipalityReport& report,
                                                     const ConstructOptions& opts) {
  if (!p || !u) throw UsageError("both the coefficient and the base function are required");
  Window win = make_window(a, b, x0, opts);
  refuse_undecided(report);
  if (report.left.verdict == Verdict::divergent && report.right.verdict == Verdict::divergent)
    throw RefusalError(
        "both reciprocal-square masses diverge: any admissible raise of the coefficient would "
        "need a positive solution of w'' + R w = 0 with R > 0 on the whole line, and a positive "
        "concave function on the whole line must be constant");

  SchwarzianMap sm = assemble_map(u, win, x0, opts, p, report);

  // The generator's derivative is singular at the ends of its coordinate
  // range.  A map that saturates (reaches a finite mass to within rounding
  // inside the window, as doubly-exponential solutions do) would put grid
  // points on top of that singularity, so pull the window back to where the
  // coordinate still keeps a relative margin of 1e-6 from the mass bound.
  {
    const double frac = 1.0 - 1e-6;
    bool shrunk = false;
    if (std::isfinite(sm.L1) && sm.map.f_lo() < -frac * sm.L1) {
      win.lo = sm.map.inverse(-frac * sm.L1);
      shrunk = true;
    }
    if (std::isfinite(sm.L2) && sm.map.f_hi() > frac * sm.L2) {
      win.hi = sm.map.inverse(frac * sm.L2);
      shrunk = true;
    }
    if (shrunk) sm = assemble_map(u, win, x0, opts, p, report);
  }
  screen_solves(p, u, win.lo, win.hi);

  GeneratorCase tag = GeneratorCase::both_finite;
  if (report.left.verdict == Verdict::divergent) tag = GeneratorCase::right_finite;
  else if (report.right.verdict == Verdict::divergent) tag = GeneratorCase::left_finite;
  Generator gen = make_generator(tag, sm.L1, sm.L2);

  CounterexampleResult res;
  res.kind = "schwarzian";
  res.generator_case = tag;
  res.L1 = sm.L1;
  res.L2 = sm.L2;
  res.window_lo = win.lo;
  res.window_hi = win.hi;
  SolutionMap map = sm.map;
  Expr Sg = gen.Sg;
  Expr gp = gen.g.diff();
  res.P = [p, map, Sg](double x) {
    double fp = map.df(x);
    return p(x) + 0.5 * Sg.eval(map.f(x)) * fp * fp;
  };
  res.v = [u, map, gp](double x) { return u(x) / std::sqrt(gp.eval(map.f(x))); };
  res.detail = std::string("raised the coefficient through the ") + to_string(tag) +
               " generator on the coordinate range (-" + mass_text(res.L1) + ", " +
               mass_text(res.L2) + "); the positive solution is u/sqrt(g'(f)) on [" +
               fmt(win.lo) + ", " + fmt(win.hi) + "]";
  auto gap = [map, Sg](double x) {
    double fp = map.df(x);
    return 0.5 * Sg.eval(map.f(x)) * fp * fp;
  };
  verify_counterexample(res, gap, sm.map, opts);
  return res;
}

SeparationCounterexample build_separation_counterexample(const Fn& u, double a, double b,
                                                         double x0,
                                                         const PrincipalityReport& report,
                                                         const ConstructOptions& opts) {
  if (!u) throw UsageError("a base function is required");
  Window win = make_window(a, b, x0, opts);
  refuse_undecided(report);
  bool left_fin = report.left.verdict == Verdict::finite;
  bool right_fin = report.right.verdict == Verdict::finite;
  if (!left_fin && !right_fin)
    throw RefusalError(
        "both reciprocal-square masses diverge, so every combination independent of the base "
        "function changes sign: zero separation genuinely holds here");

  SchwarzianMap sm = assemble_map(u, win, x0, opts, {}, report);
  double rho;
  std::string pick;
  if (left_fin && right_fin) {
    rho = 1.0 / (2.0 * (sm.L1 + sm.L2));
    pick = "1/(2(L1+L2))";
  } else if (right_fin) {
    rho = -1.0 / (2.0 * sm.L2);
    pick = "-1/(2 L2), the midpoint of the admissible (-1/L2, 0)";
  } else {
    rho = 1.0 / (2.0 * sm.L1);
    pick = "1/(2 L1), the midpoint of the admissible (0, 1/L1)";
  }

  SeparationCounterexample res;
  res.c1 = 1.0;
  res.c2 = rho;
  res.L1 = sm.L1;
  res.L2 = sm.L2;
  res.window_lo = win.lo;
  res.window_hi = win.hi;
  SolutionMap map = sm.map;
  res.v = [u, map, rho](double x) { return u(x) * (1.0 + rho * map.f(x)); };

  double min_ratio = kInf;
  for (double x : verification_grid(sm.map, opts.grid_points))
    min_ratio = std::min(min_ratio, 1.0 + rho * map.f(x));
  res.positivity_margin = min_ratio;
  if (!(min_ratio > 1e-6))
    throw NumericError("the combination lost positivity on the window (ratio margin " +
                       fmt(min_ratio) + ")");
  res.detail = "picked c2/c1 = " + fmt(rho) + " as " + pick +
               "; the combination u (1 + (c2/c1) f) keeps ratio at least " + fmt(min_ratio) +
               " across [" + fmt(win.lo) + ", " + fmt(win.hi) + "]";
  return res;
}

CounterexampleResult chuaqui_counterexample(const Fn& p, const Fn& u, double a, double b,
                                            double x0, const PrincipalityReport& report,
                                            const ConstructOptions& opts) {
  if (!p || !u) throw UsageError("both the coefficient and the base function are required");
  Window win = make_window(a, b, x0, opts);
  refuse_undecided(report);
  if (report.left.verdict != Verdict::finite || report.right.verdict != Verdict::finite)
    throw RefusalError(
        "the cosine construction needs both reciprocal-square masses finite; got left " +
        std::string(to_string(report.left.verdict)) + ", right " +
        to_string(report.right.verdict));

  SchwarzianMap sm = assemble_map(u, win, x0, opts, p, report);
  screen_solves(p, u, win.lo, win.hi);
  const double safety = 0.9;
  double k = safety * (kPi / 2.0) / std::max(sm.L1, sm.L2);

  CounterexampleResult res;
  res.kind = "chuaqui";
  res.generator_case = GeneratorCase::both_finite;
  res.L1 = sm.L1;
  res.L2 = sm.L2;
  res.window_lo = win.lo;
  res.window_hi = win.hi;
  res.k = k;
  res.safety = safety;
  SolutionMap map = sm.map;
  res.P = [p, u, k](double x) {
    double uu = u(x);
    double u2 = uu * uu;
    return p(x) + k * k / (u2 * u2);
  };
  res.v = [u, map, k](double x) { return u(x) * std::cos(k * map.f(x)); };
  res.detail = "cosine construction with k = " + fmt(k) +
               " = 0.9 (pi/2)/max(L1, L2); |k f| <= 0.45 pi keeps the solution positive";
  auto gap = [u, k](double x) {
    double uu = u(x);
    double u2 = uu * uu;
    return k * k / (u2 * u2);
  };
  verify_counterexample(res, gap, sm.map, opts);
  return res;
}

CounterexampleResult steinmetz_counterexample(const Fn& p, const Fn& u1, double a, double b,
                                              double x0, const PrincipalityReport& report,
                                              double alpha, double c,
                                              const ConstructOptions& opts) {
  if (!p || !u1) throw UsageError("both the coefficient and the base function are required");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("the exponent alpha must lie strictly between 0 and 1, got " + fmt(alpha));
  if (!(c != 0.0) || !std::isfinite(c))
    throw UsageError("the mixing coefficient c must be a nonzero number, got " + fmt(c));
  Window win = make_window(a, b, x0, opts);
  refuse_undecided(report);
  if (report.left.verdict == Verdict::divergent && report.right.verdict == Verdict::divergent)
    throw RefusalError(
        "both reciprocal-square masses diverge, so every combination independent of the base "
        "function changes sign: no positive second solution u1 (1 - c f) exists");

  SchwarzianMap sm = assemble_map(u1, win, x0, opts, p, report);
  screen_solves(p, u1, win.lo, win.hi);

  // u2 = u1 (1 - c f) vanishes where f reaches 1/c; that value must stay out
  // of the coordinate range, which bounds |c| by the reciprocal mass on the
  // side where c f grows.
  double fzero = 1.0 / c;
  const EndpointReport& side = c > 0.0 ? report.right : report.left;
  double side_mass = c > 0.0 ? sm.L2 : sm.L1;
  auto first_sign_change = [&]() -> std::string {
    if (fzero >= sm.map.f_lo() && fzero <= sm.map.f_hi())
      return "first sign change near x = " + fmt(sm.map.inverse(fzero));
    return std::string("first sign change between the window edge and the ") +
           to_string(side.end) + " end";
  };
  if (side.verdict == Verdict::divergent)
    throw HypothesisError("the mixing coefficient c = " + fmt(c) +
                          " makes u1 (1 - c f) vanish where f = " + fmt(fzero) +
                          ", and the mass toward the " + to_string(side.end) +
                          " end diverges, so that value is always reached; " +
                          first_sign_change());
  if (std::abs(fzero) < side_mass * (1.0 - 1e-6))
    throw HypothesisError("the mixing coefficient c = " + fmt(c) + " is too large: |1/c| = " +
                          fmt(std::abs(fzero)) + " falls inside the coordinate range bounded by " +
                          fmt(side_mass) + "; " + first_sign_change());

  CounterexampleResult res;
  res.kind = "steinmetz";
  res.L1 = sm.L1;
  res.L2 = sm.L2;
  res.window_lo = win.lo;
  res.window_hi = win.hi;
  res.alpha = alpha;
  res.c = c;
  res.k = std::sqrt(alpha * (1.0 - alpha)) * std::abs(c);
  SolutionMap map = sm.map;
  double k2 = alpha * (1.0 - alpha) * c * c;
  auto u2 = [u1, map, c](double x) { return u1(x) * (1.0 - c * map.f(x)); };
  res.P = [p, u1, u2, k2](double x) {
    double a1 = u1(x), a2 = u2(x);
    return p(x) + k2 / (a1 * a1 * a2 * a2);
  };
  res.v = [u1, u2, alpha](double x) {
    return std::pow(u1(x), alpha) * std::pow(u2(x), 1.0 - alpha);
  };
  res.detail = "power-product construction with alpha = " + fmt(alpha) + " and c = " + fmt(c) +
               "; the second solution u1 (1 - c f) has Wronskian -c with the base";

  // Positivity of the second solution across the window, checked before the
  // product is verified so a sign loss is reported in terms of u2.
  std::vector<double> grid = verification_grid(sm.map, opts.grid_points);
  for (double x : grid)
    if (!(u2(x) > 0.0))
      throw HypothesisError("the mixing coefficient c = " + fmt(c) +
                            " is too large: the second solution changes sign near x = " + fmt(x));
  auto gap = [u1, u2, k2](double x) {
    double a1 = u1(x), a2 = u2(x);
    return k2 / (a1 * a1 * a2 * a2);
  };
  verify_counterexample(res, gap, sm.map, opts);
  return res;
}

CounterexampleResult steinmetz_counterexample(const Fn& p, const Fn& u1, double a, double b,
                                              double x0, const PrincipalityReport& report,
                                              double alpha, const ConstructOptions& opts) {
  refuse_undecided(report);
  const double safety = 0.9;
  double c;
  if (report.right.verdict == Verdict::finite)
    c = safety / report.right.value;
  else if (report.left.verdict == Verdict::finite)
    c = -safety / report.left.value;
  else
    throw RefusalError(
        "both reciprocal-square masses diverge, so every combination independent of the base "
        "function changes sign: no positive second solution u1 (1 - c f) exists");
  CounterexampleResult res = steinmetz_counterexample(p, u1, a, b, x0, report, alpha, c, opts);
  res.safety = safety;
  return res;
}

ConvexityReport relative_convexity_check(const Fn& u, const Fn& v, const Fn& p, const Fn& P,
                                         double a, double b, double x0,
                                         const ConstructOptions& opts) {
  if (!u || !v || !p || !P) throw UsageError("all four functions are required");
  Window win = make_window(a, b, x0, opts);
  SolutionMap map = build_solution_map(u, win.lo, win.hi, x0, opts.map_rel);
  int n = std::max(16, opts.grid_points);
  double w = win.hi - win.lo;
  double xa = win.lo + 1e-3 * w, xb = win.hi - 1e-3 * w;
  double ya = map.f(xa), yb = map.f(xb);
  double h = (yb - ya) / (n - 1);
  std::vector<double> wy(n);
  double wmax = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = map.inverse(ya + h * i);
    double vv = v(x);
    if (!(vv > 0.0))
      throw HypothesisError("the comparison function must stay positive; it is " + fmt(vv) +
                            " at x = " + fmt(x));
    double pv = p(x), Pv = P(x);
    if (Pv - pv < -1e-9 * (1.0 + std::abs(pv)))
      throw HypothesisError("the raised coefficient dips below the base coefficient at x = " +
                            fmt(x) + " (difference " + fmt(Pv - pv) + ")");
    wy[i] = vv / u(x);
    wmax = std::max(wmax, std::abs(wy[i]));
  }
  ConvexityReport rep;
  rep.grid_points = n;
  double mn = kInf, mx = -kInf;
  for (int i = 1; i + 1 < n; ++i) {
    double d2 = (wy[i + 1] - 2.0 * wy[i] + wy[i - 1]) / (h * h);
    mn = std::min(mn, d2);
    mx = std::max(mx, d2);
  }
  rep.min_second_difference = mn;
  rep.max_second_difference = mx;
  rep.concave = mx <= 1e-8 * std::max(1.0, wmax);
  return rep;
}

}  // namespace sturmkit
