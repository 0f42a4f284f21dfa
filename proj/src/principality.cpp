#include "sturmkit/principality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sturmkit/quadrature.hpp"

namespace sturmkit {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::finite: return "finite";
    case Verdict::divergent: return "divergent";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

const char* to_string(GrowthModel m) {
  switch (m) {
    case GrowthModel::none: return "none";
    case GrowthModel::power: return "power";
    case GrowthModel::logarithmic: return "logarithmic";
  }
  return "?";
}

const char* to_string(End e) { return e == End::left ? "left" : "right"; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SeqClass {
  Verdict verdict = Verdict::undecided;
  GrowthModel model = GrowthModel::none;
  double exponent = 0.0;
  double value = kNaN;
  double fit_residual = kNaN;
};

// Classify a nondecreasing sequence of truncated masses whose truncation
// geometry advances by a fixed factor per rung (rung_log_scale is the log of
// that factor: how much log(1/gap) or log(window) grows per rung).
SeqClass classify_sequence(const std::vector<double>& mass, double rung_log_scale,
                           const LadderOptions& opts) {
  SeqClass out;
  const int n = static_cast<int>(mass.size());
  if (n < 6) return out;  // undecided: not enough rungs

  for (double v : mass) {
    if (!std::isfinite(v)) {
      out.verdict = Verdict::divergent;
      out.model = GrowthModel::power;
      out.exponent = kInf;
      out.value = kInf;
      return out;
    }
  }

  std::vector<double> d(n - 1);
  double scale = std::fabs(mass.back()) + 1.0;
  for (int k = 0; k + 1 < n; ++k) {
    d[k] = mass[k + 1] - mass[k];
    if (d[k] < -1e-6 * scale) return out;  // not a mass ladder; undecided
    if (d[k] < 0) d[k] = 0;
  }

  if (*std::max_element(d.begin(), d.end()) == 0.0) {
    out.verdict = Verdict::finite;
    out.value = mass.back();
    out.fit_residual = 0.0;
    return out;
  }

  // Increments that stall below the running total's resolution on the last
  // rungs mean the tail has converged: a still-divergent integral adds a
  // strictly positive increment at every rung (constant for logarithmic
  // growth, growing for power growth), never collapsing to the last bit.
  // This catches masses that converge faster than any power, where the
  // shrink-ratio test below would divide by zero.
  double stall = 4.0 * std::numeric_limits<double>::epsilon() * scale;
  int stalled = 0;
  for (int k = n - 2; k >= 0 && d[k] <= stall; --k) ++stalled;
  if (stalled >= 2) {
    out.verdict = Verdict::finite;
    out.model = GrowthModel::none;
    out.value = mass.back();
    out.fit_residual = 0.0;
    return out;
  }

  bool all_shrink = true, all_grow = true, ratios_valid = true;
  for (int k = 0; k + 1 < n - 1; ++k) {
    if (d[k] <= 0.0) {
      ratios_valid = false;
      break;
    }
    double r = d[k + 1] / d[k];
    all_shrink = all_shrink && r < opts.fast_shrink;
    all_grow = all_grow && r > opts.fast_grow;
  }

  // Misfit of a pure geometric law on the tail increments (shared by the
  // convergent-tail and power-growth models): the scatter of the increment
  // log-ratios around their mean over the last three gaps.
  double lr_scatter = kNaN;
  {
    double lr[3], sum = 0.0;
    bool ok = n - 1 >= 4;
    for (int j = 0; ok && j < 3; ++j) {
      double lo = d[n - 5 + j], hi = d[n - 4 + j];
      ok = lo > 0.0 && hi > 0.0;
      if (ok) {
        lr[j] = std::log(hi / lo);
        sum += lr[j];
      }
    }
    if (ok) {
      double mean = sum / 3, rss = 0.0;
      for (double v : lr) rss += (v - mean) * (v - mean);
      lr_scatter = std::sqrt(rss / 3);
    }
  }

  auto finite_with_tail = [&] {
    out.verdict = Verdict::finite;
    out.model = GrowthModel::none;
    double rhat = d[n - 2] > 0 && d[n - 3] > 0 ? d[n - 2] / d[n - 3] : 0.0;
    rhat = std::clamp(rhat, 0.0, 0.999);
    out.value = mass.back() + d[n - 2] * rhat / (1.0 - rhat);
    out.fit_residual = lr_scatter;
  };

  if (ratios_valid && all_shrink) {
    finite_with_tail();
    return out;
  }

  // Tail of the last four increments.
  if (n - 1 < 4) return out;
  double m_hat = 0.0;
  bool tail_ok = true;
  for (int k = n - 5; k + 1 < n - 1; ++k) {
    if (d[k] <= 0.0 || d[k + 1] <= 0.0) {
      tail_ok = false;
      break;
    }
    m_hat += std::log(d[k + 1] / d[k]);
  }
  m_hat /= 3.0;

  if (ratios_valid && all_grow) {
    out.verdict = Verdict::divergent;
    out.model = GrowthModel::power;
    out.exponent = tail_ok ? m_hat / rung_log_scale : kInf;
    out.value = kInf;
    out.fit_residual = lr_scatter;
    return out;
  }
  if (!tail_ok) return out;

  double e_hat = m_hat / rung_log_scale;
  if (e_hat <= -opts.exponent_band) {
    finite_with_tail();
    return out;
  }
  if (e_hat >= opts.exponent_band) {
    out.verdict = Verdict::divergent;
    out.model = GrowthModel::power;
    out.exponent = e_hat;
    out.value = kInf;
    out.fit_residual = lr_scatter;
    return out;
  }

  // Near-zero exponent: accept the logarithmic model only if the tail masses
  // are close to an arithmetic progression in the rung index.
  double sk = 0, skk = 0, si = 0, ski = 0;
  for (int j = 0; j < 4; ++j) {
    double v = mass[n - 4 + j];
    sk += j;
    skk += j * j;
    si += v;
    ski += j * v;
  }
  double beta = (4 * ski - sk * si) / (4 * skk - sk * sk);
  double alpha = (si - beta * sk) / 4;
  double rss = 0, big = 0;
  for (int j = 0; j < 4; ++j) {
    double v = mass[n - 4 + j];
    double r = v - (alpha + beta * j);
    rss += r * r;
    big = std::max(big, std::fabs(v));
  }
  double rel_rms = std::sqrt(rss / 4) / (big + 1e-300);
  if (rel_rms < opts.log_rms) {
    out.verdict = Verdict::divergent;
    out.model = GrowthModel::logarithmic;
    out.exponent = 0.0;
    out.value = kInf;
    out.fit_residual = rel_rms;
    return out;
  }
  return out;  // undecided
}

// Truncation points marching toward the endpoint, nearest last.
std::vector<double> make_cuts(double bound, End end, double x0, const LadderOptions& opts) {
  std::vector<double> cuts(opts.rungs);
  if (std::isfinite(bound)) {
    double gap = std::fabs(bound - x0);
    if (gap <= 0) throw NumericError("base point must lie strictly inside the interval");
    double eps0 = opts.eps0 > 0 ? opts.eps0 : std::min(opts.eps0_cap, gap / 10.0);
    eps0 = std::min(eps0, gap / 2.0);
    double dir = end == End::right ? 1.0 : -1.0;
    for (int k = 0; k < opts.rungs; ++k)
      cuts[k] = bound - dir * eps0 * std::pow(opts.eps_ratio, k);
  } else {
    double m = std::max(1.0, std::fabs(x0));
    double dir = end == End::right ? 1.0 : -1.0;
    for (int k = 0; k < opts.rungs; ++k)
      cuts[k] = dir * m * std::pow(opts.t_factor, k + 1);
  }
  return cuts;
}

// Cumulative reciprocal-square mass of u from x0 at each cut.  A rung whose
// integral overflows truncates the ladder with an infinite entry, which the
// classifier reads as outright divergence.
std::vector<double> ladder_masses(const std::function<double(double)>& u, double x0,
                                  const std::vector<double>& cuts, End end, double bound,
                                  const LadderOptions& opts) {
  std::vector<double> mass;
  mass.reserve(cuts.size());
  auto f = [&](double t) {
    double v = u(t);
    return 1.0 / (v * v);
  };
  // Rungs toward the left endpoint run against the orientation of the
  // integral; flip the sign so the ladder accumulates positive mass.
  double orient = end == End::left ? -1.0 : 1.0;
  double total = 0.0, prev = x0;
  for (double c : cuts) {
    // Arguments this close to a finite endpoint carry representation noise
    // of order ulp(bound)/gap in any endpoint-distance factor of u, so the
    // rung tolerance cannot be tighter than that floor.  The cap keeps a
    // genuine interior zero of u (a pole of the integrand) detectable.
    double rel = opts.quad_rel;
    if (std::isfinite(bound)) {
      double gap = std::abs(bound - c);
      if (gap > 0.0) {
        double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                       (1.0 + std::abs(bound)) / gap;
        rel = std::max(rel, std::min(noise, 1e-4));
      }
    }
    QuadResult q;
    try {
      q = integrate_adaptive(f, prev, c, rel);
    } catch (const Error&) {
      // The integrand overflowed inside this rung: the ladder ends with an
      // infinite entry, which the classifier reads as outright divergence.
      mass.push_back(kInf);
      return mass;
    }
    if (!q.tolerance_met)
      throw NumericError(
          "reciprocal-square mass could not be integrated reliably; "
          "u may vanish inside the window");
    total += orient * q.value;
    prev = c;
    mass.push_back(total);
  }
  return mass;
}

double rung_log_scale_for(double bound, const LadderOptions& opts) {
  return std::isfinite(bound) ? std::log(1.0 / opts.eps_ratio) : std::log(opts.t_factor);
}

EndpointReport classify_once(const std::function<double(double)>& u, double bound, End end,
                             double x0, const LadderOptions& opts) {
  EndpointReport rep;
  rep.end = end;
  rep.cuts = make_cuts(bound, end, x0, opts);
  rep.mass = ladder_masses(u, x0, rep.cuts, end, bound, opts);
  SeqClass c = classify_sequence(rep.mass, rung_log_scale_for(bound, opts), opts);
  rep.verdict = c.verdict;
  rep.model = c.model;
  rep.exponent = c.exponent;
  rep.value = c.value;
  rep.fit_residual = c.fit_residual;
  return rep;
}

}  // namespace

EndpointReport classify_endpoint_mass(const std::function<double(double)>& u, double bound,
                                      End end, double x0, const LadderOptions& opts) {
  if (!std::isfinite(x0)) throw NumericError("base point must be finite");
  if (std::isfinite(bound) && ((end == End::right && bound <= x0) ||
                               (end == End::left && bound >= x0)))
    throw NumericError("base point must lie strictly inside the interval");

  EndpointReport rep = classify_once(u, bound, end, x0, opts);

  // The verdict may not depend on the base point: the mass from a second
  // anchor differs only by a constant.
  double x0b;
  if (std::isfinite(bound)) {
    x0b = 0.5 * (x0 + rep.cuts.front());
  } else {
    // Halfway to the first cut in log-scale terms; stays strictly inside.
    x0b = end == End::right ? x0 + 0.5 * std::max(1.0, std::fabs(x0))
                            : x0 - 0.5 * std::max(1.0, std::fabs(x0));
  }
  if (x0b != x0) {
    EndpointReport alt = classify_once(u, bound, end, x0b, opts);
    rep.base_point_invariant = alt.verdict == rep.verdict;
    if (!rep.base_point_invariant) rep.verdict = Verdict::undecided;
  }
  return rep;
}

PrincipalityReport classify_principality(const std::function<double(double)>& u, double a,
                                         double b, double x0, const LadderOptions& opts) {
  if (!(a < b)) throw NumericError("interval must be nonempty");
  if (!(a < x0 && x0 < b))
    throw NumericError("base point must lie strictly inside the interval");

  LadderOptions per_end = opts;
  if (opts.eps0 <= 0 && std::isfinite(a) && std::isfinite(b))
    per_end.eps0 = std::min(opts.eps0_cap, (b - a) / 100.0);

  PrincipalityReport rep;
  rep.left = classify_endpoint_mass(u, a, End::left, x0, per_end);
  rep.right = classify_endpoint_mass(u, b, End::right, x0, per_end);
  rep.decided = rep.left.verdict != Verdict::undecided &&
                rep.right.verdict != Verdict::undecided;
  rep.principal = rep.left.verdict == Verdict::divergent &&
                  rep.right.verdict == Verdict::divergent;
  return rep;
}

RatioCheckReport principal_ratio_check(const std::function<double(double)>& p,
                                       const std::function<double(double)>& u, double x0,
                                       double u0, double du0, double bound, End end,
                                       const LadderOptions& opts) {
  if (!(u0 > 0)) throw HypothesisError("u must be positive at the base point");
  RatioCheckReport rep;
  rep.cuts = make_cuts(bound, end, x0, opts);
  double deepest = rep.cuts.back();

  Trajectory uhat =
      end == End::right ? solve_ivp(p, x0, u0, du0 + 1.0 / u0, x0, deepest, opts.ode)
                        : solve_ivp(p, x0, u0, du0 + 1.0 / u0, deepest, x0, opts.ode);

  double reach = end == End::right ? uhat.right() : uhat.left();
  std::vector<double> usable;
  for (double c : rep.cuts)
    if ((end == End::right && c <= reach) || (end == End::left && c >= reach))
      usable.push_back(c);
  rep.window_truncated = usable.size() < rep.cuts.size();
  rep.cuts = usable;

  double dir = end == End::right ? 1.0 : -1.0;
  rep.ratio_monotone = true;
  double prev = 0.0;
  for (double c : rep.cuts) {
    double uc = u(c);
    if (!(uc > 0)) throw HypothesisError("u must stay positive up to the truncation cut");
    double r = dir * (uhat.u(c) / uc - 1.0);  // equals |mass(x0 -> c)|
    if (r < prev - 1e-9 * (std::fabs(prev) + 1)) rep.ratio_monotone = false;
    rep.ratio.push_back(r);
    prev = r;
  }

  SeqClass c = classify_sequence(rep.ratio, rung_log_scale_for(bound, opts), opts);
  rep.verdict = c.verdict;
  rep.model = c.model;
  rep.exponent = c.exponent;
  if (!rep.ratio_monotone) rep.verdict = Verdict::undecided;
  return rep;
}

}  // namespace sturmkit
