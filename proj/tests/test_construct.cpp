#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "sturmkit/construct.hpp"
#include "sturmkit/errors.hpp"
#include "sturmkit/expr.hpp"
#include "sturmkit/ode.hpp"
#include "sturmkit/oscillation.hpp"
#include "sturmkit/principality.hpp"

using namespace sturmkit;

namespace {

const double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

// One-parameter family on (-1, 1): coefficient 4*lam*(1-lam)/(1-x^2)^2 with
// the positive solution (1-x)^lam (1+x)^(1-lam).  For lam < 1/2 the
// reciprocal-square mass from 0 is infinite toward -1 and equals
// 1/(2(1-2lam)) toward +1; at lam = 1/2 it diverges at both ends.
struct Family {
  double lam;
  double p(double x) const { return 4.0 * lam * (1.0 - lam) / ((1.0 - x * x) * (1.0 - x * x)); }
  double u(double x) const { return std::pow(1.0 - x, lam) * std::pow(1.0 + x, 1.0 - lam); }
  double du(double x) const { return u(x) * ((1.0 - lam) / (1.0 + x) - lam / (1.0 - x)); }
};

// Chebyshev-style probe points in (lo, hi), clear of the ends.
std::vector<double> probes(double lo, double hi, int n) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) {
    double c = std::cos(kPi * (i + 0.5) / n);
    xs[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * c;
  }
  return xs;
}

}  // namespace

TEST_SUITE("construct") {
  TEST_CASE("symbolic Schwarzian: affine and Moebius maps are flat, tangent is constant") {
    Expr affine = parse("3*x - 7");
    for (double x : {-2.0, 0.0, 1.5}) CHECK(schwarzian(affine, x) == doctest::Approx(0.0).epsilon(1e-12));

    Expr moebius = parse("(2*x + 1) / (x - 3)");
    for (double x : {0.0, 1.0, 2.0, -4.0})
      CHECK(schwarzian(moebius, x) == doctest::Approx(0.0).epsilon(1e-10));

    // S(tan) = 2 everywhere: tangent is the solution-ratio map of u'' + u = 0.
    Expr tang = parse("tan(x)");
    for (double x : {0.0, 0.3, -0.7, 1.2})
      CHECK(schwarzian(tang, x) == doctest::Approx(2.0).epsilon(1e-12));

    // Scaling law: S(tan(k x)) = 2 k^2.
    Expr tank = parse("tan(k*x)");
    CHECK(schwarzian(tank, 0.2, {{"k", 2.0}}) == doctest::Approx(8.0).epsilon(1e-11));

    // S(exp) = -1/2.
    Expr ex = parse("exp(x)");
    CHECK(schwarzian(ex, 0.9) == doctest::Approx(-0.5).epsilon(1e-12));

    // x^2 has a critical point at 0, where the Schwarzian is undefined.
    Expr sq = parse("x^2");
    CHECK_THROWS_AS(schwarzian(sq, 0.0), DomainError);
  }

  TEST_CASE("map Schwarzian equals twice the coefficient, with and without p supplied") {
    Family fam{0.25};
    auto u = [fam](double x) { return fam.u(x); };
    auto p = [fam](double x) { return fam.p(x); };

    SchwarzianMap plain = make_schwarzian_map(u, -1.0, 1.0, 0.0);
    SchwarzianMap with_p = make_schwarzian_map(u, -1.0, 1.0, 0.0, {}, p);

    for (double x : probes(-0.9, 0.9, 100)) {
      double want = 2.0 * p(x);
      CHECK(schwarzian(plain, x) == doctest::Approx(want).epsilon(1e-6));
      CHECK(schwarzian(with_p, x) == want);  // exact identity when p rides along
    }
    CHECK_THROWS_AS(schwarzian(plain, -1.0), UsageError);
    CHECK_THROWS_AS(schwarzian(plain, 5.0), UsageError);
  }

  TEST_CASE("generator catalogue: positive Schwarzians that match the symbolic derivative") {
    Generator bf = make_generator(GeneratorCase::both_finite, 0.5, 0.5);
    CHECK(bf.tag == GeneratorCase::both_finite);
    CHECK(bf.t_lo == doctest::Approx(-0.5));
    CHECK(bf.t_hi == doctest::Approx(0.5));
    for (double t : {-0.3, 0.0, 0.2}) {
      // cot generator for total mass 1: Sg = 2 pi^2, constant.
      CHECK(bf.Sg.eval(t) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
      CHECK(bf.Sg.eval(t) == doctest::Approx(schwarzian(bf.g, t)).epsilon(1e-9));
      CHECK(bf.witness_w.eval(t) > 0.0);
      CHECK(bf.witness_R.eval(t) > 0.0);
      CHECK(bf.g.diff().eval(t) > 0.0);
    }

    Generator lf = make_generator(GeneratorCase::left_finite, 2.0, kInf);
    for (double t : {-1.0, 0.0, 3.0}) {
      double want = 1.0 / (2.0 * (t + 2.0) * (t + 2.0));
      CHECK(lf.Sg.eval(t) == doctest::Approx(want).epsilon(1e-12));
      CHECK(lf.Sg.eval(t) == doctest::Approx(schwarzian(lf.g, t)).epsilon(1e-9));
      CHECK(lf.g.diff().eval(t) > 0.0);
    }

    Generator rf = make_generator(GeneratorCase::right_finite, kInf, 1.0);
    for (double t : {-3.0, 0.0, 0.8}) {
      double want = 1.0 / (2.0 * (1.0 - t) * (1.0 - t));
      CHECK(rf.Sg.eval(t) == doctest::Approx(want).epsilon(1e-12));
      CHECK(rf.Sg.eval(t) == doctest::Approx(schwarzian(rf.g, t)).epsilon(1e-9));
      CHECK(rf.g.diff().eval(t) > 0.0);
    }

    CHECK_THROWS_AS(make_generator(GeneratorCase::both_finite, kInf, 1.0), UsageError);
    CHECK_THROWS_AS(make_generator(GeneratorCase::left_finite, kInf, 1.0), UsageError);
    CHECK_THROWS_AS(make_generator(GeneratorCase::right_finite, 1.0, -2.0), UsageError);
  }

  TEST_CASE("composition law reproduces the raised coefficient") {
    // Base u = 1 on (0, 1): masses 1/2 and 1/2, cot generator, so the
    // composed Schwarzian is 0 + 2 pi^2 * 1 at every interior point.
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    SchwarzianMap f1 = make_schwarzian_map(one, 0.0, 1.0, 0.5, {}, zero);
    Generator g1 = make_generator(GeneratorCase::both_finite, f1.L1, f1.L2);
    for (double x : probes(0.05, 0.95, 100))
      CHECK(compose_schwarzian(g1, f1, x) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-9));

    // lam = 1/4: right mass 1, divergent left; the log generator lifts the
    // composed Schwarzian onto twice the lam = 1/2 coefficient.
    Family lo{0.25};
    auto u4 = [lo](double x) { return lo.u(x); };
    auto p4 = [lo](double x) { return lo.p(x); };
    SchwarzianMap f4 = make_schwarzian_map(u4, -1.0, 1.0, 0.0, {}, p4);
    CHECK(f4.left == Verdict::divergent);
    CHECK(f4.right == Verdict::finite);
    Generator g4 = make_generator(GeneratorCase::right_finite, f4.L1, f4.L2);
    for (double x : probes(-0.99, 0.99, 100)) {
      double want = 2.0 / ((1.0 - x * x) * (1.0 - x * x));
      CHECK(compose_schwarzian(g4, f4, x) ==
            doctest::Approx(want).epsilon(1e-6));
    }

    // lam = 3/4 mirrors it: finite mass on the left, same composed target.
    Family hi{0.75};
    auto u34 = [hi](double x) { return hi.u(x); };
    auto p34 = [hi](double x) { return hi.p(x); };
    SchwarzianMap f34 = make_schwarzian_map(u34, -1.0, 1.0, 0.0, {}, p34);
    CHECK(f34.left == Verdict::finite);
    CHECK(f34.right == Verdict::divergent);
    Generator g34 = make_generator(GeneratorCase::left_finite, f34.L1, f34.L2);
    for (double x : probes(-0.99, 0.99, 100)) {
      double want = 2.0 / ((1.0 - x * x) * (1.0 - x * x));
      CHECK(compose_schwarzian(g34, f34, x) ==
            doctest::Approx(want).epsilon(1e-6));
    }

    // A Moebius generator has zero Schwarzian, so composing adds nothing.
    Generator moeb;
    moeb.g = parse("(2*x + 1) / (x - 3)");
    moeb.Sg = parse("0");
    moeb.t_lo = -kInf;
    moeb.t_hi = 2.9;
    for (double x : {-0.5, 0.0, 0.5})
      CHECK(compose_schwarzian(moeb, f4, x) == doctest::Approx(2.0 * p4(x)).epsilon(1e-12));

    // Leaving the generator's range is a domain error, not a wrong number.
    Generator tight = make_generator(GeneratorCase::both_finite, 0.25, 0.25);
    CHECK_THROWS_AS(compose_schwarzian(tight, f4, 0.8), DomainError);
  }

  TEST_CASE("raised coefficient for a unit base: the sine pair at frequency pi") {
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    PrincipalityReport rep = classify_principality(one, 0.0, 1.0, 0.5);
    REQUIRE(rep.decided);
    CounterexampleResult res = build_comparison_counterexample(zero, one, 0.0, 1.0, 0.5, rep);

    CHECK(res.kind == "schwarzian");
    CHECK(res.generator_case == GeneratorCase::both_finite);
    CHECK(res.L1 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(res.L2 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(0.0 < res.window_lo);
    CHECK(res.window_lo < res.window_hi);
    CHECK(res.window_hi < 1.0);

    for (double x : {0.2, 0.37, 0.5, 0.8})
      CHECK(res.P(x) == doctest::Approx(kPi * kPi).epsilon(1e-7));
    // v is proportional to sin(pi x), so ratios kill the normalization.
    CHECK(res.v(0.25) / res.v(0.5) == doctest::Approx(std::sin(0.25 * kPi)).epsilon(1e-9));
    CHECK(res.v(0.125) / res.v(0.5) == doctest::Approx(std::sin(0.125 * kPi)).epsilon(1e-8));

    CHECK(res.residual_max <= 1e-7);
    CHECK(res.positivity_margin > 0.0);
    CHECK(res.ordering_margin == doctest::Approx(kPi * kPi).epsilon(1e-6));
    CHECK(!res.detail.empty());
  }

  TEST_CASE("raised coefficient with one finite mass lands on the half-exponent equation") {
    Family lo{0.25};
    auto u4 = [lo](double x) { return lo.u(x); };
    auto p4 = [lo](double x) { return lo.p(x); };
    PrincipalityReport rep4 = classify_principality(u4, -1.0, 1.0, 0.0);
    REQUIRE(rep4.decided);
    CounterexampleResult r4 = build_comparison_counterexample(p4, u4, -1.0, 1.0, 0.0, rep4);

    CHECK(r4.generator_case == GeneratorCase::right_finite);
    CHECK(std::isinf(r4.L1));
    CHECK(r4.L2 == doctest::Approx(1.0).epsilon(1e-6));
    // P = p + f'^2 / (4 (L2 - f)^2) collapses to 1/(1-x^2)^2 in closed form.
    for (double x : {-0.9, -0.3, 0.4, 0.8}) {
      double s = (1.0 - x * x) * (1.0 - x * x);
      CHECK(r4.P(x) * s == doctest::Approx(1.0).epsilon(1e-6));
    }
    // v = u sqrt(L2 - f) collapses to sqrt(1 - x^2), normalization included.
    for (double x : {-0.6, 0.0, 0.6})
      CHECK(r4.v(x) == doctest::Approx(std::sqrt(1.0 - x * x)).epsilon(1e-6));
    CHECK(r4.residual_max <= 1e-6);
    CHECK(r4.ordering_margin > 0.0);

    // The mirrored family (lam = 3/4) takes the left-finite route to the
    // same raised equation.
    Family hi{0.75};
    auto u34 = [hi](double x) { return hi.u(x); };
    auto p34 = [hi](double x) { return hi.p(x); };
    PrincipalityReport rep34 = classify_principality(u34, -1.0, 1.0, 0.0);
    CounterexampleResult r34 = build_comparison_counterexample(p34, u34, -1.0, 1.0, 0.0, rep34);
    CHECK(r34.generator_case == GeneratorCase::left_finite);
    CHECK(r34.L1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::isinf(r34.L2));
    for (double x : {-0.8, 0.0, 0.7}) {
      double s = (1.0 - x * x) * (1.0 - x * x);
      CHECK(r34.P(x) * s == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(r34.v(x) == doctest::Approx(std::sqrt(1.0 - x * x)).epsilon(1e-6));
    }
  }

  TEST_CASE("every builder refuses a base whose mass diverges at both ends") {
    Family half{0.5};
    auto u = [half](double x) { return half.u(x); };
    auto p = [half](double x) { return half.p(x); };
    PrincipalityReport rep = classify_principality(u, -1.0, 1.0, 0.0);
    REQUIRE(rep.principal);

    CHECK_THROWS_AS(build_comparison_counterexample(p, u, -1.0, 1.0, 0.0, rep), RefusalError);
    CHECK_THROWS_AS(build_separation_counterexample(u, -1.0, 1.0, 0.0, rep), RefusalError);
    CHECK_THROWS_AS(chuaqui_counterexample(p, u, -1.0, 1.0, 0.0, rep), RefusalError);
    CHECK_THROWS_AS(steinmetz_counterexample(p, u, -1.0, 1.0, 0.0, rep, 0.5), RefusalError);

    // The refusal explains the obstruction rather than just declining.
    try {
      build_comparison_counterexample(p, u, -1.0, 1.0, 0.0, rep);
      FAIL("expected a refusal");
    } catch (const RefusalError& e) {
      CHECK(std::string(e.what()).find("constant") != std::string::npos);
    }
  }

  TEST_CASE("builders refuse when an endpoint classification is undecided") {
    // sqrt(1-x) modulated by a bounded log-periodic factor: the mass toward
    // x = 1 grows like a logarithm with a drifting density, which the ladder
    // reports as undecided rather than guessing.
    auto u = [](double x) {
      double s = 1.0 - x;
      return std::sqrt(s) * (2.0 + std::sin(3.0 * std::log(s)));
    };
    auto p = [](double x) {
      double s = 1.0 - x;
      double m = 2.0 + std::sin(3.0 * std::log(s));
      return (m / 4.0 + 9.0 * std::sin(3.0 * std::log(s))) / (s * s * m);
    };
    PrincipalityReport rep = classify_principality(u, 0.0, 1.0, 0.5);
    REQUIRE(!rep.decided);
    CHECK_THROWS_AS(build_comparison_counterexample(p, u, 0.0, 1.0, 0.5, rep), RefusalError);
    CHECK_THROWS_AS(build_separation_counterexample(u, 0.0, 1.0, 0.5, rep), RefusalError);
    CHECK_THROWS_AS(chuaqui_counterexample(p, u, 0.0, 1.0, 0.5, rep), RefusalError);
    CHECK_THROWS_AS(steinmetz_counterexample(p, u, 0.0, 1.0, 0.5, rep, 0.5), RefusalError);
  }

  TEST_CASE("a base pair that does not solve its own equation is rejected") {
    auto one = [](double) { return 1.0; };
    auto wrong_p = [](double) { return 1.0; };  // 1'' + 1*1 = 1, not a solution
    PrincipalityReport rep = classify_principality(one, 0.0, 1.0, 0.5);
    CHECK_THROWS_AS(build_comparison_counterexample(wrong_p, one, 0.0, 1.0, 0.5, rep),
                    HypothesisError);
  }

  TEST_CASE("cosine construction: unit base on (0, 1) and the quadratic base on the line") {
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    PrincipalityReport rep1 = classify_principality(one, 0.0, 1.0, 0.5);
    CounterexampleResult c1 = chuaqui_counterexample(zero, one, 0.0, 1.0, 0.5, rep1);

    CHECK(c1.kind == "chuaqui");
    CHECK(c1.k == doctest::Approx(0.9 * kPi).epsilon(1e-12));
    CHECK(c1.safety == doctest::Approx(0.9));
    CHECK(c1.k * std::max(c1.L1, c1.L2) == doctest::Approx(0.45 * kPi).epsilon(1e-9));
    for (double x : {0.2, 0.5, 0.9})
      CHECK(c1.P(x) == doctest::Approx(0.81 * kPi * kPi).epsilon(1e-9));
    CHECK(c1.v(0.3) == doctest::Approx(std::cos(0.9 * kPi * -0.2)).epsilon(1e-9));
    CHECK(c1.residual_max <= 1e-7);
    CHECK(c1.positivity_margin > 0.0);

    // Independent cross-check: integrate w'' + P w = 0 from the midpoint and
    // compare against the closed-form construction along the window.
    Trajectory t = solve_ivp(c1.P, 0.5, c1.v(0.5), 0.0, c1.window_lo, c1.window_hi);
    for (double x : probes(c1.window_lo, c1.window_hi, 20))
      CHECK(t.u(x) == doctest::Approx(c1.v(x)).epsilon(1e-8));

    // u = 1 + x^2 solves the equation with p = -2/(1+x^2); both masses are
    // pi/4, so k = 0.9 (pi/2)/(pi/4) = 1.8.
    auto pq = [](double x) { return -2.0 / (1.0 + x * x); };
    auto uq = [](double x) { return 1.0 + x * x; };
    PrincipalityReport repq = classify_principality(uq, -kInf, kInf, 0.0);
    REQUIRE(repq.decided);
    CHECK(repq.left.value == doctest::Approx(kPi / 4.0).epsilon(1e-9));
    CHECK(repq.right.value == doctest::Approx(kPi / 4.0).epsilon(1e-9));
    CounterexampleResult cq = chuaqui_counterexample(pq, uq, -kInf, kInf, 0.0, repq);
    CHECK(cq.k == doctest::Approx(1.8).epsilon(1e-9));
    double f2 = 2.0 / (2.0 * 5.0) + std::atan(2.0) / 2.0;  // closed-form map at x = 2
    CHECK(cq.v(2.0) == doctest::Approx(5.0 * std::cos(cq.k * f2)).epsilon(1e-9));
    CHECK(cq.P(2.0) == doctest::Approx(-0.4 + cq.k * cq.k / 625.0).epsilon(1e-9));
    CHECK(cq.residual_max <= 1e-6);

    // One divergent mass leaves no room for the cosine route.
    Family lo{0.25};
    auto u4 = [lo](double x) { return lo.u(x); };
    auto p4 = [lo](double x) { return lo.p(x); };
    PrincipalityReport rep4 = classify_principality(u4, -1.0, 1.0, 0.0);
    CHECK_THROWS_AS(chuaqui_counterexample(p4, u4, -1.0, 1.0, 0.0, rep4), RefusalError);
  }

  TEST_CASE("power-product construction: the exponential pair lands exactly") {
    auto pm1 = [](double) { return -1.0; };
    auto uex = [](double x) { return std::exp(x); };
    PrincipalityReport rep = classify_principality(uex, -kInf, kInf, 0.0);
    REQUIRE(rep.decided);
    CHECK(rep.left.verdict == Verdict::divergent);
    CHECK(rep.right.verdict == Verdict::finite);
    CHECK(rep.right.value == doctest::Approx(0.5).epsilon(1e-12));

    // With c = 2 the second solution is exp(-x) on the nose, and
    // v = u1^0.3 u2^0.7 = exp(-0.4 x) solves v'' - 0.16 v = 0.
    ConstructOptions opts;
    opts.infinite_window = 4.0;
    CounterexampleResult st =
        steinmetz_counterexample(pm1, uex, -kInf, kInf, 0.0, rep, 0.3, 2.0, opts);
    CHECK(st.kind == "steinmetz");
    CHECK(st.alpha == doctest::Approx(0.3));
    CHECK(st.c == doctest::Approx(2.0));
    CHECK(st.k == doctest::Approx(2.0 * std::sqrt(0.21)).epsilon(1e-12));
    for (double x : {-1.0, 0.0, 1.3, 2.5})
      CHECK(st.P(x) == doctest::Approx(-0.16).epsilon(1e-10));
    for (double x : {-2.0, 0.5, 2.0})
      CHECK(st.v(x) == doctest::Approx(std::exp(-0.4 * x)).epsilon(1e-10));
    CHECK(st.residual_max <= 1e-8);
    CHECK(st.ordering_margin == doctest::Approx(0.84).epsilon(1e-9));
  }

  TEST_CASE("power-product construction: automatic mixing and hypothesis limits") {
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    PrincipalityReport rep = classify_principality(one, 0.0, 1.0, 0.5);

    CounterexampleResult st = steinmetz_counterexample(zero, one, 0.0, 1.0, 0.5, rep, 0.5);
    CHECK(st.c == doctest::Approx(1.8).epsilon(1e-9));  // 0.9 / L2 with L2 = 1/2
    CHECK(st.safety == doctest::Approx(0.9));
    CHECK(st.alpha == doctest::Approx(0.5));
    // P = 0.81 / (1 - 1.8 (x - 1/2))^2 at the unit base.
    double u2 = 1.0 - 1.8 * 0.4;
    CHECK(st.P(0.9) == doctest::Approx(0.81 / (u2 * u2)).epsilon(1e-9));
    CHECK(st.residual_max <= 1e-6);
    CHECK(st.positivity_margin > 0.0);

    // Exponent and mixing-coefficient validation.
    CHECK_THROWS_AS(steinmetz_counterexample(zero, one, 0.0, 1.0, 0.5, rep, 1.2, 1.0),
                    UsageError);
    CHECK_THROWS_AS(steinmetz_counterexample(zero, one, 0.0, 1.0, 0.5, rep, 0.0, 1.0),
                    UsageError);
    CHECK_THROWS_AS(steinmetz_counterexample(zero, one, 0.0, 1.0, 0.5, rep, 0.5, 0.0),
                    UsageError);

    // c = 3 makes the companion vanish at x = 1/2 + 1/3: rejected with the
    // location of the first sign change.
    auto reported_root = [](const std::string& what) {
      auto pos = what.find("x = ");
      REQUIRE(pos != std::string::npos);
      return std::stod(what.substr(pos + 4));
    };
    try {
      steinmetz_counterexample(zero, one, 0.0, 1.0, 0.5, rep, 0.5, 3.0);
      FAIL("expected a hypothesis rejection");
    } catch (const HypothesisError& e) {
      CHECK(reported_root(e.what()) == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
    }

    // Negative c pushes the sign change toward the divergent left side of
    // the lam = 1/4 family: also rejected, with the root at x = -3/5.
    Family lo{0.25};
    auto u4 = [lo](double x) { return lo.u(x); };
    auto p4 = [lo](double x) { return lo.p(x); };
    PrincipalityReport rep4 = classify_principality(u4, -1.0, 1.0, 0.0);
    try {
      steinmetz_counterexample(p4, u4, -1.0, 1.0, 0.0, rep4, 0.5, -1.0);
      FAIL("expected a hypothesis rejection");
    } catch (const HypothesisError& e) {
      CHECK(reported_root(e.what()) == doctest::Approx(-0.6).epsilon(1e-6));
    }
  }

  TEST_CASE("separation counterexamples stay positive with the designed margin") {
    auto one = [](double) { return 1.0; };
    PrincipalityReport rep1 = classify_principality(one, 0.0, 1.0, 0.5);
    SeparationCounterexample s1 = build_separation_counterexample(one, 0.0, 1.0, 0.5, rep1);
    CHECK(s1.c1 == doctest::Approx(1.0));
    CHECK(s1.c2 == doctest::Approx(0.5).epsilon(1e-9));  // 1/(2(L1+L2)) with both 1/2
    CHECK(s1.v(0.9) == doctest::Approx(1.2).epsilon(1e-9));
    CHECK(s1.positivity_margin == doctest::Approx(0.75).epsilon(1e-3));
    // The root -c1/c2 = -2 lies far outside the attainable mass range.
    CHECK(-s1.c1 / s1.c2 < -s1.L1);

    Family lo{0.25};
    auto u4 = [lo](double x) { return lo.u(x); };
    PrincipalityReport rep4 = classify_principality(u4, -1.0, 1.0, 0.0);
    SeparationCounterexample s4 = build_separation_counterexample(u4, -1.0, 1.0, 0.0, rep4);
    CHECK(s4.c2 == doctest::Approx(-0.5).epsilon(1e-6));  // -1/(2 L2), right mass 1
    CHECK(s4.positivity_margin > 0.5);
    CHECK(s4.positivity_margin < 0.6);
    CHECK(-s4.c1 / s4.c2 == doctest::Approx(2.0 * s4.L2).epsilon(1e-6));
    for (double x : {-0.95, -0.2, 0.6, 0.99}) CHECK(s4.v(x) > 0.0);

    Family hi{0.75};
    auto u34 = [hi](double x) { return hi.u(x); };
    PrincipalityReport rep34 = classify_principality(u34, -1.0, 1.0, 0.0);
    SeparationCounterexample s34 = build_separation_counterexample(u34, -1.0, 1.0, 0.0, rep34);
    CHECK(s34.c2 == doctest::Approx(0.5).epsilon(1e-6));  // +1/(2 L1), left mass 1
  }

  TEST_CASE("relative convexity of the solution ratio in the mass coordinate") {
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };

    // Equal coefficients, equal solutions: the ratio is affine in y (here
    // constant), so both extreme second differences vanish.
    ConvexityReport flat = relative_convexity_check(one, one, zero, zero, 0.0, 1.0, 0.5);
    CHECK(flat.concave);
    CHECK(std::fabs(flat.min_second_difference) <= 1e-8);
    CHECK(std::fabs(flat.max_second_difference) <= 1e-8);

    // u = 1, v = sin(pi x): with y = x - 1/2 the ratio is cos(pi y), whose
    // second derivative runs from -pi^2 at the center up to nearly 0.
    auto vsin = [](double x) { return std::sin(kPi * x); };
    auto Ppi = [](double) { return kPi * kPi; };
    ConvexityReport cr = relative_convexity_check(one, vsin, zero, Ppi, 0.0, 1.0, 0.5);
    CHECK(cr.concave);
    CHECK(cr.min_second_difference == doctest::Approx(-kPi * kPi).epsilon(1e-3));
    CHECK(cr.max_second_difference <= 1e-6);

    // Two members of the power family with ordered coefficients.
    Family base{0.25}, upper{0.4};
    auto ub = [base](double x) { return base.u(x); };
    auto pb = [base](double x) { return base.p(x); };
    auto vu = [upper](double x) { return upper.u(x); };
    auto Pu = [upper](double x) { return upper.p(x); };
    ConvexityReport fam = relative_convexity_check(ub, vu, pb, Pu, -1.0, 1.0, 0.0);
    CHECK(fam.concave);
    CHECK(fam.max_second_difference <= 1e-8);

    // A sign-changing v or out-of-order coefficients violate the hypotheses.
    auto neg = [](double) { return -1.0; };
    CHECK_THROWS_AS(relative_convexity_check(one, neg, zero, zero, 0.0, 1.0, 0.5),
                    HypothesisError);
    CHECK_THROWS_AS(relative_convexity_check(ub, vu, Pu, pb, -1.0, 1.0, 0.0), HypothesisError);
  }

  TEST_CASE("constructed coefficients defeat the two-zero conclusion end to end") {
    // Each constructed P agrees with a closed form that extends to the whole
    // interval (checked in the construction cases above); the checker probes
    // outside the construction window, so it receives the closed form.
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };

    ComparisonInput in1;
    in1.p = zero;
    in1.P = [](double) { return kPi * kPi; };
    in1.u = one;
    in1.du = zero;
    in1.a = 0.0;
    in1.b = 1.0;
    in1.x0 = 0.5;
    ComparisonReport r1 = check_comparison(in1);
    CHECK(r1.status == CheckStatus::fail_witness);
    CHECK(r1.witness_found);
    CHECK(r1.witness_zero_count < 2);

    Family lo{0.25};
    ComparisonInput in4;
    in4.p = [lo](double x) { return lo.p(x); };
    in4.P = [](double x) { return 1.0 / ((1.0 - x * x) * (1.0 - x * x)); };
    in4.u = [lo](double x) { return lo.u(x); };
    in4.du = [lo](double x) { return lo.du(x); };
    in4.a = -1.0;
    in4.b = 1.0;
    in4.x0 = 0.0;
    ComparisonReport r4 = check_comparison(in4);
    CHECK(r4.status == CheckStatus::fail_witness);
    CHECK(r4.witness_zero_count < 2);

    ComparisonInput ine;
    ine.p = [](double) { return -1.0; };
    ine.P = [](double) { return -0.16; };
    ine.u = [](double x) { return std::exp(x); };
    ine.du = [](double x) { return std::exp(x); };
    ine.a = -kInf;
    ine.b = kInf;
    ine.x0 = 0.0;
    ComparisonReport re = check_comparison(ine);
    CHECK(re.status == CheckStatus::fail_witness);
    CHECK(re.witness_zero_count < 2);

    // The separation checker independently confirms what the separation
    // builder exploited: a combination that never vanishes exists.
    Family fam{0.25};
    auto u4 = [fam](double x) { return fam.u(x); };
    SeparationReport sr = check_separation(u4, -1.0, 1.0, 0.0);
    CHECK(sr.status == CheckStatus::fail_witness);
    CHECK(sr.witness_found);
  }
}
