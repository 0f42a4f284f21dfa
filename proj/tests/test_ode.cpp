#include <cmath>

#include "doctest.h"
#include "sturmkit/expr.hpp"
#include "sturmkit/ode.hpp"

using namespace sturmkit;

TEST_SUITE("ode") {
  TEST_CASE("harmonic oscillator matches sine to tight tolerance") {
    auto traj = solve_ivp([](double) { return 1.0; }, 0.0, 0.0, 1.0, 0.0, 10.0);
    CHECK(traj.right_complete());
    CHECK(traj.u(M_PI / 2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(traj.u(10.0) == doctest::Approx(-0.5440211108893698).epsilon(1e-8));
    CHECK(traj.du(10.0) == doctest::Approx(-0.8390715290764524).epsilon(1e-8));
    // dense output across the span
    for (double x = 0.05; x < 10.0; x += 0.37) {
      CHECK(traj.u(x) == doctest::Approx(std::sin(x)).epsilon(1e-7));
      CHECK(traj.du(x) == doctest::Approx(std::cos(x)).epsilon(1e-7));
    }
  }

  TEST_CASE("exponential growth for constant negative coefficient") {
    auto traj = solve_ivp([](double) { return -1.0; }, 0.0, 1.0, 1.0, 0.0, 5.0);
    CHECK(traj.u(5.0) == doctest::Approx(148.4131591025766).epsilon(1e-8));
  }

  TEST_CASE("decaying Airy solution") {
    // u'' - x u = 0 with the Ai initial data at 0.
    auto traj = solve_ivp([](double x) { return -x; }, 0.0, 0.3550280538878172,
                          -0.2588194037928068, 0.0, 5.0, {1e-12});
    CHECK(traj.u(5.0) == doctest::Approx(1.0834442813607433e-4).epsilon(1e-6));
    CHECK(traj.du(5.0) == doctest::Approx(-2.474138908684623e-4).epsilon(1e-6));
  }

  TEST_CASE("two-sided sweep reproduces the power-family solution") {
    Expr pe = parse("4*lam*(1-lam)/(1-x^2)^2");
    ParamBinding b{{"lam", 0.25}};
    auto p = [&](double x) { return pe.eval(x, b); };
    // u(0)=1, u'(0)=1-2*lam
    auto traj = solve_ivp(p, 0.0, 1.0, 0.5, -0.9, 0.9, {1e-11});
    CHECK(traj.left_complete());
    CHECK(traj.right_complete());
    CHECK(traj.u(0.9) == doctest::Approx(0.9100498883427918).epsilon(1e-9));
    CHECK(traj.du(0.9) == doctest::Approx(-1.9158945017742992).epsilon(1e-9));
    CHECK(traj.u(-0.9) == doctest::Approx(0.20877976299298434).epsilon(1e-9));
    CHECK(traj.du(-0.9) == doctest::Approx(1.538377201000938).epsilon(1e-9));
  }

  TEST_CASE("sweep stops at the step floor near a strong singularity") {
    // p = (1-x)^-4 blows up fast enough that the step floor is reached
    // before the requested right endpoint.
    auto traj = solve_ivp([](double x) { return std::pow(1.0 - x, -4.0); }, 0.0, 1.0, 0.0,
                          0.0, 1.0 - 1e-9);
    CHECK_FALSE(traj.right_complete());
    CHECK(traj.right() < 1.0 - 1e-9);
    CHECK(traj.right() > 0.5);  // got most of the way there
    // values remain queryable on the reached span
    CHECK(std::isfinite(traj.u(traj.right())));
  }

  TEST_CASE("degenerate window returns the anchor data") {
    auto traj = solve_ivp([](double) { return 1.0; }, 2.0, 3.0, 4.0, 2.0, 2.0);
    CHECK(traj.u(2.0) == 3.0);
    CHECK(traj.du(2.0) == 4.0);
    CHECK_THROWS_AS(traj.u(2.5), NumericError);
  }

  TEST_CASE("queries outside the computed span are rejected") {
    auto traj = solve_ivp([](double) { return 1.0; }, 0.0, 0.0, 1.0, 0.0, 1.0);
    CHECK_THROWS_AS(traj.u(1.5), NumericError);
    CHECK_THROWS_AS(traj.u(-0.5), NumericError);
  }

  TEST_CASE("invalid windows are rejected") {
    auto one = [](double) { return 1.0; };
    CHECK_THROWS_AS(solve_ivp(one, 5.0, 1.0, 0.0, 0.0, 1.0), NumericError);
    CHECK_THROWS_AS(
        solve_ivp(one, 0.0, 1.0, 0.0, 0.0, std::numeric_limits<double>::infinity()),
        NumericError);
  }

  TEST_CASE("zero initial data propagates the zero solution") {
    auto traj = solve_ivp([](double x) { return 1.0 + x * x; }, 0.0, 0.0, 0.0, 0.0, 3.0);
    CHECK(traj.right_complete());
    CHECK(traj.u(1.7) == 0.0);
    CHECK(traj.du(2.9) == 0.0);
  }

  TEST_CASE("steps are contiguous and ascending") {
    auto traj = solve_ivp([](double) { return 1.0; }, 0.0, 0.0, 1.0, -5.0, 5.0);
    const auto& steps = traj.steps();
    REQUIRE(!steps.empty());
    for (std::size_t i = 0; i < steps.size(); ++i) {
      CHECK(steps[i].x0 < steps[i].x1);
      if (i > 0) {
        CHECK(steps[i].x0 == steps[i - 1].x1);
        CHECK(steps[i].u0 == steps[i - 1].u1);
        CHECK(steps[i].du0 == steps[i - 1].du1);
      }
    }
    CHECK(steps.front().x0 == -5.0);
    CHECK(steps.back().x1 == 5.0);
  }
}
