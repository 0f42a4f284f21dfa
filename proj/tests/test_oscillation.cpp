#include <cmath>
#include <vector>

#include "doctest.h"
#include "sturmkit/oscillation.hpp"

using namespace sturmkit;

namespace {

const double kPi = 3.14159265358979323846;

// One-parameter family on (-1, 1): coefficient 4*lam*(1-lam)/(1-x^2)^2 with
// the positive solution (1-x)^lam (1+x)^(1-lam).
struct Family {
  double lam;
  double p(double x) const { return 4.0 * lam * (1.0 - lam) / ((1.0 - x * x) * (1.0 - x * x)); }
  double u(double x) const { return std::pow(1.0 - x, lam) * std::pow(1.0 + x, 1.0 - lam); }
  double du(double x) const {
    return u(x) * ((1.0 - lam) / (1.0 + x) - lam / (1.0 - x));
  }
};

}  // namespace

TEST_SUITE("oscillation") {
  TEST_CASE("phase counting and localization reproduce the zeros of sine") {
    auto one = [](double) { return 1.0; };
    Trajectory t = solve_ivp(one, 0.0, 0.0, 1.0, 0.0, 10.0 * kPi + 0.5);
    ZeroCount zc = count_zeros(t, 0.0, 10.0 * kPi + 0.5);
    CHECK(zc.count == 10);
    CHECK(zc.reliable);
    auto zs = locate_zeros(t, 0.0, 10.0 * kPi + 0.5);
    REQUIRE(zs.size() == 10);
    for (int k = 1; k <= 10; ++k) CHECK(zs[k - 1] == doctest::Approx(k * kPi).epsilon(5e-8));
    // half-open window semantics: a zero at the left edge is excluded
    CHECK(count_zeros(t, kPi, 3.5 * kPi).count == 2);
  }

  TEST_CASE("zero counting matches the oscillation of the decaying Airy solution") {
    auto p = [](double x) { return -x; };
    Trajectory t = solve_ivp(p, 0.0, 0.3550280538878172, -0.2588194037928068, -10.0, 0.0);
    ZeroCount zc = count_zeros(t, -10.0, 0.0);
    CHECK(zc.count == 6);
    CHECK(zc.reliable);
    auto zs = locate_zeros(t, -10.0, 0.0);
    const std::vector<double> expected = {-9.022650853340979,  -7.944133587112781,
                                          -6.786708090071912,  -5.520559828095515,
                                          -4.08794944413097,   -2.3381074104597674};
    REQUIRE(zs.size() == expected.size());
    for (std::size_t i = 0; i < zs.size(); ++i)
      CHECK(zs[i] == doctest::Approx(expected[i]).epsilon(1e-7));
  }

  TEST_CASE("combination counting folds two trajectories into one phase walk") {
    auto one = [](double) { return 1.0; };
    Trajectory c = solve_ivp(one, 0.0, 1.0, 0.0, 0.0, 20.0);  // cos
    Trajectory s = solve_ivp(one, 0.0, 0.0, 1.0, 0.0, 20.0);  // sin
    // cos + sin = sqrt(2) sin(x + pi/4): zeros at k*pi - pi/4
    ZeroCount zc = count_zeros_combo(c, s, 1.0, 0.0, 20.0);
    CHECK(zc.reliable);
    CHECK(zc.count == 6);
  }

  TEST_CASE("a strict coefficient bump forces two sign changes in the window") {
    Family fam{0.5};
    ComparisonInput in;
    in.p = [fam](double x) { return fam.p(x); };
    in.P = [fam](double x) { return fam.p(x) + 1.0; };
    in.u = [fam](double x) { return fam.u(x); };
    in.du = [fam](double x) { return fam.du(x); };
    in.a = -1.0;
    in.b = 1.0;
    in.x0 = 0.0;
    auto rep = check_comparison(in);
    CHECK(rep.status == CheckStatus::pass);
    CHECK(rep.matched_zero_count == 2);
    REQUIRE(rep.matched_zeros.size() == 2);
    CHECK(rep.matched_zeros[0] == doctest::Approx(-0.9698567124002162).epsilon(1e-6));
    CHECK(rep.matched_zeros[1] == doctest::Approx(0.9698567124002162).epsilon(1e-6));
    // the total curvature beyond the window is finite, so there are exactly
    // two sign changes: at both edges the flux points inward and the
    // certificates stay (correctly) dead
    CHECK(rep.left_tail.boundary_flux < 0.0);
    CHECK(rep.right_tail.boundary_flux < 0.0);
    CHECK_FALSE(rep.left_tail.certified);
    CHECK_FALSE(rep.right_tail.certified);
    CHECK(rep.established == 2);
  }

  TEST_CASE("boundary certificates prove sign changes no grid can reach") {
    // A bump of 0.01 moves the matched solution's sign changes absurdly close
    // to the singular ends (beyond 1 - 1e-80), far outside any window; the
    // edge flux together with the divergent tail mass still certifies them.
    Family fam{0.5};
    ComparisonInput in;
    in.p = [fam](double x) { return fam.p(x); };
    in.P = [fam](double x) { return fam.p(x) + 0.01; };
    in.u = [fam](double x) { return fam.u(x); };
    in.du = [fam](double x) { return fam.du(x); };
    in.a = -1.0;
    in.b = 1.0;
    in.x0 = 0.0;
    auto rep = check_comparison(in);
    CHECK(rep.status == CheckStatus::pass);
    CHECK(rep.matched_zero_count == 0);
    CHECK(rep.left_tail.certified);
    CHECK(rep.right_tail.certified);
    CHECK(rep.left_tail.tail_verdict == Verdict::divergent);
    CHECK(rep.right_tail.tail_verdict == Verdict::divergent);
    CHECK(rep.left_tail.boundary_flux > 0.0);
    CHECK(rep.right_tail.boundary_flux > 0.0);
    CHECK(rep.established == 2);
  }

  TEST_CASE("finite mass at one end breaks the two-sign-change conclusion") {
    // Base lam = 1/4 (finite mass toward +1), compared against the family
    // member mu = 2/5, whose coefficient is strictly larger.  The matched
    // solution is 1.75*(1-x)^.4*(1+x)^.6 - 0.75*(1+x)^.4*(1-x)^.6 with its
    // single root where ((1+x)/(1-x))^(1/5) = 3/7.
    Family base{0.25}, cmp{0.4};
    ComparisonInput in;
    in.p = [base](double x) { return base.p(x); };
    in.P = [cmp](double x) { return cmp.p(x); };
    in.u = [base](double x) { return base.u(x); };
    in.du = [base](double x) { return base.du(x); };
    in.a = -1.0;
    in.b = 1.0;
    in.x0 = 0.0;
    auto rep = check_comparison(in);
    const double q = std::pow(3.0 / 7.0, 5);
    const double xstar = (q - 1.0) / (q + 1.0);  // -0.9714956011730205
    CHECK(rep.status == CheckStatus::fail_witness);
    CHECK(rep.matched_zero_count == 1);
    REQUIRE(rep.matched_zeros.size() == 1);
    CHECK(rep.matched_zeros[0] == doctest::Approx(xstar).epsilon(1e-6));
    CHECK(rep.established == 1);
    CHECK(rep.left_tail.tail_verdict == Verdict::divergent);
    CHECK(rep.left_tail.boundary_flux < 0.0);  // flux points inward: no certificate
    CHECK_FALSE(rep.left_tail.certified);
    CHECK(rep.right_tail.tail_verdict == Verdict::finite);
    CHECK_FALSE(rep.right_tail.certified);
    CHECK_FALSE(rep.right_tail.borderline);
    CHECK(rep.witness_found);
    CHECK(rep.witness_ratio == 0.0);  // the matched solution itself is the witness
    CHECK(rep.witness_zero_count == 1);
  }

  TEST_CASE("a barely-larger coefficient on a short interval is witnessed outright") {
    ComparisonInput in;
    in.p = [](double) { return 0.0; };
    in.P = [](double) { return 1e-4; };
    in.u = [](double) { return 1.0; };
    in.du = [](double) { return 0.0; };
    in.a = 0.0;
    in.b = 1.0;
    in.x0 = 0.5;
    auto rep = check_comparison(in);
    CHECK(rep.status == CheckStatus::fail_witness);
    CHECK(rep.matched_zero_count == 0);
    CHECK(rep.witness_found);
    CHECK(rep.witness_ratio == 0.0);
    CHECK(rep.witness_zero_count == 0);
    CHECK_FALSE(rep.left_tail.certified);
    CHECK_FALSE(rep.right_tail.certified);
  }

  TEST_CASE("comparison input screening") {
    auto pos = [](double) { return 1.0; };

    SUBCASE("a coefficient dipping below the base is rejected") {
      ComparisonInput in;
      in.p = pos;
      in.P = [](double) { return 1.0 - 1e-3; };
      in.u = [](double x) { return std::cos(x); };
      in.du = [](double x) { return -std::sin(x); };
      in.a = -1.0;
      in.b = 1.0;
      in.x0 = 0.0;
      CHECK_THROWS_AS(check_comparison(in), HypothesisError);
    }

    SUBCASE("coincident coefficients are rejected") {
      ComparisonInput in;
      in.p = pos;
      in.P = pos;
      in.u = [](double x) { return std::cos(x); };
      in.du = [](double x) { return -std::sin(x); };
      in.a = -1.0;
      in.b = 1.0;
      in.x0 = 0.0;
      CHECK_THROWS_AS(check_comparison(in), HypothesisError);
    }

    SUBCASE("a function that does not solve the base equation is rejected") {
      ComparisonInput in;
      in.p = [](double) { return -1.0; };
      in.P = [](double) { return 0.0; };
      in.u = [](double x) { return 1.0 + x * x; };
      in.du = [](double x) { return 2.0 * x; };
      in.a = 0.0;
      in.b = 1.0;
      in.x0 = 0.5;
      CHECK_THROWS_AS(check_comparison(in), HypothesisError);
    }

    SUBCASE("a base solution with a sign change is rejected") {
      ComparisonInput in;
      in.p = [](double) { return 0.0; };
      in.P = [](double) { return 1e-3; };
      in.u = [](double x) { return x - 0.3; };
      in.du = [](double) { return 1.0; };
      in.a = 0.0;
      in.b = 1.0;
      in.x0 = 0.5;
      CHECK_THROWS_AS(check_comparison(in), HypothesisError);
    }

    SUBCASE("the matching point must be interior") {
      ComparisonInput in;
      in.p = pos;
      in.P = pos;
      in.u = pos;
      in.du = [](double) { return 0.0; };
      in.a = 0.0;
      in.b = 1.0;
      in.x0 = 1.5;
      CHECK_THROWS_AS(check_comparison(in), UsageError);
    }
  }

  TEST_CASE("divergence at both ends certifies that every combination has a root") {
    auto u = [](double x) { return std::sqrt(1.0 - x * x); };
    auto rep = check_separation(u, -1.0, 1.0, 0.0);
    CHECK(rep.status == CheckStatus::pass);
    CHECK(rep.principality.principal);
    // the map is atanh here, so the exhibited roots are hyperbolic tangents
    REQUIRE(rep.sample_zeros.size() == 6);
    CHECK(rep.sample_zeros[0] == doctest::Approx(std::tanh(-2.0)).epsilon(1e-9));
    CHECK(rep.sample_zeros[1] == doctest::Approx(std::tanh(-1.0)).epsilon(1e-9));
    CHECK(rep.sample_zeros[4] == doctest::Approx(std::tanh(1.0)).epsilon(1e-9));
  }

  TEST_CASE("finite mass on the right yields a root-free combination") {
    Family fam{0.25};
    auto u = [fam](double x) { return fam.u(x); };
    auto rep = check_separation(u, -1.0, 1.0, 0.0);
    CHECK(rep.status == CheckStatus::fail_witness);
    CHECK(rep.witness_found);
    CHECK(rep.principality.left.verdict == Verdict::divergent);
    CHECK(rep.principality.right.verdict == Verdict::finite);
    CHECK(rep.principality.right.value == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(rep.witness_c1 == 1.0);
    CHECK(rep.witness_c2 == doctest::Approx(-0.5).epsilon(1e-4));
    CHECK(rep.witness_root == doctest::Approx(2.0).epsilon(1e-4));
  }

  TEST_CASE("the root-free separation witness for u(x) = x is the constant 1/2") {
    // With u = x on (0, 1) anchored at 1/2, the map is f = 2 - 1/x and the
    // witness combination u + (-1/2) u f collapses to the constant 1/2.
    auto u = [](double x) { return x; };
    auto rep = check_separation(u, 0.0, 1.0, 0.5);
    CHECK(rep.status == CheckStatus::fail_witness);
    CHECK(rep.principality.left.verdict == Verdict::divergent);
    CHECK(rep.principality.right.verdict == Verdict::finite);
    CHECK(rep.witness_c2 == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(rep.witness_root == doctest::Approx(2.0).epsilon(1e-6));
  }

  TEST_CASE("an undecidable endpoint mass leaves separation inconclusive") {
    auto u = [](double x) { return std::sqrt(1.0 - x) * (2.0 + std::sin(3.0 * std::log(1.0 - x))); };
    auto rep = check_separation(u, -1.0, 1.0, 0.0);
    CHECK(rep.status == CheckStatus::inconclusive);
    CHECK_FALSE(rep.principality.decided);
  }

  TEST_CASE("separation rejects a base function with a sign change") {
    auto u = [](double x) { return x - 0.3; };
    CHECK_THROWS_AS(check_separation(u, 0.0, 1.0, 0.5), HypothesisError);
  }

  TEST_CASE("status names") {
    CHECK(std::string(to_string(CheckStatus::pass)) == "pass");
    CHECK(std::string(to_string(CheckStatus::fail_witness)) == "fail-witness");
    CHECK(std::string(to_string(CheckStatus::inconclusive)) == "inconclusive");
  }
}
