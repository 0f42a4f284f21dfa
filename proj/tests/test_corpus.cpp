#include <cmath>
#include <limits>

#include "doctest.h"
#include "sturmkit/corpus.hpp"

using namespace sturmkit;

namespace {

// Interior sample points for an entry, shrunk away from singular or
// infinite ends so every closed form stays in its real domain.
std::vector<double> sample_grid(const CorpusEntry& e, int n = 64) {
  double lo = e.a, hi = e.b;
  if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 8.0 : -4.0;
  if (!std::isfinite(hi)) hi = lo + 8.0;
  double pad = 1e-3 * (hi - lo);
  lo += pad;
  hi -= pad;
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * i / (n - 1));
  return xs;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("every closed-form solution satisfies its equation") {
    for (const CorpusEntry& e : corpus()) {
      CAPTURE(e.name);
      for (const CorpusSolution& s : e.solutions) {
        CAPTURE(s.name);
        Expr ddu = s.du.diff();
        for (double x : sample_grid(e)) {
          CAPTURE(x);
          double u = s.u.eval(x, e.defaults);
          double r = ddu.eval(x, e.defaults) + e.p.eval(x, e.defaults) * u;
          double scale = 1.0 + std::abs(u) + std::abs(e.p.eval(x, e.defaults) * u);
          CHECK(std::abs(r) <= 1e-8 * scale);
        }
      }
    }
  }

  TEST_CASE("stored derivatives match the symbolic derivative of u") {
    for (const CorpusEntry& e : corpus()) {
      CAPTURE(e.name);
      for (const CorpusSolution& s : e.solutions) {
        Expr du = s.u.diff();
        for (double x : sample_grid(e, 17)) {
          double want = du.eval(x, e.defaults);
          CHECK(s.du.eval(x, e.defaults) ==
                doctest::Approx(want).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("primary solutions are positive on the open interval") {
    for (const CorpusEntry& e : corpus()) {
      CAPTURE(e.name);
      for (double x : sample_grid(e))
        CHECK(e.solutions.front().u.eval(x, e.defaults) > 0.0);
    }
  }

  TEST_CASE("classifier agrees with the known endpoint character") {
    struct Probe {
      const char* ref;
    };
    // Parametrized entries get several bindings; the rest run at defaults.
    const char* refs[] = {"lambda-family:0.25", "lambda-family:0.5",
                          "lambda-family:0.75", "const-zero",
                          "const-one",          "const-neg-one",
                          "const-pi-squared",   "euler-family:0.25",
                          "euler-family:0.2"};
    for (const char* ref : refs) {
      CAPTURE(ref);
      CorpusRef r = resolve_corpus_ref(ref);
      const CorpusEntry& e = *r.entry;
      auto u = bind_expr(e.solutions.front().u, r.params);
      auto rep = classify_principality(u, e.a, e.b, e.default_x0());
      auto [want_left, want_right] = e.expected(r.params);
      CHECK(rep.left.verdict == want_left);
      CHECK(rep.right.verdict == want_right);
    }
  }

  TEST_CASE("default base points sit inside the interval") {
    for (const CorpusEntry& e : corpus()) {
      CAPTURE(e.name);
      double x0 = e.default_x0();
      CHECK(std::isfinite(x0));
      CHECK(x0 > e.a);
      CHECK(x0 < e.b);
    }
  }

  TEST_CASE("references resolve by name and shorthand") {
    CorpusRef plain = resolve_corpus_ref("lambda-family");
    CHECK(plain.entry->name == "lambda-family");
    CHECK(plain.params.at("lam") == doctest::Approx(0.25));

    CorpusRef bound = resolve_corpus_ref("lambda-family:0.4");
    CHECK(bound.params.at("lam") == doctest::Approx(0.4));

    CorpusRef euler = resolve_corpus_ref("euler-family:0.2");
    CHECK(euler.params.at("k") == doctest::Approx(0.2));

    CHECK_THROWS_AS((void)resolve_corpus_ref("no-such-entry"), UsageError);
    CHECK_THROWS_AS((void)resolve_corpus_ref("lambda-family:abc"), UsageError);
    CHECK_THROWS_AS((void)resolve_corpus_ref("lambda-family:1.5"), UsageError);
    CHECK_THROWS_AS((void)resolve_corpus_ref("euler-family:0.3"), UsageError);
    // const-zero has no parameters, so the shorthand has nothing to bind.
    CHECK_THROWS_AS((void)resolve_corpus_ref("const-zero:1.0"), UsageError);
  }

  TEST_CASE("lookup failures name the known entries") {
    try {
      (void)corpus_entry("nope");
      FAIL("expected UsageError");
    } catch (const UsageError& err) {
      std::string msg = err.what();
      CHECK(msg.find("lambda-family") != std::string::npos);
      CHECK(msg.find("euler-family") != std::string::npos);
    }
  }
}
