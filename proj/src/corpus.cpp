#include "sturmkit/corpus.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sturmkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_param(const ParamBinding& b, const std::string& name) {
  auto it = b.find(name);
  if (it == b.end()) throw UnboundParamError(name);
  return it->second;
}

std::vector<CorpusEntry> make_corpus() {
  std::vector<CorpusEntry> out;

  {
    // Parametrized family on (-1, 1) whose endpoint masses switch character
    // at lam = 1/2: the primary solution's left mass diverges for lam <= 1/2
    // and its right mass diverges for lam >= 1/2.
    CorpusEntry e;
    e.name = "lambda-family";
    e.p = parse("4*lam*(1-lam)/(1-x^2)^2");
    e.a = -1.0;
    e.b = 1.0;
    Expr u1 = parse("(1-x)^lam*(1+x)^(1-lam)");
    Expr u2 = parse("(1+x)^lam*(1-x)^(1-lam)");
    e.solutions.push_back({"u1", u1, u1.diff()});
    e.solutions.push_back({"u2", u2, u2.diff()});
    e.defaults = {{"lam", 0.25}};
    e.tags = {"parametrized", "singular-endpoints"};
    e.expected = [](const ParamBinding& b) {
      double lam = require_param(b, "lam");
      return std::pair<Verdict, Verdict>(
          lam <= 0.5 ? Verdict::divergent : Verdict::finite,
          lam >= 0.5 ? Verdict::divergent : Verdict::finite);
    };
    e.validate = [](const ParamBinding& b) {
      double lam = require_param(b, "lam");
      if (!(lam > 0.0 && lam < 1.0))
        throw UsageError("lambda-family needs lam in (0, 1); got " + std::to_string(lam));
    };
    out.push_back(std::move(e));
  }

  {
    CorpusEntry e;
    e.name = "const-zero";
    e.p = parse("0");
    e.a = 0.0;
    e.b = 1.0;
    Expr u = parse("1");
    e.solutions.push_back({"u1", u, u.diff()});
    e.tags = {"constant-coefficient", "finite-masses"};
    e.expected = [](const ParamBinding&) {
      return std::pair<Verdict, Verdict>(Verdict::finite, Verdict::finite);
    };
    out.push_back(std::move(e));
  }

  {
    // sin is positive on (0, pi) and its reciprocal-square mass diverges
    // like 1/distance at both zeros of sin.
    CorpusEntry e;
    e.name = "const-one";
    e.p = parse("1");
    e.a = 0.0;
    e.b = 3.14159265358979323846;
    Expr u = parse("sin(x)");
    e.solutions.push_back({"u1", u, u.diff()});
    e.tags = {"constant-coefficient", "divergent-masses"};
    e.expected = [](const ParamBinding&) {
      return std::pair<Verdict, Verdict>(Verdict::divergent, Verdict::divergent);
    };
    out.push_back(std::move(e));
  }

  {
    // Exponentials on the whole line: e^x has divergent mass toward -inf
    // (the integrand e^{-2x} blows up) and finite mass toward +inf.
    CorpusEntry e;
    e.name = "const-neg-one";
    e.p = parse("-1");
    e.a = -kInf;
    e.b = kInf;
    Expr u1 = parse("exp(x)");
    Expr u2 = parse("exp(-x)");
    e.solutions.push_back({"u1", u1, u1.diff()});
    e.solutions.push_back({"u2", u2, u2.diff()});
    e.tags = {"constant-coefficient", "whole-line"};
    e.expected = [](const ParamBinding&) {
      return std::pair<Verdict, Verdict>(Verdict::divergent, Verdict::finite);
    };
    out.push_back(std::move(e));
  }

  {
    CorpusEntry e;
    e.name = "const-pi-squared";
    e.p = parse("pi^2");
    e.a = 0.0;
    e.b = 1.0;
    Expr u = parse("sin(pi*x)");
    e.solutions.push_back({"u1", u, u.diff()});
    e.tags = {"constant-coefficient", "divergent-masses"};
    e.expected = [](const ParamBinding&) {
      return std::pair<Verdict, Verdict>(Verdict::divergent, Verdict::divergent);
    };
    out.push_back(std::move(e));
  }

  {
    // Scale-invariant equation on (0, inf).  The positive solution
    // x^((1+sqrt(1-4k))/2) always has divergent mass at 0; toward infinity
    // the mass diverges only in the double-root case k = 1/4 (u = sqrt(x),
    // the unique member with divergent mass at both ends).
    CorpusEntry e;
    e.name = "euler-family";
    e.p = parse("k/x^2");
    e.a = 0.0;
    e.b = kInf;
    Expr u = parse("x^((1+sqrt(1-4*k))/2)");
    e.solutions.push_back({"u1", u, u.diff()});
    e.defaults = {{"k", 0.25}};
    e.tags = {"parametrized", "half-line", "scale-invariant"};
    e.expected = [](const ParamBinding& b) {
      double k = require_param(b, "k");
      return std::pair<Verdict, Verdict>(Verdict::divergent,
                                         k == 0.25 ? Verdict::divergent : Verdict::finite);
    };
    e.validate = [](const ParamBinding& b) {
      double k = require_param(b, "k");
      if (!(k <= 0.25))
        throw UsageError("euler-family needs k <= 1/4 for a positive power solution; got " +
                         std::to_string(k));
    };
    out.push_back(std::move(e));
  }

  return out;
}

}  // namespace

double CorpusEntry::default_x0() const {
  bool fin_a = std::isfinite(a), fin_b = std::isfinite(b);
  if (fin_a && fin_b) return 0.5 * (a + b);
  if (!fin_a && !fin_b) return 0.0;
  return fin_a ? a + 1.0 : b - 1.0;
}

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = make_corpus();
  return entries;
}

const CorpusEntry& corpus_entry(const std::string& name) {
  for (const CorpusEntry& e : corpus())
    if (e.name == name) return e;
  std::ostringstream os;
  os << "unknown corpus entry '" << name << "'; known entries:";
  for (const CorpusEntry& e : corpus()) os << " " << e.name;
  throw UsageError(os.str());
}

CorpusRef resolve_corpus_ref(const std::string& ref) {
  std::string name = ref;
  std::string value;
  if (auto colon = ref.find(':'); colon != std::string::npos) {
    name = ref.substr(0, colon);
    value = ref.substr(colon + 1);
  }
  CorpusRef r;
  r.entry = &corpus_entry(name);
  r.params = r.entry->defaults;
  if (!value.empty()) {
    if (r.entry->defaults.size() != 1)
      throw UsageError("the shorthand '" + ref + "' needs an entry with exactly one parameter");
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != value.size())
      throw UsageError("could not parse '" + value + "' as a parameter value in '" + ref + "'");
    r.params.begin()->second = v;
  }
  if (r.entry->validate) r.entry->validate(r.params);
  return r;
}

std::function<double(double)> bind_expr(const Expr& e, const ParamBinding& params) {
  return [e, params](double x) { return e.eval(x, params); };
}

}  // namespace sturmkit
