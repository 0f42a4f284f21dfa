#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sturmkit/expr.hpp"
#include "sturmkit/principality.hpp"

namespace sturmkit {

/// A closed-form solution of the entry's equation, with its exact derivative.
struct CorpusSolution {
  std::string name;  // "u1", "u2", ...
  Expr u;
  Expr du;
};

/// A named model equation u'' + p u = 0 on an interval, with closed-form
/// positive solutions and the known endpoint-mass classification of the
/// primary solution, for oracle testing and the command line.
struct CorpusEntry {
  std::string name;
  Expr p;
  double a = 0.0, b = 0.0;  // interval ends; may be +-infinity
  /// Closed-form solutions; the first one is the primary u used by checks.
  std::vector<CorpusSolution> solutions;
  /// Default values for every free parameter of p and the solutions.
  ParamBinding defaults;
  /// Descriptive tags for listings.
  std::vector<std::string> tags;
  /// Known classification (left, right) of the primary solution's
  /// reciprocal-square masses as a function of the parameters.
  std::function<std::pair<Verdict, Verdict>(const ParamBinding&)> expected;
  /// Validates a parameter binding; throws UsageError for out-of-range
  /// values (e.g. an exponent that leaves the real domain).
  std::function<void(const ParamBinding&)> validate;

  /// Base-point rule: midpoint of a finite interval, 0 on the whole line,
  /// one unit inside the finite end of a half-line.
  double default_x0() const;
};

/// The built-in model equations.
const std::vector<CorpusEntry>& corpus();

/// Look up an entry by name; throws UsageError listing the known names.
const CorpusEntry& corpus_entry(const std::string& name);

/// A corpus reference with bound parameters.
struct CorpusRef {
  const CorpusEntry* entry = nullptr;
  ParamBinding params;  // defaults overlaid with any explicit bindings
};

/// Resolve "name" or the shorthand "name:value" (binds the entry's single
/// parameter).  Explicit values are validated.
CorpusRef resolve_corpus_ref(const std::string& ref);

/// Wrap an expression and binding as a plain callable.
std::function<double(double)> bind_expr(const Expr& e, const ParamBinding& params = {});

}  // namespace sturmkit
