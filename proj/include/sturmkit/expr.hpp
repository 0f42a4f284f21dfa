#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sturmkit/errors.hpp"

namespace sturmkit {

/// Values for free parameters, keyed by name.  Ordered map so that
/// serialized output is deterministic.
using ParamBinding = std::map<std::string, double>;

enum class UnaryOp { neg, sin, cos, tan, cot, exp, log, sqrt, abs };
enum class BinaryOp { add, sub, mul, div, pow };

namespace detail {
struct Node;
using NodePtr = std::shared_ptr<const Node>;
}  // namespace detail

/// Immutable expression tree in one variable `x` with named parameters.
/// Copies share structure; all operations return new trees.
class Expr {
 public:
  /// Default-constructs the constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable();
  static Expr parameter(const std::string& name);

  /// Evaluate at x with the given parameter binding.  Throws DomainError if
  /// any subexpression leaves the real domain or the result is non-finite,
  /// UnboundParamError if a parameter has no binding.
  double eval(double x, const ParamBinding& params = {}) const;

  /// Exact derivative with respect to x.  Only constant folding is applied
  /// to the result; no other simplification.
  Expr diff() const;

  /// Render to text that parses back to a structurally equal tree.
  std::string str() const;

  /// Structural equality (same tree shape, same constants bit-for-bit).
  bool same_as(const Expr& other) const;

  /// True if the tree mentions the variable x.
  bool depends_on_x() const;

  /// Names of free parameters, sorted, deduplicated.
  std::vector<std::string> free_params() const;

  const detail::NodePtr& node() const { return node_; }
  explicit Expr(detail::NodePtr n) : node_(std::move(n)) {}

 private:
  detail::NodePtr node_;
};

/// Parse the expression grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' factor)?
///   base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
/// Reserved identifiers: x (variable), pi, e (constants).  Functions:
/// sin, cos, tan, cot, exp, log, sqrt, abs.  Any other identifier is a
/// parameter; an unknown identifier applied like a function is an error.
/// Throws ParseError with a byte offset on malformed input.
Expr parse(std::string_view source);

/// Builders (apply constant folding where the result is exact and finite).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr apply(UnaryOp op, const Expr& a);
inline Expr sin(const Expr& a) { return apply(UnaryOp::sin, a); }
inline Expr cos(const Expr& a) { return apply(UnaryOp::cos, a); }
inline Expr tan(const Expr& a) { return apply(UnaryOp::tan, a); }
inline Expr cot(const Expr& a) { return apply(UnaryOp::cot, a); }
inline Expr exp(const Expr& a) { return apply(UnaryOp::exp, a); }
inline Expr log(const Expr& a) { return apply(UnaryOp::log, a); }
inline Expr sqrt(const Expr& a) { return apply(UnaryOp::sqrt, a); }
inline Expr abs(const Expr& a) { return apply(UnaryOp::abs, a); }

}  // namespace sturmkit
