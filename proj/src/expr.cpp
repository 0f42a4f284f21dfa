#include "sturmkit/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <set>

namespace sturmkit {
namespace detail {

struct Node {
  enum class Kind { constant, variable, parameter, unary, binary };
  Kind kind = Kind::constant;
  double value = 0.0;      // constant
  std::string name;        // parameter
  UnaryOp uop = UnaryOp::neg;
  BinaryOp bop = BinaryOp::add;
  NodePtr a, b;
};

}  // namespace detail

using detail::Node;
using detail::NodePtr;

namespace {

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = v;
  return n;
}

NodePtr make_variable() {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::variable;
  return n;
}

NodePtr make_param(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::parameter;
  n->name = std::move(name);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Node::Kind::constant && n->value == v;
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "neg";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::tan: return "tan";
    case UnaryOp::cot: return "cot";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::abs: return "abs";
  }
  return "?";
}

double check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite result");
  return v;
}

double apply_unary_value(UnaryOp op, double a) {
  switch (op) {
    case UnaryOp::neg: return -a;
    case UnaryOp::sin: return check_finite(std::sin(a), "sin");
    case UnaryOp::cos: return check_finite(std::cos(a), "cos");
    case UnaryOp::tan: return check_finite(std::tan(a), "tan");
    case UnaryOp::cot: {
      double s = std::sin(a);
      if (s == 0.0) throw DomainError("cot: argument is a multiple of pi");
      return check_finite(std::cos(a) / s, "cot");
    }
    case UnaryOp::exp: return check_finite(std::exp(a), "exp");
    case UnaryOp::log:
      if (a <= 0.0) throw DomainError("log of non-positive value");
      return check_finite(std::log(a), "log");
    case UnaryOp::sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(a);
    case UnaryOp::abs: return std::fabs(a);
  }
  throw DomainError("unknown unary operation");
}

double apply_binary_value(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return check_finite(a + b, "+");
    case BinaryOp::sub: return check_finite(a - b, "-");
    case BinaryOp::mul: return check_finite(a * b, "*");
    case BinaryOp::div:
      if (b == 0.0) throw DomainError("division by zero");
      return check_finite(a / b, "/");
    case BinaryOp::pow: {
      if (a > 0.0) return check_finite(std::pow(a, b), "^");
      if (a == 0.0) {
        if (b > 0.0) return 0.0;
        if (b == 0.0) return 1.0;
        throw DomainError("0 raised to a negative power");
      }
      // Negative base: exact integer exponents only.
      if (b == std::nearbyint(b) && std::fabs(b) < 1e15)
        return check_finite(std::pow(a, b), "^");
      throw DomainError("negative base with non-integer exponent");
    }
  }
  throw DomainError("unknown binary operation");
}

double eval_node(const Node* n, double x, const ParamBinding& params) {
  switch (n->kind) {
    case Node::Kind::constant: return n->value;
    case Node::Kind::variable: return x;
    case Node::Kind::parameter: {
      auto it = params.find(n->name);
      if (it == params.end()) throw UnboundParamError(n->name);
      return it->second;
    }
    case Node::Kind::unary:
      return apply_unary_value(n->uop, eval_node(n->a.get(), x, params));
    case Node::Kind::binary:
      return apply_binary_value(n->bop, eval_node(n->a.get(), x, params),
                                eval_node(n->b.get(), x, params));
  }
  throw DomainError("corrupt expression node");
}

// Fold op(a, b) when both operands are constants and the arithmetic is exact
// and finite; otherwise build the node.
NodePtr fold_binary(BinaryOp op, NodePtr a, NodePtr b) {
  if (a->kind == Node::Kind::constant && b->kind == Node::Kind::constant) {
    try {
      return make_const(apply_binary_value(op, a->value, b->value));
    } catch (const DomainError&) {
      // leave unfolded; evaluation will report the domain error
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->bop = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr fold_unary(UnaryOp op, NodePtr a) {
  if (a->kind == Node::Kind::constant) {
    try {
      return make_const(apply_unary_value(op, a->value));
    } catch (const DomainError&) {
    }
  }
  if (op == UnaryOp::neg && a->kind == Node::Kind::unary && a->uop == UnaryOp::neg)
    return a->a;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::unary;
  n->uop = op;
  n->a = std::move(a);
  return n;
}

// Builders with identity elimination, used by diff() and the public
// operators.  The parser uses fold_* directly so that user-written input
// keeps its shape apart from exact constant arithmetic.
NodePtr mk_add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return fold_binary(BinaryOp::add, std::move(a), std::move(b));
}

NodePtr mk_neg(NodePtr a) { return fold_unary(UnaryOp::neg, std::move(a)); }

NodePtr mk_sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return mk_neg(std::move(b));
  return fold_binary(BinaryOp::sub, std::move(a), std::move(b));
}

NodePtr mk_mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return fold_binary(BinaryOp::mul, std::move(a), std::move(b));
}

NodePtr mk_div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return fold_binary(BinaryOp::div, std::move(a), std::move(b));
}

NodePtr mk_pow(NodePtr a, NodePtr b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return make_const(1.0);
  return fold_binary(BinaryOp::pow, std::move(a), std::move(b));
}

bool node_depends_on_x(const Node* n) {
  switch (n->kind) {
    case Node::Kind::constant:
    case Node::Kind::parameter: return false;
    case Node::Kind::variable: return true;
    case Node::Kind::unary: return node_depends_on_x(n->a.get());
    case Node::Kind::binary:
      return node_depends_on_x(n->a.get()) || node_depends_on_x(n->b.get());
  }
  return false;
}

NodePtr diff_node(const NodePtr& n) {
  switch (n->kind) {
    case Node::Kind::constant:
    case Node::Kind::parameter: return make_const(0.0);
    case Node::Kind::variable: return make_const(1.0);
    case Node::Kind::unary: {
      NodePtr a = n->a;
      NodePtr da = diff_node(a);
      switch (n->uop) {
        case UnaryOp::neg: return mk_neg(std::move(da));
        case UnaryOp::sin: return mk_mul(fold_unary(UnaryOp::cos, a), std::move(da));
        case UnaryOp::cos:
          return mk_neg(mk_mul(fold_unary(UnaryOp::sin, a), std::move(da)));
        case UnaryOp::tan:
          return mk_div(std::move(da), mk_pow(fold_unary(UnaryOp::cos, a), make_const(2)));
        case UnaryOp::cot:
          return mk_neg(
              mk_div(std::move(da), mk_pow(fold_unary(UnaryOp::sin, a), make_const(2))));
        case UnaryOp::exp: return mk_mul(fold_unary(UnaryOp::exp, a), std::move(da));
        case UnaryOp::log: return mk_div(std::move(da), a);
        case UnaryOp::sqrt:
          return mk_div(std::move(da),
                        mk_mul(make_const(2), fold_unary(UnaryOp::sqrt, a)));
        case UnaryOp::abs:
          // d|a| = a a' / |a|; undefined at a = 0, reported at evaluation.
          return mk_div(mk_mul(a, std::move(da)), fold_unary(UnaryOp::abs, a));
      }
      break;
    }
    case Node::Kind::binary: {
      NodePtr a = n->a, b = n->b;
      switch (n->bop) {
        case BinaryOp::add: return mk_add(diff_node(a), diff_node(b));
        case BinaryOp::sub: return mk_sub(diff_node(a), diff_node(b));
        case BinaryOp::mul:
          return mk_add(mk_mul(diff_node(a), b), mk_mul(a, diff_node(b)));
        case BinaryOp::div:
          return mk_div(mk_sub(mk_mul(diff_node(a), b), mk_mul(a, diff_node(b))),
                        mk_pow(b, make_const(2)));
        case BinaryOp::pow: {
          bool bx = node_depends_on_x(b.get());
          bool ax = node_depends_on_x(a.get());
          if (!bx) {
            // d(a^c) = c a^(c-1) a'; keeps negative bases legal for
            // integer/constant exponents.
            return mk_mul(mk_mul(b, mk_pow(a, mk_sub(b, make_const(1)))), diff_node(a));
          }
          if (!ax) {
            // d(c^b) = c^b log(c) b'
            return mk_mul(mk_mul(fold_binary(BinaryOp::pow, a, b), fold_unary(UnaryOp::log, a)),
                          diff_node(b));
          }
          // d(a^b) = a^b (b' log a + b a'/a)
          return mk_mul(fold_binary(BinaryOp::pow, a, b),
                        mk_add(mk_mul(diff_node(b), fold_unary(UnaryOp::log, a)),
                               mk_div(mk_mul(b, diff_node(a)), a)));
        }
      }
      break;
    }
  }
  throw DomainError("corrupt expression node");
}

bool node_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Node::Kind::constant: return a->value == b->value;
    case Node::Kind::variable: return true;
    case Node::Kind::parameter: return a->name == b->name;
    case Node::Kind::unary:
      return a->uop == b->uop && node_equal(a->a.get(), b->a.get());
    case Node::Kind::binary:
      return a->bop == b->bop && node_equal(a->a.get(), b->a.get()) &&
             node_equal(a->b.get(), b->b.get());
  }
  return false;
}

void collect_params(const Node* n, std::set<std::string>& out) {
  switch (n->kind) {
    case Node::Kind::parameter: out.insert(n->name); break;
    case Node::Kind::unary: collect_params(n->a.get(), out); break;
    case Node::Kind::binary:
      collect_params(n->a.get(), out);
      collect_params(n->b.get(), out);
      break;
    default: break;
  }
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

// Precedence for printing: add/sub 1, mul/div 2, pow 3, neg 4, atoms 5.
int node_prec(const Node* n) {
  switch (n->kind) {
    case Node::Kind::binary:
      switch (n->bop) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 3;
      }
      return 1;
    case Node::Kind::unary: return n->uop == UnaryOp::neg ? 4 : 5;
    default: return 5;
  }
}

void print_node(const Node* n, std::string& out) {
  switch (n->kind) {
    case Node::Kind::constant: out += format_double(n->value); return;
    case Node::Kind::variable: out += 'x'; return;
    case Node::Kind::parameter: out += n->name; return;
    case Node::Kind::unary: {
      if (n->uop == UnaryOp::neg) {
        out += '-';
        bool parens = n->a->kind == Node::Kind::binary;
        if (parens) out += '(';
        print_node(n->a.get(), out);
        if (parens) out += ')';
        return;
      }
      out += unary_name(n->uop);
      out += '(';
      print_node(n->a.get(), out);
      out += ')';
      return;
    }
    case Node::Kind::binary: {
      int prec = node_prec(n);
      const char* opstr = "?";
      bool left_assoc = true;
      switch (n->bop) {
        case BinaryOp::add: opstr = "+"; break;
        case BinaryOp::sub: opstr = "-"; break;
        case BinaryOp::mul: opstr = "*"; break;
        case BinaryOp::div: opstr = "/"; break;
        case BinaryOp::pow:
          opstr = "^";
          left_assoc = false;
          break;
      }
      int lp = node_prec(n->a.get());
      int rp = node_prec(n->b.get());
      bool lparen = left_assoc ? lp < prec : lp <= prec;
      bool rparen = left_assoc ? rp <= prec : rp < prec;
      if (lparen) out += '(';
      print_node(n->a.get(), out);
      if (lparen) out += ')';
      out += opstr;
      if (rparen) out += '(';
      print_node(n->b.get(), out);
      if (rparen) out += ')';
      return;
    }
  }
}

struct Parser {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
                                src[pos] == '\r'))
      ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= src.size();
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = fold_binary(BinaryOp::add, std::move(lhs), parse_term());
      else if (accept('-'))
        lhs = fold_binary(BinaryOp::sub, std::move(lhs), parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = fold_binary(BinaryOp::mul, std::move(lhs), parse_factor());
      else if (accept('/'))
        lhs = fold_binary(BinaryOp::div, std::move(lhs), parse_factor());
      else
        return lhs;
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_base();
    if (accept('^')) return fold_binary(BinaryOp::pow, std::move(base), parse_factor());
    return base;
  }

  NodePtr parse_base() {
    char c = peek();
    if (c == '-') {
      ++pos;
      return fold_unary(UnaryOp::neg, parse_base());
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_ident();
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') ++pos;
    if (pos < src.size() && src[pos] == '.') {
      ++pos;
      while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') ++pos;
    }
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
      if (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') {
        while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') ++pos;
      } else {
        pos = mark;  // "2e" is the number 2 followed by the identifier e? No:
                     // treat a bare exponent marker as not part of the number.
      }
    }
    std::string text(src.substr(start, pos - start));
    if (text.empty() || text == ".") {
      pos = start;
      fail("malformed number");
    }
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) {
      pos = start;
      fail("malformed number");
    }
    return make_const(v);
  }

  NodePtr parse_ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() &&
           ((src[pos] >= 'a' && src[pos] <= 'z') || (src[pos] >= 'A' && src[pos] <= 'Z') ||
            (src[pos] >= '0' && src[pos] <= '9') || src[pos] == '_'))
      ++pos;
    std::string name(src.substr(start, pos - start));
    // Function application?
    if (peek() == '(') {
      static const std::pair<const char*, UnaryOp> fns[] = {
          {"sin", UnaryOp::sin}, {"cos", UnaryOp::cos},   {"tan", UnaryOp::tan},
          {"cot", UnaryOp::cot}, {"exp", UnaryOp::exp},   {"log", UnaryOp::log},
          {"sqrt", UnaryOp::sqrt}, {"abs", UnaryOp::abs},
      };
      for (const auto& [fname, op] : fns) {
        if (name == fname) {
          ++pos;  // consume '('
          NodePtr arg = parse_expr();
          if (!accept(')')) fail("expected ')' after function argument");
          return fold_unary(op, std::move(arg));
        }
      }
      pos = start;
      fail("unknown function '" + name + "'");
    }
    if (name == "x") return make_variable();
    if (name == "pi") return make_const(M_PI);
    if (name == "e") return make_const(M_E);
    return make_param(std::move(name));
  }
};

}  // namespace

Expr::Expr() : node_(make_const(0.0)) {}

Expr Expr::constant(double value) { return Expr(make_const(value)); }
Expr Expr::variable() { return Expr(make_variable()); }
Expr Expr::parameter(const std::string& name) { return Expr(make_param(name)); }

double Expr::eval(double x, const ParamBinding& params) const {
  double v = eval_node(node_.get(), x, params);
  if (!std::isfinite(v)) throw DomainError("non-finite result");
  return v;
}

Expr Expr::diff() const { return Expr(diff_node(node_)); }

std::string Expr::str() const {
  std::string out;
  print_node(node_.get(), out);
  return out;
}

bool Expr::same_as(const Expr& other) const {
  return node_equal(node_.get(), other.node_.get());
}

bool Expr::depends_on_x() const { return node_depends_on_x(node_.get()); }

std::vector<std::string> Expr::free_params() const {
  std::set<std::string> names;
  collect_params(node_.get(), names);
  return {names.begin(), names.end()};
}

Expr parse(std::string_view source) {
  Parser p{source};
  NodePtr root = p.parse_expr();
  if (!p.eof()) p.fail("unexpected trailing input");
  return Expr(std::move(root));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(mk_add(a.node(), b.node())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(mk_sub(a.node(), b.node())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mk_mul(a.node(), b.node())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(mk_div(a.node(), b.node())); }
Expr operator-(const Expr& a) { return Expr(mk_neg(a.node())); }
Expr pow(const Expr& a, const Expr& b) { return Expr(mk_pow(a.node(), b.node())); }
Expr apply(UnaryOp op, const Expr& a) { return Expr(fold_unary(op, a.node())); }

}  // namespace sturmkit
