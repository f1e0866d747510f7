#include "slipflow/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "slipflow/error.hpp"

namespace slipflow {

struct Expression::Node {
  enum class Op { number, var, add, sub, mul, div, pow, neg, call } op = Op::number;
  double value = 0.0;
  int var = 0;  // r, theta, t, x1, x2
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

struct Parser {
  const std::string& s;
  size_t i = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::configuration, "expression \"" + s + "\": " + what + " at position " + std::to_string(i));
  }

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  NodePtr binary(Node::Op op, NodePtr a, NodePtr b) {
    Node n;
    n.op = op;
    n.args = {std::move(a), std::move(b)};
    return make(std::move(n));
  }

  NodePtr expr() {
    NodePtr a = term();
    for (;;) {
      if (eat('+'))
        a = binary(Node::Op::add, a, term());
      else if (eat('-'))
        a = binary(Node::Op::sub, a, term());
      else
        return a;
    }
  }

  NodePtr term() {
    NodePtr a = unary();
    for (;;) {
      if (eat('*'))
        a = binary(Node::Op::mul, a, unary());
      else if (eat('/'))
        a = binary(Node::Op::div, a, unary());
      else
        return a;
    }
  }

  NodePtr unary() {
    if (eat('-')) {
      Node n;
      n.op = Node::Op::neg;
      n.args = {unary()};
      return make(std::move(n));
    }
    if (eat('+')) return unary();
    return power();
  }

  // Right associative; binds tighter than unary minus on its left operand only.
  NodePtr power() {
    NodePtr a = primary();
    if (eat('^')) return binary(Node::Op::pow, a, unary());
    return a;
  }

  NodePtr primary() {
    skip();
    if (i >= s.size()) fail("unexpected end");
    if (eat('(')) {
      NodePtr a = expr();
      if (!eat(')')) fail("missing ')'");
      return a;
    }
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s.c_str() + i;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      i += static_cast<size_t>(end - begin);
      Node n;
      n.value = v;
      return make(std::move(n));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      const std::string id = s.substr(i, j - i);
      i = j;
      static const char* vars[] = {"r", "theta", "t", "x1", "x2"};
      for (int k = 0; k < 5; ++k)
        if (id == vars[k]) {
          Node n;
          n.op = Node::Op::var;
          n.var = k;
          return make(std::move(n));
        }
      if (id == "pi") {
        Node n;
        n.value = std::numbers::pi;
        return make(std::move(n));
      }
      static const char* fns1[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs"};
      static const char* fns2[] = {"atan2", "min", "max"};
      int arity = 0;
      for (const char* f : fns1)
        if (id == f) arity = 1;
      for (const char* f : fns2)
        if (id == f) arity = 2;
      if (arity == 0) fail("unknown identifier '" + id + "'");
      if (!eat('(')) fail("expected '(' after " + id);
      Node n;
      n.op = Node::Op::call;
      n.fn = id;
      n.args.push_back(expr());
      for (int k = 1; k < arity; ++k) {
        if (!eat(',')) fail(id + " takes " + std::to_string(arity) + " arguments");
        n.args.push_back(expr());
      }
      if (!eat(')')) fail("missing ')'");
      return make(std::move(n));
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

double eval_node(const Node& n, const ExpressionVars& v) {
  auto a = [&](int k) { return eval_node(*n.args[k], v); };
  switch (n.op) {
    case Node::Op::number: return n.value;
    case Node::Op::var: {
      const double vals[] = {v.r, v.theta, v.t, v.x1, v.x2};
      return vals[n.var];
    }
    case Node::Op::add: return a(0) + a(1);
    case Node::Op::sub: return a(0) - a(1);
    case Node::Op::mul: return a(0) * a(1);
    case Node::Op::div: return a(0) / a(1);
    case Node::Op::pow: return std::pow(a(0), a(1));
    case Node::Op::neg: return -a(0);
    case Node::Op::call: break;
  }
  const std::string& f = n.fn;
  if (f == "sin") return std::sin(a(0));
  if (f == "cos") return std::cos(a(0));
  if (f == "tan") return std::tan(a(0));
  if (f == "exp") return std::exp(a(0));
  if (f == "log") return std::log(a(0));
  if (f == "sqrt") return std::sqrt(a(0));
  if (f == "abs") return std::abs(a(0));
  if (f == "atan2") return std::atan2(a(0), a(1));
  if (f == "min") return std::min(a(0), a(1));
  return std::max(a(0), a(1));
}

bool constant_node(const Node& n) {
  if (n.op == Node::Op::var) return false;
  for (const auto& c : n.args)
    if (!constant_node(*c)) return false;
  return true;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p{text};
  Expression e;
  e.root_ = p.expr();
  p.skip();
  if (p.i != text.size()) p.fail("trailing input");
  e.text_ = text;
  return e;
}

Expression Expression::constant(double c) {
  Expression e;
  Node n;
  n.value = c;
  e.root_ = make(std::move(n));
  e.text_ = std::to_string(c);
  return e;
}

double Expression::eval(const ExpressionVars& v) const { return eval_node(*root_, v); }

bool Expression::is_constant() const { return constant_node(*root_); }

}  // namespace slipflow
