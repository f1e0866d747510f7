#pragma once

#include <memory>
#include <string>

namespace slipflow {

struct ExpressionVars {
  double r = 0.0, theta = 0.0, t = 0.0, x1 = 0.0, x2 = 0.0;
};

// Arithmetic expressions: numbers, pi, + - * / ^, parentheses, unary minus,
// variables r theta t x1 x2, functions sin cos tan exp log sqrt abs atan2 min max.
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text);
  static Expression constant(double c);

  double eval(const ExpressionVars& v) const;
  bool is_constant() const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace slipflow
