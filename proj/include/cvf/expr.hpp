#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvf/jet.hpp"

namespace cvf {

/// Immutable expression tree over chart coordinates x1..xn.
///
/// Grammar accepted by parse():
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('-' | '+') unary | power
///     power   := primary ('^' unary)?          (right associative)
///     primary := number | 'x' digits | func '(' expr ')' | '(' expr ')'
///     func    := sin | cos | exp | log | sqrt
///
/// Numbers are decimal or scientific (1, 0.5, 2e-3). The exponent of '^' must
/// be a variable-free expression with an integer value. Variables are 1-based
/// in source text and 0-based in Expr::variable().
class Expr {
 public:
  enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt };

  /// Default-constructed expression is the constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(int index);

  Kind kind() const;
  double constant_value() const;  // Kind::Constant
  int variable_index() const;     // Kind::Variable
  int exponent() const;           // Kind::Pow
  Expr lhs() const;               // binary nodes, Pow base, unary argument
  Expr rhs() const;               // binary nodes

  /// Largest variable index used, or -1 for a variable-free expression.
  int max_variable() const;

  /// Fully parenthesized source form; parses back to an equal tree.
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, int exponent);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr sqrt(const Expr& a);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  static Expr make(Kind kind, const Expr& a, const Expr* b, int exponent = 0);

  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

/// Parses `src` for a chart of dimension `dim`. Throws ParseError.
Expr parse(std::string_view src, int dim);

/// Value at p. Throws DomainError outside the real domain.
double evaluate(const Expr& e, std::span<const double> p);

/// Value and exact partial derivatives up to `order` (0..3) at p, by forward
/// propagation of truncated Taylor coefficients. Throws DomainError.
Jet eval_jet(const Expr& e, std::span<const double> p, int order);

/// Replaces variable i with replacements[i] everywhere in e.
Expr substitute(const Expr& e, std::span<const Expr> replacements);

}  // namespace cvf
