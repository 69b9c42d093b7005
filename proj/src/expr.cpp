#include "cvf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "cvf/error.hpp"

namespace cvf {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  int index = 0;
  int exponent = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  int max_var = -1;
};

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* function_name(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Sin: return "sin";
    case Expr::Kind::Cos: return "cos";
    case Expr::Kind::Exp: return "exp";
    case Expr::Kind::Log: return "log";
    case Expr::Kind::Sqrt: return "sqrt";
    default: return "";
  }
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->index = index;
  n->max_var = index;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make(Kind kind, const Expr& a, const Expr* b, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->exponent = exponent;
  n->max_var = std::max(a.max_variable(), b ? b->max_variable() : -1);
  n->a = a.node_;
  if (b) n->b = b->node_;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
int Expr::variable_index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
Expr Expr::lhs() const { return Expr(node_->a); }
Expr Expr::rhs() const { return Expr(node_->b); }
int Expr::max_variable() const { return node_->max_var; }

std::string Expr::str() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return n.value < 0 ? "(" + format_number(n.value) + ")" : format_number(n.value);
    case Kind::Variable: return "x" + std::to_string(n.index + 1);
    case Kind::Add: return "(" + lhs().str() + " + " + rhs().str() + ")";
    case Kind::Sub: return "(" + lhs().str() + " - " + rhs().str() + ")";
    case Kind::Mul: return "(" + lhs().str() + " * " + rhs().str() + ")";
    case Kind::Div: return "(" + lhs().str() + " / " + rhs().str() + ")";
    case Kind::Pow: return "(" + lhs().str() + "^(" + std::to_string(n.exponent) + "))";
    case Kind::Neg: return "(-" + lhs().str() + ")";
    default: return std::string(function_name(n.kind)) + "(" + lhs().str() + ")";
  }
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Expr::Kind::Add, a, &b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(Expr::Kind::Sub, a, &b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Expr::Kind::Mul, a, &b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Expr::Kind::Div, a, &b); }
Expr operator-(const Expr& a) { return Expr::make(Expr::Kind::Neg, a, nullptr); }
Expr pow(const Expr& base, int exponent) { return Expr::make(Expr::Kind::Pow, base, nullptr, exponent); }
Expr sin(const Expr& a) { return Expr::make(Expr::Kind::Sin, a, nullptr); }
Expr cos(const Expr& a) { return Expr::make(Expr::Kind::Cos, a, nullptr); }
Expr exp(const Expr& a) { return Expr::make(Expr::Kind::Exp, a, nullptr); }
Expr log(const Expr& a) { return Expr::make(Expr::Kind::Log, a, nullptr); }
Expr sqrt(const Expr& a) { return Expr::make(Expr::Kind::Sqrt, a, nullptr); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+')) e = e + parse_term();
      else if (accept('-')) e = e - parse_term();
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*')) e = e * parse_unary();
      else if (accept('/')) e = e / parse_unary();
      else return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^')) return base;
    const std::size_t exp_pos = pos_;
    Expr exponent = parse_unary();
    if (exponent.max_variable() >= 0) throw ParseError("exponent must not contain variables", exp_pos);
    double value = 0.0;
    try {
      value = evaluate(exponent, {});
    } catch (const DomainError& e) {
      throw ParseError(std::string("invalid exponent: ") + e.what(), exp_pos);
    }
    if (!std::isfinite(value) || value != std::round(value) || std::abs(value) > 1e6)
      throw ParseError("exponent must be an integer", exp_pos);
    return pow(base, static_cast<int>(value));
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto* first = src_.data() + start;
    const auto* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      int index = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (index < 1 || index > dim_) {
        pos_ = start;
        fail("variable " + std::string(name) + " out of range for dimension " + std::to_string(dim_));
      }
      return Expr::variable(index - 1);
    }
    using Fn = Expr (*)(const Expr&);
    Fn fn = nullptr;
    if (name == "sin") fn = static_cast<Fn>(&sin);
    else if (name == "cos") fn = static_cast<Fn>(&cos);
    else if (name == "exp") fn = static_cast<Fn>(&exp);
    else if (name == "log") fn = static_cast<Fn>(&log);
    else if (name == "sqrt") fn = static_cast<Fn>(&sqrt);
    if (fn == nullptr) {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    expect('(');
    Expr arg = parse_expr();
    expect(')');
    return fn(arg);
  }

  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view src, int dim) {
  if (dim < 1) throw PreconditionError("dimension must be positive");
  return Parser(src, dim).parse_all();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void domain_fail(const std::string& what, const Expr& e) {
  throw DomainError(what + " in " + e.str());
}

// Coefficient m (m-1) ... (m-k+1) times b^(m-k).
double power_derivative(double base, int m, int k) {
  double coeff = 1.0;
  for (int q = 0; q < k; ++q) coeff *= static_cast<double>(m - q);
  if (coeff == 0.0) return 0.0;
  return coeff * std::pow(base, m - k);
}

double eval_scalar(const Expr& e, std::span<const double> p) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant: return e.constant_value();
    case K::Variable:
      if (static_cast<std::size_t>(e.variable_index()) >= p.size()) domain_fail("variable out of range", e);
      return p[e.variable_index()];
    case K::Add: return eval_scalar(e.lhs(), p) + eval_scalar(e.rhs(), p);
    case K::Sub: return eval_scalar(e.lhs(), p) - eval_scalar(e.rhs(), p);
    case K::Mul: return eval_scalar(e.lhs(), p) * eval_scalar(e.rhs(), p);
    case K::Div: {
      const double den = eval_scalar(e.rhs(), p);
      if (den == 0.0) domain_fail("division by zero", e);
      return eval_scalar(e.lhs(), p) / den;
    }
    case K::Pow: {
      const double b = eval_scalar(e.lhs(), p);
      if (b == 0.0 && e.exponent() < 0) domain_fail("zero raised to a negative power", e);
      return std::pow(b, e.exponent());
    }
    case K::Neg: return -eval_scalar(e.lhs(), p);
    case K::Sin: return std::sin(eval_scalar(e.lhs(), p));
    case K::Cos: return std::cos(eval_scalar(e.lhs(), p));
    case K::Exp: return std::exp(eval_scalar(e.lhs(), p));
    case K::Log: {
      const double a = eval_scalar(e.lhs(), p);
      if (!(a > 0.0)) domain_fail("log of non-positive value", e);
      return std::log(a);
    }
    case K::Sqrt: {
      const double a = eval_scalar(e.lhs(), p);
      if (!(a >= 0.0)) domain_fail("sqrt of negative value", e);
      return std::sqrt(a);
    }
  }
  return 0.0;
}

Jet eval_jet_rec(const Expr& e, std::span<const double> p, int order) {
  using K = Expr::Kind;
  const int n = static_cast<int>(p.size());
  switch (e.kind()) {
    case K::Constant: return Jet::constant(n, order, e.constant_value());
    case K::Variable:
      if (e.variable_index() >= n) domain_fail("variable out of range", e);
      return Jet::variable(n, order, e.variable_index(), p[e.variable_index()]);
    case K::Add: return eval_jet_rec(e.lhs(), p, order) + eval_jet_rec(e.rhs(), p, order);
    case K::Sub: return eval_jet_rec(e.lhs(), p, order) - eval_jet_rec(e.rhs(), p, order);
    case K::Mul: return eval_jet_rec(e.lhs(), p, order) * eval_jet_rec(e.rhs(), p, order);
    case K::Div: {
      const Jet den = eval_jet_rec(e.rhs(), p, order);
      const double b = den.value();
      if (b == 0.0) domain_fail("division by zero", e);
      const double r = 1.0 / b;
      return eval_jet_rec(e.lhs(), p, order) * compose(den, {r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r});
    }
    case K::Pow: {
      const Jet base = eval_jet_rec(e.lhs(), p, order);
      const double b = base.value();
      const int m = e.exponent();
      if (b == 0.0 && m < 0) domain_fail("zero raised to a negative power", e);
      return compose(base, {power_derivative(b, m, 0), power_derivative(b, m, 1), power_derivative(b, m, 2),
                            power_derivative(b, m, 3)});
    }
    case K::Neg: return -eval_jet_rec(e.lhs(), p, order);
    case K::Sin: {
      const Jet a = eval_jet_rec(e.lhs(), p, order);
      const double s = std::sin(a.value()), c = std::cos(a.value());
      return compose(a, {s, c, -s, -c});
    }
    case K::Cos: {
      const Jet a = eval_jet_rec(e.lhs(), p, order);
      const double s = std::sin(a.value()), c = std::cos(a.value());
      return compose(a, {c, -s, -c, s});
    }
    case K::Exp: {
      const Jet a = eval_jet_rec(e.lhs(), p, order);
      const double v = std::exp(a.value());
      return compose(a, {v, v, v, v});
    }
    case K::Log: {
      const Jet a = eval_jet_rec(e.lhs(), p, order);
      const double v = a.value();
      if (!(v > 0.0)) domain_fail("log of non-positive value", e);
      const double r = 1.0 / v;
      return compose(a, {std::log(v), r, -r * r, 2.0 * r * r * r});
    }
    case K::Sqrt: {
      const Jet a = eval_jet_rec(e.lhs(), p, order);
      const double v = a.value();
      if (order == 0) {
        if (!(v >= 0.0)) domain_fail("sqrt of negative value", e);
        return compose(a, {std::sqrt(v), 0.0, 0.0, 0.0});
      }
      if (!(v > 0.0)) domain_fail("sqrt of non-positive value (derivative undefined)", e);
      const double s = std::sqrt(v);
      return compose(a, {s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v)});
    }
  }
  return Jet(n, order);
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> p) { return eval_scalar(e, p); }

Jet eval_jet(const Expr& e, std::span<const double> p, int order) {
  if (p.empty()) throw PreconditionError("eval_jet needs at least one coordinate");
  return eval_jet_rec(e, p, order);
}

Expr substitute(const Expr& e, std::span<const Expr> replacements) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant: return e;
    case K::Variable:
      if (static_cast<std::size_t>(e.variable_index()) >= replacements.size())
        throw PreconditionError("substitute: missing replacement for " + e.str());
      return replacements[e.variable_index()];
    case K::Add: return substitute(e.lhs(), replacements) + substitute(e.rhs(), replacements);
    case K::Sub: return substitute(e.lhs(), replacements) - substitute(e.rhs(), replacements);
    case K::Mul: return substitute(e.lhs(), replacements) * substitute(e.rhs(), replacements);
    case K::Div: return substitute(e.lhs(), replacements) / substitute(e.rhs(), replacements);
    case K::Pow: return pow(substitute(e.lhs(), replacements), e.exponent());
    case K::Neg: return -substitute(e.lhs(), replacements);
    case K::Sin: return sin(substitute(e.lhs(), replacements));
    case K::Cos: return cos(substitute(e.lhs(), replacements));
    case K::Exp: return exp(substitute(e.lhs(), replacements));
    case K::Log: return log(substitute(e.lhs(), replacements));
    case K::Sqrt: return sqrt(substitute(e.lhs(), replacements));
  }
  return e;
}

}  // namespace cvf
