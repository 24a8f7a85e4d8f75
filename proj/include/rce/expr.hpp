#pragma once

#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace rce {

/// Exact rational exponent for power nodes. Invariant: den > 0, gcd(|num|, den) == 1.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d);

  bool is_integer() const { return den == 1; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational operator-(long long k) const { return Rational(num - k * den, den); }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Thrown when an expression is undefined at the evaluation point
/// (division by zero, ln/sqrt of a nonpositive argument, 0 raised to a
/// negative power, fractional power of a negative base).
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, double at_time);
  double at_time() const noexcept { return t_; }

 private:
  double t_;
};

enum class ExprKind { Constant, Time, Neg, Cos, Sin, Exp, Ln, Sqrt, Add, Sub, Mul, Div, Pow };

/// Immutable expression tree over one time variable `t`.
/// Shared subtrees are fine; nodes are never mutated after construction,
/// so concurrent evaluation needs no synchronization.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double v);
  static Expr time();

  ExprKind kind() const;
  double constant_value() const;     // Constant nodes only
  const Rational& exponent() const;  // Pow nodes only
  Expr child(std::size_t i) const;   // 0 = argument/left, 1 = right
  std::size_t child_count() const;

  bool is_constant() const { return kind() == ExprKind::Constant; }
  bool is_constant(double v) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_unary(ExprKind k, Expr a);
  friend Expr make_binary(ExprKind k, Expr a, Expr b);
  friend Expr pow(Expr base, Rational exponent);
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);  // negation
Expr pow(Expr base, Rational exponent);
Expr cos(Expr a);
Expr sin(Expr a);
Expr exp(Expr a);
Expr ln(Expr a);
Expr sqrt(Expr a);

/// Parses the coefficient grammar: numbers, `t`, parentheses, `+ - * / ^`,
/// calls of cos/sin/exp/ln/sqrt. `^` binds tightest and is right associative;
/// its exponent must fold to an exact integer or small rational.
/// The returned tree is simplified (constant folding + identity elimination).
Expr parse_expression(const std::string& src);

double evaluate(const Expr& e, double t);

/// Exact symbolic derivative, simplified.
Expr differentiate(const Expr& e);

/// Constant folding plus x+0, x*1, x*0, x^1, x^0 style identities.
/// No CAS-grade rewriting; just enough to keep derivative trees bounded.
Expr simplify(const Expr& e);

std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Eagerly detectable singular points: zeros of c*t^k denominators and of
/// affine arguments to ln/sqrt (and affine bases raised to negative powers).
/// Anything else is caught lazily by evaluate().
std::vector<double> detect_singular_points(const Expr& e);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// A time-varying coefficient: value expression plus its exact symbolic
/// derivative, the interval of validity, and the known singular points.
class CoefficientFn {
 public:
  CoefficientFn();  // identically zero
  explicit CoefficientFn(Expr value, Interval domain = {},
                         std::vector<double> extra_singular_points = {});
  static CoefficientFn from_constant(double c);
  static CoefficientFn parse(const std::string& src, Interval domain = {},
                             std::vector<double> extra_singular_points = {});

  double operator()(double t) const { return evaluate(value_, t); }
  double derivative_at(double t) const { return evaluate(derivative_, t); }

  const Expr& value() const { return value_; }
  const Expr& derivative() const { return derivative_; }
  const Interval& domain() const { return domain_; }
  const std::vector<double>& singular_points() const { return singular_points_; }

  bool is_constant() const { return value_.is_constant(); }

 private:
  Expr value_;
  Expr derivative_;
  Interval domain_;
  std::vector<double> singular_points_;
};

}  // namespace rce
