#include "rce/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rce {

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("rational exponent with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

EvalError::EvalError(const std::string& what, double at_time)
    : std::runtime_error(what + " (at t = " + std::to_string(at_time) + ")"), t_(at_time) {}

struct Expr::Node {
  ExprKind kind;
  double value = 0.0;   // Constant
  Rational exponent;    // Pow
  std::shared_ptr<const Node> a, b;
};

Expr::Expr() : node_(std::make_shared<Node>(Node{ExprKind::Constant, 0.0, {}, nullptr, nullptr})) {}

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::time() {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Time;
  return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }

double Expr::constant_value() const { return node_->value; }

const Rational& Expr::exponent() const { return node_->exponent; }

Expr Expr::child(std::size_t i) const { return Expr(i == 0 ? node_->a : node_->b); }

std::size_t Expr::child_count() const {
  if (!node_->a) return 0;
  return node_->b ? 2 : 1;
}

bool Expr::is_constant(double v) const {
  return node_->kind == ExprKind::Constant && node_->value == v;
}

Expr make_unary(ExprKind k, Expr a) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = a.node_;
  return Expr(std::move(n));
}

Expr make_binary(ExprKind k, Expr a, Expr b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = a.node_;
  n->b = b.node_;
  return Expr(std::move(n));
}

Expr operator+(Expr a, Expr b) { return make_binary(ExprKind::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return make_binary(ExprKind::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return make_binary(ExprKind::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return make_binary(ExprKind::Div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return make_unary(ExprKind::Neg, std::move(a)); }
Expr cos(Expr a) { return make_unary(ExprKind::Cos, std::move(a)); }
Expr sin(Expr a) { return make_unary(ExprKind::Sin, std::move(a)); }
Expr exp(Expr a) { return make_unary(ExprKind::Exp, std::move(a)); }
Expr ln(Expr a) { return make_unary(ExprKind::Ln, std::move(a)); }
Expr sqrt(Expr a) { return make_unary(ExprKind::Sqrt, std::move(a)); }

Expr pow(Expr base, Rational exponent) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = ExprKind::Pow;
  n->exponent = exponent;
  n->a = base.node_;
  return Expr(std::move(n));
}

// ---------------------------------------------------------------------------
// evaluation

double evaluate(const Expr& e, double t) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return e.constant_value();
    case ExprKind::Time:
      return t;
    case ExprKind::Neg:
      return -evaluate(e.child(0), t);
    case ExprKind::Cos:
      return std::cos(evaluate(e.child(0), t));
    case ExprKind::Sin:
      return std::sin(evaluate(e.child(0), t));
    case ExprKind::Exp:
      return std::exp(evaluate(e.child(0), t));
    case ExprKind::Ln: {
      double a = evaluate(e.child(0), t);
      if (a <= 0.0) throw EvalError("ln of nonpositive argument", t);
      return std::log(a);
    }
    case ExprKind::Sqrt: {
      double a = evaluate(e.child(0), t);
      if (a < 0.0) throw EvalError("sqrt of negative argument", t);
      return std::sqrt(a);
    }
    case ExprKind::Add:
      return evaluate(e.child(0), t) + evaluate(e.child(1), t);
    case ExprKind::Sub:
      return evaluate(e.child(0), t) - evaluate(e.child(1), t);
    case ExprKind::Mul:
      return evaluate(e.child(0), t) * evaluate(e.child(1), t);
    case ExprKind::Div: {
      double num = evaluate(e.child(0), t);
      double den = evaluate(e.child(1), t);
      if (den == 0.0) throw EvalError("division by zero", t);
      return num / den;
    }
    case ExprKind::Pow: {
      double base = evaluate(e.child(0), t);
      const Rational& r = e.exponent();
      if (base == 0.0) {
        if (r.num < 0) throw EvalError("zero base raised to negative power", t);
        return r.num == 0 ? 1.0 : 0.0;
      }
      if (r.is_integer()) return std::pow(base, static_cast<double>(r.num));
      if (base < 0.0) throw EvalError("fractional power of negative base", t);
      return std::pow(base, r.to_double());
    }
  }
  throw std::logic_error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// simplification

namespace {

bool fold_children_constant(const Expr& e) {
  for (std::size_t i = 0; i < e.child_count(); ++i)
    if (!e.child(i).is_constant()) return false;
  return true;
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant:
    case ExprKind::Time:
      return e;
    default:
      break;
  }

  Expr a = simplify(e.child(0));
  Expr b = e.child_count() == 2 ? simplify(e.child(1)) : Expr();

  Expr rebuilt = [&] {
    switch (e.kind()) {
      case ExprKind::Pow:
        return pow(a, e.exponent());
      case ExprKind::Neg:
      case ExprKind::Cos:
      case ExprKind::Sin:
      case ExprKind::Exp:
      case ExprKind::Ln:
      case ExprKind::Sqrt:
        return make_unary(e.kind(), a);
      default:
        return make_binary(e.kind(), a, b);
    }
  }();

  // constant folding, skipped when the fold is not finite (keeps the
  // singularity visible to evaluate())
  if (fold_children_constant(rebuilt)) {
    try {
      double v = evaluate(rebuilt, 0.0);
      if (std::isfinite(v)) return Expr::constant(v);
    } catch (const EvalError&) {
      // leave the node in place; it is a declared singularity
    }
  }

  switch (rebuilt.kind()) {
    case ExprKind::Add:
      if (a.is_constant(0.0)) return b;
      if (b.is_constant(0.0)) return a;
      break;
    case ExprKind::Sub:
      if (b.is_constant(0.0)) return a;
      if (a.is_constant(0.0)) return simplify(-b);
      break;
    case ExprKind::Mul:
      if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
      if (a.is_constant(1.0)) return b;
      if (b.is_constant(1.0)) return a;
      break;
    case ExprKind::Div:
      if (b.is_constant(1.0)) return a;
      break;
    case ExprKind::Pow:
      if (rebuilt.exponent() == Rational(1, 1)) return a;
      if (rebuilt.exponent() == Rational(0, 1)) return Expr::constant(1.0);
      break;
    case ExprKind::Neg:
      if (a.kind() == ExprKind::Neg) return a.child(0);
      break;
    default:
      break;
  }
  return rebuilt;
}

// ---------------------------------------------------------------------------
// differentiation

namespace {

Expr diff(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return Expr::constant(0.0);
    case ExprKind::Time:
      return Expr::constant(1.0);
    case ExprKind::Neg:
      return -diff(e.child(0));
    case ExprKind::Cos:
      return -(sin(e.child(0)) * diff(e.child(0)));
    case ExprKind::Sin:
      return cos(e.child(0)) * diff(e.child(0));
    case ExprKind::Exp:
      return exp(e.child(0)) * diff(e.child(0));
    case ExprKind::Ln:
      return diff(e.child(0)) / e.child(0);
    case ExprKind::Sqrt:
      return diff(e.child(0)) / (Expr::constant(2.0) * sqrt(e.child(0)));
    case ExprKind::Add:
      return diff(e.child(0)) + diff(e.child(1));
    case ExprKind::Sub:
      return diff(e.child(0)) - diff(e.child(1));
    case ExprKind::Mul:
      return diff(e.child(0)) * e.child(1) + e.child(0) * diff(e.child(1));
    case ExprKind::Div:
      return (diff(e.child(0)) * e.child(1) - e.child(0) * diff(e.child(1))) /
             pow(e.child(1), Rational(2, 1));
    case ExprKind::Pow: {
      const Rational& r = e.exponent();
      return Expr::constant(r.to_double()) * pow(e.child(0), r - 1) * diff(e.child(0));
    }
  }
  throw std::logic_error("unreachable expression kind");
}

}  // namespace

Expr differentiate(const Expr& e) { return simplify(diff(e)); }

// ---------------------------------------------------------------------------
// printing

namespace {

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Neg:
      return 3;
    case ExprKind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print(const Expr& e, std::ostringstream& out, int parent_prec) {
  int prec = precedence(e.kind());
  bool negative_constant = e.is_constant() && e.constant_value() < 0.0;
  bool needs_paren = prec < parent_prec || (negative_constant && parent_prec > 1);
  if (needs_paren) out << '(';
  switch (e.kind()) {
    case ExprKind::Constant:
      out << format_number(e.constant_value());
      break;
    case ExprKind::Time:
      out << 't';
      break;
    case ExprKind::Neg:
      out << '-';
      print(e.child(0), out, prec + 1);
      break;
    case ExprKind::Cos:
    case ExprKind::Sin:
    case ExprKind::Exp:
    case ExprKind::Ln:
    case ExprKind::Sqrt: {
      const char* name = e.kind() == ExprKind::Cos   ? "cos"
                         : e.kind() == ExprKind::Sin ? "sin"
                         : e.kind() == ExprKind::Exp ? "exp"
                         : e.kind() == ExprKind::Ln  ? "ln"
                                                     : "sqrt";
      out << name << '(';
      print(e.child(0), out, 0);
      out << ')';
      break;
    }
    case ExprKind::Add:
      print(e.child(0), out, prec);
      out << '+';
      print(e.child(1), out, prec + 1);
      break;
    case ExprKind::Sub:
      print(e.child(0), out, prec);
      out << '-';
      print(e.child(1), out, prec + 1);
      break;
    case ExprKind::Mul:
      print(e.child(0), out, prec);
      out << '*';
      print(e.child(1), out, prec + 1);
      break;
    case ExprKind::Div:
      print(e.child(0), out, prec);
      out << '/';
      print(e.child(1), out, prec + 1);
      break;
    case ExprKind::Pow: {
      print(e.child(0), out, prec + 1);
      out << '^';
      const Rational& r = e.exponent();
      if (r.is_integer()) {
        out << (r.num < 0 ? "(" : "") << r.num << (r.num < 0 ? ")" : "");
      } else {
        out << '(' << r.num << '/' << r.den << ')';
      }
      break;
    }
  }
  if (needs_paren) out << ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream out;
  print(e, out, 0);
  return out.str();
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Constant:
      return a.constant_value() == b.constant_value();
    case ExprKind::Time:
      return true;
    case ExprKind::Pow:
      if (!(a.exponent() == b.exponent())) return false;
      return structurally_equal(a.child(0), b.child(0));
    default:
      break;
  }
  if (a.child_count() != b.child_count()) return false;
  for (std::size_t i = 0; i < a.child_count(); ++i)
    if (!structurally_equal(a.child(i), b.child(i))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  Expr run() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr left = parse_term();
    for (;;) {
      if (consume('+')) {
        left = left + parse_term();
      } else if (consume('-')) {
        left = left - parse_term();
      } else {
        return left;
      }
    }
  }

  Expr parse_term() {
    Expr left = parse_factor();
    for (;;) {
      if (consume('*')) {
        left = left * parse_factor();
      } else if (consume('/')) {
        left = left / parse_factor();
      } else {
        return left;
      }
    }
  }

  Expr parse_factor() {
    if (consume('-')) return -parse_factor();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    skip_ws();
    if (consume('^')) {
      std::size_t exp_offset = pos_;
      Expr exponent = parse_factor();  // right associative; allows -2, (3/2), 2^3
      return pow(base, fold_exponent(exponent, exp_offset));
    }
    return base;
  }

  // The exponent subtree must fold to an exact integer or small rational;
  // general real exponents are rejected so differentiation stays exact.
  Rational fold_exponent(const Expr& exponent, std::size_t offset) {
    Expr folded = simplify(exponent);
    if (!folded.is_constant())
      throw ParseError("exponent must be a constant integer or rational", offset);
    double v = folded.constant_value();
    if (v == std::floor(v) && std::abs(v) < 9.0e15)
      return Rational(static_cast<long long>(v), 1);
    // continued fraction with exact round-trip requirement
    double x = v;
    long long h_prev = 1, h = static_cast<long long>(std::floor(x));
    long long k_prev = 0, k = 1;
    double frac = x - std::floor(x);
    for (int i = 0; i < 48 && k <= 1000000; ++i) {
      if (static_cast<double>(h) / static_cast<double>(k) == v) return Rational(h, k);
      if (frac == 0.0) break;
      double inv = 1.0 / frac;
      long long a = static_cast<long long>(std::floor(inv));
      frac = inv - std::floor(inv);
      long long h_next = a * h + h_prev;
      long long k_next = a * k + k_prev;
      h_prev = h;
      k_prev = k;
      h = h_next;
      k = k_next;
    }
    throw ParseError("exponent is not an exact integer or small rational", offset);
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to something else; not part of this number
      }
    }
    try {
      std::size_t used = 0;
      double v = std::stod(src_.substr(start, pos_ - start), &used);
      if (used != pos_ - start) throw ParseError("malformed number", start);
      return Expr::constant(v);
    } catch (const std::logic_error&) {
      throw ParseError("malformed number", start);
    }
  }

  Expr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::string name = src_.substr(start, pos_ - start);
    if (name == "t") return Expr::time();
    if (name == "cos" || name == "sin" || name == "exp" || name == "ln" || name == "sqrt") {
      if (!consume('(')) throw ParseError("expected '(' after function name", pos_);
      Expr arg = parse_sum();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      if (name == "cos") return cos(arg);
      if (name == "sin") return sin(arg);
      if (name == "exp") return exp(arg);
      if (name == "ln") return ln(arg);
      return sqrt(arg);
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

Expr parse_expression(const std::string& src) { return simplify(Parser(src).run()); }

// ---------------------------------------------------------------------------
// singular point detection

namespace {

// e == a*t + b exactly?
bool try_affine(const Expr& e, double& a, double& b) {
  switch (e.kind()) {
    case ExprKind::Constant:
      a = 0.0;
      b = e.constant_value();
      return true;
    case ExprKind::Time:
      a = 1.0;
      b = 0.0;
      return true;
    case ExprKind::Neg: {
      double ai, bi;
      if (!try_affine(e.child(0), ai, bi)) return false;
      a = -ai;
      b = -bi;
      return true;
    }
    case ExprKind::Add:
    case ExprKind::Sub: {
      double a0, b0, a1, b1;
      if (!try_affine(e.child(0), a0, b0) || !try_affine(e.child(1), a1, b1)) return false;
      double s = e.kind() == ExprKind::Add ? 1.0 : -1.0;
      a = a0 + s * a1;
      b = b0 + s * b1;
      return true;
    }
    case ExprKind::Mul: {
      double a0, b0, a1, b1;
      if (!try_affine(e.child(0), a0, b0) || !try_affine(e.child(1), a1, b1)) return false;
      if (a0 != 0.0 && a1 != 0.0) return false;
      a = a0 * b1 + a1 * b0;
      b = b0 * b1;
      return true;
    }
    case ExprKind::Div: {
      double a0, b0, a1, b1;
      if (!try_affine(e.child(0), a0, b0) || !try_affine(e.child(1), a1, b1)) return false;
      if (a1 != 0.0 || b1 == 0.0) return false;
      a = a0 / b1;
      b = b0 / b1;
      return true;
    }
    default:
      return false;
  }
}

// e == c * t^k (k >= 1)?
bool is_time_power(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Time:
      return true;
    case ExprKind::Pow:
      return e.exponent().num > 0 && is_time_power(e.child(0));
    case ExprKind::Neg:
      return is_time_power(e.child(0));
    case ExprKind::Mul:
      return (e.child(0).is_constant() && is_time_power(e.child(1))) ||
             (e.child(1).is_constant() && is_time_power(e.child(0)));
    default:
      return false;
  }
}

void collect(const Expr& e, std::vector<double>& out) {
  switch (e.kind()) {
    case ExprKind::Div:
      if (is_time_power(e.child(1))) out.push_back(0.0);
      break;
    case ExprKind::Ln:
    case ExprKind::Sqrt: {
      double a, b;
      if (try_affine(e.child(0), a, b) && a != 0.0) out.push_back(-b / a);
      break;
    }
    case ExprKind::Pow:
      if (e.exponent().num < 0) {
        double a, b;
        if (is_time_power(e.child(0))) out.push_back(0.0);
        else if (try_affine(e.child(0), a, b) && a != 0.0) out.push_back(-b / a);
      }
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < e.child_count(); ++i) collect(e.child(i), out);
}

}  // namespace

std::vector<double> detect_singular_points(const Expr& e) {
  std::vector<double> pts;
  collect(e, pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// ---------------------------------------------------------------------------
// CoefficientFn

CoefficientFn::CoefficientFn() : CoefficientFn(Expr::constant(0.0)) {}

CoefficientFn::CoefficientFn(Expr value, Interval domain, std::vector<double> extra_singular_points)
    : value_(simplify(value)),
      derivative_(differentiate(value_)),
      domain_(domain),
      singular_points_(detect_singular_points(value_)) {
  for (double p : extra_singular_points) singular_points_.push_back(p);
  std::sort(singular_points_.begin(), singular_points_.end());
  singular_points_.erase(std::unique(singular_points_.begin(), singular_points_.end()),
                         singular_points_.end());
}

CoefficientFn CoefficientFn::from_constant(double c) { return CoefficientFn(Expr::constant(c)); }

CoefficientFn CoefficientFn::parse(const std::string& src, Interval domain,
                                   std::vector<double> extra_singular_points) {
  return CoefficientFn(parse_expression(src), domain, std::move(extra_singular_points));
}

}  // namespace rce
