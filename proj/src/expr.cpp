#include "liouplan/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

#include "liouplan/errors.hpp"

namespace liouplan {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::string name;
  UnaryFn fn = UnaryFn::Neg;
  BinaryOp op = BinaryOp::Add;
  Expr a{std::shared_ptr<const Node>{}};
  Expr b{std::shared_ptr<const Node>{}};
};

namespace {

constexpr std::array<std::pair<UnaryFn, std::string_view>, 13> kFunctionNames{{
    {UnaryFn::Neg, "-"},
    {UnaryFn::Sin, "sin"},
    {UnaryFn::Cos, "cos"},
    {UnaryFn::Tan, "tan"},
    {UnaryFn::Atan, "atan"},
    {UnaryFn::Asin, "asin"},
    {UnaryFn::Acos, "acos"},
    {UnaryFn::Exp, "exp"},
    {UnaryFn::Ln, "ln"},
    {UnaryFn::Sqrt, "sqrt"},
    {UnaryFn::Abs, "abs"},
    {UnaryFn::Tanh, "tanh"},
    {UnaryFn::Sign, "sign"},
}};

bool lookup_function(std::string_view name, UnaryFn& out) {
  for (const auto& [fn, text] : kFunctionNames) {
    if (fn != UnaryFn::Neg && text == name) {
      out = fn;
      return true;
    }
  }
  return false;
}

bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_alpha(c) || is_digit(c) || c == '_'; }

// ---------------------------------------------------------------------------
// Parser

constexpr const char* kOperandStart = "number, identifier, '(' or '-'";
constexpr const char* kAtomStart = "number, identifier or '('";

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    if (text_.empty()) throw ParseError(0, kOperandStart, "empty expression");
    for (std::size_t i = 0; i < text_.size(); ++i) {
      auto c = static_cast<unsigned char>(text_[i]);
      if (c >= 0x80) throw ParseError(i, {}, "non-ASCII byte");
    }
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError(pos_, "operator or end of input",
                       std::string("unexpected '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  struct Power {
    Expr expr;
    bool bare_number = false;
  };

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const char* expected, const std::string& detail) const {
    throw ParseError(pos_, expected, detail);
  }

  std::string describe_here() const {
    if (pos_ >= text_.size()) return "unexpected end of input";
    return std::string("unexpected '") + text_[pos_] + "'";
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  // A minus sign directly applied to a bare numeric literal yields a negative
  // constant, so every finite constant has a printable form.
  Expr parse_factor() {
    if (accept('-')) {
      Power p = parse_power();
      if (p.bare_number) return Expr::constant(-p.expr.value());
      return Expr::unary(UnaryFn::Neg, p.expr);
    }
    return parse_power().expr;
  }

  Power parse_power() {
    Power base = parse_atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ == digits) {
      pos_ = digits;
      fail("integer exponent", describe_here());
    }
    int exponent = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, exponent);
    if (ec != std::errc{} || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("integer exponent", "exponent out of range");
    }
    return {Expr::power(base.expr, negative ? -exponent : exponent), false};
  }

  Power parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail(kAtomStart, "unexpected end of input");
    const char c = text_[pos_];
    if (is_digit(c) || c == '.') return {parse_number(), true};
    if (is_alpha(c)) return {parse_identifier(), false};
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail("')'", describe_here());
      return {inner, false};
    }
    fail(kAtomStart, describe_here());
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    std::size_t mantissa_digits = 0;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_, ++mantissa_digits;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_, ++mantissa_digits;
    }
    if (mantissa_digits == 0) {
      pos_ = start;
      fail("number", "malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && is_digit(text_[look])) {
        pos_ = look;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_ || !std::isfinite(value)) {
      const std::size_t end = pos_;
      pos_ = start;
      fail("number", "unrepresentable number '" +
                         std::string(text_.substr(start, end - start)) + "'");
    }
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view ident = text_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      UnaryFn fn{};
      if (!lookup_function(ident, fn)) {
        pos_ = start;
        fail("known function", "unknown function '" + std::string(ident) + "'");
      }
      ++pos_;
      Expr arg = parse_expr();
      if (!accept(')')) fail("')'", describe_here());
      return Expr::unary(fn, arg);
    }
    // Primes must follow the identifier without whitespace.
    std::size_t end = start + ident.size();
    while (end < text_.size() && text_[end] == '\'') ++end;
    pos_ = end;
    return Expr::variable(std::string(text_.substr(start, end - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return std::signbit(e.value()) ? 3 : 5;
    case Expr::Kind::Variable: return 5;
    case Expr::Kind::Unary: return e.unary_fn() == UnaryFn::Neg ? 3 : 5;
    case Expr::Kind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
  }
  return 0;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      out += format_number(e.value());
      return;
    case Expr::Kind::Variable:
      out += e.name();
      return;
    case Expr::Kind::Unary:
      if (e.unary_fn() == UnaryFn::Neg) {
        out += '-';
        print_wrapped(e.child(), precedence(e.child()) < 4 || e.child().is_constant(), out);
      } else {
        out += function_name(e.unary_fn());
        print_wrapped(e.child(), true, out);
      }
      return;
    case Expr::Kind::Binary: {
      if (e.binary_op() == BinaryOp::Pow) {
        print_wrapped(e.lhs(), precedence(e.lhs()) < 5, out);
        out += '^';
        out += std::to_string(static_cast<long long>(e.rhs().value()));
        return;
      }
      const int p = precedence(e);
      print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      switch (e.binary_op()) {
        case BinaryOp::Add: out += " + "; break;
        case BinaryOp::Sub: out += " - "; break;
        case BinaryOp::Mul: out += '*'; break;
        case BinaryOp::Div: out += '/'; break;
        case BinaryOp::Pow: break;
      }
      print_wrapped(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Evaluation

double checked(const Expr& node, double v) {
  if (!std::isfinite(v)) throw DomainError(to_string(node), v, "non-finite result");
  return v;
}

double apply_unary(const Expr& node, UnaryFn fn, double x) {
  switch (fn) {
    case UnaryFn::Neg: return -x;
    case UnaryFn::Sin: return std::sin(x);
    case UnaryFn::Cos: return std::cos(x);
    case UnaryFn::Tan: return checked(node, std::tan(x));
    case UnaryFn::Atan: return std::atan(x);
    case UnaryFn::Asin:
      if (x < -1.0 || x > 1.0) throw DomainError(to_string(node), x);
      return std::asin(x);
    case UnaryFn::Acos:
      if (x < -1.0 || x > 1.0) throw DomainError(to_string(node), x);
      return std::acos(x);
    case UnaryFn::Exp: return checked(node, std::exp(x));
    case UnaryFn::Ln:
      if (!(x > 0.0)) throw DomainError(to_string(node), x);
      return std::log(x);
    case UnaryFn::Sqrt:
      if (x < 0.0) throw DomainError(to_string(node), x);
      return std::sqrt(x);
    case UnaryFn::Abs: return std::fabs(x);
    case UnaryFn::Tanh: return std::tanh(x);
    case UnaryFn::Sign: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  }
  return x;
}

double apply_binary(const Expr& node, BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add: return checked(node, a + b);
    case BinaryOp::Sub: return checked(node, a - b);
    case BinaryOp::Mul: return checked(node, a * b);
    case BinaryOp::Div:
      if (b == 0.0) throw DomainError(to_string(node), b, "division by zero");
      return checked(node, a / b);
    case BinaryOp::Pow:
      if (a == 0.0 && b < 0.0) throw DomainError(to_string(node), a, "zero to a negative power");
      return checked(node, std::pow(a, b));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Simplification

std::optional<double> try_fold(const Expr& node) {
  try {
    return evaluate(node, Binding{});
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

Expr simplify_node(const Expr& e);

Expr simplified_neg(const Expr& child) { return simplify_node(Expr::unary(UnaryFn::Neg, child)); }

// Children of `e` are already simplified.
Expr simplify_node(const Expr& e) {
  if (e.kind() == Expr::Kind::Unary) {
    const Expr& c = e.child();
    if (e.unary_fn() == UnaryFn::Neg) {
      if (c.is_constant()) return Expr::constant(-c.value());
      if (c.kind() == Expr::Kind::Unary && c.unary_fn() == UnaryFn::Neg) return c.child();
      return e;
    }
    if (c.is_constant()) {
      if (auto v = try_fold(e)) return Expr::constant(*v);
    }
    return e;
  }
  if (e.kind() != Expr::Kind::Binary) return e;

  const Expr& l = e.lhs();
  const Expr& r = e.rhs();
  if (l.is_constant() && r.is_constant()) {
    if (auto v = try_fold(e)) return Expr::constant(*v);
    return e;
  }
  switch (e.binary_op()) {
    case BinaryOp::Add:
      if (l.is_constant(0.0)) return r;
      if (r.is_constant(0.0)) return l;
      return e;
    case BinaryOp::Sub:
      if (r.is_constant(0.0)) return l;
      if (l.is_constant(0.0)) return simplified_neg(r);
      return e;
    case BinaryOp::Mul:
      if (l.is_constant(0.0) || r.is_constant(0.0)) return Expr::constant(0.0);
      if (l.is_constant(1.0)) return r;
      if (r.is_constant(1.0)) return l;
      if (l.is_constant(-1.0)) return simplified_neg(r);
      if (r.is_constant(-1.0)) return simplified_neg(l);
      return e;
    case BinaryOp::Div:
      if (r.is_constant(1.0)) return l;
      if (l.is_constant(0.0)) return Expr::constant(0.0);
      return e;
    case BinaryOp::Pow:
      if (r.is_constant(1.0)) return l;
      if (r.is_constant(0.0)) return Expr::constant(1.0);
      return e;
  }
  return e;
}

Expr derivative(const Expr& e, std::string_view var) {
  using F = UnaryFn;
  const auto one = Expr::constant(1.0);
  switch (e.kind()) {
    case Expr::Kind::Constant: return Expr::constant(0.0);
    case Expr::Kind::Variable: return Expr::constant(e.name() == var ? 1.0 : 0.0);
    case Expr::Kind::Unary: {
      const Expr& c = e.child();
      const Expr dc = derivative(c, var);
      if (dc.is_constant(0.0)) return dc;
      switch (e.unary_fn()) {
        case F::Neg: return -dc;
        case F::Sin: return Expr::unary(F::Cos, c) * dc;
        case F::Cos: return -Expr::unary(F::Sin, c) * dc;
        case F::Tan: return (one + Expr::power(Expr::unary(F::Tan, c), 2)) * dc;
        case F::Atan: return dc / (one + Expr::power(c, 2));
        case F::Asin: return dc / Expr::unary(F::Sqrt, one - Expr::power(c, 2));
        case F::Acos: return -(dc / Expr::unary(F::Sqrt, one - Expr::power(c, 2)));
        case F::Exp: return Expr::unary(F::Exp, c) * dc;
        case F::Ln: return dc / c;
        case F::Sqrt: return dc / (Expr::constant(2.0) * Expr::unary(F::Sqrt, c));
        case F::Abs: return Expr::unary(F::Sign, c) * dc;
        case F::Tanh: return (one - Expr::power(Expr::unary(F::Tanh, c), 2)) * dc;
        case F::Sign: return Expr::constant(0.0);
      }
      break;
    }
    case Expr::Kind::Binary: {
      const Expr& l = e.lhs();
      const Expr& r = e.rhs();
      switch (e.binary_op()) {
        case BinaryOp::Add: return derivative(l, var) + derivative(r, var);
        case BinaryOp::Sub: return derivative(l, var) - derivative(r, var);
        case BinaryOp::Mul: return derivative(l, var) * r + l * derivative(r, var);
        case BinaryOp::Div:
          return (derivative(l, var) * r - l * derivative(r, var)) / Expr::power(r, 2);
        case BinaryOp::Pow: {
          const int n = static_cast<int>(r.value());
          return Expr::constant(n) * Expr::power(l, n - 1) * derivative(l, var);
        }
      }
      break;
    }
  }
  return Expr::constant(0.0);
}

void collect_variables(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return;
    case Expr::Kind::Variable: out.insert(e.name()); return;
    case Expr::Kind::Unary: collect_variables(e.child(), out); return;
    case Expr::Kind::Binary:
      collect_variables(e.lhs(), out);
      collect_variables(e.rhs(), out);
      return;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() {
  static const auto zero = std::make_shared<const Node>();
  node_ = zero;
}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw InputError("non-finite constant in expression");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  if (!is_valid_variable_name(name)) throw InputError("invalid variable name '" + name + "'");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryFn fn, Expr child) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->fn = fn;
  n->a = std::move(child);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  if (op == BinaryOp::Pow) {
    if (!rhs.is_constant() || rhs.value() != std::trunc(rhs.value()) ||
        std::fabs(rhs.value()) > 1e9) {
      throw InputError("exponent of '^' must be an integer constant");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  return binary(BinaryOp::Pow, std::move(base), constant(exponent));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const { return node().value; }
const std::string& Expr::name() const { return node().name; }
UnaryFn Expr::unary_fn() const { return node().fn; }
BinaryOp Expr::binary_op() const { return node().op; }
const Expr& Expr::child() const { return node().a; }
const Expr& Expr::lhs() const { return node().a; }
const Expr& Expr::rhs() const { return node().b; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant: return a.value() == b.value();
    case Expr::Kind::Variable: return a.name() == b.name();
    case Expr::Kind::Unary: return a.unary_fn() == b.unary_fn() && a.child() == b.child();
    case Expr::Kind::Binary:
      return a.binary_op() == b.binary_op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

const char* function_name(UnaryFn fn) {
  for (const auto& [f, text] : kFunctionNames) {
    if (f == fn) return text.data();
  }
  return "?";
}

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

double evaluate(const Expr& e, const Binding& env) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e.value();
    case Expr::Kind::Variable: {
      auto it = env.find(e.name());
      if (it == env.end()) throw UnboundVariable(e.name());
      if (!std::isfinite(it->second)) throw DomainError(e.name(), it->second, "non-finite binding");
      return it->second;
    }
    case Expr::Kind::Unary: return apply_unary(e, e.unary_fn(), evaluate(e.child(), env));
    case Expr::Kind::Binary: {
      const double a = evaluate(e.lhs(), env);
      const double b = evaluate(e.rhs(), env);
      return apply_binary(e, e.binary_op(), a, b);
    }
  }
  return 0.0;
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Variable: return e;
    case Expr::Kind::Unary: return simplify_node(Expr::unary(e.unary_fn(), simplify(e.child())));
    case Expr::Kind::Binary:
      return simplify_node(Expr::binary(e.binary_op(), simplify(e.lhs()), simplify(e.rhs())));
  }
  return e;
}

Expr partial_derivative(const Expr& e, std::string_view var) {
  if (!is_valid_variable_name(var)) {
    throw InputError("invalid variable name '" + std::string(var) + "'");
  }
  return simplify(derivative(e, var));
}

std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

bool mentions(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return false;
    case Expr::Kind::Variable: return e.name() == var;
    case Expr::Kind::Unary: return mentions(e.child(), var);
    case Expr::Kind::Binary: return mentions(e.lhs(), var) || mentions(e.rhs(), var);
  }
  return false;
}

bool is_valid_variable_name(std::string_view name) {
  if (name.empty() || !is_alpha(name.front())) return false;
  std::size_t i = 1;
  while (i < name.size() && is_ident_char(name[i])) ++i;
  while (i < name.size() && name[i] == '\'') ++i;
  return i == name.size();
}

std::pair<std::string_view, int> split_primes(std::string_view name) {
  std::size_t end = name.size();
  while (end > 0 && name[end - 1] == '\'') --end;
  return {name.substr(0, end), static_cast<int>(name.size() - end)};
}

std::string with_primes(std::string_view base, int order) {
  return std::string(base) + std::string(static_cast<std::size_t>(order), '\'');
}

}  // namespace liouplan
