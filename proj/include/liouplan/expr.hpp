#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace liouplan {

enum class UnaryFn { Neg, Sin, Cos, Tan, Atan, Asin, Acos, Exp, Ln, Sqrt, Abs, Tanh, Sign };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

/// Variable values for evaluation. Lookup by string_view avoids temporaries.
using Binding = std::map<std::string, double, std::less<>>;

/// Immutable scalar expression tree. Copies share structure.
///
/// Variable names are `[A-Za-z][A-Za-z0-9_]*` followed by any number of `'`;
/// each prime is one time derivative, so `y''` is the second derivative of `y`.
/// The exponent of `^` is always an integer constant.
class Expr {
 public:
  enum class Kind { Constant, Variable, Unary, Binary };

  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr unary(UnaryFn fn, Expr child);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  /// `base ^ exponent`; throws InputError unless exponent is an integer.
  static Expr power(Expr base, int exponent);

  Kind kind() const noexcept;
  bool is_constant() const noexcept { return kind() == Kind::Constant; }
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }

  double value() const;               // Constant
  const std::string& name() const;    // Variable
  UnaryFn unary_fn() const;           // Unary
  BinaryOp binary_op() const;         // Binary
  const Expr& child() const;          // Unary
  const Expr& lhs() const;            // Binary
  const Expr& rhs() const;            // Binary

  /// Structural (tree) equality; constants compare by value.
  friend bool operator==(const Expr& a, const Expr& b);

  friend Expr operator+(const Expr& a, const Expr& b) { return binary(BinaryOp::Add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return binary(BinaryOp::Sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return binary(BinaryOp::Mul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return binary(BinaryOp::Div, a, b); }
  friend Expr operator-(const Expr& a) { return unary(UnaryFn::Neg, a); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }

  std::shared_ptr<const Node> node_;
};

const char* function_name(UnaryFn fn);

Expr parse_expression(std::string_view text);

/// Canonical text form; `parse_expression(to_string(e)) == e` for every tree.
std::string to_string(const Expr& e);

/// Throws UnboundVariable or DomainError. Never returns NaN or infinity.
double evaluate(const Expr& e, const Binding& env);

/// Exact symbolic partial derivative, simplified. d|x|/dx is sign(x), with sign(0) = 0.
Expr partial_derivative(const Expr& e, std::string_view var);

/// Local rewriting only: constant folding, neutral/absorbing elements,
/// double negation, trivial powers. Idempotent.
Expr simplify(const Expr& e);

std::set<std::string> variables(const Expr& e);
bool mentions(const Expr& e, std::string_view var);

bool is_valid_variable_name(std::string_view name);
/// Splits `y''` into {"y", 2}.
std::pair<std::string_view, int> split_primes(std::string_view name);
std::string with_primes(std::string_view base, int order);

}  // namespace liouplan
