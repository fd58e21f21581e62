#pragma once

// Closed-form expressions in one variable `x` with named parameters.
//
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?          right-associative
//   atom    := number | 'x' | param | func '(' sum ')' | '(' sum ')'
//
// `^` with a non-integer (or non-constant) exponent is only defined for a
// positive base; this is checked at evaluation time.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liouville/errors.hpp"

namespace liouville {

using Params = std::map<std::string, double, std::less<>>;

class Expr {
 public:
  enum class Kind { constant, variable, parameter, unary, binary };
  enum class Func { neg, exp, log, sin, cos, tan, sinh, cosh, tanh, sqrt, abs };
  enum class Op { add, sub, mul, div, pow };

  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable();
  static Expr parameter(std::string name);
  static Expr unary(Func f, Expr operand);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  Kind kind() const noexcept;
  double value() const;               // constant
  const std::string& name() const;    // parameter
  Func func() const;                  // unary
  Op op() const;                      // binary
  const Expr& operand() const;        // unary
  const Expr& lhs() const;            // binary
  const Expr& rhs() const;            // binary

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Names accepted as function symbols, in grammar order.
const std::vector<std::string>& function_names();

/// Parses `text`. Identifiers other than `variable`, the function names and
/// the entries of `parameters` raise UnknownIdentifier. The variable is
/// stored anonymously, so trees parsed with different names compare equal.
Expr parse(std::string_view text, const std::vector<std::string>& parameters = {"m"},
           std::string_view variable = "x");

double evaluate(const Expr& e, double x, const Params& params = {});

/// Exact derivative with respect to `x`. Rejects `abs`.
Expr differentiate(const Expr& e);

/// Printed form; parses back to a structurally equal tree.
std::string to_string(const Expr& e);

/// Parameter names referenced anywhere in `e`.
std::vector<std::string> parameters_of(const Expr& e);

/// If `e` is an integer constant (possibly negated), returns it.
std::optional<long> constant_integer(const Expr& e);

std::string_view to_string(Expr::Func f);

}  // namespace liouville
