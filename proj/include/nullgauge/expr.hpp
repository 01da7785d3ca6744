#pragma once

// Immutable expression trees over the phase-space variables x, xdot, xddot, t,
// named parameters and a small set of elementary functions.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nullgauge/rational.hpp"

namespace nullgauge {

enum class Variable { x, xdot, xddot, t };

/// Unary functions. `neg` is the prefix minus and renders as "-".
enum class Function { neg, sin, cos, exp, ln, sqrt, sinh, cosh, asinh, atan };

enum class BinaryOp { add, sub, mul, div, pow };

enum class NodeKind { constant, parameter, variable, unary, binary };

/// Numeric literal: exact where possible, IEEE double otherwise.
using Constant = std::variant<Rational, double>;

[[nodiscard]] std::string_view variable_name(Variable v);
[[nodiscard]] std::optional<Variable> variable_from_name(std::string_view name);
[[nodiscard]] std::string_view function_name(Function f);
[[nodiscard]] std::optional<Function> function_from_name(std::string_view name);

struct Node;

class Expression {
 public:
  /// Default-constructed expression is the exact constant 0.
  Expression();

  static Expression constant(Rational value);
  static Expression integer(std::int64_t value) { return constant(Rational(value)); }
  /// Goes through the literal reader, so values with a short exact decimal form
  /// become rationals (real(0.25) == constant(1/4)).
  static Expression real(double value);
  static Expression parameter(std::string name);
  static Expression variable(Variable v);
  /// Prefix minus applied to a constant folds into a negative constant.
  static Expression unary(Function f, Expression child);
  static Expression binary(BinaryOp op, Expression lhs, Expression rhs);

  [[nodiscard]] NodeKind kind() const;
  [[nodiscard]] bool is_constant() const { return kind() == NodeKind::constant; }
  [[nodiscard]] const Constant& constant_value() const;
  /// Value of a rational constant; nullopt for anything else.
  [[nodiscard]] std::optional<Rational> rational() const;
  [[nodiscard]] bool is_rational(const Rational& r) const;
  [[nodiscard]] bool is_zero() const { return is_rational(Rational(0)); }
  [[nodiscard]] bool is_one() const { return is_rational(Rational(1)); }
  [[nodiscard]] const std::string& parameter_name() const;
  [[nodiscard]] Variable variable() const;
  [[nodiscard]] Function function() const;
  [[nodiscard]] BinaryOp op() const;
  [[nodiscard]] const Expression& child() const;
  [[nodiscard]] const Expression& lhs() const;
  [[nodiscard]] const Expression& rhs() const;

  /// Structural equality. Rational constants compare by value, doubles bitwise.
  friend bool operator==(const Expression& a, const Expression& b);

  [[nodiscard]] bool same_node(const Expression& o) const { return node_ == o.node_; }
  [[nodiscard]] std::size_t size() const;

 private:
  explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  NodeKind kind = NodeKind::constant;
  Constant value = Rational(0);
  std::string name;
  Variable var = Variable::x;
  Function fn = Function::neg;
  BinaryOp op = BinaryOp::add;
  std::vector<Expression> children;
  std::size_t size = 1;
};

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& base, const Expression& exponent);
Expression call(Function f, const Expression& arg);

inline Expression var(Variable v) { return Expression::variable(v); }
inline Expression param(std::string name) { return Expression::parameter(std::move(name)); }
inline Expression num(std::int64_t v) { return Expression::integer(v); }
inline Expression num(std::int64_t n, std::int64_t d) { return Expression::constant(Rational(n, d)); }

// ---------------------------------------------------------------------------
// Text form

class ParseError : public std::runtime_error {
 public:
  /// `index` is the 0-based byte index of the offending token.
  ParseError(const std::string& what, std::size_t index);
  /// 1-based byte position of the offending token; one past the last
  /// character for a premature end of input.
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// expr  := term (('+'|'-') term)*
/// term  := unary (('*'|'/') unary)*
/// unary := '-' unary | power
/// power := atom ('^' unary)?
/// atom  := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
/// Two bare integer literals joined by '/' ("1/3", "-2/15") read as one exact
/// rational.
[[nodiscard]] Expression parse(std::string_view text);
[[nodiscard]] std::string render(const Expression& e);

// ---------------------------------------------------------------------------
// Structure

[[nodiscard]] std::set<std::string> parameters(const Expression& e);
[[nodiscard]] bool contains(const Expression& e, Variable v);
[[nodiscard]] bool contains_parameter(const Expression& e, std::string_view name);
/// Replaces every occurrence of the variable or parameter `name`.
[[nodiscard]] Expression substitute(const Expression& e, std::string_view name, const Expression& replacement);

/// Light simplification: rational constant folding, 0/1 identities, merging of
/// like factors and like terms. Not a canonical form.
[[nodiscard]] Expression simplify(const Expression& e);

// ---------------------------------------------------------------------------
// Evaluation

class Bindings {
 public:
  Bindings() = default;
  Bindings(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  Bindings& set(const std::string& name, double value) {
    values_[name] = value;
    return *this;
  }
  [[nodiscard]] std::optional<double> get(std::string_view name) const;
  [[nodiscard]] bool has(std::string_view name) const { return get(name).has_value(); }
  [[nodiscard]] const std::map<std::string, double, std::less<>>& values() const { return values_; }
  /// Entries of `other` override entries of this.
  [[nodiscard]] Bindings merged(const Bindings& other) const;

 private:
  std::map<std::string, double, std::less<>> values_;
};

class EvalError : public std::runtime_error {
 public:
  enum class Kind { unbound_name, domain };
  EvalError(Kind kind, const std::string& what, std::string subtree);
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::string& subtree() const { return subtree_; }

 private:
  Kind kind_;
  std::string subtree_;
};

struct EvalOptions {
  /// Arguments of sqrt and ln, and bases raised to fractional powers, below
  /// this value are reported as domain errors. Samplers use it to stay clear of
  /// branch points.
  double radicand_floor = 0.0;
};

[[nodiscard]] double eval(const Expression& e, const Bindings& b, const EvalOptions& opts = {});

/// Phase-space point for compiled evaluation.
struct State {
  double x = 0.0;
  double xdot = 0.0;
  double xddot = 0.0;
  double t = 0.0;
};

/// Flattened form of an Expression with its parameters frozen, for hot loops
/// (integration, sampling). Errors match eval().
class CompiledExpression {
 public:
  CompiledExpression(const Expression& e, const Bindings& params, EvalOptions opts = {});
  [[nodiscard]] double operator()(const State& s) const;
  [[nodiscard]] const Expression& source() const { return source_; }

 private:
  enum class Code : unsigned char {
    constant, var_x, var_xdot, var_xddot, var_t,
    neg, sin, cos, exp, ln, sqrt, sinh, cosh, asinh, atan,
    add, sub, mul, div, pow
  };
  struct Instr {
    Code code;
    double value;
  };
  [[noreturn]] void explain_failure(const State& s) const;

  Expression source_;
  Bindings params_;
  EvalOptions opts_;
  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
};

/// Bindings with the four phase-space variables set from `s`.
[[nodiscard]] Bindings with_state(const Bindings& params, const State& s);

}  // namespace nullgauge
