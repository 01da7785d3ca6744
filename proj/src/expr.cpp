#include "nullgauge/expr.hpp"

#include <array>
#include <utility>

namespace nullgauge {

namespace {

constexpr std::array<std::string_view, 4> kVariableNames = {"x", "xdot", "xddot", "t"};
constexpr std::array<std::string_view, 10> kFunctionNames = {"neg",  "sin",  "cos",   "exp", "ln",
                                                             "sqrt", "sinh", "cosh", "asinh", "atan"};

const std::shared_ptr<const Node>& zero_node() {
  static const auto node = std::make_shared<const Node>();
  return node;
}

}  // namespace

std::string_view variable_name(Variable v) { return kVariableNames[static_cast<std::size_t>(v)]; }

std::optional<Variable> variable_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kVariableNames.size(); ++i) {
    if (kVariableNames[i] == name) return static_cast<Variable>(i);
  }
  return std::nullopt;
}

std::string_view function_name(Function f) { return kFunctionNames[static_cast<std::size_t>(f)]; }

std::optional<Function> function_from_name(std::string_view name) {
  // "neg" is internal; it only ever appears as prefix minus in text.
  for (std::size_t i = 1; i < kFunctionNames.size(); ++i) {
    if (kFunctionNames[i] == name) return static_cast<Function>(i);
  }
  return std::nullopt;
}

Expression::Expression() : node_(zero_node()) {}

Expression Expression::constant(Rational value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::parameter(std::string name) {
  if (variable_from_name(name)) return variable(*variable_from_name(name));
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::parameter;
  n->name = std::move(name);
  return Expression(std::move(n));
}

Expression Expression::variable(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->var = v;
  return Expression(std::move(n));
}

Expression Expression::unary(Function f, Expression child) {
  if (f == Function::neg && child.is_constant()) {
    const auto& c = child.constant_value();
    if (const auto* r = std::get_if<Rational>(&c)) {
      if (auto neg = r->checked_neg()) return constant(*neg);
    } else {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::constant;
      n->value = -std::get<double>(c);
      return Expression(std::move(n));
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::unary;
  n->fn = f;
  n->size = 1 + child.size();
  n->children.push_back(std::move(child));
  return Expression(std::move(n));
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::binary;
  n->op = op;
  n->size = 1 + lhs.size() + rhs.size();
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return Expression(std::move(n));
}

NodeKind Expression::kind() const { return node_->kind; }
const Constant& Expression::constant_value() const { return node_->value; }

std::optional<Rational> Expression::rational() const {
  if (node_->kind != NodeKind::constant) return std::nullopt;
  if (const auto* r = std::get_if<Rational>(&node_->value)) return *r;
  return std::nullopt;
}

bool Expression::is_rational(const Rational& r) const {
  auto v = rational();
  return v && *v == r;
}

const std::string& Expression::parameter_name() const { return node_->name; }
Variable Expression::variable() const { return node_->var; }
Function Expression::function() const { return node_->fn; }
BinaryOp Expression::op() const { return node_->op; }
const Expression& Expression::child() const { return node_->children.at(0); }
const Expression& Expression::lhs() const { return node_->children.at(0); }
const Expression& Expression::rhs() const { return node_->children.at(1); }
std::size_t Expression::size() const { return node_->size; }

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind || x.size != y.size) return false;
  switch (x.kind) {
    case NodeKind::constant:
      if (x.value.index() != y.value.index()) return false;
      if (const auto* r = std::get_if<Rational>(&x.value)) return *r == std::get<Rational>(y.value);
      return std::get<double>(x.value) == std::get<double>(y.value);
    case NodeKind::parameter:
      return x.name == y.name;
    case NodeKind::variable:
      return x.var == y.var;
    case NodeKind::unary:
      return x.fn == y.fn && x.children[0] == y.children[0];
    case NodeKind::binary:
      return x.op == y.op && x.children[0] == y.children[0] && x.children[1] == y.children[1];
  }
  return false;
}

Expression operator+(const Expression& a, const Expression& b) { return Expression::binary(BinaryOp::add, a, b); }
Expression operator-(const Expression& a, const Expression& b) { return Expression::binary(BinaryOp::sub, a, b); }
Expression operator*(const Expression& a, const Expression& b) { return Expression::binary(BinaryOp::mul, a, b); }
Expression operator/(const Expression& a, const Expression& b) { return Expression::binary(BinaryOp::div, a, b); }
Expression operator-(const Expression& a) { return Expression::unary(Function::neg, a); }
Expression pow(const Expression& base, const Expression& exponent) {
  return Expression::binary(BinaryOp::pow, base, exponent);
}
Expression call(Function f, const Expression& arg) { return Expression::unary(f, arg); }

namespace {

void collect_parameters(const Expression& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case NodeKind::parameter:
      out.insert(e.parameter_name());
      break;
    case NodeKind::unary:
      collect_parameters(e.child(), out);
      break;
    case NodeKind::binary:
      collect_parameters(e.lhs(), out);
      collect_parameters(e.rhs(), out);
      break;
    default:
      break;
  }
}

template <typename Pred>
bool any_node(const Expression& e, const Pred& pred) {
  if (pred(e)) return true;
  switch (e.kind()) {
    case NodeKind::unary:
      return any_node(e.child(), pred);
    case NodeKind::binary:
      return any_node(e.lhs(), pred) || any_node(e.rhs(), pred);
    default:
      return false;
  }
}

}  // namespace

std::set<std::string> parameters(const Expression& e) {
  std::set<std::string> out;
  collect_parameters(e, out);
  return out;
}

bool contains(const Expression& e, Variable v) {
  return any_node(e, [v](const Expression& n) { return n.kind() == NodeKind::variable && n.variable() == v; });
}

bool contains_parameter(const Expression& e, std::string_view name) {
  return any_node(e, [name](const Expression& n) {
    return n.kind() == NodeKind::parameter && n.parameter_name() == name;
  });
}

Expression substitute(const Expression& e, std::string_view name, const Expression& replacement) {
  switch (e.kind()) {
    case NodeKind::constant:
      return e;
    case NodeKind::parameter:
      return e.parameter_name() == name ? replacement : e;
    case NodeKind::variable:
      return variable_name(e.variable()) == name ? replacement : e;
    case NodeKind::unary: {
      Expression c = substitute(e.child(), name, replacement);
      if (c.same_node(e.child())) return e;
      return Expression::unary(e.function(), std::move(c));
    }
    case NodeKind::binary: {
      Expression l = substitute(e.lhs(), name, replacement);
      Expression r = substitute(e.rhs(), name, replacement);
      if (l.same_node(e.lhs()) && r.same_node(e.rhs())) return e;
      return Expression::binary(e.op(), std::move(l), std::move(r));
    }
  }
  return e;
}

}  // namespace nullgauge
