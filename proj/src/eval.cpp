#include <algorithm>
#include <cmath>

#include "nullgauge/expr.hpp"

namespace nullgauge {

EvalError::EvalError(Kind kind, const std::string& what, std::string subtree)
    : std::runtime_error(what), kind_(kind), subtree_(std::move(subtree)) {}

std::optional<double> Bindings::get(std::string_view name) const {
  auto it = values_.find(name);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

Bindings Bindings::merged(const Bindings& other) const {
  Bindings out = *this;
  for (const auto& [k, v] : other.values_) out.values_[k] = v;
  return out;
}

Bindings with_state(const Bindings& params, const State& s) {
  Bindings b = params;
  b.set("x", s.x).set("xdot", s.xdot).set("xddot", s.xddot).set("t", s.t);
  return b;
}

namespace {

[[noreturn]] void domain_error(const Expression& at, const std::string& why) {
  const std::string sub = render(at);
  throw EvalError(EvalError::Kind::domain, "domain error: " + why + " in '" + sub + "'", sub);
}

double constant_to_double(const Constant& c) {
  if (const auto* r = std::get_if<Rational>(&c)) return r->to_double();
  return std::get<double>(c);
}

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

// Shared checks so eval() and CompiledExpression agree on what is a domain
// error. Returns an empty string when the operation is fine.
const char* check_unary(Function f, double a, const EvalOptions& opts) {
  switch (f) {
    case Function::sqrt:
      if (a < 0.0) return "sqrt of negative";
      if (opts.radicand_floor > 0.0 && a < opts.radicand_floor) return "sqrt argument below floor";
      break;
    case Function::ln:
      if (a <= 0.0) return "ln of non-positive";
      if (opts.radicand_floor > 0.0 && a < opts.radicand_floor) return "ln argument below floor";
      break;
    default:
      break;
  }
  return nullptr;
}

double apply_unary(Function f, double a) {
  switch (f) {
    case Function::neg: return -a;
    case Function::sin: return std::sin(a);
    case Function::cos: return std::cos(a);
    case Function::exp: return std::exp(a);
    case Function::ln: return std::log(a);
    case Function::sqrt: return std::sqrt(a);
    case Function::sinh: return std::sinh(a);
    case Function::cosh: return std::cosh(a);
    case Function::asinh: return std::asinh(a);
    case Function::atan: return std::atan(a);
  }
  return a;
}

const char* check_binary(BinaryOp op, double a, double b, const EvalOptions& opts) {
  switch (op) {
    case BinaryOp::div:
      if (b == 0.0) return "division by zero";
      break;
    case BinaryOp::pow:
      if (a == 0.0 && b < 0.0) return "zero raised to a negative power";
      if (!is_integral(b)) {
        if (a < 0.0) return "negative base with non-integer exponent";
        if (opts.radicand_floor > 0.0 && a < opts.radicand_floor) return "fractional power base below floor";
      }
      break;
    default:
      break;
  }
  return nullptr;
}

double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
    case BinaryOp::pow: return std::pow(a, b);
  }
  return 0.0;
}

double eval_node(const Expression& e, const Bindings& b, const EvalOptions& opts) {
  switch (e.kind()) {
    case NodeKind::constant:
      return constant_to_double(e.constant_value());
    case NodeKind::parameter:
    case NodeKind::variable: {
      const std::string name = e.kind() == NodeKind::parameter ? e.parameter_name()
                                                               : std::string(variable_name(e.variable()));
      auto v = b.get(name);
      if (!v) throw EvalError(EvalError::Kind::unbound_name, "unbound name '" + name + "'", name);
      return *v;
    }
    case NodeKind::unary: {
      const double a = eval_node(e.child(), b, opts);
      if (const char* why = check_unary(e.function(), a, opts)) domain_error(e, why);
      const double r = apply_unary(e.function(), a);
      if (!std::isfinite(r)) domain_error(e, "non-finite result");
      return r;
    }
    case NodeKind::binary: {
      const double l = eval_node(e.lhs(), b, opts);
      const double r = eval_node(e.rhs(), b, opts);
      if (const char* why = check_binary(e.op(), l, r, opts)) domain_error(e, why);
      const double v = apply_binary(e.op(), l, r);
      if (!std::isfinite(v)) domain_error(e, "non-finite result");
      return v;
    }
  }
  return 0.0;
}

}  // namespace

double eval(const Expression& e, const Bindings& b, const EvalOptions& opts) { return eval_node(e, b, opts); }

CompiledExpression::CompiledExpression(const Expression& e, const Bindings& params, EvalOptions opts)
    : source_(e), params_(params), opts_(opts) {
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const Expression& n) -> void {
    switch (n.kind()) {
      case NodeKind::constant:
        program_.push_back({Code::constant, constant_to_double(n.constant_value())});
        ++depth;
        break;
      case NodeKind::parameter: {
        auto v = params_.get(n.parameter_name());
        if (!v) {
          throw EvalError(EvalError::Kind::unbound_name, "unbound name '" + n.parameter_name() + "'",
                          n.parameter_name());
        }
        program_.push_back({Code::constant, *v});
        ++depth;
        break;
      }
      case NodeKind::variable: {
        static constexpr Code codes[] = {Code::var_x, Code::var_xdot, Code::var_xddot, Code::var_t};
        program_.push_back({codes[static_cast<int>(n.variable())], 0.0});
        ++depth;
        break;
      }
      case NodeKind::unary:
        self(self, n.child());
        program_.push_back({static_cast<Code>(static_cast<int>(Code::neg) + static_cast<int>(n.function())), 0.0});
        break;
      case NodeKind::binary:
        self(self, n.lhs());
        self(self, n.rhs());
        program_.push_back({static_cast<Code>(static_cast<int>(Code::add) + static_cast<int>(n.op())), 0.0});
        --depth;
        break;
    }
    max_depth_ = std::max(max_depth_, depth);
  };
  emit(emit, e);
}

double CompiledExpression::operator()(const State& s) const {
  constexpr std::size_t kInline = 64;
  double inline_stack[kInline] = {};
  std::vector<double> heap_stack;
  double* stack = inline_stack;
  if (max_depth_ > kInline) {
    heap_stack.resize(max_depth_);
    stack = heap_stack.data();
  }
  std::size_t sp = 0;
  for (const Instr& ins : program_) {
    switch (ins.code) {
      case Code::constant: stack[sp++] = ins.value; break;
      case Code::var_x: stack[sp++] = s.x; break;
      case Code::var_xdot: stack[sp++] = s.xdot; break;
      case Code::var_xddot: stack[sp++] = s.xddot; break;
      case Code::var_t: stack[sp++] = s.t; break;
      case Code::neg:
      case Code::sin:
      case Code::cos:
      case Code::exp:
      case Code::ln:
      case Code::sqrt:
      case Code::sinh:
      case Code::cosh:
      case Code::asinh:
      case Code::atan: {
        const auto f = static_cast<Function>(static_cast<int>(ins.code) - static_cast<int>(Code::neg));
        double& a = stack[sp - 1];
        if (check_unary(f, a, opts_)) explain_failure(s);
        a = apply_unary(f, a);
        if (!std::isfinite(a)) explain_failure(s);
        break;
      }
      default: {
        const auto op = static_cast<BinaryOp>(static_cast<int>(ins.code) - static_cast<int>(Code::add));
        const double r = stack[--sp];
        double& l = stack[sp - 1];
        if (check_binary(op, l, r, opts_)) explain_failure(s);
        l = apply_binary(op, l, r);
        if (!std::isfinite(l)) explain_failure(s);
        break;
      }
    }
  }
  return stack[0];
}

void CompiledExpression::explain_failure(const State& s) const {
  // Re-run the tree walker to name the offending subtree.
  (void)eval(source_, with_state(params_, s), opts_);
  throw EvalError(EvalError::Kind::domain, "domain error in '" + render(source_) + "'", render(source_));
}

}  // namespace nullgauge
