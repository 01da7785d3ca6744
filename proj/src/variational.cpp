#include "nullgauge/variational.hpp"

#include <cmath>
#include <stdexcept>

#include "nullgauge/sampling.hpp"

namespace nullgauge {

namespace {

bool matches(const Expression& e, std::string_view symbol) {
  if (e.kind() == NodeKind::variable) return variable_name(e.variable()) == symbol;
  if (e.kind() == NodeKind::parameter) return e.parameter_name() == symbol;
  return false;
}

Expression sum(const Expression& a, const Expression& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return a + b;
}

Expression difference(const Expression& a, const Expression& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return a - b;
}

Expression product(const Expression& a, const Expression& b) {
  if (a.is_zero() || b.is_zero()) return Expression();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return a * b;
}

// Chain rule factor d f(u)/du for the unary functions.
Expression outer_derivative(Function f, const Expression& u) {
  switch (f) {
    case Function::neg: return num(-1);
    case Function::sin: return call(Function::cos, u);
    case Function::cos: return -call(Function::sin, u);
    case Function::exp: return call(Function::exp, u);
    case Function::ln: return num(1) / u;
    case Function::sqrt: return num(1) / (num(2) * call(Function::sqrt, u));
    case Function::sinh: return call(Function::cosh, u);
    case Function::cosh: return call(Function::sinh, u);
    case Function::asinh: return num(1) / call(Function::sqrt, num(1) + pow(u, num(2)));
    case Function::atan: return num(1) / (num(1) + pow(u, num(2)));
  }
  return Expression();
}

// Raw derivative with zero pruning; callers simplify once at the end.
Expression raw_derivative(const Expression& e, std::string_view symbol) {
  switch (e.kind()) {
    case NodeKind::constant:
      return Expression();
    case NodeKind::parameter:
    case NodeKind::variable:
      return matches(e, symbol) ? num(1) : Expression();
    case NodeKind::unary: {
      const Expression du = raw_derivative(e.child(), symbol);
      if (du.is_zero()) return Expression();
      if (e.function() == Function::neg) return -du;
      return product(outer_derivative(e.function(), e.child()), du);
    }
    case NodeKind::binary: {
      const Expression& u = e.lhs();
      const Expression& w = e.rhs();
      const Expression du = raw_derivative(u, symbol);
      const Expression dw = raw_derivative(w, symbol);
      switch (e.op()) {
        case BinaryOp::add:
          return sum(du, dw);
        case BinaryOp::sub:
          return difference(du, dw);
        case BinaryOp::mul:
          return sum(product(du, w), product(u, dw));
        case BinaryOp::div:
          if (dw.is_zero()) return du.is_zero() ? Expression() : du / w;
          return difference(du.is_zero() ? Expression() : du / w, product(u, dw) / pow(w, num(2)));
        case BinaryOp::pow: {
          if (du.is_zero() && dw.is_zero()) return Expression();
          if (dw.is_zero()) {
            Expression reduced = w - num(1);
            if (auto r = w.rational()) reduced = Expression::constant(*r - Rational(1));
            return product(product(w, pow(u, reduced)), du);
          }
          if (du.is_zero()) return product(product(e, call(Function::ln, u)), dw);
          return product(e, sum(product(dw, call(Function::ln, u)), product(w, du) / u));
        }
      }
    }
  }
  return Expression();
}

}  // namespace

Expression derivative(const Expression& e, std::string_view symbol) { return simplify(raw_derivative(e, symbol)); }

Expression partial(const Expression& e, Variable v) { return derivative(e, variable_name(v)); }

Expression total_time_derivative(const Expression& e) {
  if (contains(e, Variable::xddot)) {
    throw std::invalid_argument("total_time_derivative: expression already contains xddot: " + render(e));
  }
  const Expression dt = raw_derivative(e, "t");
  const Expression dx = raw_derivative(e, "x");
  const Expression dv = raw_derivative(e, "xdot");
  return simplify(sum(sum(dt, product(var(Variable::xdot), dx)), product(var(Variable::xddot), dv)));
}

ElResidual euler_lagrange(const Expression& lagrangian) {
  if (contains(lagrangian, Variable::xddot)) {
    throw std::invalid_argument("euler_lagrange: Lagrangian contains xddot: " + render(lagrangian));
  }
  ElResidual out;
  out.momentum = partial(lagrangian, Variable::xdot);
  out.mass = partial(out.momentum, Variable::xdot);
  out.expression = simplify(total_time_derivative(out.momentum) - partial(lagrangian, Variable::x));

  if (out.mass.is_zero()) {
    out.degenerate = true;
  } else {
    constexpr std::uint64_t kSeed = 0x6e756c6cULL;
    PointSampler sampler(kSeed, SampleDomain{}, Bindings{}, parameters(out.mass));
    try {
      const SampledMax m =
          sample_max(sampler, 100, [&](const Sample& s) { return eval(out.mass, s.bindings(), sampler.domain().eval); });
      out.degenerate = m.max_abs < 1e-12;
    } catch (const SamplingError&) {
      out.degenerate = false;
    }
  }
  return out;
}

Expression euler_lagrange_expression(const Expression& lagrangian) {
  if (contains(lagrangian, Variable::xddot)) {
    throw std::invalid_argument("euler_lagrange: Lagrangian contains xddot: " + render(lagrangian));
  }
  return simplify(total_time_derivative(partial(lagrangian, Variable::xdot)) - partial(lagrangian, Variable::x));
}

double finite_diff_check(const Expression& e, Variable v, const Bindings& point, double h) {
  const std::string name(variable_name(v));
  const auto at = point.get(name);
  if (!at) throw EvalError(EvalError::Kind::unbound_name, "unbound name '" + name + "'", name);
  const double symbolic = eval(partial(e, v), point);
  Bindings plus = point;
  Bindings minus = point;
  plus.set(name, *at + h);
  minus.set(name, *at - h);
  const double central = (eval(e, plus) - eval(e, minus)) / (2.0 * h);
  return std::fabs(central - symbolic) / std::max(1.0, std::fabs(symbolic));
}

}  // namespace nullgauge
