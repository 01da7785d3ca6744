#include "nullgauge/gauge.hpp"

#include <cmath>
#include <stdexcept>

#include "nullgauge/integrate.hpp"
#include "nullgauge/variational.hpp"

namespace nullgauge {

namespace {

void require_gauge_variables(const Expression& e, const char* what) {
  if (contains(e, Variable::xdot) || contains(e, Variable::xddot)) {
    throw std::invalid_argument(std::string(what) + " must depend on x and t only: " + render(e));
  }
}

// Unbound parameters default to 1.
Bindings with_defaults(const Bindings& given, const Expression& e) {
  Bindings out = given;
  for (const auto& name : parameters(e)) {
    if (!out.has(name)) out.set(name, 1.0);
  }
  return out;
}

double grid_point(const Interval& iv, std::size_t i, std::size_t n) {
  if (n <= 1) return iv.lo;
  return iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

struct GridMax {
  double max_abs = 0.0;
  std::size_t evaluated = 0;
};

// Max |e| over a 1-D grid in x or t (or a single point when `along` is empty);
// points outside the domain of e are skipped.
GridMax grid_max(const Expression& e, const Bindings& params, std::optional<Variable> along, const Interval& iv,
                 std::size_t n) {
  GridMax out;
  const std::size_t count = along ? n : 1;
  for (std::size_t i = 0; i < count; ++i) {
    State s;
    if (along == Variable::x) s.x = grid_point(iv, i, n);
    if (along == Variable::t) s.t = grid_point(iv, i, n);
    try {
      const double v = eval(e, with_state(params, s));
      out.max_abs = std::max(out.max_abs, std::fabs(v));
      ++out.evaluated;
    } catch (const EvalError& err) {
      if (err.kind() != EvalError::Kind::domain) throw;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// GaugeFunction

GaugeFunction::GaugeFunction(Expression phi)
    : GaugeFunction(std::optional<Expression>(phi), partial(phi, Variable::x), partial(phi, Variable::t)) {}

GaugeFunction::GaugeFunction(std::optional<Expression> phi, Expression phi_x, Expression phi_t)
    : phi_(std::move(phi)), phi_x_(std::move(phi_x)), phi_t_(std::move(phi_t)) {
  if (phi_) require_gauge_variables(*phi_, "gauge function");
  require_gauge_variables(phi_x_, "gauge partial");
  require_gauge_variables(phi_t_, "gauge partial");
  phi_xx_ = partial(phi_x_, Variable::x);
  phi_tx_ = partial(phi_t_, Variable::x);
  phi_tt_ = partial(phi_t_, Variable::t);
}

GaugeFunction GaugeFunction::from_partials(Expression phi_x, Expression phi_t) {
  GaugeFunction g(std::nullopt, std::move(phi_x), std::move(phi_t));
  const Expression lhs = partial(g.phi_x_, Variable::t);
  const Expression& rhs = g.phi_tx_;
  if (lhs == rhs) return g;
  std::set<std::string> free = parameters(lhs);
  free.merge(parameters(rhs));
  PointSampler sampler(0x67617567ULL, SampleDomain{}, Bindings{}, free);
  const SampledMax m = sample_max(sampler, 200, [&](const Sample& s) {
    const Bindings b = s.bindings();
    const double a = eval(lhs, b, sampler.domain().eval);
    const double c = eval(rhs, b, sampler.domain().eval);
    return (a - c) / std::max({1.0, std::fabs(a), std::fabs(c)});
  });
  if (m.max_abs > 1e-9) {
    throw std::invalid_argument("gauge partials are not integrable: d(phi_x)/dt != d(phi_t)/dx at " +
                                describe(m.worst));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Null Lagrangians

NullLagrangian null_from_gauge(const GaugeFunction& g) {
  if (g.phi_x().is_zero()) {
    throw std::invalid_argument("gauge derivative d(phi)/dx vanishes identically; no xdot dependence");
  }
  NullLagrangian out;
  if (g.phi()) {
    out.lnull = total_time_derivative(*g.phi());
  } else {
    out.lnull = simplify(g.phi_x() * var(Variable::xdot) + g.phi_t());
  }
  out.p_null = g.phi_x();
  out.origin = g;
  return out;
}

NullLagrangian null_from_expression(const Expression& lnull) {
  NullLagrangian out;
  out.lnull = lnull;
  out.p_null = partial(lnull, Variable::xdot);
  return out;
}

NullReport verify_null(const Expression& lagrangian, const VerifyOptions& opts) {
  const ElResidual el = euler_lagrange(lagrangian);
  NullReport out;
  out.residual = el.expression;
  if (el.expression.is_zero()) {
    out.pass = true;
    out.samples = opts.samples;
    return out;
  }
  PointSampler sampler(opts.seed, opts.domain, opts.params, free_parameters(el.expression, opts.params));
  const SampledMax m = sample_max(sampler, opts.samples, [&](const Sample& s) {
    return eval(el.expression, s.bindings(), opts.domain.eval);
  });
  out.max_abs_residual = m.max_abs;
  out.worst = m.worst;
  out.samples = m.accepted;
  out.rejected = m.rejected;
  out.pass = m.max_abs < opts.tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Coefficient compatibility

void validate(const CoefficientTriple& c) {
  require_gauge_variables(c.alpha, "alpha");
  require_gauge_variables(c.beta, "beta");
  require_gauge_variables(c.gamma, "gamma");
}

Expression compatibility_residual(const CoefficientTriple& c) {
  validate(c);
  const Expression x = var(Variable::x);
  const Expression half = num(1, 2);
  return simplify(half * (partial(c.beta, Variable::t) + half * pow(c.beta, num(2))) -
                  partial(c.gamma, Variable::x) * x - c.gamma * (num(1) + c.alpha * x));
}

SpecialCase special_case_from_name(std::string_view name) {
  if (name == "x-only") return SpecialCase::x_only;
  if (name == "t-only") return SpecialCase::t_only;
  if (name == "constants") return SpecialCase::constants;
  if (name == "beta-only") return SpecialCase::beta_only;
  throw std::invalid_argument("unknown special case '" + std::string(name) +
                              "' (expected x-only, t-only, constants or beta-only)");
}

std::string_view special_case_name(SpecialCase c) {
  switch (c) {
    case SpecialCase::x_only: return "x-only";
    case SpecialCase::t_only: return "t-only";
    case SpecialCase::constants: return "constants";
    case SpecialCase::beta_only: return "beta-only";
  }
  return "?";
}

SpecialCaseReport special_case_check(SpecialCase id, const SpecialCaseInput& in) {
  const CoefficientTriple& c = in.coefficients;
  validate(c);
  const Expression x = var(Variable::x);
  const Expression half = num(1, 2);
  const Expression quarter = num(1, 4);

  auto forbid = [&](Variable v, const char* why) {
    for (const Expression* e : {&c.alpha, &c.beta, &c.gamma}) {
      if (contains(*e, v)) {
        throw std::invalid_argument(std::string(special_case_name(id)) + ": " + why + ": " + render(*e));
      }
    }
  };

  SpecialCaseReport out;
  out.id = id;
  std::optional<Variable> along;
  Interval iv;
  // Coefficients that the case requires to vanish.
  std::vector<std::pair<const char*, Expression>> must_vanish;

  switch (id) {
    case SpecialCase::x_only:
      forbid(Variable::t, "coefficients must not depend on t");
      out.residual = simplify(quarter * pow(c.beta, num(2)) - partial(c.gamma, Variable::x) * x -
                              (num(1) + c.alpha * x) * c.gamma);
      along = Variable::x;
      iv = in.x;
      break;
    case SpecialCase::t_only:
      forbid(Variable::x, "coefficients must not depend on x");
      out.residual = simplify(half * (partial(c.beta, Variable::t) + half * pow(c.beta, num(2))) - c.gamma);
      must_vanish.emplace_back("alpha", c.alpha);
      along = Variable::t;
      iv = in.t;
      break;
    case SpecialCase::constants:
      forbid(Variable::x, "coefficients must be constant");
      forbid(Variable::t, "coefficients must be constant");
      out.residual = simplify(quarter * pow(c.beta, num(2)) - c.gamma);
      must_vanish.emplace_back("alpha", c.alpha);
      break;
    case SpecialCase::beta_only:
      forbid(Variable::x, "beta must depend on t only");
      out.residual = simplify(partial(c.beta, Variable::t) + half * pow(c.beta, num(2)));
      must_vanish.emplace_back("alpha", c.alpha);
      must_vanish.emplace_back("gamma", c.gamma);
      along = Variable::t;
      iv = in.t;
      break;
  }

  bool structural_ok = true;
  for (const auto& [name, e] : must_vanish) {
    const GridMax g = grid_max(e, with_defaults(in.params, e), along, iv, in.grid);
    if (g.max_abs > in.tolerance) {
      structural_ok = false;
      if (!out.note.empty()) out.note += "; ";
      out.note += std::string(name) + " must vanish";
    }
  }

  const GridMax g = grid_max(out.residual, with_defaults(in.params, out.residual), along, iv, in.grid);
  out.max_residual = g.max_abs;
  out.evaluated = g.evaluated;
  if (g.evaluated == 0) {
    if (!out.note.empty()) out.note += "; ";
    out.note += "residual undefined on the whole grid";
  }
  out.holds = structural_ok && g.evaluated > 0 && g.max_abs < in.tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Explicit gauges

SpecialGauge special_gauge_from_name(std::string_view name) {
  if (name == "inertia") return SpecialGauge::inertia;
  if (name == "second-law") return SpecialGauge::second_law;
  if (name == "quadratic-damping") return SpecialGauge::quadratic_damping;
  throw std::invalid_argument("unknown special gauge '" + std::string(name) +
                              "' (expected inertia, second-law or quadratic-damping)");
}

GaugeFunction build_special_gauge(SpecialGauge id, const SpecialGaugeInput& in) {
  const Expression x = var(Variable::x);
  const Expression t = var(Variable::t);
  switch (id) {
    case SpecialGauge::inertia:
      return GaugeFunction(simplify(in.c1 * x + in.c2 * t + in.c3));

    case SpecialGauge::second_law: {
      if (!in.f0) throw std::invalid_argument("second-law gauge needs f0(t)");
      if (contains(*in.f0, Variable::x) || contains(*in.f0, Variable::xdot) || contains(*in.f0, Variable::xddot)) {
        throw std::invalid_argument("f0 must depend on t only: " + render(*in.f0));
      }
      std::optional<Expression> twice;
      if (auto once = antiderivative(*in.f0, Variable::t)) twice = antiderivative(*once, Variable::t);
      if (!twice) twice = in.antiderivative;
      if (!twice) {
        throw std::invalid_argument("no closed-form double antiderivative for f0 = " + render(*in.f0) +
                                    "; supply one");
      }
      return GaugeFunction(simplify(in.c1 * x + in.c1 * *twice));
    }

    case SpecialGauge::quadratic_damping: {
      if (!in.alpha) throw std::invalid_argument("quadratic-damping gauge needs alpha(x)");
      if (contains(*in.alpha, Variable::t) || contains(*in.alpha, Variable::xdot) ||
          contains(*in.alpha, Variable::xddot)) {
        throw std::invalid_argument("alpha must depend on x only: " + render(*in.alpha));
      }
      std::optional<Expression> i_alpha = antiderivative(*in.alpha, Variable::x);
      if (!i_alpha) i_alpha = in.antiderivative;
      if (!i_alpha) {
        throw std::invalid_argument("no closed-form antiderivative for alpha = " + render(*in.alpha) +
                                    "; supply one");
      }
      const Expression weight = simplify(call(Function::exp, *i_alpha));
      if (auto outer = antiderivative(weight, Variable::x)) {
        return GaugeFunction(simplify(in.c1 * *outer + in.c2 * t + in.c3));
      }
      return GaugeFunction::from_partials(simplify(in.c1 * weight), in.c2);
    }
  }
  throw std::invalid_argument("unknown special gauge");
}

Expression build_oscillator_gauge_derivative(const Expression& f, const Expression& gamma0, const Expression& c1,
                                             const std::optional<Expression>& integral_of_f) {
  if (contains(f, Variable::t) || contains(f, Variable::xdot) || contains(f, Variable::xddot)) {
    throw std::invalid_argument("restoring force must depend on x only: " + render(f));
  }
  std::optional<Expression> big_f = integral_of_f;
  if (!big_f) big_f = antiderivative(f, Variable::x);
  if (!big_f) {
    throw std::invalid_argument("no closed-form antiderivative for f = " + render(f) + "; supply one");
  }
  const Expression radicand = simplify(c1 + num(2) * gamma0 * *big_f);
  return simplify(num(1) / call(Function::sqrt, radicand));
}

Expression gauge_constraint_residual(const Expression& phi_x, const Expression& f, const Expression& gamma0) {
  return simplify(partial(phi_x, Variable::x) + gamma0 * f * pow(phi_x, num(3)));
}

// ---------------------------------------------------------------------------
// Null condition

NullConditionPair pair_from_fgh(const Expression& f, const Expression& g, const Expression& h) {
  return NullConditionPair{f, simplify(g * var(Variable::x) + h)};
}

NullConditionReport null_condition(const NullConditionPair& p, NullConditionVariant variant,
                                   const NullConditionOptions& opts) {
  require_gauge_variables(p.B, "B");
  require_gauge_variables(p.C, "C");
  const Expression rhs_source = variant == NullConditionVariant::x_weighted ? var(Variable::x) * p.C : p.C;
  NullConditionReport out;
  out.variant = variant;
  out.residual = simplify(partial(p.B, Variable::t) - partial(rhs_source, Variable::x));
  const Bindings params = with_defaults(opts.params, out.residual);
  std::size_t evaluated = 0;
  for (std::size_t i = 0; i < opts.grid; ++i) {
    for (std::size_t j = 0; j < opts.grid; ++j) {
      State s;
      s.x = grid_point(opts.x, i, opts.grid);
      s.t = grid_point(opts.t, j, opts.grid);
      try {
        out.max_residual = std::max(out.max_residual, std::fabs(eval(out.residual, with_state(params, s))));
        ++evaluated;
      } catch (const EvalError& err) {
        if (err.kind() != EvalError::Kind::domain) throw;
      }
    }
  }
  out.holds = evaluated > 0 && out.max_residual < opts.tolerance;
  return out;
}

}  // namespace nullgauge
