#include "nullgauge/nsl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nullgauge/integrate.hpp"
#include "nullgauge/variational.hpp"

namespace nullgauge {

namespace {

const std::string kArg(ScalarFunction::kFormalArgument);

Expression formal() { return param(kArg); }

Expression xv() { return var(Variable::x); }
Expression vv() { return var(Variable::xdot); }

Expression times(const Expression& a, const Expression& b) {
  if (a.is_zero() || b.is_zero()) return Expression();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return a * b;
}

Expression plus(const Expression& a, const Expression& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return a + b;
}

// Template in L (the null Lagrangian) and P (the gauge derivative).
Expression instantiate(std::string_view text, const Expression& lnull, const Expression& phi_x) {
  return substitute(substitute(parse(text), "L", lnull), "P", phi_x);
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarFunction

ScalarFunction ScalarFunction::asinh() { return {Kind::asinh, call(Function::asinh, formal())}; }
ScalarFunction ScalarFunction::atan() { return {Kind::atan, call(Function::atan, formal())}; }
ScalarFunction ScalarFunction::identity() { return {Kind::identity, formal()}; }
ScalarFunction ScalarFunction::constant(Expression value) {
  if (contains_parameter(value, kArg)) {
    throw std::invalid_argument("constant scalar function depends on its argument: " + render(value));
  }
  return {Kind::constant, std::move(value)};
}
ScalarFunction ScalarFunction::user(Expression body) {
  for (Variable v : {Variable::x, Variable::xdot, Variable::xddot, Variable::t}) {
    if (contains(body, v)) {
      throw std::invalid_argument("scalar function must depend on its formal argument L only: " + render(body));
    }
  }
  return {Kind::user, std::move(body)};
}
ScalarFunction ScalarFunction::neg_sqrt_one_plus_square() { return user(parse("-sqrt(1 + L^2)")); }
ScalarFunction ScalarFunction::neg_log_sqrt_one_plus_square() { return user(parse("-ln(sqrt(1 + L^2))")); }

bool ScalarFunction::is_constant() const { return !contains_parameter(body_, kArg); }

Expression ScalarFunction::at(const Expression& arg) const { return substitute(body_, kArg, arg); }

Expression ScalarFunction::derivative_body() const { return derivative(body_, kArg); }

Expression ScalarFunction::derivative_at(const Expression& arg) const {
  return substitute(derivative_body(), kArg, arg);
}

// ---------------------------------------------------------------------------
// Constraints and assembly

ConstraintReport check_prop1_constraints(const NslSpec& s, const SampleOptions& opts) {
  const Expression& L = s.lnull.lnull;
  const Expression product = simplify(s.Q - s.R * L);
  const Expression lambda_expr =
      simplify(plus(times(s.Q, s.F.derivative_at(L)), times(s.R, s.G.derivative_at(L))) - Expression::real(s.lambda));

  ConstraintReport out;
  std::set<std::string> free = free_parameters(product, opts.params);
  free.merge(free_parameters(lambda_expr, opts.params));
  PointSampler sampler(opts.seed, opts.domain, opts.params, free);
  const SampledMax m = sample_max(sampler, opts.samples, [&](const Sample& smp) {
    const Bindings b = smp.bindings();
    const double a = eval(product, b, opts.domain.eval);
    const double c = eval(lambda_expr, b, opts.domain.eval);
    out.product_residual = std::max(out.product_residual, std::fabs(a));
    out.lambda_residual = std::max(out.lambda_residual, std::fabs(c));
    return std::max(std::fabs(a), std::fabs(c));
  });
  out.samples = m.accepted;
  out.pass = out.product_residual < opts.tolerance && out.lambda_residual < opts.tolerance;
  return out;
}

namespace {
std::string violation_message(const ConstraintReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << "constraint violation: max |Q - R L| = " << r.product_residual << ", max |Q F' + R G' - lambda| = "
     << r.lambda_residual;
  return os.str();
}
}  // namespace

ConstraintViolation::ConstraintViolation(const ConstraintReport& r)
    : std::runtime_error(violation_message(r)), report_(r) {}

Expression assemble_prop1(const NslSpec& s, bool enforce, const SampleOptions& opts) {
  if (enforce) {
    const ConstraintReport r = check_prop1_constraints(s, opts);
    if (!r.pass) throw ConstraintViolation(r);
  }
  const Expression& L = s.lnull.lnull;
  return simplify(plus(plus(times(s.Q, s.F.at(L)), times(s.R, s.G.at(L))), times(s.U, s.M.at(L))));
}

std::string_view prop1_form_name(Prop1Form f) {
  switch (f) {
    case Prop1Form::automatic: return "automatic";
    case Prop1Form::extended: return "extended";
    case Prop1Form::simplified: return "simplified";
    case Prop1Form::corollary: return "corollary";
    case Prop1Form::general: return "general";
  }
  return "?";
}

namespace {

Prop1Form resolve_form(const NslSpec& s, Prop1Form form) {
  if (form != Prop1Form::automatic) return form;
  if (s.lambda == 0.0 && simplify(s.U).is_zero()) return Prop1Form::simplified;
  if (s.M.is_constant()) return Prop1Form::corollary;
  return Prop1Form::extended;
}

Expression el_of(const Expression& e) {
  if (e.is_zero()) return Expression();
  return euler_lagrange_expression(e);
}

}  // namespace

Expression prop1_eom_structure(const NslSpec& s, Prop1Form form) {
  form = resolve_form(s, form);
  const Expression& L = s.lnull.lnull;
  const Expression& p_null = s.lnull.p_null;
  const Expression ldot = total_time_derivative(L);
  const Expression p_r = partial(s.R, Variable::xdot);
  const Expression p_u = partial(s.U, Variable::xdot);
  const Expression f_at = s.F.at(L);
  const Expression g_at = s.G.at(L);
  const Expression m_at = s.M.at(L);
  const Expression df = s.F.derivative_at(L);
  const Expression dg = s.G.derivative_at(L);
  const Expression dm = s.M.derivative_at(L);
  const Expression lambda = Expression::real(s.lambda);

  if (form == Prop1Form::general) {
    const Expression p_q = partial(s.Q, Variable::xdot);
    const Expression bracket = plus(plus(times(p_q, df), times(p_r, dg)), times(p_u, dm));
    const Expression inner = plus(plus(times(s.Q, df), times(s.R, dg)), times(s.U, dm));
    Expression out = times(bracket, ldot);
    if (!simplify(inner).is_zero()) out = plus(out, times(p_null, total_time_derivative(inner)));
    out = plus(out, times(el_of(s.Q), f_at));
    out = plus(out, times(el_of(s.R), g_at));
    out = plus(out, times(el_of(s.U), m_at));
    return out;
  }

  // Shared by all constrained forms.
  Expression out = plus(times(el_of(s.R * L), f_at), times(el_of(s.R), g_at));
  const Expression g_dot = times(dg, ldot);
  const Expression g_term = times(times(p_null, s.R / L), g_dot);
  const Expression lambda_term =
      s.lambda == 0.0 ? Expression() : times(times(lambda, p_r / s.R + p_null / L), ldot);

  switch (form) {
    case Prop1Form::simplified:
      if (s.lambda != 0.0 || !simplify(s.U).is_zero()) {
        throw std::invalid_argument("simplified form needs lambda = 0 and U = 0");
      }
      break;
    case Prop1Form::corollary: {
      if (!s.M.is_constant()) throw std::invalid_argument("corollary form needs a constant M");
      out = plus(out, times(s.M.body(), el_of(s.U)));
      out = plus(out, lambda_term);
      break;
    }
    case Prop1Form::extended: {
      out = plus(out, times(el_of(s.U), m_at));
      out = plus(out, times(plus(lambda_term.is_zero() ? Expression() : times(lambda, p_r / s.R + p_null / L),
                                 times(p_u, dm)),
                            ldot));
      const Expression udm = times(s.U, dm);
      if (!simplify(udm).is_zero()) out = plus(out, times(p_null, total_time_derivative(udm)));
      break;
    }
    default:
      break;
  }
  return g_term.is_zero() ? out : out - g_term;
}

Prop1Report prop1_eom_residual(const NslSpec& s, Prop1Form form, const SampleOptions& opts) {
  Prop1Report out;
  out.form = resolve_form(s, form);
  if (out.form != Prop1Form::general) {
    const ConstraintReport c = check_prop1_constraints(s, opts);
    if (!c.pass) throw ConstraintViolation(c);
  }
  out.el = el_of(assemble_prop1(s, false));
  out.structure = prop1_eom_structure(s, out.form);

  std::set<std::string> free = free_parameters(out.el, opts.params);
  free.merge(free_parameters(out.structure, opts.params));
  PointSampler sampler(opts.seed, opts.domain, opts.params, free);
  const SampledMax m = sample_max(sampler, opts.samples, [&](const Sample& smp) {
    const Bindings b = smp.bindings();
    const double a = eval(out.el, b, opts.domain.eval);
    const double c = eval(out.structure, b, opts.domain.eval);
    const double diff = std::fabs(a - c);
    if (!std::isfinite(diff)) return diff;
    out.max_abs_difference = std::max(out.max_abs_difference, diff);
    const double rel = diff / std::max({1.0, std::fabs(a), std::fabs(c)});
    out.max_rel_difference = std::max(out.max_rel_difference, rel);
    return rel;
  });
  out.samples = m.accepted;
  out.pass = out.max_rel_difference < opts.tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// F from G

double f_from_g_numeric(const ScalarFunction& G, double L, const Bindings& params) {
  if (L == 0.0) return 0.0;
  const Expression g1 = G.derivative_body();
  const Expression g2 = derivative(g1, kArg);
  const Expression g3 = derivative(g2, kArg);
  const Expression g4 = derivative(g3, kArg);
  auto at = [&](const Expression& e, double l) {
    Bindings b = params;
    b.set(kArg, l);
    return eval(e, b);
  };
  const double slope0 = at(g1, 0.0);
  if (std::fabs(slope0) > 1e-12) {
    throw NonIntegrable("G'(0) = " + std::to_string(slope0) + " != 0: G'(l)/l is not integrable at l = 0");
  }
  // G'(l)/l = G''(0) + G'''(0) l/2 + G''''(0) l^2/6 + O(l^3)
  const std::array<double, 3> series{at(g2, 0.0), at(g3, 0.0) / 2.0, at(g4, 0.0) / 6.0};
  // The series piece is integrated exactly; quadrature covers the rest, where
  // the integrand is smooth.
  constexpr double kSeriesRadius = 1e-3;
  const double s = std::copysign(std::min(std::fabs(L), kSeriesRadius), L);
  const double near = s * (series[0] + s * (series[1] / 2.0 + s * series[2] / 3.0));
  if (s == L) return -near;
  auto integrand = [&](double l) { return at(g1, l) / l; };
  double error = 0.0;
  const double far =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, s, L, 15, 1e-14, &error);
  return -(near + far);
}

// ---------------------------------------------------------------------------
// Models

namespace {

struct ModelEntry {
  ModelId id;
  std::string_view name;
};

constexpr std::array<ModelEntry, 10> kModels{{
    {ModelId::harmonic, "harmonic"},
    {ModelId::pendulum, "pendulum"},
    {ModelId::bateman_linear, "bateman-linear"},
    {ModelId::bateman_nonlinear, "bateman-nonlinear"},
    {ModelId::duffing, "duffing"},
    {ModelId::duffing_pendulum, "duffing-pendulum"},
    {ModelId::quadratic_damping, "quadratic-damping"},
    {ModelId::inertia, "inertia"},
    {ModelId::second_law, "second-law"},
    {ModelId::harmonic_potential, "harmonic-potential"},
}};

bool is_damped(ModelId id) {
  return id == ModelId::bateman_linear || id == ModelId::bateman_nonlinear || id == ModelId::duffing ||
         id == ModelId::duffing_pendulum;
}

bool is_null_only(ModelId id) {
  return id == ModelId::inertia || id == ModelId::second_law || id == ModelId::quadratic_damping;
}

std::string_view phi_x_text(ModelId id) {
  switch (id) {
    case ModelId::harmonic:
    case ModelId::bateman_linear:
    case ModelId::harmonic_potential:
      return "1/sqrt(gamma0*x^2 + c1)";
    case ModelId::pendulum:
    case ModelId::bateman_nonlinear:
      return "sqrt(a)/(sqrt(2)*sqrt(a*c2 - gamma0*cos(a*x)))";
    case ModelId::duffing:
      return "sqrt(2)/sqrt(2*gamma0*x^2 + beta_nl*x^4 + c1)";
    case ModelId::duffing_pendulum:
      return "sqrt(2*a)/sqrt(-4*gamma0*cos(a*x) + gamma0*beta_nl*x^4 + a*c1)";
    default:
      return "";
  }
}

std::string_view reference_text(ModelId id) {
  switch (id) {
    case ModelId::harmonic:
    case ModelId::harmonic_potential: return "-(gamma0*x)";
    case ModelId::pendulum: return "-(gamma0*sin(a*x))";
    case ModelId::bateman_linear: return "-(b*xdot + gamma0*x)";
    case ModelId::bateman_nonlinear: return "-(b*xdot + gamma0*sin(a*x))";
    case ModelId::duffing: return "-(b*xdot + gamma0*x + beta_nl*x^3)";
    case ModelId::duffing_pendulum: return "-(b*xdot + gamma0*sin(a*x) + beta_nl*x^3)";
    case ModelId::quadratic_damping: return "-(alpha*xdot^2)";
    case ModelId::inertia: return "0";
    case ModelId::second_law: return "";
  }
  return "";
}

GaugeFunction null_model_gauge(const OscillatorModel& m) {
  SpecialGaugeInput in;
  switch (m.id) {
    case ModelId::inertia:
      return build_special_gauge(SpecialGauge::inertia, in);
    case ModelId::second_law:
      if (!m.f0) throw std::invalid_argument("model second-law needs f0(t)");
      in.f0 = *m.f0;
      return build_special_gauge(SpecialGauge::second_law, in);
    case ModelId::quadratic_damping:
      in.alpha = param("alpha");
      return build_special_gauge(SpecialGauge::quadratic_damping, in);
    default:
      throw std::invalid_argument("model " + std::string(model_name(m.id)) + " is not a null-only model");
  }
}

Expression potential_for_harmonic() {
  return solve_potential(xv(), param("gamma0"), param("m"), param("c1"), param("k"));
}

}  // namespace

std::string_view model_name(ModelId id) {
  for (const auto& e : kModels) {
    if (e.id == id) return e.name;
  }
  return "?";
}

ModelId model_from_name(std::string_view name) {
  for (const auto& e : kModels) {
    if (e.name == name) return e.id;
  }
  std::string known;
  for (const auto& e : kModels) {
    if (!known.empty()) known += ", ";
    known += e.name;
  }
  throw std::invalid_argument("unknown model '" + std::string(name) + "' (known: " + known + ")");
}

const std::vector<ModelId>& all_models() {
  static const std::vector<ModelId> ids = [] {
    std::vector<ModelId> v;
    for (const auto& e : kModels) v.push_back(e.id);
    return v;
  }();
  return ids;
}

std::vector<std::string> required_parameters(ModelId id) {
  switch (id) {
    case ModelId::harmonic: return {"gamma0"};
    case ModelId::pendulum: return {"gamma0", "a"};
    case ModelId::bateman_linear: return {"b", "gamma0"};
    case ModelId::bateman_nonlinear: return {"b", "gamma0", "a"};
    case ModelId::duffing: return {"b", "gamma0", "beta_nl"};
    case ModelId::duffing_pendulum: return {"b", "gamma0", "a", "beta_nl"};
    case ModelId::quadratic_damping: return {"alpha"};
    case ModelId::inertia: return {};
    case ModelId::second_law: return {};
    case ModelId::harmonic_potential: return {"gamma0", "m"};
  }
  return {};
}

Bindings resolved_parameters(const OscillatorModel& m) {
  std::string missing;
  for (const auto& name : required_parameters(m.id)) {
    if (!m.params.has(name)) missing += (missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) {
    throw std::invalid_argument("model " + std::string(model_name(m.id)) + " is missing parameter(s): " + missing);
  }
  if (m.id == ModelId::second_law && !m.f0) throw std::invalid_argument("model second-law needs f0(t)");

  Bindings out;
  const double gamma0 = m.params.get("gamma0").value_or(1.0);
  const double a = m.params.get("a").value_or(1.0);
  const double ratio = a != 0.0 ? std::fabs(gamma0 / a) : 1.0;
  out.set("c1", m.id == ModelId::duffing_pendulum ? 1.0 + 4.0 * ratio : 1.0);
  out.set("c2", m.id == ModelId::pendulum || m.id == ModelId::bateman_nonlinear ? 1.0 + ratio : 0.0);
  out.set("c3", 0.0);
  out.set("k", 0.0);
  out = out.merged(m.params);

  std::set<std::string> names;
  if (m.f0) names = parameters(*m.f0);
  for (const auto& name : names) {
    if (!out.has(name)) throw std::invalid_argument("f0 parameter '" + name + "' is unbound");
  }
  return out;
}

Expression model_phi_x(ModelId id) {
  const std::string_view text = phi_x_text(id);
  if (text.empty()) throw std::invalid_argument("model " + std::string(model_name(id)) + " has no oscillator gauge");
  return parse(text);
}

Expression model_reference_accel(const OscillatorModel& m) {
  if (m.id == ModelId::second_law) {
    if (!m.f0) throw std::invalid_argument("model second-law needs f0(t)");
    return -*m.f0;
  }
  return parse(reference_text(m.id));
}

NslSpec model_spec(ModelId id) {
  if (is_null_only(id)) {
    throw std::invalid_argument("model " + std::string(model_name(id)) + " has no non-standard identification");
  }
  const Expression phi_x = model_phi_x(id);
  NslSpec s;
  s.lnull = null_from_gauge(GaugeFunction::from_partials(phi_x, Expression()));
  if (id == ModelId::harmonic_potential) {
    s.Q = s.lnull.lnull;
    s.R = num(1);
    s.F = ScalarFunction::atan();
    s.G = ScalarFunction::neg_log_sqrt_one_plus_square();
    s.U = potential_for_harmonic();
    s.M = ScalarFunction::constant(param("m"));
    return s;
  }
  const Expression weight = is_damped(id) ? call(Function::exp, param("b") * var(Variable::t)) : num(1);
  s.Q = simplify(weight * vv());
  s.R = simplify(weight / phi_x);
  s.F = ScalarFunction::asinh();
  s.G = ScalarFunction::neg_sqrt_one_plus_square();
  return s;
}

ModelNsl build_model_nsl(const OscillatorModel& m) {
  (void)resolved_parameters(m);
  ModelNsl out;
  out.expected_accel = model_reference_accel(m);
  out.full_accel = out.expected_accel;

  if (is_null_only(m.id)) {
    out.lnull = null_from_gauge(null_model_gauge(m));
    out.lagrangian = num(1) / out.lnull.lnull;
    return out;
  }

  const Expression phi_x = model_phi_x(m.id);
  out.lnull = null_from_gauge(GaugeFunction::from_partials(phi_x, Expression()));
  const Expression& L = out.lnull.lnull;
  switch (m.id) {
    case ModelId::harmonic:
      out.lagrangian = instantiate(
          "xdot*asinh(xdot/sqrt(gamma0*x^2 + c1)) - sqrt(gamma0*x^2 + c1)*sqrt(1 + (xdot/sqrt(gamma0*x^2 + c1))^2)",
          L, phi_x);
      break;
    case ModelId::pendulum:
      out.lagrangian =
          instantiate("sqrt(a)*xdot*asinh(L) - sqrt(2)*sqrt(a*c2 - gamma0*cos(a*x))*sqrt(1 + L^2)", L, phi_x);
      break;
    case ModelId::harmonic_potential:
      out.lagrangian = substitute(instantiate("L*atan(L) - ln(sqrt(1 + L^2)) + m*U", L, phi_x), "U",
                                  potential_for_harmonic());
      break;
    default:
      out.lagrangian = instantiate("exp(b*t)*xdot*asinh(L) - 1/(P*exp(-b*t))*sqrt(1 + L^2)", L, phi_x);
      out.full_accel = instantiate("-(b/P)*asinh(L)*sqrt(1 + L^2) + Q/P^3", L, phi_x);
      out.full_accel = substitute(out.full_accel, "Q", partial(phi_x, Variable::x));
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Series and potentials

std::vector<Rational> damping_series_coeffs(std::size_t order) {
  if (order < 1) throw std::invalid_argument("series order must be at least 1");
  // asinh(L) = sum a_n L^(2n+1), sqrt(1 + L^2) = sum b_n L^(2n)
  std::vector<Rational> a(order);
  std::vector<Rational> b(order);
  Rational central(1);
  for (std::size_t n = 0; n < order; ++n) {
    const auto k = static_cast<std::int64_t>(n);
    if (n > 0) central = central * Rational(-(2 * k - 1), 2 * k);
    a[n] = central / Rational(2 * k + 1);
    b[n] = n == 0 ? Rational(1) : b[n - 1] * (Rational(1, 2) - Rational(k - 1)) / Rational(k);
  }
  std::vector<Rational> c(order, Rational(0));
  for (std::size_t n = 0; n < order; ++n) {
    for (std::size_t j = 0; j <= n; ++j) c[n] = c[n] + a[j] * b[n - j];
  }
  return c;
}

Expression solve_potential(const Expression& f, const Expression& gamma0, const Expression& m, const Expression& c1,
                           const Expression& k, const std::optional<Expression>& integral_of_f) {
  if (contains(f, Variable::t) || contains(f, Variable::xdot) || contains(f, Variable::xddot)) {
    throw std::invalid_argument("restoring force must depend on x only: " + render(f));
  }
  std::optional<Expression> big_f = integral_of_f;
  if (!big_f) big_f = antiderivative(f, Variable::x);
  if (!big_f) throw std::invalid_argument("no closed-form antiderivative for f = " + render(f) + "; supply one");
  const Expression radicand = simplify(c1 + num(2) * gamma0 * *big_f);
  return k - call(Function::ln, call(Function::sqrt, radicand)) / m;
}

}  // namespace nullgauge
