#include "nullgauge/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "nullgauge/variational.hpp"

namespace nullgauge {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::from_lagrangian: return "from-lagrangian";
    case Provenance::from_null: return "from-null";
    case Provenance::reference: return "reference";
  }
  return "?";
}

AccelerationField eom_from_lagrangian(const Expression& lagrangian) {
  const ElResidual el = euler_lagrange(lagrangian);
  if (el.degenerate) {
    throw NullDegenerate("Lagrangian is degenerate (d2L/dxdot2 = 0), no acceleration can be solved: " +
                         render(lagrangian));
  }
  const Expression xdot = var(Variable::xdot);
  const Expression numerator =
      simplify(partial(lagrangian, Variable::x) - partial(el.momentum, Variable::t) -
               xdot * partial(el.momentum, Variable::x));
  AccelerationField out;
  out.acceleration = numerator / el.mass;
  out.mass = el.mass;
  out.provenance = Provenance::from_lagrangian;
  return out;
}

AccelerationField eom_from_null(const NullLagrangian& n) {
  if (!n.origin) throw std::invalid_argument("null Lagrangian has no gauge origin");
  const GaugeFunction& g = *n.origin;
  if (g.phi_x().is_zero()) throw std::invalid_argument("gauge derivative d(phi)/dx vanishes identically");
  const Expression xdot = var(Variable::xdot);
  const Expression numerator =
      simplify(g.phi_xx() * pow(xdot, num(2)) + num(2) * g.phi_tx() * xdot + g.phi_tt());
  AccelerationField out;
  out.acceleration = numerator.is_zero() ? Expression() : simplify(-numerator / g.phi_x());
  out.mass = g.phi_x();
  out.provenance = Provenance::from_null;
  return out;
}

AccelerationField reference_accel(const OscillatorModel& m) {
  (void)resolved_parameters(m);
  AccelerationField out;
  out.acceleration = model_reference_accel(m);
  out.provenance = Provenance::reference;
  out.label = std::string(model_name(m.id));
  return out;
}

double evaluate(const AccelerationField& f, const State& s, const Bindings& params) {
  const Bindings b = with_state(params, s);
  if (f.mass) {
    const double mass = eval(*f.mass, b);
    if (std::fabs(mass) < kMassGuard) {
      throw SingularMass("singular mass |d2L/dxdot2| < 1e-12 at x=" + std::to_string(s.x) +
                             " xdot=" + std::to_string(s.xdot) + " t=" + std::to_string(s.t),
                         s);
    }
  }
  return eval(f.acceleration, b);
}

Trajectory integrate(const AccelerationField& f, const InitialData& init, const Bindings& params) {
  if (!(init.dt > 0.0) || !std::isfinite(init.dt)) throw std::invalid_argument("dt must be positive");
  if (!(init.t_end > init.t0)) throw std::invalid_argument("t_end must exceed t0");
  const double span = init.t_end - init.t0;
  const auto steps = static_cast<std::size_t>(std::ceil(span / init.dt - 1e-9));
  const double h = span / static_cast<double>(steps);

  for (const Expression* e : {&f.acceleration, f.mass ? &*f.mass : nullptr}) {
    if (!e) continue;
    for (const auto& name : parameters(*e)) {
      if (!params.has(name)) throw std::invalid_argument("parameter '" + name + "' is unbound");
    }
  }
  const CompiledExpression accel(f.acceleration, params);
  std::optional<CompiledExpression> mass;
  if (f.mass) mass.emplace(*f.mass, params);

  auto a = [&](double t, double x, double v) {
    const State s{x, v, 0.0, t};
    try {
      if (mass && std::fabs((*mass)(s)) < kMassGuard) {
        throw IntegrationError("singular mass at t=" + std::to_string(t), t);
      }
      return accel(s);
    } catch (const EvalError& e) {
      throw IntegrationError(std::string("evaluation failed at t=") + std::to_string(t) + ": " + e.what(), t);
    }
  };

  Trajectory tr;
  tr.step = h;
  tr.samples.reserve(steps + 1);
  double x = init.x0;
  double v = init.v0;
  tr.samples.push_back({init.t0, x, v});
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = init.t0 + h * static_cast<double>(i);
    const double k1x = v;
    const double k1v = a(t, x, v);
    const double k2x = v + 0.5 * h * k1v;
    const double k2v = a(t + 0.5 * h, x + 0.5 * h * k1x, k2x);
    const double k3x = v + 0.5 * h * k2v;
    const double k3v = a(t + 0.5 * h, x + 0.5 * h * k2x, k3x);
    const double k4x = v + h * k3v;
    const double k4v = a(t + h, x + h * k3x, k4x);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    const double t_next = i + 1 == steps ? init.t_end : init.t0 + h * static_cast<double>(i + 1);
    if (!std::isfinite(x) || !std::isfinite(v)) {
      throw IntegrationError("non-finite state at t=" + std::to_string(t_next), t_next);
    }
    tr.samples.push_back({t_next, x, v});
  }
  return tr;
}

void write_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,x,v\n";
  char buf[96];
  for (const auto& s : tr.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.t, s.x, s.v);
    os << buf;
  }
}

DeviationReport compare(const Trajectory& a, const Trajectory& b) {
  if (a.samples.size() != b.samples.size()) {
    throw std::invalid_argument("trajectory grids differ in length: " + std::to_string(a.samples.size()) + " vs " +
                                std::to_string(b.samples.size()));
  }
  DeviationReport out;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& p = a.samples[i];
    const auto& q = b.samples[i];
    if (std::fabs(p.t - q.t) > 1e-12 * std::max(1.0, std::fabs(p.t))) {
      throw std::invalid_argument("trajectory grids differ at sample " + std::to_string(i));
    }
    const double dx = std::fabs(p.x - q.x);
    if (dx > out.max_abs_x) {
      out.max_abs_x = dx;
      out.time_of_max = p.t;
    }
    out.max_abs_v = std::max(out.max_abs_v, std::fabs(p.v - q.v));
  }
  return out;
}

}  // namespace nullgauge
