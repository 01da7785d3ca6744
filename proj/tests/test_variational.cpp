#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "nullgauge/sampling.hpp"
#include "nullgauge/variational.hpp"

using namespace nullgauge;

namespace {

const char* const kHarmonicNsl =
    "xdot*asinh(xdot/sqrt(gamma0*x^2 + c1)) - sqrt(gamma0*x^2 + c1)*sqrt(1 + (xdot/sqrt(gamma0*x^2 + c1))^2)";

}  // namespace

TEST_SUITE("variational") {
  TEST_CASE("partial derivatives") {
    CHECK(render(partial(parse("x^2"), Variable::x)) == "2*x");
    CHECK(render(partial(parse("sin(a*x)"), Variable::x)) == "a*cos(a*x)");
    CHECK(partial(parse("c1"), Variable::x).is_zero());
    CHECK(render(partial(parse("x*t"), Variable::t)) == "x");
    // p_null of a gauge null Lagrangian is the gauge derivative.
    const Expression phi_x = parse("1/sqrt(gamma0*x^2 + c1)");
    const Expression lnull = phi_x * var(Variable::xdot) + parse("phidot");
    CHECK(partial(lnull, Variable::xdot) == simplify(phi_x));
    // Differentiating by a parameter name.
    CHECK(render(derivative(parse("L^3 + a*L"), "L")) == "3*L^2 + a");
  }

  TEST_CASE("total time derivative") {
    CHECK(render(total_time_derivative(parse("c1*x + c2*t + c3"))) == "c2 + c1*xdot");
    CHECK(render(total_time_derivative(parse("x^2/2"))) == "x*xdot");
    // d/dt(phi_x xdot + phi_t) for phi = x t
    const Expression lnull = total_time_derivative(parse("x*t"));
    CHECK(render(total_time_derivative(lnull)) == "2*xdot + t*xddot");
    CHECK_THROWS_AS((void)total_time_derivative(parse("xddot*x")), std::invalid_argument);
  }

  TEST_CASE("Euler-Lagrange operator") {
    const ElResidual osc = euler_lagrange(parse("xdot^2/2 - gamma0*x^2/2"));
    CHECK(render(osc.expression) == "xddot + gamma0*x");
    CHECK_FALSE(osc.degenerate);
    CHECK(osc.mass.is_one());

    const ElResidual inertia = euler_lagrange(parse("c1*xdot + c2"));
    CHECK(inertia.expression.is_zero());
    CHECK(inertia.degenerate);

    CHECK_THROWS_AS((void)euler_lagrange(parse("xddot")), std::invalid_argument);
  }

  TEST_CASE("the harmonic non-standard Lagrangian yields xddot + gamma0 x") {
    const ElResidual el = euler_lagrange(parse(kHarmonicNsl));
    CHECK_FALSE(el.degenerate);
    PointSampler sampler(5, SampleDomain{}, {}, {"gamma0", "c1"});
    for (int i = 0; i < 200; ++i) {
      const Sample s = sampler.next();
      const Bindings b = s.bindings();
      const double residual = eval(el.expression, b);
      const double mass = eval(el.mass, b);
      const double target = s.state.xddot + eval(parse("gamma0*x"), b);
      CHECK(residual == doctest::Approx(mass * target).epsilon(1e-10).scale(1.0));
    }
  }

  TEST_CASE("degeneracy needs the sampled check when simplification misses a zero") {
    // d2/dxdot2 of xdot*(sin(x)^2 + cos(x)^2 - 1)*xdot vanishes only numerically.
    const ElResidual el = euler_lagrange(parse("xdot^2*(sin(x)^2 + cos(x)^2 - 1)"));
    CHECK_FALSE(el.mass.is_zero());
    CHECK(el.degenerate);
  }

  TEST_CASE("null Lagrangians are annihilated at random points") {
    for (const char* phi : {"c1*x + c2*t + c3", "x^2/2", "x*t", "sin(x)*exp(t)", "ln(2 + x^2)*t^3"}) {
      CAPTURE(phi);
      const Expression lnull = total_time_derivative(parse(phi));
      const Expression el = euler_lagrange(lnull).expression;
      PointSampler sampler(17, SampleDomain{}, {}, parameters(el));
      const SampledMax m = sample_max(sampler, 1000, [&](const Sample& s) { return eval(el, s.bindings()); });
      CHECK(m.max_abs < 1e-9);
    }
  }

  TEST_CASE("Euler-Lagrange is linear") {
    const Expression l1 = parse("xdot^2*x + sin(t*x)");
    const Expression l2 = parse("exp(xdot)*t - x^3");
    const Expression combined = euler_lagrange(num(3) * l1 - num(1, 2) * l2).expression;
    const Expression e1 = euler_lagrange(l1).expression;
    const Expression e2 = euler_lagrange(l2).expression;
    PointSampler sampler(23, SampleDomain{}, {}, {});
    for (int i = 0; i < 200; ++i) {
      const Bindings b = sampler.next().bindings();
      CHECK(eval(combined, b) == doctest::Approx(3.0 * eval(e1, b) - 0.5 * eval(e2, b)).epsilon(1e-12));
    }
  }

  TEST_CASE("finite difference oracle") {
    CHECK(finite_diff_check(parse("x^3"), Variable::x, {{"x", 2.0}}, 1e-6) < 1e-8);
    CHECK(finite_diff_check(parse("c1"), Variable::x, {{"x", 0.3}, {"c1", 4.0}}, 1e-6) == 0.0);
    const Bindings pt{{"x", 0.4}, {"xdot", -0.7}, {"t", 1.1}, {"gamma0", 1.3}, {"c1", 0.9}};
    CHECK(finite_diff_check(parse(kHarmonicNsl), Variable::xdot, pt, 1e-6) < 1e-6);
    CHECK_THROWS_AS((void)finite_diff_check(parse("x"), Variable::t, {{"x", 1.0}}, 1e-6), EvalError);
  }

  TEST_CASE("symbolic partials agree with finite differences on the corpus") {
    PointSampler sampler(29, SampleDomain{}, {}, {});
    for (const Expression& e : corpus::all()) {
      CAPTURE(render(e));
      const Bindings params = corpus::uniform_params(e, 1.3);
      for (Variable v : {Variable::x, Variable::xdot, Variable::t}) {
        int checked = 0;
        for (int attempt = 0; attempt < 200 && checked < 10; ++attempt) {
          const Bindings pt = with_state(params, sampler.next().state);
          try {
            const double err = finite_diff_check(e, v, pt, 1e-6);
            CHECK(err < 1e-6);
            ++checked;
          } catch (const EvalError&) {
          }
        }
        CHECK(checked > 0);
      }
    }
  }
}
