#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "nullgauge/dynamics.hpp"
#include "nullgauge/variational.hpp"

using namespace nullgauge;

namespace {

const char* const kHarmonicNsl =
    "xdot*asinh(xdot/sqrt(gamma0*x^2 + c1)) - sqrt(gamma0*x^2 + c1)*sqrt(1 + (xdot/sqrt(gamma0*x^2 + c1))^2)";

OscillatorModel model(ModelId id, Bindings params) {
  OscillatorModel m;
  m.id = id;
  m.params = std::move(params);
  return m;
}

AccelerationField from_model(const OscillatorModel& m) {
  return eom_from_lagrangian(build_model_nsl(m).lagrangian);
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("acceleration from a Lagrangian") {
    const AccelerationField std_osc = eom_from_lagrangian(parse("xdot^2/2 - gamma0*x^2/2"));
    CHECK(std_osc.provenance == Provenance::from_lagrangian);
    CHECK(evaluate(std_osc, {0.7, 0.3, 0.0, 0.0}, {{"gamma0", 2.0}}) == doctest::Approx(-1.4));
    CHECK_FALSE(contains(std_osc.acceleration, Variable::xddot));

    const AccelerationField ns = eom_from_lagrangian(parse(kHarmonicNsl));
    const Bindings p{{"gamma0", 1.5}, {"c1", 0.8}};
    for (double x : {-1.0, 0.0, 0.6})
      for (double v : {-1.2, 0.4})
        CHECK(evaluate(ns, {x, v, 0.0, 0.0}, p) == doctest::Approx(-1.5 * x).epsilon(1e-10).scale(1.0));

    CHECK_THROWS_AS((void)eom_from_lagrangian(parse("c1*xdot + c2")), NullDegenerate);
    CHECK_THROWS_AS((void)eom_from_lagrangian(parse("x*xdot")), NullDegenerate);
  }

  TEST_CASE("the mass guard refuses singular points") {
    // d2L/dxdot2 = 2 x, zero at x = 0.
    const AccelerationField f = eom_from_lagrangian(parse("x*xdot^2"));
    REQUIRE(f.mass.has_value());
    CHECK_THROWS_AS((void)evaluate(f, {0.0, 1.0, 0.0, 0.0}, {}), SingularMass);
    CHECK(std::isfinite(evaluate(f, {0.5, 1.0, 0.0, 0.0}, {})));
  }

  TEST_CASE("acceleration from a null Lagrangian") {
    const AccelerationField inertia = eom_from_null(null_from_gauge(GaugeFunction(parse("c1*x + c2*t + c3"))));
    CHECK(inertia.provenance == Provenance::from_null);
    CHECK(inertia.acceleration.is_zero());

    const AccelerationField second = eom_from_null(null_from_gauge(GaugeFunction(parse("x + t^3/6"))));
    CHECK(simplify(second.acceleration + parse("t")).is_zero());

    const AccelerationField quad = eom_from_null(null_from_gauge(GaugeFunction(parse("exp(2*x)/2"))));
    CHECK(evaluate(quad, {0.1, 0.9, 0.0, 0.0}, {}) == doctest::Approx(-2.0 * 0.81));

    CHECK_THROWS_AS((void)eom_from_null(null_from_expression(parse("x*xdot"))), std::invalid_argument);
  }

  TEST_CASE("reference accelerations") {
    CHECK(evaluate(reference_accel(model(ModelId::harmonic, {{"gamma0", 1.0}})), {0.4, 0.0, 0.0, 0.0}, {{"gamma0", 1.0}}) ==
          doctest::Approx(-0.4));
    const OscillatorModel duff = model(ModelId::duffing, {{"b", 0.1}, {"gamma0", 1.0}, {"beta_nl", 0.5}});
    const AccelerationField d = reference_accel(duff);
    CHECK(d.provenance == Provenance::reference);
    CHECK(d.label == "duffing");
    CHECK(evaluate(d, {1.0, 0.0, 0.0, 0.0}, resolved_parameters(duff)) == doctest::Approx(-1.5));
    CHECK(reference_accel(model(ModelId::inertia, {})).acceleration.is_zero());
    OscillatorModel sl = model(ModelId::second_law, {});
    sl.f0 = parse("t");
    CHECK(evaluate(reference_accel(sl), {0.0, 0.0, 0.0, 2.0}, {}) == doctest::Approx(-2.0));
    CHECK_THROWS_AS((void)reference_accel(model(ModelId::pendulum, {{"gamma0", 1.0}})), std::invalid_argument);
  }

  TEST_CASE("every catalog gauge reproduces its target equation") {
    struct Case {
      const char* phi;
      const char* target;
    };
    for (const Case& c : {Case{"c1*x + c2*t + c3", "0"}, Case{"x + t^3/6", "-t"}, Case{"x + t^2/2", "-1"},
                          Case{"x + t^4/12", "-t^2"}, Case{"exp(x)", "-xdot^2"}, Case{"exp(2*x)/2", "-2*xdot^2"}}) {
      CAPTURE(c.phi);
      const AccelerationField f = eom_from_null(null_from_gauge(GaugeFunction(parse(c.phi))));
      const Expression target = parse(c.target);
      const Bindings params{{"c1", 1.2}, {"c2", 0.3}, {"c3", 0.1}};
      for (double x : {-1.0, 0.5})
        for (double v : {-0.8, 1.3})
          for (double t : {0.0, 2.5}) {
            const State s{x, v, 0.0, t};
            CHECK(std::abs(evaluate(f, s, params) - eval(target, with_state(params, s))) < 1e-10);
          }
    }
  }

  TEST_CASE("integration examples") {
    const AccelerationField h = reference_accel(model(ModelId::harmonic, {{"gamma0", 1.0}}));
    const Trajectory tr = integrate(h, {1.0, 0.0, 0.0, 1e-3, 2 * M_PI}, {{"gamma0", 1.0}});
    CHECK(tr.method == "rk4");
    CHECK(tr.samples.back().t == doctest::Approx(2 * M_PI).epsilon(1e-15));
    CHECK(std::abs(tr.samples.back().x - 1.0) < 1e-6);
    // The step shrinks to keep a uniform grid that ends exactly at t_end.
    CHECK(tr.step <= 1e-3);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) REQUIRE(tr.samples[i].t > tr.samples[i - 1].t);

    const Trajectory line = integrate(reference_accel(model(ModelId::inertia, {})), {0.0, 1.0, 0.0, 1e-3, 5.0}, {});
    CHECK(std::abs(line.samples.back().x - 5.0) < 1e-12);

    OscillatorModel sl = model(ModelId::second_law, {});
    sl.f0 = parse("t");
    const Trajectory cubic = integrate(reference_accel(sl), {0.0, 0.0, 0.0, 1e-3, 1.0}, {});
    CHECK(std::abs(cubic.samples.back().x + 1.0 / 6.0) < 1e-8);
  }

  TEST_CASE("integration errors") {
    const AccelerationField h = reference_accel(model(ModelId::harmonic, {{"gamma0", 1.0}}));
    CHECK_THROWS_AS((void)integrate(h, {1.0, 0.0, 0.0, 0.0, 1.0}, {{"gamma0", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS((void)integrate(h, {1.0, 0.0, 1.0, 1e-3, 0.5}, {{"gamma0", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS((void)integrate(h, {1.0, 0.0, 0.0, 1e-3, 1.0}, {}), std::invalid_argument);

    AccelerationField blowup;
    blowup.acceleration = parse("x^3");
    try {
      (void)integrate(blowup, {1.0, 0.0, 0.0, 1e-2, 100.0}, {});
      FAIL("expected blow-up");
    } catch (const IntegrationError& e) {
      CHECK(e.time() > 0.0);
      CHECK(e.time() < 100.0);
    }

    AccelerationField domain;
    domain.acceleration = parse("sqrt(1 - t)");
    CHECK_THROWS_AS((void)integrate(domain, {0.0, 0.0, 0.0, 1e-2, 2.0}, {}), IntegrationError);
  }

  TEST_CASE("harmonic energy is conserved over ten periods") {
    const Bindings p{{"gamma0", 1.0}, {"c1", 1.0}};
    const AccelerationField ns = eom_from_lagrangian(parse(kHarmonicNsl));
    const Trajectory tr = integrate(ns, {1.0, 0.0, 0.0, 1e-3, 20 * M_PI}, p);
    const double e0 = 0.5;
    double worst = 0.0;
    for (const TrajectorySample& s : tr.samples)
      worst = std::max(worst, std::abs(0.5 * s.v * s.v + 0.5 * s.x * s.x - e0) / e0);
    CHECK(worst < 1e-8);
  }

  TEST_CASE("RK4 converges at fourth order") {
    const AccelerationField h = reference_accel(model(ModelId::harmonic, {{"gamma0", 1.0}}));
    const Bindings p{{"gamma0", 1.0}};
    const double T = 10.0;
    const auto err = [&](double dt) {
      return std::abs(integrate(h, {1.0, 0.0, 0.0, dt, T}, p).samples.back().x - std::cos(T));
    };
    const double ratio = err(0.02) / err(0.01);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }

  TEST_CASE("pendulum and damped identities") {
    for (double a : {1.0, 2.0}) {
      const OscillatorModel m = model(ModelId::pendulum, {{"gamma0", 1.0}, {"a", a}});
      const AccelerationField f = from_model(m);
      const Bindings p = resolved_parameters(m);
      for (double x : {-1.3, -0.2, 0.7, 1.9})
        for (double v : {-1.0, 0.5})
          CHECK(std::abs(evaluate(f, {x, v, 0.0, 0.0}, p) + std::sin(a * x)) < 1e-8);
    }
    const OscillatorModel m = model(ModelId::bateman_linear, {{"b", 0.3}, {"gamma0", 1.2}});
    const AccelerationField f = from_model(m);
    const Bindings p = resolved_parameters(m);
    for (double x : {-1.3, 0.2, 1.1})
      for (double v : {-1.5, 0.05, 1.0})
        for (double t : {0.0, 4.0}) {
          const double phx = 1.0 / std::sqrt(1.2 * x * x + 1.0);
          const double L = phx * v;
          const double closed = -(0.3 / phx) * std::asinh(L) * std::sqrt(1 + L * L) - 1.2 * x;
          CHECK(std::abs(evaluate(f, {x, v, 0.0, t}, p) - closed) < 1e-9);
        }
  }

  TEST_CASE("compare") {
    const OscillatorModel h = model(ModelId::harmonic, {{"gamma0", 1.0}});
    const Bindings p = resolved_parameters(h);
    const InitialData init{1.0, 0.0, 0.0, 1e-3, 10.0};
    const Trajectory ref = integrate(reference_accel(h), init, p);
    const DeviationReport self = compare(ref, ref);
    CHECK(self.max_abs_x == 0.0);
    CHECK(self.max_abs_v == 0.0);

    const DeviationReport ns = compare(integrate(from_model(h), init, p), ref);
    CHECK(ns.max_abs_x < 1e-9);

    const Trajectory shorter = integrate(reference_accel(h), {1.0, 0.0, 0.0, 1e-3, 5.0}, p);
    CHECK_THROWS_AS((void)compare(ref, shorter), std::invalid_argument);
  }

  TEST_CASE("full damping approaches linear damping at small amplitude") {
    const OscillatorModel m = model(ModelId::bateman_linear, {{"b", 0.1}, {"gamma0", 1.0}});
    const Bindings p = resolved_parameters(m);
    const AccelerationField full = from_model(m);
    const AccelerationField lin = reference_accel(m);
    const auto deviation = [&](double v0) {
      const InitialData init{0.0, v0, 0.0, 1e-3, 10.0};
      return compare(integrate(full, init, p), integrate(lin, init, p)).max_abs_x;
    };
    const double d1 = deviation(0.01);
    const double d2 = deviation(0.005);
    CHECK(d1 < 1e-3);
    // Relative to the amplitude the deviation is O(L^2): 4x per halving.
    CHECK((d1 / 0.01) / (d2 / 0.005) == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("CSV output") {
    const Trajectory tr =
        integrate(reference_accel(model(ModelId::inertia, {})), {0.0, 1.0, 0.0, 0.5, 1.0}, {});
    std::ostringstream os;
    write_csv(os, tr);
    CHECK(os.str() == "t,x,v\n0,0,1\n0.5,0.5,1\n1,1,1\n");
    const Trajectory h = integrate(reference_accel(model(ModelId::harmonic, {{"gamma0", 1.0}})),
                                   {1.0, 0.0, 0.0, 0.1, 0.1}, {{"gamma0", 1.0}});
    std::ostringstream hs;
    write_csv(hs, h);
    std::istringstream in(hs.str());
    std::string header, first, second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    // Full precision survives a text round trip.
    const double x = std::stod(second.substr(second.find(',') + 1));
    CHECK(x == h.samples.back().x);
  }
}
