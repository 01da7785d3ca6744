#include "nullgauge/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "nullgauge/dynamics.hpp"
#include "nullgauge/gauge.hpp"
#include "nullgauge/nsl.hpp"
#include "nullgauge/variational.hpp"

namespace nullgauge {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Report {
  std::ostream& os;
  void put(std::string_view key, const std::string& value) { os << key << '=' << value << '\n'; }
  void put(std::string_view key, double value) { put(key, fmt(value)); }
  void put(std::string_view key, std::size_t value) { put(key, std::to_string(value)); }
  void put(std::string_view key, const char* value) { put(key, std::string(value)); }
};

// Parameter flags shared by the subcommands.
struct ParamFlags {
  Bindings values;
  std::vector<std::string> generic;
  std::string f0;

  void attach(CLI::App* sub) {
    static const std::pair<const char*, const char*> kNamed[] = {
        {"--gamma0", "gamma0"}, {"--a", "a"},   {"--b", "b"},   {"--beta-nl", "beta_nl"},
        {"--alpha", "alpha"},   {"--m", "m"},   {"--k", "k"},   {"--c1", "c1"},
        {"--c2", "c2"},         {"--c3", "c3"},
    };
    for (const auto& [flag, name] : kNamed) {
      // compat owns --alpha as a coefficient expression
      if (sub->get_option_no_throw(flag) != nullptr) continue;
      std::string key = name;
      sub->add_option_function<double>(
          flag, [this, key](double v) { values.set(key, v); }, "parameter " + key);
    }
    sub->add_option("--param", generic, "extra parameter binding name=value")->type_name("NAME=VALUE");
    sub->add_option("--f0", f0, "forcing f0(t) of the second-law model");
  }

  [[nodiscard]] Bindings resolve() const {
    Bindings out = values;
    for (const auto& item : generic) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--param expects NAME=VALUE, got '" + item + "'");
      const std::string value = item.substr(eq + 1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("--param value is not a number: '" + item + "'");
      }
      out.set(item.substr(0, eq), v);
    }
    return out;
  }

  [[nodiscard]] std::optional<Expression> forcing() const {
    if (f0.empty()) return std::nullopt;
    return parse(f0);
  }
};

struct Source {
  std::string spec;
  AccelerationField field;
  Bindings params;
  std::optional<ModelNsl> model;
  std::optional<NullLagrangian> lnull;
};

OscillatorModel make_model(std::string_view name, const ParamFlags& flags) {
  OscillatorModel m;
  m.id = model_from_name(name);
  m.params = flags.resolve();
  m.f0 = flags.forcing();
  return m;
}

Source resolve_source(const std::string& spec, const ParamFlags& flags) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("source must be nsl:<model>, ref:<model>, gauge:<expr> or lagrangian:<expr>, got '" +
                                spec + "'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  Source s;
  s.spec = spec;
  if (kind == "nsl" || kind == "ref") {
    const OscillatorModel m = make_model(body, flags);
    s.params = resolved_parameters(m);
    if (kind == "nsl") {
      s.model = build_model_nsl(m);
      s.field = eom_from_lagrangian(s.model->lagrangian);
    } else {
      s.field = reference_accel(m);
    }
    return s;
  }
  s.params = flags.resolve();
  if (kind == "gauge") {
    s.lnull = null_from_gauge(GaugeFunction(parse(body)));
    s.field = eom_from_null(*s.lnull);
    return s;
  }
  if (kind == "lagrangian") {
    s.field = eom_from_lagrangian(parse(body));
    return s;
  }
  throw std::invalid_argument("unknown source kind '" + kind + "'");
}

// Exactly one of the alternatives must be set.
std::string pick_source(const std::string& model, const std::string& gauge, const std::string& lagrangian,
                        const std::string& source, bool reference) {
  int given = 0;
  std::string out;
  if (!model.empty()) {
    ++given;
    out = (reference ? "ref:" : "nsl:") + model;
  }
  if (!gauge.empty()) {
    ++given;
    out = "gauge:" + gauge;
  }
  if (!lagrangian.empty()) {
    ++given;
    out = "lagrangian:" + lagrangian;
  }
  if (!source.empty()) {
    ++given;
    out = source;
  }
  if (given != 1) throw std::invalid_argument("give exactly one of --model, --gauge, --lagrangian, --source");
  return out;
}

Expression bind_constants(Expression e, const Bindings& params) {
  for (const auto& [name, value] : params.values()) e = substitute(e, name, Expression::real(value));
  return e;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string gauge;
  std::string lagrangian;
  std::size_t samples = 1000;
  double tol = 1e-9;
};

int cmd_verify_null(const VerifyArgs& a, const ParamFlags& flags, std::uint64_t seed, Report& r) {
  if (a.gauge.empty() == a.lagrangian.empty()) throw std::invalid_argument("give exactly one of --gauge, --lagrangian");
  Expression lagrangian;
  if (!a.gauge.empty()) {
    r.put("source", "gauge:" + a.gauge);
    lagrangian = null_from_gauge(GaugeFunction(parse(a.gauge))).lnull;
  } else {
    r.put("source", "lagrangian:" + a.lagrangian);
    lagrangian = parse(a.lagrangian);
  }
  r.put("lagrangian", render(lagrangian));
  VerifyOptions opts;
  opts.samples = a.samples;
  opts.tolerance = a.tol;
  opts.seed = seed;
  opts.params = flags.resolve();
  const NullReport rep = verify_null(lagrangian, opts);
  r.put("residual_expr", render(rep.residual));
  r.put("samples", rep.samples);
  r.put("rejected", rep.rejected);
  r.put("tolerance", a.tol);
  r.put("max_residual", rep.max_abs_residual);
  if (!rep.pass) r.put("worst_sample", describe(rep.worst));
  r.put("result", rep.pass ? "pass" : "fail");
  return rep.pass ? exit_pass : exit_check_failed;
}

struct DeriveArgs {
  std::string model;
  std::string gauge;
  std::string lagrangian;
  std::size_t samples = 200;
  double tol = 1e-8;
};

int cmd_derive(const DeriveArgs& a, const ParamFlags& flags, std::uint64_t seed, Report& r) {
  const std::string spec = pick_source(a.model, a.gauge, a.lagrangian, "", false);
  r.put("source", spec);
  const Source s = resolve_source(spec, flags);

  if (s.model) {
    const Expression shown = bind_constants(s.model->full_accel, s.params);
    r.os << "a = " << render(shown) << '\n';
    if (!(s.model->full_accel == s.model->expected_accel)) {
      r.put("zeroth_order", render(bind_constants(s.model->expected_accel, s.params)));
    }
    // Extracted acceleration versus the closed form at sampled states.
    PointSampler sampler(seed, SampleDomain{}, s.params, {});
    const SampledMax m = sample_max(sampler, a.samples, [&](const Sample& smp) {
      double extracted = 0.0;
      try {
        extracted = evaluate(s.field, smp.state, s.params);
      } catch (const SingularMass&) {
        return std::nan("");
      }
      const double closed = eval(s.model->full_accel, smp.bindings(), sampler.domain().eval);
      return (extracted - closed) / std::max(1.0, std::fabs(closed));
    });
    r.put("samples", m.accepted);
    r.put("tolerance", a.tol);
    r.put("max_residual", m.max_abs);
    const bool pass = m.max_abs < a.tol;
    r.put("result", pass ? "pass" : "fail");
    return pass ? exit_pass : exit_check_failed;
  }

  r.os << "a = " << render(s.field.acceleration) << '\n';
  if (s.lnull) {
    r.put("lagrangian", render(s.lnull->lnull));
    VerifyOptions opts;
    opts.seed = seed;
    opts.params = s.params;
    const NullReport rep = verify_null(s.lnull->lnull, opts);
    r.put("null_residual", rep.max_abs_residual);
    r.put("result", rep.pass ? "pass" : "fail");
    return rep.pass ? exit_pass : exit_check_failed;
  }
  r.put("result", "pass");
  return exit_pass;
}

struct SimArgs {
  std::string model;
  std::string gauge;
  std::string lagrangian;
  std::string source;
  bool reference = false;
  InitialData init{0.0, 0.0, 0.0, 1e-3, 10.0};
  std::string out;
};

void put_init(Report& r, const InitialData& init) {
  r.put("x0", init.x0);
  r.put("v0", init.v0);
  r.put("t0", init.t0);
  r.put("dt", init.dt);
  r.put("t_end", init.t_end);
}

int cmd_simulate(const SimArgs& a, const ParamFlags& flags, Report& r) {
  const std::string spec = pick_source(a.model, a.gauge, a.lagrangian, a.source, a.reference);
  r.put("source", spec);
  const Source s = resolve_source(spec, flags);
  for (const auto& [k, v] : s.params.values()) r.put("param." + k, v);
  put_init(r, a.init);
  const Trajectory tr = integrate(s.field, a.init, s.params);
  r.put("step", tr.step);
  r.put("steps", tr.samples.size() - 1);
  r.put("x_end", tr.samples.back().x);
  r.put("v_end", tr.samples.back().v);
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw std::invalid_argument("cannot open '" + a.out + "' for writing");
    write_csv(f, tr);
    r.put("csv", a.out);
  }
  r.put("result", "pass");
  return exit_pass;
}

struct CompareArgs {
  std::vector<std::string> sources;
  InitialData init{0.0, 0.0, 0.0, 1e-3, 10.0};
  double tol = -1.0;
};

int cmd_compare(const CompareArgs& a, const ParamFlags& flags, Report& r) {
  if (a.sources.size() != 2) throw std::invalid_argument("compare needs exactly two sources");
  const Source s1 = resolve_source(a.sources[0], flags);
  const Source s2 = resolve_source(a.sources[1], flags);
  r.put("source_a", s1.spec);
  r.put("source_b", s2.spec);
  put_init(r, a.init);
  const DeviationReport d = compare(integrate(s1.field, a.init, s1.params), integrate(s2.field, a.init, s2.params));
  r.put("max_dx", d.max_abs_x);
  r.put("max_dv", d.max_abs_v);
  r.put("time_of_max", d.time_of_max);
  if (a.tol >= 0.0) {
    r.put("tolerance", a.tol);
    const bool pass = d.max_abs_x <= a.tol;
    r.put("result", pass ? "pass" : "fail");
    return pass ? exit_pass : exit_check_failed;
  }
  r.put("result", "pass");
  return exit_pass;
}

struct CompatArgs {
  std::string alpha = "0";
  std::string beta = "0";
  std::string gamma = "0";
  std::string special;
  double tol = 1e-12;
};

int cmd_compat(const CompatArgs& a, const ParamFlags& flags, Report& r) {
  const CoefficientTriple c{parse(a.alpha), parse(a.beta), parse(a.gamma)};
  r.put("alpha", render(c.alpha));
  r.put("beta", render(c.beta));
  r.put("gamma", render(c.gamma));
  bool ok = true;
  if (!a.special.empty()) {
    SpecialCaseInput in;
    in.coefficients = c;
    in.params = flags.resolve();
    in.tolerance = a.tol;
    const SpecialCaseReport rep = special_case_check(special_case_from_name(a.special), in);
    r.put("case", std::string(special_case_name(rep.id)));
    r.put("case_residual_expr", render(rep.residual));
    r.put("case_max_residual", rep.max_residual);
    if (!rep.note.empty()) r.put("case_note", rep.note);
    r.put("case_result", rep.holds ? "satisfied" : "violated");
    ok = rep.holds;
  }

  const Expression residual = compatibility_residual(c);
  r.put("residual_expr", render(residual));
  Bindings params = flags.resolve();
  for (const auto& name : parameters(residual)) {
    if (!params.has(name)) params.set(name, 1.0);
  }
  constexpr std::size_t kGrid = 41;
  double worst = 0.0;
  double worst_signed = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t i = 0; i < kGrid; ++i) {
    for (std::size_t j = 0; j < kGrid; ++j) {
      State s;
      s.x = -2.0 + 4.0 * static_cast<double>(i) / (kGrid - 1);
      s.t = 10.0 * static_cast<double>(j) / (kGrid - 1);
      try {
        const double v = eval(residual, with_state(params, s));
        ++evaluated;
        if (std::fabs(v) > worst) {
          worst = std::fabs(v);
          worst_signed = v;
        }
      } catch (const EvalError& e) {
        if (e.kind() != EvalError::Kind::domain) throw;
      }
    }
  }
  r.put("grid_points", evaluated);
  r.put("residual", worst_signed);
  r.put("max_residual", worst);
  r.put("tolerance", a.tol);
  ok = ok && evaluated > 0 && worst < a.tol;
  r.put("result", ok ? "satisfied" : "violated");
  return ok ? exit_pass : exit_check_failed;
}

int cmd_series(std::size_t order, Report& r) {
  const std::vector<Rational> c = damping_series_coeffs(order);
  std::string joined;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) joined += ", ";
    joined += c[i].to_string();
  }
  r.put("order", order);
  r.put("coefficients", joined);
  r.put("result", "pass");
  return exit_pass;
}

void add_init_flags(CLI::App* sub, InitialData& init) {
  sub->add_option("--x0", init.x0, "initial position");
  sub->add_option("--v0", init.v0, "initial velocity");
  sub->add_option("--t0", init.t0, "start time");
  sub->add_option("--dt", init.dt, "step size")->capture_default_str();
  sub->add_option("--t-end", init.t_end, "end time")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Null Lagrangians, gauge functions and non-standard Lagrangians"};
  app.name("nullgauge");
  app.require_subcommand(1);
  // Lets --seed follow the subcommand.
  app.fallthrough();
  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "seed for randomized sampling")->capture_default_str();

  ParamFlags flags;

  VerifyArgs verify;
  auto* sv = app.add_subcommand("verify-null", "check that a Lagrangian is annihilated by the Euler-Lagrange operator");
  sv->add_option("--gauge", verify.gauge, "gauge function phi(x,t)");
  sv->add_option("--lagrangian", verify.lagrangian, "Lagrangian L(x,xdot,t)");
  sv->add_option("--samples", verify.samples)->capture_default_str();
  sv->add_option("--tol", verify.tol)->capture_default_str();

  DeriveArgs derive;
  auto* sd = app.add_subcommand("derive", "extract the equation of motion");
  sd->add_option("--model", derive.model, "catalog model");
  sd->add_option("--gauge", derive.gauge, "gauge function phi(x,t)");
  sd->add_option("--lagrangian", derive.lagrangian, "Lagrangian L(x,xdot,t)");
  sd->add_option("--samples", derive.samples)->capture_default_str();
  sd->add_option("--tol", derive.tol)->capture_default_str();

  SimArgs sim;
  auto* ss = app.add_subcommand("simulate", "integrate an equation of motion with RK4");
  ss->add_option("--model", sim.model, "catalog model (its non-standard Lagrangian)");
  ss->add_flag("--reference", sim.reference, "use the model's closed-form reference equation");
  ss->add_option("--gauge", sim.gauge, "gauge function phi(x,t)");
  ss->add_option("--lagrangian", sim.lagrangian, "Lagrangian L(x,xdot,t)");
  ss->add_option("--source", sim.source, "nsl:<model>, ref:<model>, gauge:<expr> or lagrangian:<expr>");
  ss->add_option("--out", sim.out, "CSV output path");
  add_init_flags(ss, sim.init);

  CompareArgs cmp;
  auto* sc = app.add_subcommand("compare", "integrate two sources from the same initial data and compare");
  sc->add_option("sources", cmp.sources, "two sources: nsl:<model>, ref:<model>, gauge:<expr>, lagrangian:<expr>")
      ->expected(2)
      ->required();
  sc->add_option("--tol", cmp.tol, "fail when the position deviation exceeds this");
  add_init_flags(sc, cmp.init);

  CompatArgs compat;
  auto* sk = app.add_subcommand("compat", "coefficient compatibility of xddot + alpha xdot^2 + beta xdot + gamma x = 0");
  sk->add_option("--alpha", compat.alpha)->capture_default_str();
  sk->add_option("--beta", compat.beta)->capture_default_str();
  sk->add_option("--gamma", compat.gamma)->capture_default_str();
  sk->add_option("--case", compat.special, "x-only, t-only, constants or beta-only");
  sk->add_option("--tol", compat.tol)->capture_default_str();

  std::size_t order = 3;
  auto* se = app.add_subcommand("series", "Taylor coefficients of the damping term");
  se->add_option("--order", order)->capture_default_str()->check(CLI::PositiveNumber);

  for (auto* sub : {sv, sd, ss, sc, sk}) flags.attach(sub);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }

  CLI::App* sub = app.get_subcommands().front();
  Report r{out};
  r.put("command", sub->get_name());
  r.put("seed", std::to_string(seed));
  try {
    if (sub == sv) return cmd_verify_null(verify, flags, seed, r);
    if (sub == sd) return cmd_derive(derive, flags, seed, r);
    if (sub == ss) return cmd_simulate(sim, flags, r);
    if (sub == sc) return cmd_compare(cmp, flags, r);
    if (sub == sk) return cmd_compat(compat, flags, r);
    if (sub == se) return cmd_series(order, r);
  } catch (const NullDegenerate& e) {
    r.put("error", "NullDegenerate");
    err << "error: " << e.what() << '\n';
    return exit_degenerate;
  } catch (const IntegrationError& e) {
    r.put("error", "NumericalBlowup");
    r.put("blowup_time", e.time());
    err << "error: " << e.what() << '\n';
    return exit_blowup;
  } catch (const ParseError& e) {
    r.put("error", "ParseError");
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const SamplingError& e) {
    r.put("error", "SamplingError");
    err << "error: " << e.what() << " (last sample: " << e.sample() << ")\n";
    return exit_input_error;
  } catch (const EvalError& e) {
    r.put("error", "EvalError");
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const std::exception& e) {
    r.put("error", "InputError");
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }
  return exit_input_error;
}

}  // namespace nullgauge
