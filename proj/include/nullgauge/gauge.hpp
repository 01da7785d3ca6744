#pragma once

// Gauge functions Phi(x,t), the null Lagrangians they generate, and checks on
// the coefficients of xddot + (alpha xdot^2 + beta xdot + gamma x) = 0.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nullgauge/expr.hpp"
#include "nullgauge/sampling.hpp"

namespace nullgauge {

class GaugeFunction {
 public:
  /// Throws std::invalid_argument when phi contains xdot or xddot.
  explicit GaugeFunction(Expression phi);

  /// A gauge known only through Phi' and Phi-dot. Throws std::invalid_argument
  /// when the mixed partials disagree at sampled points.
  static GaugeFunction from_partials(Expression phi_x, Expression phi_t);

  /// nullopt for gauges built from partials.
  [[nodiscard]] const std::optional<Expression>& phi() const { return phi_; }
  [[nodiscard]] const Expression& phi_x() const { return phi_x_; }
  [[nodiscard]] const Expression& phi_xx() const { return phi_xx_; }
  [[nodiscard]] const Expression& phi_t() const { return phi_t_; }
  [[nodiscard]] const Expression& phi_tx() const { return phi_tx_; }
  [[nodiscard]] const Expression& phi_tt() const { return phi_tt_; }

 private:
  GaugeFunction(std::optional<Expression> phi, Expression phi_x, Expression phi_t);

  std::optional<Expression> phi_;
  Expression phi_x_;
  Expression phi_xx_;
  Expression phi_t_;
  Expression phi_tx_;
  Expression phi_tt_;
};

struct NullLagrangian {
  Expression lnull;
  std::optional<GaugeFunction> origin;
  /// d lnull / d xdot.
  Expression p_null;
};

/// lnull = Phi' xdot + Phi-dot. Throws std::invalid_argument when Phi' is
/// identically zero.
[[nodiscard]] NullLagrangian null_from_gauge(const GaugeFunction& g);

/// Wraps an arbitrary Lagrangian without a known gauge.
[[nodiscard]] NullLagrangian null_from_expression(const Expression& lnull);

struct VerifyOptions {
  std::size_t samples = 1000;
  double tolerance = 1e-9;
  std::uint64_t seed = 42;
  /// Parameters left unbound here are drawn at random per sample.
  Bindings params;
  SampleDomain domain;
};

struct NullReport {
  double max_abs_residual = 0.0;
  bool pass = false;
  std::size_t samples = 0;
  std::size_t rejected = 0;
  Sample worst;
  /// EL[L] as a symbolic expression.
  Expression residual;
};

/// Samples EL[L]. Throws std::invalid_argument when L contains xddot and
/// SamplingError when too many points fall outside the evaluation domain.
[[nodiscard]] NullReport verify_null(const Expression& lagrangian, const VerifyOptions& opts = {});

struct CoefficientTriple {
  Expression alpha;
  Expression beta;
  Expression gamma;
};

/// Throws std::invalid_argument if any coefficient contains xdot or xddot.
void validate(const CoefficientTriple& c);

/// (beta_t + beta^2/2)/2 - gamma_x x - gamma (1 + alpha x), simplified.
[[nodiscard]] Expression compatibility_residual(const CoefficientTriple& c);

enum class SpecialCase { x_only, t_only, constants, beta_only };

/// Accepts "x-only", "t-only", "constants", "beta-only". Throws
/// std::invalid_argument otherwise.
[[nodiscard]] SpecialCase special_case_from_name(std::string_view name);
[[nodiscard]] std::string_view special_case_name(SpecialCase c);

struct SpecialCaseInput {
  CoefficientTriple coefficients;
  /// Unbound parameters default to 1.
  Bindings params;
  double tolerance = 1e-12;
  Interval x{-2.0, 2.0};
  Interval t{0.0, 10.0};
  std::size_t grid = 201;
};

struct SpecialCaseReport {
  SpecialCase id = SpecialCase::constants;
  bool holds = false;
  double max_residual = 0.0;
  /// Grid points where the reduced relation could be evaluated.
  std::size_t evaluated = 0;
  Expression residual;
  /// Non-empty when a structural requirement of the case failed.
  std::string note;
};

/// Evaluates the reduced compatibility relation for one special case on a
/// grid. Throws std::invalid_argument when the coefficients depend on a
/// variable the case excludes.
[[nodiscard]] SpecialCaseReport special_case_check(SpecialCase id, const SpecialCaseInput& in);

enum class SpecialGauge { inertia, second_law, quadratic_damping };

/// Accepts "inertia", "second-law", "quadratic-damping".
[[nodiscard]] SpecialGauge special_gauge_from_name(std::string_view name);

struct SpecialGaugeInput {
  Expression c1 = param("c1");
  Expression c2 = param("c2");
  Expression c3 = param("c3");
  /// Forcing f0(t) for the second-law case.
  std::optional<Expression> f0;
  /// alpha(x) for the quadratic-damping case.
  std::optional<Expression> alpha;
  /// Second-law: a double antiderivative of f0. Quadratic damping: the
  /// integral of alpha. Used when symbolic integration fails.
  std::optional<Expression> antiderivative;
};

/// Throws std::invalid_argument for missing inputs or integrands outside the
/// supported catalog without a supplied antiderivative.
[[nodiscard]] GaugeFunction build_special_gauge(SpecialGauge id, const SpecialGaugeInput& in);

/// Phi' = (c1 + 2 gamma0 int f dx)^(-1/2), which solves
/// Phi'' + gamma0 f Phi'^3 = 0. `integral_of_f` overrides symbolic
/// integration; without it, throws std::invalid_argument when f has no
/// supported closed-form antiderivative.
[[nodiscard]] Expression build_oscillator_gauge_derivative(const Expression& f, const Expression& gamma0,
                                                           const Expression& c1,
                                                           const std::optional<Expression>& integral_of_f = {});

/// Phi'' + gamma0 f Phi'^3 for a given Phi'.
[[nodiscard]] Expression gauge_constraint_residual(const Expression& phi_x, const Expression& f,
                                                   const Expression& gamma0);

struct NullConditionPair {
  Expression B;
  Expression C;
};

/// C = G x + H.
[[nodiscard]] NullConditionPair pair_from_fgh(const Expression& f, const Expression& g, const Expression& h);

enum class NullConditionVariant {
  /// dB/dt = d(x C)/dx
  x_weighted,
  /// dB/dt = dC/dx, exactness of B xdot + C
  standard,
};

struct NullConditionOptions {
  Bindings params;
  double tolerance = 1e-9;
  Interval x{-2.0, 2.0};
  Interval t{0.0, 5.0};
  std::size_t grid = 41;
};

struct NullConditionReport {
  NullConditionVariant variant = NullConditionVariant::x_weighted;
  bool holds = false;
  double max_residual = 0.0;
  Expression residual;
};

[[nodiscard]] NullConditionReport null_condition(const NullConditionPair& p, NullConditionVariant variant,
                                                 const NullConditionOptions& opts = {});

}  // namespace nullgauge
