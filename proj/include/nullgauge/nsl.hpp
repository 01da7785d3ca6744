#pragma once

// Non-standard Lagrangians assembled from a null Lagrangian:
//   L_ns = Q F(L) + R G(L) + U M(L),  L = L_null,
// subject to Q = R L and Q F'(L) + R G'(L) = lambda.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nullgauge/expr.hpp"
#include "nullgauge/gauge.hpp"
#include "nullgauge/rational.hpp"
#include "nullgauge/sampling.hpp"

namespace nullgauge {

/// A function of one formal argument, written in terms of the parameter
/// named by kFormalArgument.
class ScalarFunction {
 public:
  static constexpr std::string_view kFormalArgument = "L";

  enum class Kind { asinh, atan, identity, constant, user };

  static ScalarFunction asinh();
  static ScalarFunction atan();
  static ScalarFunction identity();
  static ScalarFunction constant(Expression value);
  /// Body in the formal argument "L".
  static ScalarFunction user(Expression body);
  /// -sqrt(1 + L^2)
  static ScalarFunction neg_sqrt_one_plus_square();
  /// -ln(sqrt(1 + L^2))
  static ScalarFunction neg_log_sqrt_one_plus_square();

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const Expression& body() const { return body_; }
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] bool is_zero() const { return body_.is_zero(); }

  /// f(arg)
  [[nodiscard]] Expression at(const Expression& arg) const;
  /// f'(arg)
  [[nodiscard]] Expression derivative_at(const Expression& arg) const;
  /// f' as a function of the formal argument.
  [[nodiscard]] Expression derivative_body() const;

 private:
  ScalarFunction(Kind k, Expression body) : kind_(k), body_(std::move(body)) {}
  Kind kind_;
  Expression body_;
};

struct NslSpec {
  Expression Q;
  Expression R;
  Expression U;
  ScalarFunction F = ScalarFunction::constant(Expression());
  ScalarFunction G = ScalarFunction::constant(Expression());
  ScalarFunction M = ScalarFunction::constant(Expression());
  double lambda = 0.0;
  NullLagrangian lnull;
};

struct SampleOptions {
  std::size_t samples = 500;
  double tolerance = 1e-9;
  std::uint64_t seed = 42;
  Bindings params;
  SampleDomain domain;
};

struct ConstraintReport {
  /// max |Q - R L|
  double product_residual = 0.0;
  /// max |Q F'(L) + R G'(L) - lambda|
  double lambda_residual = 0.0;
  bool pass = false;
  std::size_t samples = 0;
};

[[nodiscard]] ConstraintReport check_prop1_constraints(const NslSpec& s, const SampleOptions& opts = {});

class ConstraintViolation : public std::runtime_error {
 public:
  explicit ConstraintViolation(const ConstraintReport& r);
  [[nodiscard]] const ConstraintReport& report() const { return report_; }

 private:
  ConstraintReport report_;
};

/// Q F(L) + R G(L) + U M(L), simplified. With `enforce` set the two
/// constraints are sampled first and ConstraintViolation is thrown when
/// either fails.
[[nodiscard]] Expression assemble_prop1(const NslSpec& s, bool enforce = true, const SampleOptions& opts = {});

enum class Prop1Form {
  /// Pick the most reduced form the NslSpec qualifies for.
  automatic,
  /// All terms, constraints applied.
  extended,
  /// lambda = 0 and U = 0.
  simplified,
  /// M a constant m.
  corollary,
  /// Before applying the constraints; valid for any spec.
  general,
};

[[nodiscard]] std::string_view prop1_form_name(Prop1Form f);

/// Right-hand structure of the equation of motion for the given form, an
/// expression affine in xddot that should equal EL[assemble_prop1(s)].
/// Throws std::invalid_argument when the NslSpec does not qualify for `form`.
[[nodiscard]] Expression prop1_eom_structure(const NslSpec& s, Prop1Form form);

struct Prop1Report {
  Prop1Form form = Prop1Form::automatic;
  double max_abs_difference = 0.0;
  /// Difference relative to max(1, |EL|, |structure|).
  double max_rel_difference = 0.0;
  bool pass = false;
  std::size_t samples = 0;
  Expression el;
  Expression structure;
};

/// Compares EL[assemble_prop1(s)] with prop1_eom_structure at sampled points.
/// The constrained forms throw ConstraintViolation when the NslSpec fails its
/// constraints.
[[nodiscard]] Prop1Report prop1_eom_residual(const NslSpec& s, Prop1Form form = Prop1Form::automatic,
                                             const SampleOptions& opts = {});

class NonIntegrable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// F(L) = -int_0^L G'(l)/l dl, the lambda = 0 relation between F and G with
/// F(0) = 0. Throws NonIntegrable when G'(0) != 0.
[[nodiscard]] double f_from_g_numeric(const ScalarFunction& G, double L, const Bindings& params = {});

// ---------------------------------------------------------------------------
// Model catalog

enum class ModelId {
  harmonic,
  pendulum,
  bateman_linear,
  bateman_nonlinear,
  duffing,
  duffing_pendulum,
  quadratic_damping,
  inertia,
  second_law,
  harmonic_potential,
};

[[nodiscard]] std::string_view model_name(ModelId id);
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] ModelId model_from_name(std::string_view name);
[[nodiscard]] const std::vector<ModelId>& all_models();

struct OscillatorModel {
  ModelId id = ModelId::harmonic;
  /// Numeric values of gamma0, a, b, beta_nl, alpha, m, c1, c2, c3, k.
  Bindings params;
  /// Forcing of the second-law model, a function of t.
  std::optional<Expression> f0;
};

/// Parameters the model cannot run without.
[[nodiscard]] std::vector<std::string> required_parameters(ModelId id);

/// The model's bindings completed with default integration constants, chosen
/// so that the null Lagrangian's radicand stays positive. Throws
/// std::invalid_argument when a required parameter or f0 is missing.
[[nodiscard]] Bindings resolved_parameters(const OscillatorModel& m);

struct ModelNsl {
  Expression lagrangian;
  NullLagrangian lnull;
  /// Zeroth-order target acceleration.
  Expression expected_accel;
  /// Exact acceleration implied by the Lagrangian. Equals expected_accel for
  /// undamped models.
  Expression full_accel;
};

/// Symbolic forms in terms of the parameter names; bind with
/// resolved_parameters(m) to evaluate.
[[nodiscard]] ModelNsl build_model_nsl(const OscillatorModel& m);

/// Zeroth-order target acceleration, in terms of the parameter names.
[[nodiscard]] Expression model_reference_accel(const OscillatorModel& m);

/// Gauge derivative of the oscillator models.
[[nodiscard]] Expression model_phi_x(ModelId id);

/// The Q, R, U, F, G, M identification behind a model's Lagrangian. Throws
/// std::invalid_argument for the null-only models.
[[nodiscard]] NslSpec model_spec(ModelId id);

/// Coefficients c_n of asinh(L) sqrt(1 + L^2) = sum c_n L^(2n+1), n < order.
/// Throws std::invalid_argument when order < 1 and RationalOverflow when a
/// coefficient leaves the exact range.
[[nodiscard]] std::vector<Rational> damping_series_coeffs(std::size_t order);

/// U(x) = k - ln(sqrt(c1 + 2 gamma0 int f dx))/m, which solves
/// dU/dx + (gamma0/m) f / (c1 + 2 gamma0 int f) = 0.
[[nodiscard]] Expression solve_potential(const Expression& f, const Expression& gamma0, const Expression& m,
                                         const Expression& c1, const Expression& k,
                                         const std::optional<Expression>& integral_of_f = {});

}  // namespace nullgauge
