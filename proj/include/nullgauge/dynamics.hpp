#pragma once

// Explicit accelerations from Lagrangians and gauges, fixed-step RK4
// integration, and trajectory comparison.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nullgauge/expr.hpp"
#include "nullgauge/gauge.hpp"
#include "nullgauge/nsl.hpp"

namespace nullgauge {

enum class Provenance { from_lagrangian, from_null, reference };

[[nodiscard]] std::string_view provenance_name(Provenance p);

struct AccelerationField {
  /// xddot as a function of (x, xdot, t) and parameters.
  Expression acceleration;
  /// Denominator of the acceleration; evaluation refuses points where its
  /// magnitude is below kMassGuard. Empty when there is none.
  std::optional<Expression> mass;
  Provenance provenance = Provenance::reference;
  /// Model name for reference fields.
  std::string label;
};

inline constexpr double kMassGuard = 1e-12;

class NullDegenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMass : public std::runtime_error {
 public:
  SingularMass(const std::string& what, State at) : std::runtime_error(what), at_(at) {}
  [[nodiscard]] const State& at() const { return at_; }

 private:
  State at_;
};

/// Solves EL[L] = 0 for xddot:
///   (dL/dx - d2L/dxdot dt - xdot d2L/dxdot dx) / (d2L/dxdot2).
/// Throws NullDegenerate when d2L/dxdot2 vanishes identically.
[[nodiscard]] AccelerationField eom_from_lagrangian(const Expression& lagrangian);

/// -(phi_xx xdot^2 + 2 phi_tx xdot + phi_tt) / phi_x. Throws
/// std::invalid_argument when the null Lagrangian has no gauge origin.
[[nodiscard]] AccelerationField eom_from_null(const NullLagrangian& n);

/// Closed-form target acceleration of a catalog model.
[[nodiscard]] AccelerationField reference_accel(const OscillatorModel& m);

/// Pointwise evaluation with the mass guard. Throws SingularMass or EvalError.
[[nodiscard]] double evaluate(const AccelerationField& f, const State& s, const Bindings& params);

struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double step = 0.0;
  std::string method = "rk4";
};

struct InitialData {
  double x0 = 0.0;
  double v0 = 0.0;
  double t0 = 0.0;
  double dt = 1e-3;
  double t_end = 1.0;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  [[nodiscard]] double time() const { return time_; }

 private:
  double time_;
};

/// Classical fixed-step RK4 on (x' = v, v' = a). When (t_end - t0)/dt is not
/// an integer the step shrinks to (t_end - t0)/ceil(...) so the grid stays
/// uniform and ends at t_end. Throws std::invalid_argument for bad steps or
/// unbound parameters, IntegrationError on non-finite state, a domain error
/// or a singular mass.
[[nodiscard]] Trajectory integrate(const AccelerationField& f, const InitialData& init, const Bindings& params);

/// Header `t,x,v`, 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& tr);

struct DeviationReport {
  double max_abs_x = 0.0;
  double max_abs_v = 0.0;
  /// Time of the largest position deviation.
  double time_of_max = 0.0;
};

/// Pointwise deviations. Throws std::invalid_argument when the grids differ.
[[nodiscard]] DeviationReport compare(const Trajectory& a, const Trajectory& b);

}  // namespace nullgauge
