#pragma once

// Partial and total time derivatives and the Euler-Lagrange operator
// EL[L] = d/dt(dL/dxdot) - dL/dx.

#include <string_view>

#include "nullgauge/expr.hpp"

namespace nullgauge {

/// Exact symbolic derivative followed by light simplification.
[[nodiscard]] Expression partial(const Expression& e, Variable v);

/// Same as partial() but the symbol may also be a parameter name, which lets
/// callers differentiate a function of a formal argument.
[[nodiscard]] Expression derivative(const Expression& e, std::string_view symbol);

/// d/dt along a trajectory: de/dt + xdot*de/dx + xddot*de/dxdot.
/// Throws std::invalid_argument when `e` already contains xddot.
[[nodiscard]] Expression total_time_derivative(const Expression& e);

struct ElResidual {
  /// EL[L]; affine in xddot.
  Expression expression;
  /// dL/dxdot.
  Expression momentum;
  /// d2L/dxdot2, the coefficient of xddot in the residual.
  Expression mass;
  /// True when the mass vanishes identically: structurally zero after
  /// simplification, or below 1e-12 at all 100 seeded sample points.
  bool degenerate = false;
};

/// Throws std::invalid_argument when L contains xddot.
[[nodiscard]] ElResidual euler_lagrange(const Expression& lagrangian);

/// EL[L] alone, without the degeneracy analysis.
[[nodiscard]] Expression euler_lagrange_expression(const Expression& lagrangian);

/// |central difference - eval(partial(e, v))| / max(1, |eval(partial(e, v))|).
[[nodiscard]] double finite_diff_check(const Expression& e, Variable v, const Bindings& point, double h);

}  // namespace nullgauge
