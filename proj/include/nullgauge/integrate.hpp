#pragma once

#include <optional>

#include "nullgauge/expr.hpp"

namespace nullgauge {

/// Antiderivative with respect to `v` for polynomials in `v` (coefficients may
/// be any v-free expressions) plus sin/cos/exp of arguments linear in `v`, and
/// sums and constant multiples of those. The integration constant is zero.
/// nullopt when the integrand is outside that set.
[[nodiscard]] std::optional<Expression> antiderivative(const Expression& e, Variable v);

}  // namespace nullgauge
