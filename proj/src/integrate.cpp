#include "nullgauge/integrate.hpp"

#include <map>

#include "nullgauge/variational.hpp"

namespace nullgauge {

namespace {

using Polynomial = std::map<int, Expression>;

constexpr int kMaxDegree = 32;

void accumulate(Polynomial& p, int degree, const Expression& c) {
  auto it = p.find(degree);
  if (it == p.end()) {
    p.emplace(degree, c);
  } else {
    it->second = it->second + c;
  }
}

std::optional<Polynomial> multiply(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [da, ca] : a) {
    for (const auto& [db, cb] : b) {
      if (da + db > kMaxDegree) return std::nullopt;
      accumulate(out, da + db, ca * cb);
    }
  }
  return out;
}

std::optional<Polynomial> as_polynomial(const Expression& e, Variable v) {
  if (!contains(e, v)) return Polynomial{{0, e}};
  switch (e.kind()) {
    case NodeKind::variable:
      return Polynomial{{1, num(1)}};
    case NodeKind::unary: {
      if (e.function() != Function::neg) return std::nullopt;
      auto inner = as_polynomial(e.child(), v);
      if (!inner) return std::nullopt;
      for (auto& [d, c] : *inner) c = -c;
      return inner;
    }
    case NodeKind::binary: {
      const BinaryOp op = e.op();
      if (op == BinaryOp::add || op == BinaryOp::sub) {
        auto l = as_polynomial(e.lhs(), v);
        auto r = as_polynomial(e.rhs(), v);
        if (!l || !r) return std::nullopt;
        for (const auto& [d, c] : *r) accumulate(*l, d, op == BinaryOp::add ? c : -c);
        return l;
      }
      if (op == BinaryOp::mul) {
        auto l = as_polynomial(e.lhs(), v);
        auto r = as_polynomial(e.rhs(), v);
        if (!l || !r) return std::nullopt;
        return multiply(*l, *r);
      }
      if (op == BinaryOp::div) {
        if (contains(e.rhs(), v)) return std::nullopt;
        auto l = as_polynomial(e.lhs(), v);
        if (!l) return std::nullopt;
        for (auto& [d, c] : *l) c = c / e.rhs();
        return l;
      }
      if (op == BinaryOp::pow) {
        auto n = e.rhs().rational();
        if (!n || !n->is_integer() || n->is_negative() || n->num() > kMaxDegree) return std::nullopt;
        auto base = as_polynomial(e.lhs(), v);
        if (!base) return std::nullopt;
        Polynomial acc{{0, num(1)}};
        for (std::int64_t i = 0; i < n->num(); ++i) {
          auto next = multiply(acc, *base);
          if (!next) return std::nullopt;
          acc = std::move(*next);
        }
        return acc;
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

// Slope k when `u` is k*v + c with k free of v.
std::optional<Expression> linear_slope(const Expression& u, Variable v) {
  auto p = as_polynomial(u, v);
  if (!p) return std::nullopt;
  std::optional<Expression> slope;
  for (const auto& [d, c] : *p) {
    if (d > 1 && !simplify(c).is_zero()) return std::nullopt;
    if (d == 1) slope = simplify(c);
  }
  if (!slope || slope->is_zero()) return std::nullopt;
  return slope;
}

std::optional<Expression> integrate_raw(const Expression& e, Variable v) {
  const Expression x = var(v);
  if (!contains(e, v)) return e * x;
  if (auto p = as_polynomial(e, v)) {
    Expression acc;
    for (const auto& [d, c] : *p) acc = acc + c * pow(x, num(d + 1)) / num(d + 1);
    return acc;
  }
  switch (e.kind()) {
    case NodeKind::unary: {
      if (e.function() == Function::neg) {
        auto inner = integrate_raw(e.child(), v);
        if (!inner) return std::nullopt;
        return -*inner;
      }
      auto k = linear_slope(e.child(), v);
      if (!k) return std::nullopt;
      switch (e.function()) {
        case Function::sin: return -call(Function::cos, e.child()) / *k;
        case Function::cos: return call(Function::sin, e.child()) / *k;
        case Function::exp: return call(Function::exp, e.child()) / *k;
        case Function::sinh: return call(Function::cosh, e.child()) / *k;
        case Function::cosh: return call(Function::sinh, e.child()) / *k;
        default: return std::nullopt;
      }
    }
    case NodeKind::binary: {
      const BinaryOp op = e.op();
      if (op == BinaryOp::add || op == BinaryOp::sub) {
        auto l = integrate_raw(e.lhs(), v);
        auto r = integrate_raw(e.rhs(), v);
        if (!l || !r) return std::nullopt;
        return op == BinaryOp::add ? *l + *r : *l - *r;
      }
      if (op == BinaryOp::mul) {
        if (!contains(e.lhs(), v)) {
          auto r = integrate_raw(e.rhs(), v);
          if (r) return e.lhs() * *r;
        } else if (!contains(e.rhs(), v)) {
          auto l = integrate_raw(e.lhs(), v);
          if (l) return *l * e.rhs();
        }
        return std::nullopt;
      }
      if (op == BinaryOp::div && !contains(e.rhs(), v)) {
        auto l = integrate_raw(e.lhs(), v);
        if (l) return *l / e.rhs();
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<Expression> antiderivative(const Expression& e, Variable v) {
  auto raw = integrate_raw(simplify(e), v);
  if (!raw) return std::nullopt;
  return simplify(*raw);
}

}  // namespace nullgauge
