#include <algorithm>
#include <cmath>
#include <numeric>

#include "nullgauge/expr.hpp"

namespace nullgauge {

namespace {

// A product in the form coeff * prod(base_i ^ exp_i).
struct Factor {
  Expression base;
  Rational exponent;
};

struct Product {
  Rational coeff{1};
  std::vector<Factor> factors;
};

// A sum in the form constant + sum(coeff_i * term_i), term_i a product with
// unit coefficient.
struct Term {
  Expression key;
  Product product;
};

Expression simplify_node(const Expression& e);

bool is_product_node(const Expression& e) {
  if (e.kind() == NodeKind::binary) return e.op() == BinaryOp::mul || e.op() == BinaryOp::div;
  return e.kind() == NodeKind::unary && e.function() == Function::neg;
}

std::optional<std::int64_t> small_integer(const Rational& r) {
  if (!r.is_integer() || r.num() > 64 || r.num() < -64) return std::nullopt;
  return r.num();
}

void push_factor(Product& p, const Expression& base, const Rational& exponent) {
  for (Factor& f : p.factors) {
    if (f.base == base) {
      if (auto sum = f.exponent.checked_add(exponent)) {
        f.exponent = *sum;
        return;
      }
    }
  }
  p.factors.push_back({base, exponent});
}

void flatten_product(const Expression& e, const Rational& mult, Product& p) {
  switch (e.kind()) {
    case NodeKind::constant: {
      if (auto r = e.rational(); r && mult.is_integer()) {
        if (auto powed = r->checked_pow(mult.num())) {
          if (auto next = p.coeff.checked_mul(*powed)) {
            p.coeff = *next;
            return;
          }
        }
      }
      push_factor(p, e, mult);
      return;
    }
    case NodeKind::unary:
      if (e.function() == Function::neg) {
        if (mult.is_integer() && mult.num() % 2 != 0) p.coeff = -p.coeff;
        if (mult.is_integer()) {
          flatten_product(e.child(), mult, p);
          return;
        }
      }
      push_factor(p, e, mult);
      return;
    case NodeKind::binary:
      if (e.op() == BinaryOp::mul || e.op() == BinaryOp::div) {
        if (!mult.is_integer()) {
          push_factor(p, e, mult);
          return;
        }
        flatten_product(e.lhs(), mult, p);
        flatten_product(e.rhs(), e.op() == BinaryOp::mul ? mult : -mult, p);
        return;
      }
      if (e.op() == BinaryOp::pow) {
        if (auto r = e.rhs().rational(); r && mult.is_integer()) {
          auto combined = r->checked_mul(mult);
          if (combined) {
            const bool nested_pow = e.lhs().kind() == NodeKind::binary && e.lhs().op() == BinaryOp::pow &&
                                    e.lhs().rhs().rational().has_value();
            if (is_product_node(e.lhs()) || nested_pow) {
              if (r->is_integer()) {
                flatten_product(e.lhs(), *combined, p);
                return;
              }
            } else {
              push_factor(p, e.lhs(), *combined);
              return;
            }
          }
        }
      }
      push_factor(p, e, mult);
      return;
    default:
      push_factor(p, e, mult);
      return;
  }
}

int factor_rank(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::constant: return 0;
    case NodeKind::parameter: return 1;
    case NodeKind::variable: return 2;
    case NodeKind::unary: return 3;
    case NodeKind::binary: return e.op() == BinaryOp::pow ? 4 : 5;
  }
  return 6;
}

Expression power_of(const Expression& base, const Rational& exponent) {
  if (exponent == Rational(1)) return base;
  return pow(base, Expression::constant(exponent));
}

Expression multiply_all(const std::vector<Expression>& items) {
  Expression acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) acc = acc * items[i];
  return acc;
}

Expression rebuild_product(Product p) {
  if (p.coeff.is_zero()) return Expression();
  std::erase_if(p.factors, [](const Factor& f) { return f.exponent.is_zero(); });
  if (p.factors.empty()) return Expression::constant(p.coeff);
  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(p.factors.size());
  for (std::size_t i = 0; i < p.factors.size(); ++i) keys.emplace_back(render(p.factors[i].base), i);
  std::stable_sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
    const int ra = factor_rank(p.factors[a.second].base);
    const int rb = factor_rank(p.factors[b.second].base);
    if (ra != rb) return ra < rb;
    return a.first < b.first;
  });

  std::vector<Expression> numer;
  std::vector<Expression> denom;
  const Rational mag = p.coeff.abs();
  if (mag.num() != 1) numer.push_back(Expression::integer(mag.num()));
  for (const auto& [key, idx] : keys) {
    const Factor& f = p.factors[idx];
    if (f.exponent.is_negative()) {
      denom.push_back(power_of(f.base, -f.exponent));
    } else {
      numer.push_back(power_of(f.base, f.exponent));
    }
  }
  if (mag.den() != 1) denom.push_back(Expression::integer(mag.den()));

  const Expression n = numer.empty() ? Expression::integer(1) : multiply_all(numer);
  const Expression out = denom.empty() ? n : n / multiply_all(denom);
  return p.coeff.is_negative() ? -out : out;
}

Expression canonical_product(const Expression& e) {
  Product p;
  flatten_product(e, Rational(1), p);
  return rebuild_product(std::move(p));
}

// Splits an already simplified term into its rational coefficient and the
// remaining unit-coefficient product.
Term split_term(const Expression& e) {
  Product p;
  flatten_product(e, Rational(1), p);
  std::erase_if(p.factors, [](const Factor& f) { return f.exponent.is_zero(); });
  Product unit = p;
  unit.coeff = Rational(1);
  return Term{rebuild_product(unit), p};
}

void flatten_sum(const Expression& e, bool negate, std::vector<Expression>& terms, std::vector<bool>& signs) {
  if (e.kind() == NodeKind::binary && (e.op() == BinaryOp::add || e.op() == BinaryOp::sub)) {
    flatten_sum(e.lhs(), negate, terms, signs);
    flatten_sum(e.rhs(), e.op() == BinaryOp::sub ? !negate : negate, terms, signs);
    return;
  }
  if (e.kind() == NodeKind::unary && e.function() == Function::neg && e.child().kind() == NodeKind::binary &&
      (e.child().op() == BinaryOp::add || e.child().op() == BinaryOp::sub)) {
    flatten_sum(e.child(), !negate, terms, signs);
    return;
  }
  terms.push_back(e);
  signs.push_back(negate);
}

Expression canonical_sum(const Expression& e) {
  std::vector<Expression> raw;
  std::vector<bool> signs;
  flatten_sum(e, false, raw, signs);

  Rational constant(0);
  std::vector<Term> terms;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Term t = split_term(raw[i]);
    if (signs[i]) t.product.coeff = -t.product.coeff;
    if (t.product.factors.empty()) {
      if (auto next = constant.checked_add(t.product.coeff)) {
        constant = *next;
        continue;
      }
    }
    bool merged = false;
    for (Term& existing : terms) {
      if (existing.key == t.key) {
        if (auto sum = existing.product.coeff.checked_add(t.product.coeff)) {
          existing.product.coeff = *sum;
          merged = true;
          break;
        }
      }
    }
    if (!merged) terms.push_back(std::move(t));
  }
  std::erase_if(terms, [](const Term& t) { return t.product.coeff.is_zero(); });

  std::optional<Expression> acc;
  auto append = [&](const Expression& magnitude, bool negative) {
    if (!acc) {
      acc = negative ? -magnitude : magnitude;
    } else {
      acc = negative ? *acc - magnitude : *acc + magnitude;
    }
  };
  for (const Term& t : terms) {
    Product mag = t.product;
    const bool negative = mag.coeff.is_negative();
    mag.coeff = mag.coeff.abs();
    append(rebuild_product(std::move(mag)), negative);
  }
  if (!constant.is_zero() || !acc) {
    if (!acc) return Expression::constant(constant);
    append(Expression::constant(constant.abs()), constant.is_negative());
  }
  return *acc;
}

std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r.is_negative()) return std::nullopt;
  auto root = [](std::int64_t v) -> std::optional<std::int64_t> {
    const auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (std::int64_t c = std::max<std::int64_t>(0, s - 1); c <= s + 1; ++c) {
      if (c * c == v) return c;
    }
    return std::nullopt;
  };
  auto n = root(r.num());
  auto d = root(r.den());
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

Expression simplify_unary(Function f, const Expression& c) {
  if (f == Function::neg) {
    if (c.is_constant()) return -c;
    if (c.kind() == NodeKind::binary && (c.op() == BinaryOp::add || c.op() == BinaryOp::sub)) {
      return canonical_sum(-c);
    }
    return canonical_product(-c);
  }
  if (auto r = c.rational()) {
    if (r->is_zero()) {
      switch (f) {
        case Function::sin:
        case Function::sinh:
        case Function::asinh:
        case Function::atan:
        case Function::sqrt:
          return Expression();
        case Function::cos:
        case Function::cosh:
        case Function::exp:
          return Expression::integer(1);
        default:
          break;
      }
    }
    if (f == Function::ln && *r == Rational(1)) return Expression();
    if (f == Function::sqrt) {
      if (auto s = exact_sqrt(*r)) return Expression::constant(*s);
    }
  }
  return call(f, c);
}

Expression simplify_pow(const Expression& base, const Expression& exponent) {
  if (exponent.is_zero()) return Expression::integer(1);
  if (exponent.is_one()) return base;
  if (base.is_one()) return Expression::integer(1);
  auto r = exponent.rational();
  if (base.is_zero() && r && !r->is_negative()) return Expression();
  if (auto b = base.rational(); b && r) {
    if (auto n = small_integer(*r)) {
      if (auto v = b->checked_pow(*n)) return Expression::constant(*v);
    }
  }
  if (r) return canonical_product(pow(base, exponent));
  return pow(base, exponent);
}

Expression simplify_node(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::constant:
    case NodeKind::parameter:
    case NodeKind::variable:
      return e;
    case NodeKind::unary:
      return simplify_unary(e.function(), simplify_node(e.child()));
    case NodeKind::binary: {
      const Expression l = simplify_node(e.lhs());
      const Expression r = simplify_node(e.rhs());
      switch (e.op()) {
        case BinaryOp::add:
        case BinaryOp::sub:
          return canonical_sum(Expression::binary(e.op(), l, r));
        case BinaryOp::mul:
        case BinaryOp::div:
          if (e.op() == BinaryOp::div && r.is_zero()) return l / r;
          return canonical_product(Expression::binary(e.op(), l, r));
        case BinaryOp::pow:
          return simplify_pow(l, r);
      }
    }
  }
  return e;
}

}  // namespace

Expression simplify(const Expression& e) { return simplify_node(e); }

}  // namespace nullgauge
