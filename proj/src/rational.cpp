#include "nullgauge/rational.hpp"

#include <limits>

namespace nullgauge {

namespace {

__int128 wide_gcd(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

bool fits(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  auto r = from_wide(n, d);
  if (!r) throw RationalOverflow();
  *this = *r;
}

std::optional<Rational> Rational::from_wide(__int128 n, __int128 d) {
  if (d == 0) return std::nullopt;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const __int128 g = wide_gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (!fits(n) || !fits(d)) return std::nullopt;
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::checked_add(const Rational& o) const {
  return from_wide(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                   static_cast<__int128>(den_) * o.den_);
}

std::optional<Rational> Rational::checked_sub(const Rational& o) const {
  return from_wide(static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_,
                   static_cast<__int128>(den_) * o.den_);
}

std::optional<Rational> Rational::checked_mul(const Rational& o) const {
  return from_wide(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

std::optional<Rational> Rational::checked_div(const Rational& o) const {
  if (o.num_ == 0) return std::nullopt;
  return from_wide(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}

std::optional<Rational> Rational::checked_neg() const { return from_wide(-static_cast<__int128>(num_), den_); }

std::optional<Rational> Rational::checked_pow(std::int64_t e) const {
  if (e < 0) {
    if (num_ == 0) return std::nullopt;
    auto inv = Rational(1).checked_div(*this);
    if (!inv) return std::nullopt;
    return inv->checked_pow(-e);
  }
  Rational acc(1);
  Rational base = *this;
  while (e > 0) {
    if (e & 1) {
      auto next = acc.checked_mul(base);
      if (!next) return std::nullopt;
      acc = *next;
    }
    e >>= 1;
    if (e > 0) {
      auto sq = base.checked_mul(base);
      if (!sq) return std::nullopt;
      base = *sq;
    }
  }
  return acc;
}

Rational Rational::abs() const {
  if (num_ >= 0) return *this;
  return -*this;
}

namespace {
Rational unwrap(std::optional<Rational> r) {
  if (!r) throw RationalOverflow();
  return *r;
}
}  // namespace

Rational operator+(const Rational& a, const Rational& b) { return unwrap(a.checked_add(b)); }
Rational operator-(const Rational& a, const Rational& b) { return unwrap(a.checked_sub(b)); }
Rational operator*(const Rational& a, const Rational& b) { return unwrap(a.checked_mul(b)); }
Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("rational division by zero");
  return unwrap(a.checked_div(b));
}
Rational operator-(const Rational& a) { return unwrap(a.checked_neg()); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace nullgauge
