#pragma once

#include <cstdint>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>

namespace nullgauge {

class RationalOverflow : public std::overflow_error {
 public:
  RationalOverflow() : std::overflow_error("rational arithmetic overflow") {}
};

/// Exact rational over 64-bit integers, always stored in lowest terms with a
/// positive denominator. The checked_* operations return nullopt on overflow;
/// the operators throw RationalOverflow.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }
  [[nodiscard]] bool is_zero() const { return num_ == 0; }
  [[nodiscard]] bool is_negative() const { return num_ < 0; }
  [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] std::optional<Rational> checked_add(const Rational& o) const;
  [[nodiscard]] std::optional<Rational> checked_sub(const Rational& o) const;
  [[nodiscard]] std::optional<Rational> checked_mul(const Rational& o) const;
  [[nodiscard]] std::optional<Rational> checked_div(const Rational& o) const;
  [[nodiscard]] std::optional<Rational> checked_neg() const;
  /// Integer power; negative exponents invert. nullopt on overflow or 0^-n.
  [[nodiscard]] std::optional<Rational> checked_pow(std::int64_t e) const;
  [[nodiscard]] Rational abs() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a);

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static std::optional<Rational> from_wide(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace nullgauge
