#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "nullgauge/expr.hpp"

namespace nullgauge {

ParseError::ParseError(const std::string& what, std::size_t index)
    : std::runtime_error(what + " at offset " + std::to_string(index + 1)), offset_(index + 1) {}

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind = Tok::end;
  std::size_t offset = 0;
  std::string text;
  Constant value = Rational(0);
  bool integer = false;
};

// Reads a decimal literal. Exact when mantissa * 10^exponent fits a 64-bit
// rational, a double otherwise.
Constant read_decimal(std::string_view digits_int, std::string_view digits_frac, long long exponent,
                      std::string_view full) {
  __int128 mantissa = 0;
  bool exact = true;
  auto push_digit = [&](char c) {
    if (!exact) return;
    mantissa = mantissa * 10 + (c - '0');
    if (mantissa > std::numeric_limits<std::int64_t>::max()) exact = false;
  };
  for (char c : digits_int) push_digit(c);
  for (char c : digits_frac) push_digit(c);
  long long scale = exponent - static_cast<long long>(digits_frac.size());
  if (exact && std::abs(scale) <= 18) {
    __int128 p = 1;
    for (long long i = 0; i < std::abs(scale); ++i) p *= 10;
    if (scale >= 0) {
      const __int128 v = mantissa * p;
      if (v <= std::numeric_limits<std::int64_t>::max()) return Rational(static_cast<std::int64_t>(v));
    } else {
      return Rational(static_cast<std::int64_t>(mantissa), static_cast<std::int64_t>(p));
    }
  } else if (exact && mantissa == 0) {
    return Rational(0);
  }
  double v = 0.0;
  const auto res = std::from_chars(full.data(), full.data() + full.size(), v);
  if (res.ec == std::errc::result_out_of_range) v = std::numeric_limits<double>::infinity();
  return v;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      return number(t);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      t.kind = Tok::ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    ++pos_;
    switch (c) {
      case '+': t.kind = Tok::plus; break;
      case '-': t.kind = Tok::minus; break;
      case '*': t.kind = Tok::star; break;
      case '/': t.kind = Tok::slash; break;
      case '^': t.kind = Tok::caret; break;
      case '(': t.kind = Tok::lparen; break;
      case ')': t.kind = Tok::rparen; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", t.offset);
    }
    return t;
  }

 private:
  Token number(Token t) {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return src_.substr(s, pos_ - s);
    };
    const std::string_view int_part = digits();
    std::string_view frac_part;
    bool had_point = false;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      had_point = true;
      ++pos_;
      frac_part = digits();
    }
    long long exponent = 0;
    bool had_exp = false;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        had_exp = true;
        const bool negative = src_[pos_ + 1] == '-';
        pos_ = look;
        const std::string_view ed = digits();
        long long e = 0;
        for (char ch : ed) {
          e = e * 10 + (ch - '0');
          if (e > 100000) e = 100000;
        }
        exponent = negative ? -e : e;
      }
    }
    const std::string_view full = src_.substr(start, pos_ - start);
    t.kind = Tok::number;
    t.text = std::string(full);
    t.value = read_decimal(int_part, frac_part, exponent, full);
    t.integer = !had_point && !had_exp && std::holds_alternative<Rational>(t.value);
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

struct Operand {
  Expression expr;
  // Integer literal written directly (possibly with leading minus signs), not
  // parenthesized. Two of these joined by '/' form an exact rational.
  bool bare_integer = false;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  Expression parse_all() {
    Expression e = expr();
    if (cur_.kind != Tok::end) throw ParseError("unexpected token '" + describe(cur_) + "'", cur_.offset);
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::number:
      case Tok::ident: return t.text;
      case Tok::plus: return "+";
      case Tok::minus: return "-";
      case Tok::star: return "*";
      case Tok::slash: return "/";
      case Tok::caret: return "^";
      case Tok::lparen: return "(";
      case Tok::rparen: return ")";
      case Tok::end: return "end of input";
    }
    return "?";
  }

  Expression expr() {
    Expression lhs = term();
    while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
      const BinaryOp op = cur_.kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
      advance();
      lhs = Expression::binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  Expression term() {
    Operand lhs = unary();
    while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
      const BinaryOp op = cur_.kind == Tok::star ? BinaryOp::mul : BinaryOp::div;
      advance();
      Operand rhs = unary();
      if (op == BinaryOp::div && lhs.bare_integer && rhs.bare_integer) {
        const Rational n = *lhs.expr.rational();
        const Rational d = *rhs.expr.rational();
        if (d.is_zero()) throw ParseError("zero denominator in rational literal", last_offset_);
        lhs = Operand{Expression::constant(Rational(n.num(), d.num())), false};
        continue;
      }
      lhs = Operand{Expression::binary(op, std::move(lhs.expr), std::move(rhs.expr)), false};
    }
    return lhs.expr;
  }

  Operand unary() {
    if (cur_.kind == Tok::minus) {
      advance();
      Operand inner = unary();
      return Operand{-inner.expr, inner.bare_integer};
    }
    return power();
  }

  Operand power() {
    last_offset_ = cur_.offset;
    Operand base = atom();
    if (cur_.kind == Tok::caret) {
      advance();
      Operand exponent = unary();
      return Operand{pow(base.expr, exponent.expr), false};
    }
    return base;
  }

  Operand atom() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::number: {
        advance();
        if (const auto* r = std::get_if<Rational>(&t.value)) return Operand{Expression::constant(*r), t.integer};
        if (!std::isfinite(std::get<double>(t.value))) throw ParseError("numeric literal out of range", t.offset);
        return Operand{Expression::real(std::get<double>(t.value)), false};
      }
      case Tok::ident: {
        advance();
        if (cur_.kind == Tok::lparen) {
          auto f = function_from_name(t.text);
          if (!f) throw ParseError("unknown function '" + t.text + "'", t.offset);
          advance();
          Expression arg = expr();
          expect_rparen();
          return Operand{call(*f, arg), false};
        }
        if (auto v = variable_from_name(t.text)) return Operand{Expression::variable(*v), false};
        return Operand{Expression::parameter(t.text), false};
      }
      case Tok::lparen: {
        advance();
        Expression inner = expr();
        expect_rparen();
        return Operand{inner, false};
      }
      default:
        throw ParseError("expected a number, name or '(' but found '" + describe(t) + "'", t.offset);
    }
  }

  void expect_rparen() {
    if (cur_.kind != Tok::rparen) throw ParseError("expected ')' but found '" + describe(cur_) + "'", cur_.offset);
    advance();
  }

  Lexer lexer_;
  Token cur_;
  std::size_t last_offset_ = 0;
};

// ---------------------------------------------------------------------------
// Rendering

constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecPrefix = 3;
constexpr int kPrecPower = 4;
constexpr int kPrecAtom = 5;

bool is_nonneg_integer_constant(const Expression& e) {
  auto r = e.rational();
  return r && r->is_integer() && !r->is_negative();
}

int precedence(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::constant: {
      const auto& c = e.constant_value();
      if (const auto* r = std::get_if<Rational>(&c)) {
        if (r->is_negative()) return kPrecSum;
        return r->is_integer() ? kPrecAtom : kPrecProduct;
      }
      return std::signbit(std::get<double>(c)) ? kPrecSum : kPrecAtom;
    }
    case NodeKind::parameter:
    case NodeKind::variable:
      return kPrecAtom;
    case NodeKind::unary:
      return e.function() == Function::neg ? kPrecPrefix : kPrecAtom;
    case NodeKind::binary:
      switch (e.op()) {
        case BinaryOp::add:
        case BinaryOp::sub: return kPrecSum;
        case BinaryOp::mul:
        case BinaryOp::div: return kPrecProduct;
        case BinaryOp::pow: return kPrecPower;
      }
  }
  return kPrecAtom;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void render_into(const Expression& e, std::string& out);

void render_wrapped(const Expression& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  render_into(e, out);
  if (wrap) out += ')';
}

void render_into(const Expression& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::constant: {
      const auto& c = e.constant_value();
      if (const auto* r = std::get_if<Rational>(&c)) {
        out += r->to_string();
      } else {
        out += format_double(std::get<double>(c));
      }
      return;
    }
    case NodeKind::parameter:
      out += e.parameter_name();
      return;
    case NodeKind::variable:
      out += variable_name(e.variable());
      return;
    case NodeKind::unary:
      if (e.function() == Function::neg) {
        out += '-';
        render_wrapped(e.child(), precedence(e.child()) < kPrecPrefix, out);
      } else {
        out += function_name(e.function());
        out += '(';
        render_into(e.child(), out);
        out += ')';
      }
      return;
    case NodeKind::binary: {
      const Expression& l = e.lhs();
      const Expression& r = e.rhs();
      switch (e.op()) {
        case BinaryOp::add:
        case BinaryOp::sub:
          render_wrapped(l, precedence(l) < kPrecSum, out);
          out += e.op() == BinaryOp::add ? " + " : " - ";
          render_wrapped(r, precedence(r) <= kPrecSum, out);
          return;
        case BinaryOp::mul:
        case BinaryOp::div: {
          render_wrapped(l, precedence(l) < kPrecProduct, out);
          out += e.op() == BinaryOp::mul ? '*' : '/';
          // "2/3" would read back as a single rational literal.
          const bool literal_clash = e.op() == BinaryOp::div && is_nonneg_integer_constant(l) &&
                                     is_nonneg_integer_constant(r);
          render_wrapped(r, precedence(r) <= kPrecProduct || literal_clash, out);
          return;
        }
        case BinaryOp::pow:
          render_wrapped(l, precedence(l) < kPrecAtom, out);
          out += '^';
          render_wrapped(r, precedence(r) < kPrecPrefix, out);
          return;
      }
    }
  }
}

}  // namespace

Expression parse(std::string_view text) { return Parser(text).parse_all(); }

std::string render(const Expression& e) {
  std::string out;
  render_into(e, out);
  return out;
}

Expression Expression::real(double value) {
  if (!std::isfinite(value)) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->value = value;
    return Expression(std::move(n));
  }
  const std::string text = format_double(std::fabs(value));
  Token t = Lexer(text).next();
  Expression magnitude;
  if (const auto* r = std::get_if<Rational>(&t.value)) {
    magnitude = constant(*r);
  } else {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->value = std::get<double>(t.value);
    magnitude = Expression(std::move(n));
  }
  return std::signbit(value) ? -magnitude : magnitude;
}

}  // namespace nullgauge
