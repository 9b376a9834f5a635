#pragma once

// Literal grammar shared by polynomials, differential forms and sections:
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '&') factor)*
//   factor  := ('+' | '-') factor | primary ('^' INTEGER)?
//   primary := INTEGER | INTEGER '/' INTEGER | IDENT | '(' expr ')'
//
// Identifiers resolve to chart coordinates or to basis atoms (dx_i for
// forms, frame names for sections). `&` and `*` both multiply; products of
// basis atoms follow the wedge sign rule and are only legal for forms.

#include "poly.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace precourant {

/// Syntax error with a 0-based offset into the parsed literal.
class parse_error : public std::runtime_error {
public:
  parse_error(std::size_t position, std::string expected, const std::string& message)
      : std::runtime_error(message), position_(position), expected_(std::move(expected)) {}
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

private:
  std::size_t position_;
  std::string expected_;
};

namespace detail {

/// Linear combination keyed by a sorted tuple of basis atoms.
using Graded = std::map<std::vector<std::uint8_t>, Poly>;

enum class BasisMode { none, linear, exterior };

struct Symbols {
  const Chart* chart = nullptr;
  BasisMode mode = BasisMode::none;
  std::function<std::optional<std::size_t>(std::string_view)> basis;
};

class LiteralParser {
public:
  LiteralParser(std::string_view text, const Symbols& sym) : text_(text), sym_(sym) {}

  Graded parse() {
    next();
    Graded v = expr();
    if (tok_.kind != Tok::end) fail(tok_.pos, "operator or end of input", "unexpected '" + tok_.text + "'");
    return v;
  }

private:
  enum class Tok { number, ident, plus, minus, star, amp, caret, lparen, rparen, end };
  struct Token {
    Tok kind = Tok::end;
    std::size_t pos = 0;
    std::string text;
    Rational value;
  };

  std::string_view text_;
  const Symbols& sym_;
  std::size_t i_ = 0;
  Token tok_;

  [[noreturn]] void fail(std::size_t pos, const std::string& expected, const std::string& what) {
    throw parse_error(pos, expected, what + " (expected " + expected + ")");
  }

  static bool digit(char c) { return c >= '0' && c <= '9'; }
  static bool alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  void next() {
    while (i_ < text_.size() && (text_[i_] == ' ' || text_[i_] == '\t')) ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= text_.size()) {
      tok_.kind = Tok::end;
      return;
    }
    char c = text_[i_];
    if (digit(c)) {
      std::size_t s = i_;
      while (i_ < text_.size() && digit(text_[i_])) ++i_;
      std::string num(text_.substr(s, i_ - s));
      if (i_ + 1 < text_.size() && text_[i_] == '/' && digit(text_[i_ + 1])) {
        std::size_t d = ++i_;
        while (i_ < text_.size() && digit(text_[i_])) ++i_;
        std::string den(text_.substr(d, i_ - d));
        if (Rational(den) == 0) fail(d, "non-zero denominator", "zero denominator");
        num += "/" + den;
      }
      tok_.kind = Tok::number;
      tok_.text = num;
      tok_.value = Rational(num);
      tok_.value.canonicalize();
      return;
    }
    if (alpha(c)) {
      std::size_t s = i_;
      while (i_ < text_.size() && (alpha(text_[i_]) || digit(text_[i_]))) ++i_;
      tok_.kind = Tok::ident;
      tok_.text = std::string(text_.substr(s, i_ - s));
      return;
    }
    ++i_;
    tok_.text = std::string(1, c);
    switch (c) {
      case '+': tok_.kind = Tok::plus; return;
      case '-': tok_.kind = Tok::minus; return;
      case '*': tok_.kind = Tok::star; return;
      case '&': tok_.kind = Tok::amp; return;
      case '^': tok_.kind = Tok::caret; return;
      case '(': tok_.kind = Tok::lparen; return;
      case ')': tok_.kind = Tok::rparen; return;
      default: fail(tok_.pos, "number, identifier, operator or parenthesis", std::string("unexpected character '") + c + "'");
    }
  }

  static void add_into(Graded& a, const Graded& b, bool subtract) {
    for (const auto& [k, p] : b) {
      Poly& slot = a[k];
      slot = subtract ? slot - p : slot + p;
      if (slot.is_zero()) a.erase(k);
    }
  }

  Graded multiply(const Graded& a, const Graded& b, std::size_t pos) {
    Graded r;
    for (const auto& [ka, pa] : a)
      for (const auto& [kb, pb] : b) {
        std::vector<std::uint8_t> key;
        int sign = 1;
        if (!ka.empty() && !kb.empty()) {
          if (sym_.mode != BasisMode::exterior) fail(pos, "a coefficient factor", "product of two basis elements");
          // merge two increasing sequences, counting inversions
          std::size_t i = 0, j = 0;
          while (i < ka.size() || j < kb.size()) {
            if (j == kb.size() || (i < ka.size() && ka[i] < kb[j])) {
              key.push_back(ka[i++]);
            } else if (i == ka.size() || kb[j] < ka[i]) {
              if ((ka.size() - i) % 2) sign = -sign;
              key.push_back(kb[j++]);
            } else {
              sign = 0;
              break;
            }
          }
          if (sign == 0) continue;
        } else {
          key = ka.empty() ? kb : ka;
        }
        Poly prod = pa * pb;
        if (sign < 0) prod = -prod;
        Poly& slot = r[key];
        slot += prod;
        if (slot.is_zero()) r.erase(key);
      }
    return r;
  }

  Graded expr() {
    Graded v = term();
    while (tok_.kind == Tok::plus || tok_.kind == Tok::minus) {
      bool sub = tok_.kind == Tok::minus;
      next();
      add_into(v, term(), sub);
    }
    return v;
  }

  Graded term() {
    Graded v = factor();
    while (tok_.kind == Tok::star || tok_.kind == Tok::amp) {
      if (tok_.kind == Tok::amp && sym_.mode != BasisMode::exterior)
        fail(tok_.pos, "'*', '+', '-' or end of input", "wedge '&' is only valid in differential forms");
      std::size_t pos = tok_.pos;
      next();
      v = multiply(v, factor(), pos);
    }
    return v;
  }

  Graded factor() {
    if (tok_.kind == Tok::minus || tok_.kind == Tok::plus) {
      bool neg = tok_.kind == Tok::minus;
      next();
      Graded v = factor();
      if (neg)
        for (auto& [k, p] : v) p = -p;
      return v;
    }
    Graded base = primary();
    if (tok_.kind == Tok::caret) {
      std::size_t caret = tok_.pos;
      next();
      if (tok_.kind != Tok::number || tok_.text.find('/') != std::string::npos)
        fail(caret, "non-negative integer exponent after '^'", "malformed exponent");
      if (tok_.value > 1000) fail(tok_.pos, "exponent <= 1000", "exponent too large");
      unsigned n = static_cast<unsigned>(tok_.value.get_num().get_ui());
      next();
      if (base.size() > 1 || (base.size() == 1 && !base.begin()->first.empty()))
        fail(caret, "a polynomial base", "only polynomial factors can be raised to a power");
      Poly p = base.empty() ? Poly() : base.begin()->second;
      Graded r;
      Poly q = p.pow(n);
      if (!q.is_zero()) r[{}] = q;
      return r;
    }
    return base;
  }

  Graded primary() {
    Graded v;
    switch (tok_.kind) {
      case Tok::number: {
        if (tok_.value != 0) v[{}] = Poly(tok_.value);
        next();
        return v;
      }
      case Tok::ident: {
        auto idx = sym_.chart ? sym_.chart->index_of(tok_.text) : -1;
        if (idx >= 0) {
          v[{}] = Poly::var(static_cast<std::size_t>(idx));
        } else if (sym_.basis) {
          auto b = sym_.basis(tok_.text);
          if (!b) fail(tok_.pos, "a coordinate or basis name", "unknown identifier '" + tok_.text + "'");
          v[{static_cast<std::uint8_t>(*b)}] = Poly(1);
        } else {
          fail(tok_.pos, "a coordinate name", "unknown identifier '" + tok_.text + "'");
        }
        next();
        return v;
      }
      case Tok::lparen: {
        std::size_t open = tok_.pos;
        next();
        v = expr();
        if (tok_.kind != Tok::rparen) fail(tok_.pos, "')' closing the '(' at offset " + std::to_string(open), "unbalanced parenthesis");
        next();
        return v;
      }
      case Tok::end: fail(tok_.pos, "number, identifier or '('", "unexpected end of input");
      default: fail(tok_.pos, "number, identifier or '('", "unexpected '" + tok_.text + "'");
    }
  }
};

}  // namespace detail

/// Parses a polynomial literal such as `(3/2)*x1^2*x4 - x2`.
inline Poly parse_poly(std::string_view text, const Chart& chart) {
  detail::Symbols sym{&chart, detail::BasisMode::none, {}};
  auto g = detail::LiteralParser(text, sym).parse();
  return g.empty() ? Poly() : g.begin()->second;
}

}  // namespace precourant
