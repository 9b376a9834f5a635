#pragma once

// Exact multivariate polynomials over the rationals on an affine chart.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace precourant {

using Rational = mpq_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Maximum number of chart coordinates supported by the packed monomial.
inline constexpr std::size_t kMaxVars = 16;

class chart_mismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

/// An affine coordinate chart: the base manifold seen through its coordinates.
class Chart {
public:
  Chart() = default;
  explicit Chart(std::vector<std::string> vars) : vars_(std::move(vars)) {
    if (vars_.empty()) throw std::invalid_argument("chart needs at least one coordinate");
    if (vars_.size() > kMaxVars)
      throw std::invalid_argument("chart has more than " + std::to_string(kMaxVars) + " coordinates");
    std::set<std::string> seen;
    for (const auto& v : vars_) {
      if (!is_identifier(v)) throw std::invalid_argument("invalid coordinate name '" + v + "'");
      if (!seen.insert(v).second) throw std::invalid_argument("duplicate coordinate name '" + v + "'");
    }
  }

  /// Chart with coordinates x1..xn.
  static Chart standard(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
    return Chart(std::move(v));
  }

  std::size_t dim() const { return vars_.size(); }
  const std::vector<std::string>& vars() const { return vars_; }
  const std::string& var(std::size_t i) const { return vars_.at(i); }

  std::ptrdiff_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
  }

  bool operator==(const Chart&) const = default;

private:
  std::vector<std::string> vars_;
};

/// Exponent vector packed in a fixed array; total degree cached for grlex.
struct Monomial {
  std::array<std::uint16_t, kMaxVars> e{};
  std::uint32_t deg = 0;

  static Monomial var(std::size_t i, std::uint16_t power = 1) {
    if (i >= kMaxVars) throw std::out_of_range("variable index out of range");
    Monomial m;
    m.e[i] = power;
    m.deg = power;
    return m;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      std::uint32_t s = std::uint32_t(a.e[i]) + b.e[i];
      if (s > 0xFFFF) throw std::overflow_error("monomial exponent overflow");
      m.e[i] = static_cast<std::uint16_t>(s);
    }
    m.deg = a.deg + b.deg;
    return m;
  }

  bool operator==(const Monomial& o) const { return deg == o.deg && e == o.e; }

  /// Graded lexicographic order with x1 > x2 > ... .
  friend bool grlex_greater(const Monomial& a, const Monomial& b) {
    if (a.deg != b.deg) return a.deg > b.deg;
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
    return false;
  }
};

/// Sparse polynomial with rational coefficients. Terms are kept sorted in
/// decreasing grlex order with no zero coefficients, so equal polynomials
/// have identical representations.
class Poly {
public:
  struct Term {
    Monomial m;
    Rational c;
  };

  Poly() = default;
  Poly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_.push_back({Monomial{}, c});
  }
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Poly(int c) : Poly(Rational(c)) {}   // NOLINT(google-explicit-constructor)

  static Poly var(std::size_t i) { return monomial(Monomial::var(i), 1); }
  static Poly monomial(const Monomial& m, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_.push_back({m, c});
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.deg == 0); }
  Rational constant_value() const {
    if (!terms_.empty() && terms_.back().m.deg == 0) return terms_.back().c;
    return 0;
  }
  std::uint32_t degree() const { return terms_.empty() ? 0 : terms_.front().m.deg; }

  /// Highest variable index that occurs plus one.
  std::size_t used_vars() const {
    std::size_t n = 0;
    for (const auto& t : terms_)
      for (std::size_t i = kMaxVars; i > n; --i)
        if (t.m.e[i - 1] != 0) {
          n = i;
          break;
        }
    return n;
  }

  bool operator==(const Poly& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (!(terms_[i].m == o.terms_[i].m) || terms_[i].c != o.terms_[i].c) return false;
    return true;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.c = -t.c;
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
  friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }
  Poly& operator+=(const Poly& b) { return *this = merge(*this, b, false); }
  Poly& operator-=(const Poly& b) { return *this = merge(*this, b, true); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.terms_.size() == 1) return b.times_term(a.terms_[0]);
    if (b.terms_.size() == 1) return a.times_term(b.terms_[0]);
    std::vector<Term> prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) prod.push_back({s.m * t.m, s.c * t.c});
    std::sort(prod.begin(), prod.end(), [](const Term& x, const Term& y) { return grlex_greater(x.m, y.m); });
    Poly r;
    for (auto& t : prod) {
      if (!r.terms_.empty() && r.terms_.back().m == t.m)
        r.terms_.back().c += t.c;
      else
        r.terms_.push_back(std::move(t));
    }
    std::erase_if(r.terms_, [](const Term& t) { return t.c == 0; });
    return r;
  }
  Poly& operator*=(const Poly& b) { return *this = *this * b; }

  friend Poly operator*(const Rational& q, const Poly& p) {
    if (q == 0) return {};
    Poly r = p;
    for (auto& t : r.terms_) t.c *= q;
    return r;
  }

  Poly pow(unsigned n) const {
    Poly r(1), base = *this;
    while (n) {
      if (n & 1u) r *= base;
      n >>= 1u;
      if (n) base *= base;
    }
    return r;
  }

  /// Partial derivative with respect to coordinate i.
  Poly derivative(std::size_t i) const {
    Poly r;
    for (const auto& t : terms_) {
      if (t.m.e[i] == 0) continue;
      Term d{t.m, t.c * t.m.e[i]};
      --d.m.e[i];
      --d.m.deg;
      r.terms_.push_back(std::move(d));
    }
    return r;
  }

  Rational evaluate(std::span<const Rational> point) const {
    Rational sum = 0;
    for (const auto& t : terms_) {
      Rational v = t.c;
      for (std::size_t i = 0; i < kMaxVars; ++i) {
        if (t.m.e[i] == 0) continue;
        if (i >= point.size()) throw chart_mismatch("evaluation point has too few coordinates");
        for (unsigned k = 0; k < t.m.e[i]; ++k) v *= point[i];
      }
      sum += v;
    }
    return sum;
  }

  /// Canonical text form, e.g. `3/2*x1^2*x4 - x2`.
  std::string to_string(const Chart& chart) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : terms_) {
      Rational mag = abs(t.c);
      bool neg = t.c < 0;
      if (first)
        out += neg ? "-" : "";
      else
        out += neg ? " - " : " + ";
      first = false;
      std::string mono = monomial_string(t.m, chart);
      if (mono.empty())
        out += mag.get_str();
      else if (mag == 1)
        out += mono;
      else
        out += mag.get_str() + "*" + mono;
    }
    return out;
  }

  /// True when the printed form is a single factor that needs no parentheses
  /// when multiplied on the right by another factor.
  bool is_single_term() const { return terms_.size() == 1; }

private:
  std::vector<Term> terms_;

  static std::string monomial_string(const Monomial& m, const Chart& chart) {
    std::string s;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (m.e[i] == 0) continue;
      if (i >= chart.dim()) throw chart_mismatch("polynomial uses a coordinate outside the chart");
      if (!s.empty()) s += "*";
      s += chart.var(i);
      if (m.e[i] > 1) s += "^" + std::to_string(m.e[i]);
    }
    return s;
  }

  Poly times_term(const Term& u) const {
    Poly r;
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) r.terms_.push_back({t.m * u.m, t.c * u.c});
    return r;
  }

  static Poly merge(const Poly& a, const Poly& b, bool subtract) {
    Poly r;
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && grlex_greater(a.terms_[i].m, b.terms_[j].m))) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || grlex_greater(b.terms_[j].m, a.terms_[i].m)) {
        Term t = b.terms_[j++];
        if (subtract) t.c = -t.c;
        r.terms_.push_back(std::move(t));
      } else {
        Rational c = subtract ? Rational(a.terms_[i].c - b.terms_[j].c) : Rational(a.terms_[i].c + b.terms_[j].c);
        if (c != 0) r.terms_.push_back({a.terms_[i].m, c});
        ++i;
        ++j;
      }
    }
    return r;
  }
};

inline Poly operator*(const Poly& p, const Rational& q) { return q * p; }

}  // namespace precourant
