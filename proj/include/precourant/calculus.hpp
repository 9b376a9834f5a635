#pragma once

// Vector fields as derivations and exterior differential forms with Cartan
// calculus on an affine chart.

#include "parse.hpp"
#include "poly.hpp"

#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <string>
#include <vector>

namespace precourant {

/// Prints sum_k c_k * basis_k, e.g. `(x1 + 1)*px1 - dx2`.
inline std::string format_combination(const std::vector<std::pair<std::string, Poly>>& parts, const Chart& chart) {
  std::string out;
  for (const auto& [basis, c] : parts) {
    if (c.is_zero()) continue;
    std::string coef = c.to_string(chart);
    bool neg = false;
    std::string body;
    if (c == Poly(1)) {
      body = basis;
    } else if (c == Poly(-1)) {
      neg = true;
      body = basis;
    } else if (c.is_single_term()) {
      neg = coef.front() == '-';
      body = (neg ? coef.substr(1) : coef) + "*" + basis;
    } else {
      body = "(" + coef + ")*" + basis;
    }
    if (out.empty())
      out = (neg ? "-" : "") + body;
    else
      out += (neg ? " - " : " + ") + body;
  }
  return out.empty() ? "0" : out;
}

/// Polynomial vector field sum_i coeffs[i] d/dx_i.
class VectorField {
public:
  VectorField() = default;
  explicit VectorField(std::size_t dim) : coeffs_(dim) {}
  explicit VectorField(std::vector<Poly> coeffs) : coeffs_(std::move(coeffs)) {}

  static VectorField coordinate(std::size_t dim, std::size_t i) {
    VectorField v(dim);
    v.coeffs_.at(i) = Poly(1);
    return v;
  }

  std::size_t dim() const { return coeffs_.size(); }
  const Poly& operator[](std::size_t i) const { return coeffs_[i]; }
  Poly& operator[](std::size_t i) { return coeffs_[i]; }
  const std::vector<Poly>& coeffs() const { return coeffs_; }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Poly& p) { return p.is_zero(); });
  }

  /// X(f) = sum_i X_i df/dx_i.
  Poly apply(const Poly& f) const {
    if (f.used_vars() > dim()) throw chart_mismatch("function uses coordinates outside the vector field's chart");
    Poly r;
    for (std::size_t i = 0; i < dim(); ++i)
      if (!coeffs_[i].is_zero()) r += coeffs_[i] * f.derivative(i);
    return r;
  }

  bool operator==(const VectorField&) const = default;

  friend VectorField operator+(VectorField a, const VectorField& b) {
    check_same(a, b);
    for (std::size_t i = 0; i < a.dim(); ++i) a.coeffs_[i] += b.coeffs_[i];
    return a;
  }
  friend VectorField operator-(VectorField a, const VectorField& b) {
    check_same(a, b);
    for (std::size_t i = 0; i < a.dim(); ++i) a.coeffs_[i] -= b.coeffs_[i];
    return a;
  }
  friend VectorField operator*(const Poly& f, VectorField a) {
    for (auto& c : a.coeffs_) c = f * c;
    return a;
  }

  std::string to_string(const Chart& chart) const {
    std::vector<std::pair<std::string, Poly>> parts;
    for (std::size_t i = 0; i < dim(); ++i) parts.emplace_back("p" + chart.var(i), coeffs_[i]);
    return format_combination(parts, chart);
  }

  static void check_same(const VectorField& a, const VectorField& b) {
    if (a.dim() != b.dim()) throw chart_mismatch("vector fields live on different charts");
  }

private:
  std::vector<Poly> coeffs_;
};

/// Commutator [X, Y], coefficient j is X(Y_j) - Y(X_j).
inline VectorField vf_bracket(const VectorField& x, const VectorField& y) {
  VectorField::check_same(x, y);
  VectorField r(x.dim());
  for (std::size_t j = 0; j < x.dim(); ++j) r[j] = x.apply(y[j]) - y.apply(x[j]);
  return r;
}

inline Poly vf_apply(const VectorField& x, const Poly& f) { return x.apply(f); }

/// Homogeneous differential k-form sum_I c_I dx_I over strictly increasing
/// index tuples I. Degrees above the chart dimension only hold the zero form.
class KForm {
public:
  using Index = std::vector<std::uint8_t>;

  KForm() = default;
  KForm(std::size_t dim, std::size_t degree) : dim_(dim), degree_(degree) {}

  static KForm function(std::size_t dim, const Poly& f) {
    KForm a(dim, 0);
    a.set({}, f);
    return a;
  }
  /// dx_i as a 1-form.
  static KForm differential(std::size_t dim, std::size_t i) {
    KForm a(dim, 1);
    a.set({static_cast<std::uint8_t>(i)}, Poly(1));
    return a;
  }

  std::size_t dim() const { return dim_; }
  std::size_t degree() const { return degree_; }
  const std::map<Index, Poly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficient on an increasing index tuple.
  Poly coefficient(const Index& idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? Poly() : it->second;
  }

  void set(const Index& idx, const Poly& c) {
    if (idx.size() != degree_) throw std::invalid_argument("index tuple length differs from form degree");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= dim_) throw chart_mismatch("form index outside the chart");
      if (k && idx[k - 1] >= idx[k]) throw std::invalid_argument("form index tuple not strictly increasing");
    }
    if (c.is_zero())
      terms_.erase(idx);
    else
      terms_[idx] = c;
  }

  void add(const Index& idx, const Poly& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
      set(idx, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  bool operator==(const KForm&) const = default;

  friend KForm operator+(KForm a, const KForm& b) {
    check_same(a, b);
    for (const auto& [k, c] : b.terms_) a.add(k, c);
    return a;
  }
  friend KForm operator-(KForm a, const KForm& b) {
    check_same(a, b);
    for (const auto& [k, c] : b.terms_) a.add(k, -c);
    return a;
  }
  KForm operator-() const {
    KForm r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
  }
  friend KForm operator*(const Poly& f, const KForm& a) {
    KForm r(a.dim_, a.degree_);
    for (const auto& [k, c] : a.terms_) r.add(k, f * c);
    return r;
  }

  /// Full evaluation a(X_1, ..., X_k) = sum_I c_I det[dx_{I_a}(X_b)].
  Poly evaluate(std::span<const VectorField> xs) const {
    if (xs.size() != degree_) throw std::invalid_argument("form evaluated on the wrong number of vector fields");
    for (const auto& x : xs)
      if (x.dim() != dim_) throw chart_mismatch("vector field and form live on different charts");
    Poly sum;
    std::vector<std::size_t> perm(degree_);
    for (const auto& [idx, c] : terms_) {
      std::iota(perm.begin(), perm.end(), 0);
      Poly det;
      do {
        Poly prod(1);
        for (std::size_t a = 0; a < degree_ && !prod.is_zero(); ++a) prod *= xs[perm[a]][idx[a]];
        if (prod.is_zero()) continue;
        det = permutation_sign(perm) > 0 ? det + prod : det - prod;
      } while (std::next_permutation(perm.begin(), perm.end()));
      sum += c * det;
    }
    return sum;
  }

  std::string to_string(const Chart& chart) const {
    if (degree_ == 0) return coefficient({}).to_string(chart);
    std::vector<std::pair<std::string, Poly>> parts;
    for (const auto& [idx, c] : terms_) {
      std::string basis;
      for (std::size_t k = 0; k < idx.size(); ++k) basis += (k ? "&d" : "d") + chart.var(idx[k]);
      parts.emplace_back(std::move(basis), c);
    }
    return format_combination(parts, chart);
  }

  static void check_same(const KForm& a, const KForm& b) {
    if (a.dim_ != b.dim_) throw chart_mismatch("forms live on different charts");
    if (a.degree_ != b.degree_) throw std::invalid_argument("forms of different degree");
  }

  static int permutation_sign(const std::vector<std::size_t>& p) {
    int s = 1;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j)
        if (p[i] > p[j]) s = -s;
    return s;
  }

private:
  std::size_t dim_ = 0;
  std::size_t degree_ = 0;
  std::map<Index, Poly> terms_;
};

/// Graded-commutative wedge product with Koszul signs.
inline KForm wedge(const KForm& a, const KForm& b) {
  if (a.dim() != b.dim()) throw chart_mismatch("forms live on different charts");
  KForm r(a.dim(), a.degree() + b.degree());
  for (const auto& [ia, ca] : a.terms())
    for (const auto& [ib, cb] : b.terms()) {
      KForm::Index key;
      int sign = 1;
      std::size_t i = 0, j = 0;
      bool repeated = false;
      while (i < ia.size() || j < ib.size()) {
        if (j == ib.size() || (i < ia.size() && ia[i] < ib[j])) {
          key.push_back(ia[i++]);
        } else if (i == ia.size() || ib[j] < ia[i]) {
          if ((ia.size() - i) % 2) sign = -sign;
          key.push_back(ib[j++]);
        } else {
          repeated = true;
          break;
        }
      }
      if (repeated) continue;
      Poly prod = ca * cb;
      r.add(key, sign > 0 ? prod : -prod);
    }
  return r;
}

/// Exterior derivative.
inline KForm ext_d(const KForm& a) {
  KForm r(a.dim(), a.degree() + 1);
  for (const auto& [idx, c] : a.terms())
    for (std::size_t m = 0; m < a.dim(); ++m) {
      Poly dc = c.derivative(m);
      if (dc.is_zero()) continue;
      // dx_m & dx_idx: m moves past every smaller index
      bool repeated = false;
      std::size_t before = 0;
      for (auto k : idx) {
        if (k == m) repeated = true;
        if (k < m) ++before;
      }
      if (repeated) continue;
      KForm::Index key = idx;
      key.insert(key.begin() + static_cast<std::ptrdiff_t>(before), static_cast<std::uint8_t>(m));
      r.add(key, before % 2 ? -dc : dc);
    }
  return r;
}

/// Interior product i_X a = a(X, ...), inserting X in the first slot.
inline KForm contract(const VectorField& x, const KForm& a) {
  if (a.degree() == 0) throw std::invalid_argument("cannot contract a 0-form");
  if (x.dim() != a.dim()) throw chart_mismatch("vector field and form live on different charts");
  KForm r(a.dim(), a.degree() - 1);
  for (const auto& [idx, c] : a.terms())
    for (std::size_t p = 0; p < idx.size(); ++p) {
      const Poly& xi = x[idx[p]];
      if (xi.is_zero()) continue;
      KForm::Index key;
      for (std::size_t q = 0; q < idx.size(); ++q)
        if (q != p) key.push_back(idx[q]);
      Poly term = xi * c;
      r.add(key, p % 2 ? -term : term);
    }
  return r;
}

/// i_{X1 & ... & Xk} a = a(X1, ..., Xk, ...).
inline KForm insert(std::span<const VectorField> xs, const KForm& a) {
  KForm r = a;
  for (const auto& x : xs) r = contract(x, r);
  return r;
}

/// L_X = i_X d + d i_X.
inline KForm lie_derivative(const VectorField& x, const KForm& a) {
  KForm r = contract(x, ext_d(a));
  if (a.degree() > 0) r = r + ext_d(contract(x, a));
  return r;
}

/// Parses a form literal such as `x4*dx1&dx2&dx3`; `d<coordinate>` denotes a
/// coordinate differential. The zero literal takes `degree` when given.
inline KForm parse_form(std::string_view text, const Chart& chart, std::optional<std::size_t> degree = std::nullopt) {
  detail::Symbols sym{&chart, detail::BasisMode::exterior, [&chart](std::string_view id) -> std::optional<std::size_t> {
                        if (id.size() < 2 || id[0] != 'd') return std::nullopt;
                        auto i = chart.index_of(id.substr(1));
                        if (i < 0) return std::nullopt;
                        return static_cast<std::size_t>(i);
                      }};
  auto g = detail::LiteralParser(text, sym).parse();
  std::optional<std::size_t> deg = degree;
  for (const auto& [k, c] : g) {
    if (deg && *deg != k.size())
      throw parse_error(0, "a homogeneous form of degree " + std::to_string(*deg),
                        "form literal has a term of degree " + std::to_string(k.size()));
    deg = k.size();
  }
  KForm a(chart.dim(), deg.value_or(0));
  for (const auto& [k, c] : g) a.set(k, c);
  return a;
}

}  // namespace precourant
