#pragma once

// Courant vector bundles in a global frame: constant pseudo-metric,
// polynomial anchor, rho^*, D and pointwise kernel diagnostics.

#include "calculus.hpp"
#include "matrix.hpp"
#include "report.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace precourant {

class rank_mismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Section of the bundle: one polynomial coefficient per frame element.
class Section {
public:
  Section() = default;
  explicit Section(std::size_t rank) : c_(rank) {}
  explicit Section(std::vector<Poly> c) : c_(std::move(c)) {}

  static Section frame(std::size_t rank, std::size_t i) {
    Section s(rank);
    s.c_.at(i) = Poly(1);
    return s;
  }

  std::size_t rank() const { return c_.size(); }
  const Poly& operator[](std::size_t i) const { return c_[i]; }
  Poly& operator[](std::size_t i) { return c_[i]; }
  const std::vector<Poly>& coeffs() const { return c_; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Poly& p) { return p.is_zero(); });
  }
  bool operator==(const Section&) const = default;

  Section& operator+=(const Section& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!o.c_[i].is_zero()) c_[i] += o.c_[i];
    return *this;
  }
  Section& operator-=(const Section& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!o.c_[i].is_zero()) c_[i] -= o.c_[i];
    return *this;
  }
  friend Section operator+(Section a, const Section& b) { return a += b; }
  friend Section operator-(Section a, const Section& b) { return a -= b; }
  Section operator-() const {
    Section r = *this;
    for (auto& p : r.c_) p = -p;
    return r;
  }
  friend Section operator*(const Poly& f, const Section& s) {
    Section r(s.rank());
    if (f.is_zero()) return r;
    for (std::size_t i = 0; i < s.rank(); ++i)
      if (!s.c_[i].is_zero()) r.c_[i] = f * s.c_[i];
    return r;
  }
  friend Section operator*(const Rational& q, const Section& s) { return Poly(q) * s; }

private:
  std::vector<Poly> c_;

  void check(const Section& o) const {
    if (o.rank() != rank()) throw rank_mismatch("sections of different rank");
  }
};

/// Pseudo-Euclidean bundle E -> M with anchor rho, trivialized by a global
/// frame. Row i of the anchor is the vector field rho(frame_i).
class CourantBundle {
public:
  CourantBundle(Chart chart, RationalMatrix metric, PolyMatrix anchor, std::vector<std::string> frame_names = {})
      : chart_(std::move(chart)), metric_(std::move(metric)), anchor_(std::move(anchor)), names_(std::move(frame_names)) {
    const std::size_t r = metric_.rows();
    if (r == 0) throw std::invalid_argument("bundle rank must be positive");
    if (metric_.cols() != r) throw std::invalid_argument("metric must be square");
    if (anchor_.rows() != r) throw std::invalid_argument("anchor has " + std::to_string(anchor_.rows()) + " rows, rank is " + std::to_string(r));
    if (anchor_.cols() != chart_.dim())
      throw std::invalid_argument("anchor has " + std::to_string(anchor_.cols()) + " columns, chart dimension is " + std::to_string(chart_.dim()));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < chart_.dim(); ++j)
        if (anchor_(i, j).used_vars() > chart_.dim()) throw chart_mismatch("anchor entry uses a coordinate outside the chart");
    if (names_.empty())
      for (std::size_t i = 0; i < r; ++i) names_.push_back("e" + std::to_string(i + 1));
    if (names_.size() != r) throw std::invalid_argument("frame name count differs from rank");
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (!is_identifier(n)) throw std::invalid_argument("invalid frame name '" + n + "'");
      if (chart_.index_of(n) >= 0) throw std::invalid_argument("frame name '" + n + "' collides with a coordinate");
      if (!seen.insert(n).second) throw std::invalid_argument("duplicate frame name '" + n + "'");
    }
    metric_inv_ = inverse(metric_);
    if (metric_inv_) {
      PolyMatrix ginv(r, r);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) ginv(i, j) = Poly((*metric_inv_)(i, j));
      rho_star_ = ginv * anchor_;
    }
  }

  /// TM + T*M over the chart: frames p<x>, d<x>, pairing <p_i, d_j> = delta_ij.
  static CourantBundle standard(const Chart& chart) {
    const std::size_t n = chart.dim();
    RationalMatrix g(2 * n, 2 * n);
    PolyMatrix a(2 * n, n);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
      g(i, n + i) = 1;
      g(n + i, i) = 1;
      a(i, i) = Poly(1);
      names.push_back("p" + chart.var(i));
    }
    for (std::size_t i = 0; i < n; ++i) names.push_back("d" + chart.var(i));
    return CourantBundle(chart, g, a, names);
  }

  const Chart& chart() const { return chart_; }
  std::size_t dim() const { return chart_.dim(); }
  std::size_t rank() const { return metric_.rows(); }
  const RationalMatrix& metric() const { return metric_; }
  const PolyMatrix& anchor() const { return anchor_; }
  const std::vector<std::string>& frame_names() const { return names_; }
  bool metric_invertible() const { return metric_inv_.has_value(); }

  const RationalMatrix& metric_inverse() const {
    if (!metric_inv_) throw std::domain_error("metric is singular");
    return *metric_inv_;
  }
  /// g^{-1} A: column m is D x_m, row i is rho^* read in frame i.
  const PolyMatrix& rho_star_matrix() const {
    if (!metric_inv_) throw std::domain_error("metric is singular");
    return rho_star_;
  }

  std::ptrdiff_t frame_index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
  }

  Section zero() const { return Section(rank()); }
  Section frame(std::size_t i) const { return Section::frame(rank(), i); }
  std::vector<Section> frames() const {
    std::vector<Section> f;
    for (std::size_t i = 0; i < rank(); ++i) f.push_back(frame(i));
    return f;
  }

  void check(const Section& s) const {
    if (s.rank() != rank()) throw rank_mismatch("section rank " + std::to_string(s.rank()) + " differs from bundle rank " + std::to_string(rank()));
  }

  /// <e1, e2> = e1^T g e2.
  Poly pairing(const Section& a, const Section& b) const {
    check(a);
    check(b);
    Poly r;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (a[i].is_zero()) continue;
      Poly gb;
      for (std::size_t j = 0; j < rank(); ++j)
        if (metric_(i, j) != 0 && !b[j].is_zero()) gb += metric_(i, j) * b[j];
      if (!gb.is_zero()) r += a[i] * gb;
    }
    return r;
  }

  /// Frame coefficients of g e, i.e. the values <frame_i, e>.
  std::vector<Poly> lower(const Section& e) const {
    check(e);
    std::vector<Poly> r(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j)
        if (metric_(i, j) != 0 && !e[j].is_zero()) r[i] += metric_(i, j) * e[j];
    return r;
  }

  /// The section s with <s, frame_i> = values[i].
  Section raise(const std::vector<Poly>& values) const {
    const auto& gi = metric_inverse();
    Section s(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j)
        if (gi(i, j) != 0 && !values[j].is_zero()) s[i] += gi(i, j) * values[j];
    return s;
  }

  /// rho(e) = A^T e.
  VectorField anchor_apply(const Section& e) const {
    check(e);
    VectorField x(dim());
    for (std::size_t i = 0; i < rank(); ++i) {
      if (e[i].is_zero()) continue;
      for (std::size_t m = 0; m < dim(); ++m)
        if (!anchor_(i, m).is_zero()) x[m] += e[i] * anchor_(i, m);
    }
    return x;
  }

  /// rho^* of a covector given by its coordinate coefficients.
  Section rho_star(const std::vector<Poly>& xi) const {
    if (xi.size() != dim()) throw chart_mismatch("covector length differs from chart dimension");
    const auto& m = rho_star_matrix();
    Section s(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t k = 0; k < dim(); ++k)
        if (!m(i, k).is_zero() && !xi[k].is_zero()) s[i] += m(i, k) * xi[k];
    return s;
  }

  /// The unique s with <s, e> = xi(rho(e)).
  Section rho_star(const KForm& xi) const {
    if (xi.degree() != 1) throw std::invalid_argument("rho_star expects a 1-form");
    if (xi.dim() != dim()) throw chart_mismatch("1-form lives on a different chart");
    std::vector<Poly> c(dim());
    for (std::size_t k = 0; k < dim(); ++k) c[k] = xi.coefficient({static_cast<std::uint8_t>(k)});
    return rho_star(c);
  }

  /// D f = g^{-1} A grad f.
  Section dee(const Poly& f) const {
    if (f.used_vars() > dim()) throw chart_mismatch("function uses a coordinate outside the chart");
    std::vector<Poly> grad(dim());
    for (std::size_t k = 0; k < dim(); ++k) grad[k] = f.derivative(k);
    return rho_star(grad);
  }

  /// Canonical text, e.g. `(x1 + 1)*px1 - dx2`.
  std::string format(const Section& s) const {
    check(s);
    std::vector<std::pair<std::string, Poly>> parts;
    for (std::size_t i = 0; i < rank(); ++i) parts.emplace_back(names_[i], s[i]);
    return format_combination(parts, chart_);
  }
  std::string format(const Poly& p) const { return p.to_string(chart_); }

  /// Parses a section literal over the frame names, e.g. `x2*px1 + dx3`.
  Section parse_section(std::string_view text) const {
    detail::Symbols sym{&chart_, detail::BasisMode::linear, [this](std::string_view id) -> std::optional<std::size_t> {
                          auto i = frame_index(id);
                          if (i < 0) return std::nullopt;
                          return static_cast<std::size_t>(i);
                        }};
    auto g = detail::LiteralParser(text, sym).parse();
    Section s(rank());
    for (const auto& [k, c] : g) {
      if (k.empty()) throw parse_error(0, "frame names in every term", "section literal has a term without a frame");
      s[k[0]] = c;
    }
    return s;
  }

  bool operator==(const CourantBundle& o) const {
    return chart_ == o.chart_ && metric_ == o.metric_ && anchor_ == o.anchor_ && names_ == o.names_;
  }

private:
  Chart chart_;
  RationalMatrix metric_;
  PolyMatrix anchor_;
  std::vector<std::string> names_;
  std::optional<RationalMatrix> metric_inv_;
  PolyMatrix rho_star_;
};

inline Poly pairing(const CourantBundle& b, const Section& e1, const Section& e2) { return b.pairing(e1, e2); }
inline VectorField anchor_apply(const CourantBundle& b, const Section& e) { return b.anchor_apply(e); }
inline Section rho_star(const CourantBundle& b, const KForm& xi) { return b.rho_star(xi); }
inline Section dee(const CourantBundle& b, const Poly& f) { return b.dee(f); }

/// Checks that the metric is symmetric and invertible and that
/// A^T g^{-1} A = 0 (rho rho^* = 0).
inline Report validate_bundle(const CourantBundle& b) {
  Report rep("validate-bundle");
  const auto& g = b.metric();
  auto& sym = rep.check("metric-symmetric");
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t j = i + 1; j < b.rank(); ++j)
      sym.expect(g(i, j) == g(j, i), [&] {
        return Witness{"g[" + b.frame_names()[i] + "," + b.frame_names()[j] + "]", to_string(g(i, j)), to_string(g(j, i))};
      });
  auto& inv = rep.check("metric-invertible");
  inv.expect(b.metric_invertible(), [&] { return Witness{"metric", "rank " + std::to_string(rank(g)), std::to_string(b.rank())}; });
  if (!b.metric_invertible()) {
    rep.note("failure-code: singular-metric");
    return rep;
  }
  auto& rr = rep.check("rho-rho-star-zero");
  const auto& a = b.anchor();
  PolyMatrix prod = a.transpose() * b.rho_star_matrix();
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      rr.expect(prod(i, j).is_zero(), [&] {
        return Witness{"(A^T g^-1 A)[" + b.chart().var(i) + "," + b.chart().var(j) + "]", b.format(prod(i, j)), "0"};
      });
  return rep;
}

/// At each rational point, computes K = Ker rho_p and checks K^perp inside K.
inline Report kernel_coisotropy_check(const CourantBundle& b, const std::vector<std::vector<Rational>>& points) {
  if (points.empty()) throw std::invalid_argument("coisotropy check needs at least one point");
  Report rep("kernel-coisotropy");
  auto& chk = rep.check("kernel-coisotropic");
  for (const auto& p : points) {
    if (p.size() != b.dim()) throw chart_mismatch("sample point has the wrong number of coordinates");
    RationalMatrix a = evaluate(b.anchor(), p);
    std::string at = "(";
    for (std::size_t i = 0; i < p.size(); ++i) at += (i ? "," : "") + to_string(p[i]);
    at += ")";
    rep.note("anchor-rank at " + at + ": " + std::to_string(rank(a)));
    auto ker = nullspace(a.transpose());
    // K^perp = { w : v^T g w = 0 for v in K }
    RationalMatrix kg(ker.size(), b.rank());
    for (std::size_t r = 0; r < ker.size(); ++r)
      for (std::size_t j = 0; j < b.rank(); ++j)
        for (std::size_t i = 0; i < b.rank(); ++i) kg(r, j) += ker[r][i] * b.metric()(i, j);
    auto perp = ker.empty() ? std::vector<std::vector<Rational>>{} : nullspace(kg);
    if (ker.empty())
      for (std::size_t i = 0; i < b.rank(); ++i) {
        std::vector<Rational> e(b.rank(), Rational(0));
        e[i] = 1;
        perp.push_back(e);
      }
    bool inside = true;
    std::string bad;
    for (const auto& w : perp) {
      for (std::size_t m = 0; m < b.dim() && inside; ++m) {
        Rational s = 0;
        for (std::size_t i = 0; i < b.rank(); ++i) s += w[i] * a(i, m);
        if (s != 0) {
          inside = false;
          for (std::size_t i = 0; i < b.rank(); ++i) bad += (i ? "," : "") + to_string(w[i]);
        }
      }
      if (!inside) break;
    }
    chk.expect(inside, [&] { return Witness{"point " + at, "perp vector (" + bad + ") has nonzero anchor", "in kernel"}; });
  }
  return rep;
}

/// Constant sections spanning the constant part of Ker rho: vectors v with
/// sum_i v_i rho(frame_i) = 0 identically.
inline std::vector<Section> constant_kernel(const CourantBundle& b) {
  // one equation per (coordinate direction, monomial)
  std::vector<std::pair<std::size_t, Monomial>> keys;
  auto key_index = [&](std::size_t m, const Monomial& mono) {
    for (std::size_t k = 0; k < keys.size(); ++k)
      if (keys[k].first == m && keys[k].second == mono) return k;
    keys.emplace_back(m, mono);
    return keys.size() - 1;
  };
  std::vector<std::vector<std::pair<std::size_t, Rational>>> cols(b.rank());
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t m = 0; m < b.dim(); ++m)
      for (const auto& t : b.anchor()(i, m).terms()) cols[i].emplace_back(key_index(m, t.m), t.c);
  RationalMatrix sys(std::max<std::size_t>(keys.size(), 1), b.rank());
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (const auto& [k, c] : cols[i]) sys(k, i) += c;
  std::vector<Section> out;
  for (const auto& v : nullspace(sys)) {
    Section s(b.rank());
    for (std::size_t i = 0; i < b.rank(); ++i) s[i] = Poly(v[i]);
    out.push_back(s);
  }
  return out;
}

/// Checks rho(sigma_m) = d/dx_m for a supplied lift.
inline Report check_lift(const CourantBundle& b, const std::vector<Section>& lift) {
  Report rep("lift");
  auto& c = rep.check("lift-right-inverse");
  if (lift.size() != b.dim()) {
    c.fail(Witness{"lift", std::to_string(lift.size()) + " sections", std::to_string(b.dim()) + " sections"});
    return rep;
  }
  for (std::size_t m = 0; m < b.dim(); ++m) {
    auto x = b.anchor_apply(lift[m]);
    auto want = VectorField::coordinate(b.dim(), m);
    c.expect(x == want, [&] { return Witness{"rho(sigma_" + b.chart().var(m) + ")", x.to_string(b.chart()), want.to_string(b.chart())}; });
  }
  return rep;
}

/// Sections spanning Ker rho over functions. With a lift sigma (rho sigma_m =
/// d/dx_m) these are frame_a - sum_m rho(frame_a)_m sigma_m; otherwise the
/// constant kernel together with D x_m.
inline std::vector<Section> kernel_generators(const CourantBundle& b, const std::vector<Section>* lift = nullptr) {
  std::vector<Section> out;
  if (lift) {
    for (std::size_t a = 0; a < b.rank(); ++a) {
      Section k = b.frame(a);
      for (std::size_t m = 0; m < b.dim(); ++m)
        if (!b.anchor()(a, m).is_zero()) k -= b.anchor()(a, m) * (*lift)[m];
      if (!k.is_zero() && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
    return out;
  }
  out = constant_kernel(b);
  for (std::size_t m = 0; m < b.dim(); ++m) {
    Section d = b.dee(Poly::var(m));
    if (!d.is_zero() && std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  }
  return out;
}

/// Membership in rho^*(T^*M) = (Ker rho)^perp. With a lift the test is
/// s == rho^*(xi) for xi_m = <s, sigma_m>; otherwise s must pair to zero
/// with the kernel generators.
inline bool in_rho_star_image(const CourantBundle& b, const Section& s, const std::vector<Section>* lift,
                              const std::vector<Section>& kernel) {
  if (lift) {
    std::vector<Poly> xi(b.dim());
    for (std::size_t m = 0; m < b.dim(); ++m) xi[m] = b.pairing(s, (*lift)[m]);
    return b.rho_star(xi) == s;
  }
  return std::all_of(kernel.begin(), kernel.end(), [&](const Section& k) { return b.pairing(s, k).is_zero(); });
}

}  // namespace precourant
