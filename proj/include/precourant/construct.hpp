#pragma once

// Builders: (nabla, beta) pairs, quadratic Lie algebras and their doubles,
// twisted actions and transitive dissections TM + G + T*M.

#include "deform.hpp"

#include <array>
#include <numeric>
#include <set>

namespace precourant {

/// A builder precondition failed; carries the failing check.
class construction_error : public std::invalid_argument {
public:
  construction_error(std::string check, Witness w)
      : std::invalid_argument(check + ": " + w.where + ": " + w.lhs + " vs " + w.rhs), check_(std::move(check)), witness_(std::move(w)) {}
  const std::string& check() const { return check_; }
  const Witness& witness() const { return witness_; }

private:
  std::string check_;
  Witness witness_;
};

namespace detail {

inline void require(const Report& rep) {
  if (const auto* f = rep.first_failure()) throw construction_error(f->name, f->witness.value_or(Witness{}));
}

/// Component a(d_i1, ..., d_ik) on an arbitrary index tuple.
inline Poly form_component(const KForm& a, std::vector<std::size_t> idx) {
  std::vector<std::size_t> order(idx.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return idx[x] < idx[y]; });
  KForm::Index sorted;
  for (auto o : order) sorted.push_back(static_cast<std::uint8_t>(idx[o]));
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k] == sorted[k - 1]) return Poly();
  Poly c = a.coefficient(sorted);
  return KForm::permutation_sign(order) > 0 ? c : -c;
}

inline std::vector<std::vector<Rational>> default_points(std::size_t dim, std::uint64_t seed) {
  std::vector<std::vector<Rational>> pts{std::vector<Rational>(dim, Rational(0))};
  Sampler s(seed ^ 0x51ed270b27a1e4d1ULL);
  for (int k = 0; k < 3; ++k) pts.push_back(s.point(dim));
  return pts;
}

inline std::string point_string(const std::vector<Rational>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + to_string(p[i]);
  return s + ")";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Quadratic Lie algebras

class QuadraticLieAlgebra {
public:
  QuadraticLieAlgebra() = default;
  /// `structure[(i*m + j)*m + k]` is the coefficient of b_k in [b_i, b_j].
  QuadraticLieAlgebra(std::vector<std::string> names, std::vector<Rational> structure, RationalMatrix pairing)
      : names_(std::move(names)), c_(std::move(structure)), pairing_(std::move(pairing)) {
    const std::size_t m = names_.size();
    if (c_.size() != m * m * m) throw std::invalid_argument("structure constants must have dim^3 entries");
    if (pairing_.rows() != m || pairing_.cols() != m) throw std::invalid_argument("pairing must be dim x dim");
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (!is_identifier(n)) throw std::invalid_argument("invalid basis name '" + n + "'");
      if (!seen.insert(n).second) throw std::invalid_argument("duplicate basis name '" + n + "'");
    }
  }

  /// Zero bracket on the named basis.
  static QuadraticLieAlgebra abelian(std::vector<std::string> names, RationalMatrix pairing) {
    const std::size_t m = names.size();
    return QuadraticLieAlgebra(std::move(names), std::vector<Rational>(m * m * m, Rational(0)), std::move(pairing));
  }

  std::size_t dim() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const RationalMatrix& pairing() const { return pairing_; }
  const Rational& structure(std::size_t i, std::size_t j, std::size_t k) const { return c_.at((i * dim() + j) * dim() + k); }
  const std::vector<Rational>& structure() const { return c_; }

  std::vector<Rational> bracket(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    const std::size_t m = dim();
    std::vector<Rational> r(m, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (b[j] == 0) continue;
        for (std::size_t k = 0; k < m; ++k)
          if (structure(i, j, k) != 0) r[k] += a[i] * b[j] * structure(i, j, k);
      }
    }
    return r;
  }

  Rational pair(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    Rational s = 0;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) s += a[i] * pairing_(i, j) * b[j];
    return s;
  }

  std::vector<Rational> basis(std::size_t i) const {
    std::vector<Rational> v(dim(), Rational(0));
    v.at(i) = 1;
    return v;
  }

  std::string format(const std::vector<Rational>& v) const {
    std::vector<std::pair<std::string, Poly>> parts;
    for (std::size_t i = 0; i < dim(); ++i) parts.emplace_back(names_[i], Poly(v[i]));
    return format_combination(parts, Chart{});
  }

  bool operator==(const QuadraticLieAlgebra&) const = default;

private:
  std::vector<std::string> names_;
  std::vector<Rational> c_;
  RationalMatrix pairing_;
};

/// Antisymmetry and the Jacobi identity on basis triples.
inline Report validate_lie_algebra(const QuadraticLieAlgebra& g) {
  Report rep("validate-lie-algebra");
  const std::size_t m = g.dim();
  auto name = [&](std::initializer_list<std::size_t> xs) {
    std::string s = "(";
    bool first = true;
    for (auto x : xs) {
      s += (first ? "" : ", ") + g.names()[x];
      first = false;
    }
    return s + ")";
  };
  auto& anti = rep.check("antisymmetry");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      auto ij = g.bracket(g.basis(i), g.basis(j));
      auto ji = g.bracket(g.basis(j), g.basis(i));
      for (auto& x : ji) x = -x;
      anti.expect(ij == ji, [&] { return Witness{"[" + g.names()[i] + "," + g.names()[j] + "]", g.format(ij), g.format(ji)}; });
    }
  auto& jac = rep.check("jacobi");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        auto a = g.basis(i), b = g.basis(j), c = g.basis(k);
        auto l = g.bracket(a, g.bracket(b, c));
        auto r1 = g.bracket(g.bracket(a, b), c);
        auto r2 = g.bracket(b, g.bracket(a, c));
        std::vector<Rational> r(m);
        for (std::size_t t = 0; t < m; ++t) r[t] = r1[t] + r2[t];
        jac.expect(l == r, [&] { return Witness{"[a,[b,c]] at " + name({i, j, k}), g.format(l), g.format(r)}; });
      }
  return rep;
}

/// Lie algebra axioms plus a symmetric, invertible, ad-invariant pairing.
inline Report validate_quadratic_lie(const QuadraticLieAlgebra& g) {
  Report rep("validate-quadratic-lie");
  rep.merge(validate_lie_algebra(g));
  const std::size_t m = g.dim();
  const auto& p = g.pairing();
  auto& sym = rep.check("pairing-symmetric");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      sym.expect(p(i, j) == p(j, i), [&] {
        return Witness{"pairing(" + g.names()[i] + "," + g.names()[j] + ")", to_string(p(i, j)), to_string(p(j, i))};
      });
  auto& inv = rep.check("pairing-invertible");
  inv.expect(m == 0 || rank(p) == m, [&] { return Witness{"pairing rank", std::to_string(rank(p)), std::to_string(m)}; });
  auto& adinv = rep.check("ad-invariance");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        auto a = g.basis(i), b = g.basis(j), c = g.basis(k);
        Rational v = g.pair(g.bracket(a, b), c) + g.pair(b, g.bracket(a, c));
        adinv.expect(v == 0, [&] {
          return Witness{"([a,b],c) + (b,[a,c]) at (" + g.names()[i] + ", " + g.names()[j] + ", " + g.names()[k] + ")", to_string(v), "0"};
        });
      }
  return rep;
}

/// g + g^* with [A+xi, B+eta] = [A,B] + ad^*_A eta - ad^*_B xi and the
/// hyperbolic pairing (A+xi, B+eta) = xi(B) + eta(A). Dual basis vectors are
/// named `<name>_dual`. Only the Lie axioms of g are required.
inline QuadraticLieAlgebra lie_double(const QuadraticLieAlgebra& g) {
  detail::require(validate_lie_algebra(g));
  const std::size_t m = g.dim(), n = 2 * m;
  std::vector<std::string> names = g.names();
  for (const auto& s : g.names()) names.push_back(s + "_dual");
  std::vector<Rational> c(n * n * n, Rational(0));
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> Rational& { return c[(i * n + j) * n + k]; };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        const Rational& cijk = g.structure(i, j, k);
        if (cijk == 0) continue;
        at(i, j, k) = cijk;
        // ad^*_{b_i} b^k = -sum_j c_ijk b^j
        at(i, m + k, m + j) -= cijk;
        at(m + k, i, m + j) += cijk;
      }
  RationalMatrix p(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    p(i, m + i) = 1;
    p(m + i, i) = 1;
  }
  return QuadraticLieAlgebra(std::move(names), std::move(c), std::move(p));
}

// ---------------------------------------------------------------------------
// Twisted actions on M x g

struct TwistedAction {
  QuadraticLieAlgebra algebra;
  Chart chart;
  PolyMatrix rho;          // row i is rho(b_i)
  std::vector<Section> k;  // k[i*m + j] = k(b_i, b_j)

  CourantBundle bundle() const { return CourantBundle(chart, algebra.pairing(), rho, algebra.names()); }

  const Section& k_at(std::size_t i, std::size_t j) const { return k.at(i * algebra.dim() + j); }

  /// k extended function-bilinearly.
  Section k_apply(const Section& a, const Section& b) const {
    const std::size_t m = algebra.dim();
    Section out(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (!b[j].is_zero() && !k_at(i, j).is_zero()) out += (a[i] * b[j]) * k_at(i, j);
    }
    return out;
  }

  /// Pointwise bracket of g.
  Section pointwise_bracket(const Section& a, const Section& b) const {
    const std::size_t m = algebra.dim();
    Section out(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (b[j].is_zero()) continue;
        for (std::size_t t = 0; t < m; ++t)
          if (algebra.structure(i, j, t) != 0) out[t] += algebra.structure(i, j, t) * (a[i] * b[j]);
      }
    }
    return out;
  }

  /// [e1,e2]_{M x g} = L_{rho e1} e2 - L_{rho e2} e1 + [e1,e2]_g.
  Section action_bracket(const Section& a, const Section& b) const {
    auto bun = bundle();
    VectorField x = bun.anchor_apply(a), y = bun.anchor_apply(b);
    Section out = pointwise_bracket(a, b);
    for (std::size_t i = 0; i < algebra.dim(); ++i) out[i] += x.apply(b[i]) - y.apply(a[i]);
    return out;
  }
};

/// The section s with <s, e> = <c, k(a, e)>.
inline Section twisted_contract(const TwistedAction& ta, const CourantBundle& b, const Section& a, const Section& c) {
  std::vector<Poly> vals(b.rank());
  for (std::size_t l = 0; l < b.rank(); ++l) vals[l] = b.pairing(c, ta.k_apply(a, b.frame(l)));
  return b.raise(vals);
}

/// e1 o e2 = [e1,e2]_{M x g} + k(e1,e2) - <e2,k(e1,.)> + <e1,k(e2,.)> + rho^*<d e1, e2>,
/// with <rho^*<d e1,e2>, e> = <d_{rho e} e1, e2> for the componentwise derivative.
inline Section twisted_action_bracket(const TwistedAction& ta, const Section& a, const Section& c) {
  auto b = ta.bundle();
  Section out = ta.action_bracket(a, c) + ta.k_apply(a, c) - twisted_contract(ta, b, a, c) + twisted_contract(ta, b, c, a);
  std::vector<Poly> xi(b.dim());
  for (std::size_t m = 0; m < b.dim(); ++m) {
    Section da(b.rank());
    for (std::size_t i = 0; i < b.rank(); ++i) da[i] = a[i].derivative(m);
    xi[m] = b.pairing(da, c);
  }
  return out + b.rho_star(xi);
}

/// Antisymmetry of k, k(Ker rho, .) = 0 and coisotropy at the points, the
/// compatibility rho([e1,e2]_{M x g}) = [rho e1, rho e2] - rho k(e1,e2) on
/// basis pairs and seeded function multiples, and the quadratic algebra.
inline Report validate_twisted_action(const TwistedAction& ta, std::vector<std::vector<Rational>> points = {}, const SampleConfig& cfg = {}) {
  Report rep("validate-twisted-action");
  const std::size_t m = ta.algebra.dim();
  if (ta.k.size() != m * m) throw std::invalid_argument("k table must have dim^2 entries");
  for (const auto& s : ta.k)
    if (s.rank() != m) throw rank_mismatch("k value has the wrong rank");
  rep.merge(validate_quadratic_lie(ta.algebra), "algebra-");
  if (!ta.algebra.pairing().rows() || rank(ta.algebra.pairing()) != m) return rep;
  auto b = ta.bundle();
  if (points.empty()) points = detail::default_points(b.dim(), cfg.seed);

  auto& anti = rep.check("k-antisymmetric");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      Section a = ta.k_at(i, j), c = -ta.k_at(j, i);
      anti.expect(a == c, [&] { return Witness{"k" + detail::frame_args(b, {i, j}), b.format(a), b.format(c)}; });
    }

  auto& ker = rep.check("k-vanishes-on-kernel");
  for (const auto& p : points) {
    if (p.size() != b.dim()) throw chart_mismatch("sample point has the wrong number of coordinates");
    RationalMatrix a = evaluate(b.anchor(), p);
    for (const auto& v : nullspace(a.transpose()))
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t t = 0; t < m; ++t) {
          Rational s = 0;
          for (std::size_t i = 0; i < m; ++i)
            if (v[i] != 0) s += v[i] * ta.k_at(i, j)[t].evaluate(p);
          ker.expect(s == 0, [&] {
            return Witness{"k(" + ta.algebra.format(v) + ", " + b.frame_names()[j] + ") at " + detail::point_string(p),
                           b.frame_names()[t] + "-component " + to_string(s), "0"};
          });
        }
  }
  rep.merge(kernel_coisotropy_check(b, points));

  auto& eqb = rep.check("anchor-compatibility");
  auto test = [&](const Section& e1, const Section& e2, const std::string& where) {
    VectorField l = b.anchor_apply(ta.action_bracket(e1, e2));
    VectorField r = vf_bracket(b.anchor_apply(e1), b.anchor_apply(e2)) - b.anchor_apply(ta.k_apply(e1, e2));
    eqb.expect(l == r, [&] { return Witness{where, l.to_string(b.chart()), r.to_string(b.chart())}; });
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) test(b.frame(i), b.frame(j), "basis " + detail::frame_args(b, {i, j}));
  Sampler s(cfg.seed ^ 0x2545f4914f6cdd1dULL);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Poly f = s.nonzero_poly(b.dim(), cfg.max_degree), g = s.nonzero_poly(b.dim(), cfg.max_degree);
    std::size_t i = s.below(m), j = s.below(m);
    Section e1 = f * b.frame(i), e2 = g * b.frame(j);
    test(e1, e2, "trial " + std::to_string(t) + " " + detail::args(b, {&e1, &e2}));
  }
  return rep;
}

/// Pre-Courant structure on M x g from a valid twisted action.
inline PreCourantAlgebroid from_twisted_action(const TwistedAction& ta, std::vector<std::vector<Rational>> points = {}, const SampleConfig& cfg = {}) {
  detail::require(validate_twisted_action(ta, std::move(points), cfg));
  auto b = ta.bundle();
  const std::size_t m = b.rank();
  std::vector<Section> t;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) t.push_back(twisted_action_bracket(ta, b.frame(i), b.frame(j)));
  return PreCourantAlgebroid(b, std::move(t));
}

// ---------------------------------------------------------------------------
// (nabla, beta) pairs

/// gamma[m](i, j) is the coefficient of frame_i in nabla_{d/dx_m} frame_j. An
/// empty vector is the flat connection.
struct Connection {
  std::vector<PolyMatrix> gamma;

  /// nabla_{d/dx_m} e.
  Section along(const CourantBundle& b, std::size_t m, const Section& e) const {
    Section out(b.rank());
    for (std::size_t i = 0; i < b.rank(); ++i) out[i] = e[i].derivative(m);
    if (gamma.empty()) return out;
    const auto& g = gamma.at(m);
    for (std::size_t i = 0; i < b.rank(); ++i)
      for (std::size_t j = 0; j < b.rank(); ++j)
        if (!g(i, j).is_zero() && !e[j].is_zero()) out[i] += g(i, j) * e[j];
    return out;
  }

  Section apply(const CourantBundle& b, const VectorField& x, const Section& e) const {
    Section out(b.rank());
    for (std::size_t m = 0; m < b.dim(); ++m)
      if (!x[m].is_zero()) out += x[m] * along(b, m, e);
    return out;
  }
};

inline void check_connection(const CourantBundle& b, const Connection& c) {
  if (c.gamma.empty()) return;
  if (c.gamma.size() != b.dim()) throw std::invalid_argument("connection needs one matrix per coordinate");
  for (const auto& g : c.gamma)
    if (g.rows() != b.rank() || g.cols() != b.rank()) throw std::invalid_argument("connection matrices must be rank x rank");
}

/// beta extended function-bilinearly from its frame table.
inline Section table_apply(const std::vector<Section>& t, std::size_t r, const Section& a, const Section& c) {
  Section out(r);
  for (std::size_t i = 0; i < r; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < r; ++j)
      if (!c[j].is_zero() && !t[i * r + j].is_zero()) out += (a[i] * c[j]) * t[i * r + j];
  }
  return out;
}

/// e1 o e2 = nabla_{rho e1} e2 - nabla_{rho e2} e1 + rho^*<nabla e1, e2> + beta(e1, e2).
inline Section connection_beta_bracket(const CourantBundle& b, const Connection& c, const std::vector<Section>& beta, const Section& e1,
                                       const Section& e2) {
  Section out = c.apply(b, b.anchor_apply(e1), e2) - c.apply(b, b.anchor_apply(e2), e1) + table_apply(beta, b.rank(), e1, e2);
  std::vector<Poly> xi(b.dim());
  for (std::size_t m = 0; m < b.dim(); ++m) xi[m] = b.pairing(c.along(b, m, e1), e2);
  return out + b.rho_star(xi);
}

/// Metric connection, beta totally skew and the anchor condition
/// rho(beta(e1,e2)) = [rho e1, rho e2] - rho(nabla_{rho e1} e2 - nabla_{rho e2} e1), on frames.
inline Report validate_connection_beta(const CourantBundle& b, const Connection& c, const std::vector<Section>& beta) {
  Report rep("validate-connection-beta");
  const std::size_t r = b.rank();
  check_connection(b, c);
  if (beta.size() != r * r) throw std::invalid_argument("beta table must have rank^2 entries");
  for (const auto& s : beta) b.check(s);
  auto f = b.frames();
  auto& met = rep.check("metric-connection");
  for (std::size_t m = 0; m < b.dim(); ++m)
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i; j < r; ++j) {
        Poly v = b.pairing(c.along(b, m, f[i]), f[j]) + b.pairing(f[i], c.along(b, m, f[j]));
        met.expect(v.is_zero(), [&] {
          return Witness{"<nabla_" + b.chart().var(m) + " e1, e2> + <e1, nabla_" + b.chart().var(m) + " e2> at " + detail::frame_args(b, {i, j}),
                         b.format(v), "0"};
        });
      }
  auto& skew = rep.check("beta-skew");
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k) {
        Poly v = b.pairing(beta[i * r + j], f[k]);
        Poly w1 = -b.pairing(beta[j * r + i], f[k]);
        Poly w2 = -b.pairing(beta[i * r + k], f[j]);
        skew.expect(v == w1 && v == w2, [&] {
          return Witness{"<beta" + detail::frame_args(b, {i, j}) + ", " + b.frame_names()[k] + ">", b.format(v), b.format(v == w1 ? w2 : w1)};
        });
      }
  auto& anc = rep.check("anchor-condition");
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      VectorField l = b.anchor_apply(beta[i * r + j]);
      Section nab = c.apply(b, b.anchor_apply(f[i]), f[j]) - c.apply(b, b.anchor_apply(f[j]), f[i]);
      VectorField rr = vf_bracket(b.anchor_apply(f[i]), b.anchor_apply(f[j])) - b.anchor_apply(nab);
      anc.expect(l == rr, [&] { return Witness{"rho beta" + detail::frame_args(b, {i, j}), l.to_string(b.chart()), rr.to_string(b.chart())}; });
    }
  return rep;
}

inline PreCourantAlgebroid from_connection_beta(const CourantBundle& b, const Connection& c, const std::vector<Section>& beta) {
  detail::require(validate_connection_beta(b, c, beta));
  auto f = b.frames();
  std::vector<Section> t;
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j) t.push_back(connection_beta_bracket(b, c, beta, f[i], f[j]));
  return PreCourantAlgebroid(b, std::move(t));
}

// ---------------------------------------------------------------------------
// Dissections TM + G + T*M

/// G-valued data are vectors of q polynomials in the G frame.
using GSection = std::vector<Poly>;

class DissectionData {
public:
  DissectionData(Chart chart, std::vector<std::string> names, RationalMatrix pairing)
      : chart_(std::move(chart)), names_(std::move(names)), pairing_(std::move(pairing)), psi_(chart_.dim(), 3) {
    const std::size_t n = chart_.dim(), q = names_.size();
    if (pairing_.rows() != q || pairing_.cols() != q) throw std::invalid_argument("G pairing must be rank x rank");
    gamma_.assign(n, PolyMatrix(q, q));
    R_.assign(n * n, GSection(q));
    bracket_.assign(q * q, GSection(q));
  }

  const Chart& chart() const { return chart_; }
  std::size_t dim() const { return chart_.dim(); }
  std::size_t rank() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const RationalMatrix& pairing() const { return pairing_; }

  /// gamma(m)(b, a) is the coefficient of r_b in nabla_{d/dx_m} r_a.
  const PolyMatrix& gamma(std::size_t m) const { return gamma_.at(m); }
  void set_gamma(std::size_t m, PolyMatrix g) {
    if (g.rows() != rank() || g.cols() != rank()) throw std::invalid_argument("connection matrix must be rank x rank");
    gamma_.at(m) = std::move(g);
  }

  const GSection& curvature(std::size_t i, std::size_t j) const { return R_.at(i * dim() + j); }
  /// Sets R(d_i, d_j) and R(d_j, d_i) = -R(d_i, d_j).
  void set_curvature(std::size_t i, std::size_t j, GSection v) {
    if (i == j) throw std::invalid_argument("R is alternating; R(d_i, d_i) = 0");
    check(v);
    GSection neg = v;
    for (auto& c : neg) c = -c;
    R_.at(i * dim() + j) = std::move(v);
    R_.at(j * dim() + i) = std::move(neg);
  }

  const KForm& psi() const { return psi_; }
  void set_psi(KForm p) {
    if (p.degree() != 3 || p.dim() != dim()) throw std::invalid_argument("Psi must be a 3-form on the chart");
    psi_ = std::move(p);
  }

  const GSection& fiber_bracket(std::size_t a, std::size_t b) const { return bracket_.at(a * rank() + b); }
  /// Sets [r_a, r_b] and [r_b, r_a] = -[r_a, r_b].
  void set_fiber_bracket(std::size_t a, std::size_t b, GSection v) {
    if (a == b) throw std::invalid_argument("fiber bracket is alternating; [r_a, r_a] = 0");
    check(v);
    GSection neg = v;
    for (auto& c : neg) c = -c;
    bracket_.at(a * rank() + b) = std::move(v);
    bracket_.at(b * rank() + a) = std::move(neg);
  }

  GSection basis(std::size_t a) const {
    GSection v(rank());
    v.at(a) = Poly(1);
    return v;
  }

  Poly pair(const GSection& r, const GSection& s) const {
    Poly out;
    for (std::size_t a = 0; a < rank(); ++a)
      for (std::size_t b = 0; b < rank(); ++b)
        if (pairing_(a, b) != 0 && !r[a].is_zero() && !s[b].is_zero()) out += pairing_(a, b) * (r[a] * s[b]);
    return out;
  }

  GSection bracket(const GSection& r, const GSection& s) const {
    GSection out(rank());
    for (std::size_t a = 0; a < rank(); ++a) {
      if (r[a].is_zero()) continue;
      for (std::size_t b = 0; b < rank(); ++b) {
        if (s[b].is_zero()) continue;
        const auto& c = fiber_bracket(a, b);
        for (std::size_t t = 0; t < rank(); ++t)
          if (!c[t].is_zero()) out[t] += r[a] * s[b] * c[t];
      }
    }
    return out;
  }

  /// nabla_{d/dx_m} r.
  GSection nabla(std::size_t m, const GSection& r) const {
    GSection out(rank());
    const auto& g = gamma(m);
    for (std::size_t b = 0; b < rank(); ++b) {
      out[b] = r[b].derivative(m);
      for (std::size_t a = 0; a < rank(); ++a)
        if (!g(b, a).is_zero() && !r[a].is_zero()) out[b] += g(b, a) * r[a];
    }
    return out;
  }

  std::string format(const GSection& r) const {
    std::vector<std::pair<std::string, Poly>> parts;
    for (std::size_t a = 0; a < rank(); ++a) parts.emplace_back(names_[a], r[a]);
    return format_combination(parts, chart_);
  }

  /// Frames p<x> (tangent), the G names, then d<x> (cotangent).
  std::vector<std::string> frame_names() const {
    std::vector<std::string> out;
    for (const auto& v : chart_.vars()) out.push_back("p" + v);
    for (const auto& s : names_) out.push_back(s);
    for (const auto& v : chart_.vars()) out.push_back("d" + v);
    return out;
  }

  /// Pairing xi(y) + eta(x) + (r, s) and anchor the tangent projection.
  CourantBundle bundle() const {
    const std::size_t n = dim(), q = rank(), r = 2 * n + q;
    RationalMatrix g(r, r);
    PolyMatrix a(r, n);
    for (std::size_t i = 0; i < n; ++i) {
      g(i, n + q + i) = 1;
      g(n + q + i, i) = 1;
      a(i, i) = Poly(1);
    }
    for (std::size_t x = 0; x < q; ++x)
      for (std::size_t y = 0; y < q; ++y) g(n + x, n + y) = pairing_(x, y);
    return CourantBundle(chart_, g, a, frame_names());
  }

private:
  void check(const GSection& v) const {
    if (v.size() != rank()) throw rank_mismatch("G-section has the wrong rank");
    for (const auto& c : v)
      if (c.used_vars() > dim()) throw chart_mismatch("G-section uses a coordinate outside the chart");
  }

  Chart chart_;
  std::vector<std::string> names_;
  RationalMatrix pairing_;
  std::vector<PolyMatrix> gamma_;
  std::vector<GSection> R_;
  KForm psi_;
  std::vector<GSection> bracket_;
};

/// Pairing symmetric and invertible, nabla metric, fiber bracket
/// ad-invariant. R, Psi and the fiber bracket are alternating by construction.
inline Report validate_dissection(const DissectionData& dd) {
  Report rep("validate-dissection");
  const std::size_t n = dd.dim(), q = dd.rank();
  const auto& p = dd.pairing();
  auto& sym = rep.check("pairing-symmetric");
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = a + 1; b < q; ++b)
      sym.expect(p(a, b) == p(b, a), [&] { return Witness{"(" + dd.names()[a] + ", " + dd.names()[b] + ")", to_string(p(a, b)), to_string(p(b, a))}; });
  auto& inv = rep.check("pairing-invertible");
  inv.expect(q == 0 || rank(p) == q, [&] { return Witness{"G pairing rank", std::to_string(rank(p)), std::to_string(q)}; });
  auto& met = rep.check("metric-connection");
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = a; b < q; ++b) {
        Poly v = dd.pair(dd.nabla(m, dd.basis(a)), dd.basis(b)) + dd.pair(dd.basis(a), dd.nabla(m, dd.basis(b)));
        met.expect(v.is_zero(), [&] {
          return Witness{"(nabla_" + dd.chart().var(m) + " " + dd.names()[a] + ", " + dd.names()[b] + ") + (" + dd.names()[a] + ", nabla_" +
                             dd.chart().var(m) + " " + dd.names()[b] + ")",
                         v.to_string(dd.chart()), "0"};
        });
      }
  auto& adinv = rep.check("bracket-invariant");
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b)
      for (std::size_t c = b; c < q; ++c) {
        Poly v = dd.pair(dd.bracket(dd.basis(a), dd.basis(b)), dd.basis(c)) + dd.pair(dd.basis(b), dd.bracket(dd.basis(a), dd.basis(c)));
        adinv.expect(v.is_zero(), [&] {
          return Witness{"([r_a,r_b],r_c) + (r_b,[r_a,r_c]) at (" + dd.names()[a] + ", " + dd.names()[b] + ", " + dd.names()[c] + ")",
                         v.to_string(dd.chart()), "0"};
        });
      }
  return rep;
}

namespace detail {

inline Section embed(const DissectionData& dd, const GSection& g, const std::vector<Poly>& cotangent = {}) {
  const std::size_t n = dd.dim(), q = dd.rank();
  Section s(2 * n + q);
  for (std::size_t a = 0; a < q; ++a) s[n + a] = g[a];
  for (std::size_t k = 0; k < cotangent.size(); ++k) s[n + q + k] = cotangent[k];
  return s;
}

}  // namespace detail

/// Frame table of the dissection bracket:
///   d_i o d_j = R(d_i,d_j) + Psi(d_i,d_j,.),
///   r_a o r_b = [r_a,r_b] + (r_b, nabla r_a),
///   d_i o r_a = -r_a o d_i = nabla_i r_a - (r_a, R(d_i,.)),
/// and zero whenever a cotangent frame is involved.
inline PreCourantAlgebroid from_dissection(const DissectionData& dd) {
  detail::require(validate_dissection(dd));
  auto b = dd.bundle();
  const std::size_t n = dd.dim(), q = dd.rank(), r = b.rank();
  std::vector<Section> t(r * r, b.zero());
  auto at = [&](std::size_t i, std::size_t j) -> Section& { return t[i * r + j]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<Poly> xi(n);
      for (std::size_t k = 0; k < n; ++k) xi[k] = detail::form_component(dd.psi(), {i, j, k});
      at(i, j) = detail::embed(dd, dd.curvature(i, j), xi);
    }
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t c = 0; c < q; ++c) {
      std::vector<Poly> xi(n);
      for (std::size_t k = 0; k < n; ++k) xi[k] = dd.pair(dd.basis(c), dd.nabla(k, dd.basis(a)));
      at(n + a, n + c) = detail::embed(dd, dd.bracket(dd.basis(a), dd.basis(c)), xi);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < q; ++a) {
      std::vector<Poly> xi(n);
      for (std::size_t k = 0; k < n; ++k) xi[k] = -dd.pair(dd.basis(a), dd.curvature(i, k));
      Section s = detail::embed(dd, dd.nabla(i, dd.basis(a)), xi);
      at(n + a, i) = -s;
      at(i, n + a) = std::move(s);
    }
  return PreCourantAlgebroid(b, std::move(t));
}

/// (R ^ R)^G(d_i, d_j, d_k, d_l) = 1/4 sum over S4 of sgn(s) (R(x_s1, x_s2), R(x_s3, x_s4)).
inline Poly r_wedge_r_component(const DissectionData& dd, const std::array<std::size_t, 4>& x) {
  std::vector<std::size_t> perm{0, 1, 2, 3};
  Poly sum;
  do {
    Poly v = dd.pair(dd.curvature(x[perm[0]], x[perm[1]]), dd.curvature(x[perm[2]], x[perm[3]]));
    sum += KForm::permutation_sign(perm) > 0 ? v : -v;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Rational(1, 4) * sum;
}

inline KForm r_wedge_r(const DissectionData& dd) {
  KForm out(dd.dim(), 4);
  if (dd.dim() < 4) return out;
  Cochain::for_each_increasing(dd.dim(), 4, [&](const Cochain::Index& ix) { out.set(ix, r_wedge_r_component(dd, {ix[0], ix[1], ix[2], ix[3]})); });
  return out;
}

/// Closed-form pieces of the Jacobiator of a dissection.
struct DissectionTerms {
  const DissectionData& dd;

  GSection add(GSection a, const GSection& b) const {
    for (std::size_t t = 0; t < a.size(); ++t) a[t] += b[t];
    return a;
  }
  GSection sub(GSection a, const GSection& b) const {
    for (std::size_t t = 0; t < a.size(); ++t) a[t] -= b[t];
    return a;
  }

  /// nabla_i R(d_j,d_k) + c.p. (coordinate fields commute).
  GSection cyclic_nabla_R(std::size_t i, std::size_t j, std::size_t k) const {
    return add(add(dd.nabla(i, dd.curvature(j, k)), dd.nabla(j, dd.curvature(k, i))), dd.nabla(k, dd.curvature(i, j)));
  }
  /// nabla_i nabla_j r - nabla_j nabla_i r - [R(d_i,d_j), r].
  GSection curvature_defect(std::size_t i, std::size_t j, const GSection& r) const {
    return sub(sub(dd.nabla(i, dd.nabla(j, r)), dd.nabla(j, dd.nabla(i, r))), dd.bracket(dd.curvature(i, j), r));
  }
  /// nabla_i [r,s] - [nabla_i r, s] - [r, nabla_i s].
  GSection derivation_defect(std::size_t i, const GSection& r, const GSection& s) const {
    return sub(sub(dd.nabla(i, dd.bracket(r, s)), dd.bracket(dd.nabla(i, r), s)), dd.bracket(r, dd.nabla(i, s)));
  }
  /// [[r1,r2],r3] + [[r3,r1],r2] + [[r2,r3],r1].
  GSection jacobi_defect(const GSection& a, const GSection& b, const GSection& c) const {
    return add(add(dd.bracket(dd.bracket(a, b), c), dd.bracket(dd.bracket(c, a), b)), dd.bracket(dd.bracket(b, c), a));
  }

  Poly U(std::size_t i, std::size_t j, std::size_t a, std::size_t m) const { return -dd.pair(cyclic_nabla_R(i, j, m), dd.basis(a)); }
  Poly V(std::size_t i, std::size_t a, std::size_t b, std::size_t m) const { return dd.pair(curvature_defect(i, m, dd.basis(a)), dd.basis(b)); }
  Poly W(std::size_t a, std::size_t b, std::size_t c, std::size_t m) const {
    return -dd.pair(derivation_defect(m, dd.basis(a), dd.basis(b)), dd.basis(c));
  }
};

/// Compares the computed Jacobiator on frame triples with the closed-form
/// components, including the U, V and W terms.
inline Report dissection_jacobiator_check(const DissectionData& dd) {
  Report rep("dissection");
  auto p = from_dissection(dd);
  const auto& b = p.bundle();
  const std::size_t n = dd.dim(), q = dd.rank();
  DissectionTerms T{dd};
  KForm rr = r_wedge_r(dd);
  KForm dpsi = ext_d(dd.psi());
  auto compare = [&](Check& c, std::size_t i, std::size_t j, std::size_t k, const Section& expected) {
    Section got = p.jacobiator(b.frame(i), b.frame(j), b.frame(k));
    c.expect(got == expected, [&] { return Witness{"J" + detail::frame_args(b, {i, j, k}), b.format(got), b.format(expected)}; });
  };

  auto& xxx = rep.check("component-xxx");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        std::vector<Poly> xi(n);
        for (std::size_t l = 0; l < n; ++l)
          xi[l] = Rational(-1, 2) * detail::form_component(rr, {i, j, k, l}) + detail::form_component(dpsi, {i, j, k, l});
        compare(xxx, i, j, k, detail::embed(dd, T.cyclic_nabla_R(i, j, k), xi));
      }
  auto& xxr = rep.check("component-xxr");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t a = 0; a < q; ++a) {
        std::vector<Poly> xi(n);
        for (std::size_t m = 0; m < n; ++m) xi[m] = T.U(i, j, a, m);
        compare(xxr, i, j, n + a, detail::embed(dd, T.curvature_defect(i, j, dd.basis(a)), xi));
      }
  auto& xrr = rep.check("component-xrr");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t c = a + 1; c < q; ++c) {
        std::vector<Poly> xi(n);
        for (std::size_t m = 0; m < n; ++m) xi[m] = T.V(i, a, c, m);
        compare(xrr, i, n + a, n + c, detail::embed(dd, T.derivation_defect(i, dd.basis(a), dd.basis(c)), xi));
      }
  auto& rrr = rep.check("component-rrr");
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t c = a + 1; c < q; ++c)
      for (std::size_t e = c + 1; e < q; ++e) {
        std::vector<Poly> xi(n);
        for (std::size_t m = 0; m < n; ++m) xi[m] = T.W(a, c, e, m);
        compare(rrr, n + a, n + c, n + e, detail::embed(dd, T.jacobi_defect(dd.basis(a), dd.basis(c), dd.basis(e)), xi));
      }
  auto& cot = rep.check("component-cotangent");
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < b.rank(); ++i)
      for (std::size_t j = 0; j < b.rank(); ++j) compare(cot, n + q + k, i, j, b.zero());
  return rep;
}

struct DissectionPontryagin {
  Report report{"dissection-pontryagin"};
  KForm H;
  bool conditions_hold = false;
};

/// H = 1/2 (R ^ R)^G - dPsi. When the four flatness equalities hold on
/// frames, checks dH = 0 and J^flat = -rho^* H on frame quadruples.
inline DissectionPontryagin dissection_pontryagin(const DissectionData& dd) {
  DissectionPontryagin res;
  auto& rep = res.report;
  res.H = Rational(1, 2) * r_wedge_r(dd) - ext_d(dd.psi());
  rep.note("H = " + res.H.to_string(dd.chart()));
  const std::size_t n = dd.dim(), q = dd.rank();
  DissectionTerms T{dd};
  auto zero = [](const GSection& g) { return std::all_of(g.begin(), g.end(), [](const Poly& c) { return c.is_zero(); }); };
  bool ok = true;
  for (std::size_t a = 0; a < q && ok; ++a)
    for (std::size_t c = 0; c < q && ok; ++c)
      for (std::size_t e = 0; e < q && ok; ++e) ok = zero(T.jacobi_defect(dd.basis(a), dd.basis(c), dd.basis(e)));
  for (std::size_t i = 0; i < n && ok; ++i)
    for (std::size_t a = 0; a < q && ok; ++a)
      for (std::size_t c = 0; c < q && ok; ++c) ok = zero(T.derivation_defect(i, dd.basis(a), dd.basis(c)));
  for (std::size_t i = 0; i < n && ok; ++i)
    for (std::size_t j = 0; j < n && ok; ++j)
      for (std::size_t k = 0; k < n && ok; ++k) ok = zero(T.cyclic_nabla_R(i, j, k));
  for (std::size_t i = 0; i < n && ok; ++i)
    for (std::size_t j = 0; j < n && ok; ++j)
      for (std::size_t a = 0; a < q && ok; ++a) ok = zero(T.curvature_defect(i, j, dd.basis(a)));
  res.conditions_hold = ok;
  rep.note(std::string("flatness equalities hold: ") + (ok ? "yes" : "no"));
  if (!ok) return res;

  auto& closed = rep.check("H-closed");
  KForm dH = ext_d(res.H);
  closed.expect(dH.is_zero(), [&] { return Witness{"dH", dH.to_string(dd.chart()), "0"}; });
  auto p = from_dissection(dd);
  const auto& b = p.bundle();
  auto& pull = rep.check("J-flat-equals-minus-rho-star-H");
  Cochain jf = jacobiator_flat(p);
  Cochain::for_each_increasing(b.rank(), 4, [&](const Cochain::Index& ix) {
    std::vector<VectorField> xs;
    for (auto i : ix) xs.push_back(b.anchor_apply(b.frame(i)));
    Poly rhs = -res.H.evaluate(xs);
    Poly lhs = jf.at(ix);
    pull.expect(lhs == rhs, [&] { return Witness{"J^flat" + detail::frame_args(b, {ix[0], ix[1], ix[2], ix[3]}), b.format(lhs), b.format(rhs)}; });
  });
  return res;
}

}  // namespace precourant
