#pragma once

// Alternating cochains on Gamma(E), the spaces C^k_D(E) and
// C^k_D(E, Ker rho), and the coboundaries D and partial.

#include "algebroid.hpp"

#include <numeric>

namespace precourant {

/// Alternating k-cochain stored on strictly increasing frame index tuples.
class Cochain {
public:
  using Index = std::vector<std::uint8_t>;

  Cochain() = default;
  Cochain(std::size_t rank, std::size_t degree) : rank_(rank), degree_(degree) {}

  /// Builds from values on increasing tuples; alternation is implied.
  template <class F>
  static Cochain from_increasing(std::size_t rank, std::size_t degree, F&& value) {
    Cochain c(rank, degree);
    for_each_increasing(rank, degree, [&](const Index& idx) { c.set(idx, value(idx)); });
    return c;
  }

  /// Builds from values on all ordered tuples, checking total alternation.
  template <class F>
  static Cochain from_all_tuples(std::size_t rank, std::size_t degree, F&& value) {
    Cochain c = from_increasing(rank, degree, value);
    Index idx(degree, 0);
    for (;;) {
      Poly v = value(idx);
      if (!(v == c.at(idx))) throw std::invalid_argument("cochain data is not alternating");
      std::size_t p = 0;
      while (p < degree && ++idx[p] == rank) idx[p++] = 0;
      if (p == degree) break;
    }
    return c;
  }

  template <class F>
  static void for_each_increasing(std::size_t rank, std::size_t degree, F&& f) {
    if (degree > rank) return;
    Index idx(degree);
    std::iota(idx.begin(), idx.end(), std::uint8_t{0});
    for (;;) {
      f(static_cast<const Index&>(idx));
      std::size_t p = degree;
      while (p > 0 && idx[p - 1] == rank - degree + p - 1) --p;
      if (p == 0) return;
      ++idx[p - 1];
      for (std::size_t q = p; q < degree; ++q) idx[q] = static_cast<std::uint8_t>(idx[q - 1] + 1);
    }
  }

  std::size_t rank() const { return rank_; }
  std::size_t degree() const { return degree_; }
  const std::map<Index, Poly>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  bool operator==(const Cochain&) const = default;

  void set(const Index& idx, const Poly& v) {
    if (idx.size() != degree_) throw std::invalid_argument("cochain index has the wrong length");
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] >= rank_ || (k && idx[k - 1] >= idx[k])) throw std::invalid_argument("cochain index not strictly increasing");
    if (v.is_zero())
      entries_.erase(idx);
    else
      entries_[idx] = v;
  }

  /// Value on an arbitrary frame tuple, using alternation.
  Poly at(Index idx) const {
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j + 1 < idx.size() - i; ++j) {
        if (idx[j] == idx[j + 1]) return Poly();
        if (idx[j] > idx[j + 1]) {
          std::swap(idx[j], idx[j + 1]);
          sign = -sign;
        }
      }
    for (std::size_t j = 0; j + 1 < idx.size(); ++j)
      if (idx[j] == idx[j + 1]) return Poly();
    auto it = entries_.find(idx);
    if (it == entries_.end()) return Poly();
    return sign > 0 ? it->second : -it->second;
  }

  /// Multilinear evaluation on arbitrary sections.
  Poly evaluate(std::span<const Section> args) const {
    if (args.size() != degree_) throw std::invalid_argument("cochain evaluated on the wrong number of sections");
    for (const auto& a : args)
      if (a.rank() != rank_) throw rank_mismatch("section rank differs from cochain rank");
    if (degree_ == 0) return at({});
    Poly sum;
    Index idx(degree_);
    std::vector<bool> used(rank_, false);
    expand(args, 0, Poly(1), idx, used, sum);
    return sum;
  }

  friend Cochain operator+(Cochain a, const Cochain& b) {
    a.check_same(b);
    for (const auto& [k, v] : b.entries_) a.set(k, a.at(k) + v);
    return a;
  }
  friend Cochain operator-(Cochain a, const Cochain& b) {
    a.check_same(b);
    for (const auto& [k, v] : b.entries_) a.set(k, a.at(k) - v);
    return a;
  }
  friend Cochain operator*(const Poly& f, const Cochain& a) {
    Cochain r(a.rank_, a.degree_);
    for (const auto& [k, v] : a.entries_) r.set(k, f * v);
    return r;
  }

  std::string format(const CourantBundle& b) const {
    if (degree_ == 0) return at({}).to_string(b.chart());
    std::vector<std::pair<std::string, Poly>> parts;
    for (const auto& [k, v] : entries_) {
      std::string basis = "[";
      for (std::size_t i = 0; i < k.size(); ++i) basis += (i ? "," : "") + b.frame_names()[k[i]];
      parts.emplace_back(basis + "]", v);
    }
    return format_combination(parts, b.chart());
  }

private:
  std::size_t rank_ = 0;
  std::size_t degree_ = 0;
  std::map<Index, Poly> entries_;

  void check_same(const Cochain& b) const {
    if (rank_ != b.rank_ || degree_ != b.degree_) throw std::invalid_argument("cochains of different shape");
  }

  void expand(std::span<const Section> args, std::size_t slot, const Poly& coef, Index& idx, std::vector<bool>& used, Poly& sum) const {
    if (slot == degree_) {
      Poly v = at(idx);
      if (!v.is_zero()) sum += coef * v;
      return;
    }
    for (std::size_t a = 0; a < rank_; ++a) {
      if (used[a] || args[slot][a].is_zero()) continue;
      used[a] = true;
      idx[slot] = static_cast<std::uint8_t>(a);
      expand(args, slot + 1, coef * args[slot][a], idx, used, sum);
      used[a] = false;
    }
  }
};

/// i_{D x_m} psi as a (k-1)-cochain: (i_{Dx_m} psi)(e...) = psi(D x_m, e...).
inline Cochain contract_dee(const CourantBundle& b, const Cochain& psi, std::size_t m) {
  if (psi.degree() == 0) throw std::invalid_argument("cannot contract a 0-cochain");
  Section d = b.dee(Poly::var(m));
  return Cochain::from_increasing(b.rank(), psi.degree() - 1, [&](const Cochain::Index& idx) {
    std::vector<Section> args{d};
    for (auto i : idx) args.push_back(b.frame(i));
    return psi.evaluate(args);
  });
}

/// Membership in C^k_D(E): i_{D x_m} psi = 0 for every coordinate x_m.
inline Report is_in_CkD(const CourantBundle& b, const Cochain& psi) {
  Report rep("membership");
  auto& c = rep.check("contraction-with-D");
  if (psi.rank() != b.rank()) throw rank_mismatch("cochain rank differs from bundle rank");
  if (psi.degree() == 0) {
    c.expect(true, [] { return Witness{}; });
    return rep;
  }
  for (std::size_t m = 0; m < b.dim(); ++m) {
    Cochain r = contract_dee(b, psi, m);
    c.expect(r.is_zero(), [&] { return Witness{"i_{D " + b.chart().var(m) + "} psi", r.format(b), "0"}; });
  }
  return rep;
}

/// Element of C^k_D(E, Ker rho), stored as its flat, a (k+1)-cochain.
class KerCochain {
public:
  KerCochain() = default;
  explicit KerCochain(Cochain flat) : flat_(std::move(flat)) {
    if (flat_.degree() == 0) throw std::invalid_argument("the flat of a Ker-valued cochain has degree >= 1");
  }

  std::size_t degree() const { return flat_.degree() - 1; }
  const Cochain& flat() const { return flat_; }
  bool is_zero() const { return flat_.is_zero(); }
  bool operator==(const KerCochain&) const = default;

  /// phi(e_1..e_k) = the section whose pairing with frame_m is flat(e_1..e_k, frame_m).
  Section evaluate(const CourantBundle& b, std::span<const Section> args) const {
    if (args.size() != degree()) throw std::invalid_argument("Ker-valued cochain evaluated on the wrong number of sections");
    std::vector<Section> full(args.begin(), args.end());
    full.push_back(b.zero());
    std::vector<Poly> vals(b.rank());
    for (std::size_t m = 0; m < b.rank(); ++m) {
      full.back() = b.frame(m);
      vals[m] = flat_.evaluate(full);
    }
    return b.raise(vals);
  }

private:
  Cochain flat_;
};

/// psi^sharp; psi must lie in C^{k+1}_D(E).
inline KerCochain cochain_sharp(const CourantBundle& b, const Cochain& psi) {
  auto rep = is_in_CkD(b, psi);
  if (!rep.passed()) throw std::invalid_argument("cochain fails the contraction test with D: " + rep.checks.front().witness->where);
  return KerCochain(psi);
}

inline Cochain cochain_flat(const KerCochain& phi) { return phi.flat(); }

/// Formula-level D on arbitrary sections:
/// sum_i (-1)^i rho(e_i) psi(..^e_i..) + sum_{i<j} (-1)^{i+j} psi(e_i o e_j, ..^e_i..^e_j..).
template <class Psi>
Poly cobound_D_eval(const PreCourantAlgebroid& p, Psi&& psi, std::span<const Section> e) {
  const auto& b = p.bundle();
  const std::size_t n = e.size();
  Poly out;
  std::vector<Section> rest;
  for (std::size_t i = 0; i < n; ++i) {
    rest.clear();
    for (std::size_t q = 0; q < n; ++q)
      if (q != i) rest.push_back(e[q]);
    Poly v = b.anchor_apply(e[i]).apply(psi(std::span<const Section>(rest)));
    out = i % 2 ? out - v : out + v;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      rest.clear();
      rest.push_back(p.bracket(e[i], e[j]));
      for (std::size_t q = 0; q < n; ++q)
        if (q != i && q != j) rest.push_back(e[q]);
      Poly v = psi(std::span<const Section>(rest));
      out = (i + j) % 2 ? out - v : out + v;
    }
  return out;
}

/// Formula-level partial on arbitrary sections, phi of degree k = e.size() - 1:
/// sum_{i<=k} (-1)^{i+1} e_i o phi(..^e_i..) + (-1)^{k+1} phi(e_1..e_k) o e_{k+1}
/// + sum_{i<j} (-1)^{i+j} phi(e_i o e_j, ..^e_i..^e_j..), indices 1-based.
template <class Phi>
Section cobound_partial_eval(const PreCourantAlgebroid& p, Phi&& phi, std::span<const Section> e) {
  const auto& b = p.bundle();
  const std::size_t n = e.size();
  const std::size_t k = n - 1;
  Section out = b.zero();
  std::vector<Section> rest;
  for (std::size_t i = 0; i < k; ++i) {
    rest.clear();
    for (std::size_t q = 0; q < n; ++q)
      if (q != i) rest.push_back(e[q]);
    Section v = p.bracket(e[i], phi(std::span<const Section>(rest)));
    if (i % 2)
      out -= v;
    else
      out += v;
  }
  {
    Section v = p.bracket(phi(e.first(k)), e[k]);
    if (k % 2)
      out += v;
    else
      out -= v;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      rest.clear();
      rest.push_back(p.bracket(e[i], e[j]));
      for (std::size_t q = 0; q < n; ++q)
        if (q != i && q != j) rest.push_back(e[q]);
      Section v = phi(std::span<const Section>(rest));
      if ((i + j) % 2)
        out -= v;
      else
        out += v;
    }
  return out;
}

inline std::vector<Section> frame_args(const CourantBundle& b, const Cochain::Index& idx) {
  std::vector<Section> a;
  for (auto i : idx) a.push_back(b.frame(i));
  return a;
}

/// D psi on increasing frame tuples without the membership precondition.
inline Cochain cobound_D_unchecked(const PreCourantAlgebroid& p, const Cochain& psi) {
  const auto& b = p.bundle();
  auto ev = [&](std::span<const Section> a) { return psi.evaluate(a); };
  return Cochain::from_increasing(b.rank(), psi.degree() + 1, [&](const Cochain::Index& idx) {
    auto a = frame_args(b, idx);
    return cobound_D_eval(p, ev, a);
  });
}

/// D : C^k_D(E) -> C^{k+1}_D(E).
inline Cochain cobound_D(const PreCourantAlgebroid& p, const Cochain& psi) {
  auto rep = is_in_CkD(p.bundle(), psi);
  if (!rep.passed()) throw std::invalid_argument("D applied to a cochain outside C^k_D: " + rep.checks.front().witness->where);
  return cobound_D_unchecked(p, psi);
}

/// partial : C^k_D(E, Ker rho) -> C^{k+1}_D(E, Ker rho). The result is paired
/// with every frame and must assemble into an alternating flat.
inline KerCochain cobound_partial(const PreCourantAlgebroid& p, const KerCochain& phi) {
  const auto& b = p.bundle();
  const std::size_t k = phi.degree();
  auto ev = [&](std::span<const Section> a) { return phi.evaluate(b, a); };
  Cochain flat(b.rank(), k + 2);
  std::map<Cochain::Index, bool> seen;
  Cochain::for_each_increasing(b.rank(), k + 1, [&](const Cochain::Index& idx) {
    auto a = frame_args(b, idx);
    auto vals = b.lower(cobound_partial_eval(p, ev, a));
    for (std::size_t m = 0; m < b.rank(); ++m) {
      Cochain::Index full = idx;
      full.push_back(static_cast<std::uint8_t>(m));
      bool repeated = std::find(idx.begin(), idx.end(), m) != idx.end();
      if (repeated) {
        if (!vals[m].is_zero()) throw std::domain_error("partial derivative does not pair alternately");
        continue;
      }
      // sort with sign
      int sign = 1;
      for (std::size_t q = full.size() - 1; q > 0 && full[q - 1] > full[q]; --q) {
        std::swap(full[q - 1], full[q]);
        sign = -sign;
      }
      Poly v = sign > 0 ? vals[m] : -vals[m];
      auto [it, fresh] = seen.emplace(full, true);
      if (fresh)
        flat.set(full, v);
      else if (!(flat.at(full) == v))
        throw std::domain_error("partial derivative does not pair alternately");
    }
  });
  return KerCochain(flat);
}

/// Cochain e_1..e_k -> det[<kappa_p, e_q>] for sections kappa_1..kappa_k.
inline Cochain wedge_of_duals(const CourantBundle& b, const std::vector<Section>& ks) {
  std::vector<std::vector<Poly>> low;
  for (const auto& k : ks) low.push_back(b.lower(k));
  const std::size_t deg = ks.size();
  return Cochain::from_increasing(b.rank(), deg, [&](const Cochain::Index& idx) {
    std::vector<std::size_t> perm(deg);
    std::iota(perm.begin(), perm.end(), 0);
    Poly det;
    do {
      Poly prod(1);
      for (std::size_t a = 0; a < deg && !prod.is_zero(); ++a) prod *= low[a][idx[perm[a]]];
      if (prod.is_zero()) continue;
      det = KForm::permutation_sign(perm) > 0 ? det + prod : det - prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
  });
}

/// Random member of C^k_D(E): sums of f * kappa_1^flat ^ ... ^ kappa_k^flat
/// over kernel sections kappa.
inline Cochain random_member(const CourantBundle& b, Sampler& s, std::size_t degree, const std::vector<Section>& kernel,
                             unsigned max_degree) {
  Cochain c(b.rank(), degree);
  if (kernel.empty() && degree > 0) return c;
  for (int term = 0; term < 2; ++term) {
    std::vector<Section> ks;
    for (std::size_t q = 0; q < degree; ++q) ks.push_back(s.combination(b, kernel, 1));
    c = c + s.poly(b.dim(), max_degree, 2) * wedge_of_duals(b, ks);
  }
  return c;
}

/// J^flat(e1,e2,e3,e4) = <J(e1,e2,e3), e4> on increasing frame tuples.
inline Cochain jacobiator_flat(const PreCourantAlgebroid& p) {
  const auto& b = p.bundle();
  std::map<Cochain::Index, Section> cache;
  return Cochain::from_increasing(b.rank(), 4, [&](const Cochain::Index& idx) {
    Cochain::Index t(idx.begin(), idx.begin() + 3);
    auto it = cache.find(t);
    if (it == cache.end()) it = cache.emplace(t, p.jacobiator(b.frame(t[0]), b.frame(t[1]), b.frame(t[2]))).first;
    return b.pairing(it->second, b.frame(idx[3]));
  });
}

inline KerCochain jacobiator_cochain(const PreCourantAlgebroid& p) { return KerCochain(jacobiator_flat(p)); }

/// D psi = (partial psi^sharp)^flat for each sample.
inline Report verify_comm_lemma(const PreCourantAlgebroid& p, const std::vector<Cochain>& samples) {
  Report rep("comm-lemma");
  const auto& b = p.bundle();
  auto& c = rep.check("D-equals-flat-partial-sharp");
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& psi = samples[s];
    const std::string where = "sample " + std::to_string(s) + ": " + psi.format(b);
    if (!is_in_CkD(b, psi).passed()) {
      c.fail(Witness{where, "not in C^k_D", "member"});
      continue;
    }
    Cochain lhs = cobound_D(p, psi);
    Cochain rhs;
    try {
      rhs = cobound_partial(p, cochain_sharp(b, psi)).flat();
    } catch (const std::domain_error& e) {
      c.fail(Witness{where, b.format(Poly()), e.what()});
      continue;
    }
    c.expect(lhs == rhs, [&] { return Witness{where, lhs.format(b), rhs.format(b)}; });
  }
  return rep;
}

/// J skew, C^infty-linear, Ker rho-valued, J^flat alternating, J(Dx_m,.,.) = 0,
/// partial J = 0 and D(J^flat) = 0.
inline Report verify_jacobiator_theorem(const PreCourantAlgebroid& p, const SampleConfig& cfg = {}) {
  Report rep("jacobiator-theorem");
  const auto& b = p.bundle();
  const std::size_t r = b.rank();
  auto& skew = rep.check("skew-symmetric");
  auto& lin = rep.check("function-linear");
  auto& ker = rep.check("values-in-kernel");
  auto& alt = rep.check("flat-alternating");
  auto& dee = rep.check("vanishes-on-image-of-D");
  auto& dj = rep.check("partial-J-zero");
  auto& djf = rep.check("D-J-flat-zero");

  std::vector<Section> table(r * r * r);
  std::vector<bool> zero_table(r * r * r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t d = 0; d < r; ++d) {
        table[(a * r + c) * r + d] = p.jacobiator(b.frame(a), b.frame(c), b.frame(d));
        zero_table[(a * r + c) * r + d] = table[(a * r + c) * r + d].is_zero();
      }
  auto J = [&](std::size_t a, std::size_t c, std::size_t d) -> const Section& { return table[(a * r + c) * r + d]; };
  bool all_zero = std::all_of(zero_table.begin(), zero_table.end(), [](bool z) { return z; });
  if (all_zero) rep.note("J vanishes on all frame triples");

  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t d = 0; d < r; ++d) {
        const auto& j = J(a, c, d);
        skew.expect(j == -J(c, a, d), [&] { return Witness{"J" + detail::frame_args(b, {a, c, d}) + " vs -J" + detail::frame_args(b, {c, a, d}), b.format(j), b.format(-J(c, a, d))}; });
        skew.expect(j == -J(a, d, c), [&] { return Witness{"J" + detail::frame_args(b, {a, c, d}) + " vs -J" + detail::frame_args(b, {a, d, c}), b.format(j), b.format(-J(a, d, c))}; });
        VectorField x = b.anchor_apply(j);
        ker.expect(x.is_zero(), [&] { return Witness{"rho J" + detail::frame_args(b, {a, c, d}), x.to_string(b.chart()), "0"}; });
      }

  // <J(a,c,d), e> against the sign of the sorted quadruple
  Cochain flat = Cochain::from_increasing(r, 4, [&](const Cochain::Index& idx) {
    return b.pairing(J(idx[0], idx[1], idx[2]), b.frame(idx[3]));
  });
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t d = 0; d < r; ++d) {
        auto low = b.lower(J(a, c, d));
        for (std::size_t e = 0; e < r; ++e) {
          Poly want = flat.at({std::uint8_t(a), std::uint8_t(c), std::uint8_t(d), std::uint8_t(e)});
          alt.expect(low[e] == want, [&] {
            return Witness{"<J" + detail::frame_args(b, {a, c, d}) + ", " + b.frame_names()[e] + ">", b.format(low[e]), b.format(want)};
          });
        }
      }

  Sampler s(cfg.seed ^ 0x51ed2701ULL);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Section e1 = s.section(b, cfg.max_degree), e2 = s.section(b, cfg.max_degree), e3 = s.section(b, cfg.max_degree);
    Poly f = s.nonzero_poly(b.dim(), 2);
    Section base = p.jacobiator(e1, e2, e3);
    Section fb = f * base;
    std::string where = "trial " + std::to_string(t) + " f=" + b.format(f) + " " + detail::args(b, {&e1, &e2, &e3});
    Section l1 = p.jacobiator(f * e1, e2, e3);
    lin.expect(l1 == fb, [&] { return Witness{"J(f e1,e2,e3) at " + where, b.format(l1), b.format(fb)}; });
    Section l2 = p.jacobiator(e1, f * e2, e3);
    lin.expect(l2 == fb, [&] { return Witness{"J(e1,f e2,e3) at " + where, b.format(l2), b.format(fb)}; });
    Section l3 = p.jacobiator(e1, e2, f * e3);
    lin.expect(l3 == fb, [&] { return Witness{"J(e1,e2,f e3) at " + where, b.format(l3), b.format(fb)}; });
  }

  for (std::size_t m = 0; m < b.dim(); ++m) {
    Section d = b.dee(Poly::var(m));
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t e = 0; e < r; ++e) {
        Section v = p.jacobiator(d, b.frame(c), b.frame(e));
        dee.expect(v.is_zero(), [&] { return Witness{"J(D" + b.chart().var(m) + ", " + b.frame_names()[c] + ", " + b.frame_names()[e] + ")", b.format(v), "0"}; });
      }
  }

  // partial J from the formula on every ordered frame quadruple
  KerCochain jk(flat);
  auto ev = [&](std::span<const Section> a) -> Section {
    bool frames_only = true;
    std::size_t ix[3];
    for (std::size_t q = 0; q < 3 && frames_only; ++q) {
      std::size_t nz = 0;
      for (std::size_t i = 0; i < r; ++i)
        if (!a[q][i].is_zero()) {
          ++nz;
          ix[q] = i;
        }
      frames_only = nz == 1 && a[q][ix[q]] == Poly(1);
    }
    if (frames_only) return J(ix[0], ix[1], ix[2]);
    return jk.evaluate(b, a);
  };
  std::vector<Section> quad(4);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t d = 0; d < r; ++d)
        for (std::size_t e = 0; e < r; ++e) {
          quad = {b.frame(a), b.frame(c), b.frame(d), b.frame(e)};
          Section v = cobound_partial_eval(p, ev, quad);
          dj.expect(v.is_zero(), [&] { return Witness{"partial J" + detail::frame_args(b, {a, c, d, e}), b.format(v), "0"}; });
        }

  if (is_in_CkD(b, flat).passed()) {
    Cochain d = cobound_D(p, flat);
    djf.expect(d.is_zero(), [&] { return Witness{"D(J^flat)", d.format(b), "0"}; });
  } else {
    djf.fail(Witness{"D(J^flat)", "J^flat not in C^4_D", "member"});
  }
  return rep;
}

}  // namespace precourant
