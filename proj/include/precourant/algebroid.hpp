#pragma once

// Pre-Courant algebroids given by a frame bracket table, the Leibniz
// extension of the bracket to all sections, axioms and the Jacobiator.

#include "bundle.hpp"
#include "random.hpp"

namespace precourant {

class PreCourantAlgebroid {
public:
  /// `table[i * rank + j]` is frame_i o frame_j.
  PreCourantAlgebroid(CourantBundle bundle, std::vector<Section> table) : bundle_(std::move(bundle)), table_(std::move(table)) {
    const std::size_t r = bundle_.rank();
    if (table_.size() != r * r) throw std::invalid_argument("bracket table must have rank^2 entries");
    for (const auto& s : table_) {
      bundle_.check(s);
      for (const auto& c : s.coeffs())
        if (c.used_vars() > bundle_.dim()) throw chart_mismatch("bracket table entry uses a coordinate outside the chart");
    }
    (void)bundle_.rho_star_matrix();
  }

  static PreCourantAlgebroid with_zero_table(CourantBundle bundle) {
    std::vector<Section> t(bundle.rank() * bundle.rank(), bundle.zero());
    return PreCourantAlgebroid(std::move(bundle), std::move(t));
  }

  const CourantBundle& bundle() const { return bundle_; }
  std::size_t rank() const { return bundle_.rank(); }
  const Section& entry(std::size_t i, std::size_t j) const { return table_.at(i * rank() + j); }
  const std::vector<Section>& table() const { return table_; }

  PreCourantAlgebroid with_entry(std::size_t i, std::size_t j, Section s) const {
    auto t = table_;
    t.at(i * rank() + j) = std::move(s);
    return PreCourantAlgebroid(bundle_, std::move(t));
  }

  /// e1 o e2 = sum f_i g_j T_ij + rho(e1)[g] - rho(e2)[f] + rho^*(sum_i <frame_i, e2> df_i)
  /// for e1 = sum f_i frame_i, e2 = sum g_j frame_j.
  Section bracket(const Section& a, const Section& b) const {
    bundle_.check(a);
    bundle_.check(b);
    const std::size_t r = rank();
    Section out(r);
    for (std::size_t i = 0; i < r; ++i) {
      if (a[i].is_zero()) continue;
      for (std::size_t j = 0; j < r; ++j) {
        if (b[j].is_zero()) continue;
        const Section& t = entry(i, j);
        if (!t.is_zero()) out += (a[i] * b[j]) * t;
      }
    }
    VectorField x = bundle_.anchor_apply(a);
    VectorField y = bundle_.anchor_apply(b);
    for (std::size_t j = 0; j < r; ++j) {
      if (!b[j].is_zero()) out[j] += x.apply(b[j]);
      if (!a[j].is_zero()) out[j] -= y.apply(a[j]);
    }
    auto gb = bundle_.lower(b);
    std::vector<Poly> xi(bundle_.dim());
    bool any = false;
    for (std::size_t i = 0; i < r; ++i) {
      if (gb[i].is_zero() || a[i].is_constant()) continue;
      for (std::size_t m = 0; m < bundle_.dim(); ++m) {
        Poly d = a[i].derivative(m);
        if (d.is_zero()) continue;
        xi[m] += gb[i] * d;
        any = true;
      }
    }
    if (any) out += bundle_.rho_star(xi);
    return out;
  }

  /// J(e1,e2,e3) = e1 o (e2 o e3) - (e1 o e2) o e3 - e2 o (e1 o e3).
  Section jacobiator(const Section& e1, const Section& e2, const Section& e3) const {
    return bracket(e1, bracket(e2, e3)) - bracket(bracket(e1, e2), e3) - bracket(e2, bracket(e1, e3));
  }

  bool operator==(const PreCourantAlgebroid& o) const { return bundle_ == o.bundle_ && table_ == o.table_; }

private:
  CourantBundle bundle_;
  std::vector<Section> table_;
};

inline Section bracket(const PreCourantAlgebroid& p, const Section& a, const Section& b) { return p.bracket(a, b); }
inline Section jacobiator(const PreCourantAlgebroid& p, const Section& a, const Section& b, const Section& c) {
  return p.jacobiator(a, b, c);
}

namespace detail {

inline std::string args(const CourantBundle& b, std::initializer_list<const Section*> xs) {
  std::string s = "(";
  bool first = true;
  for (const auto* x : xs) {
    s += (first ? "" : ", ") + b.format(*x);
    first = false;
  }
  return s + ")";
}

inline std::string frame_args(const CourantBundle& b, std::initializer_list<std::size_t> xs) {
  std::string s = "(";
  bool first = true;
  for (auto i : xs) {
    s += (first ? "" : ", ") + b.frame_names()[i];
    first = false;
  }
  return s + ")";
}

}  // namespace detail

/// Axioms (i) anchor compatibility, (ii) symmetric part e1 o e2 + e2 o e1 =
/// D<e1,e2> and (iii) metric invariance, on all frame tuples and on seeded
/// random sections.
inline Report verify_axioms(const PreCourantAlgebroid& p, const SampleConfig& cfg = {}) {
  Report rep("verify-axioms");
  const auto& b = p.bundle();
  const std::size_t r = p.rank();
  auto frames = b.frames();
  auto& a1 = rep.check("anchor-compatibility");
  auto& a2 = rep.check("symmetric-part");
  auto& a3 = rep.check("metric-invariance");

  auto check_all = [&](const Section& e1, const Section& e2, const Section& e3, const std::string& where) {
    Section e12 = p.bracket(e1, e2);
    VectorField lhs = b.anchor_apply(e12);
    VectorField rhs = vf_bracket(b.anchor_apply(e1), b.anchor_apply(e2));
    a1.expect(lhs == rhs, [&] { return Witness{"rho(e1 o e2) at " + where, lhs.to_string(b.chart()), rhs.to_string(b.chart())}; });
    Section sym = e12 + p.bracket(e2, e1);
    Section dp = b.dee(b.pairing(e1, e2));
    a2.expect(sym == dp, [&] { return Witness{"e1 o e2 + e2 o e1 at " + where, b.format(sym), b.format(dp)}; });
    Poly l = b.anchor_apply(e1).apply(b.pairing(e2, e3));
    Poly rr = b.pairing(e12, e3) + b.pairing(e2, p.bracket(e1, e3));
    a3.expect(l == rr, [&] { return Witness{"rho(e1)<e2,e3> at " + where, b.format(l), b.format(rr)}; });
  };

  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      Section t = p.entry(i, j);
      VectorField lhs = b.anchor_apply(t);
      VectorField rhs = vf_bracket(b.anchor_apply(frames[i]), b.anchor_apply(frames[j]));
      a1.expect(lhs == rhs, [&] { return Witness{"frames " + detail::frame_args(b, {i, j}), lhs.to_string(b.chart()), rhs.to_string(b.chart())}; });
      Section sym = t + p.entry(j, i);
      Section dp = b.dee(b.pairing(frames[i], frames[j]));
      a2.expect(sym == dp, [&] { return Witness{"frames " + detail::frame_args(b, {i, j}), b.format(sym), b.format(dp)}; });
      for (std::size_t k = 0; k < r; ++k) {
        Poly l = b.anchor_apply(frames[i]).apply(b.pairing(frames[j], frames[k]));
        Poly rr = b.pairing(t, frames[k]) + b.pairing(frames[j], p.entry(i, k));
        a3.expect(l == rr, [&] { return Witness{"frames " + detail::frame_args(b, {i, j, k}), b.format(l), b.format(rr)}; });
      }
    }

  Sampler s(cfg.seed);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Section e1 = s.section(b, cfg.max_degree), e2 = s.section(b, cfg.max_degree), e3 = s.section(b, cfg.max_degree);
    check_all(e1, e2, e3, "trial " + std::to_string(t) + " " + detail::args(b, {&e1, &e2, &e3}));
  }
  return rep;
}

/// Leibniz rules in each argument, (Df) o e = 0, e o Df = D(rho(e) f),
/// rho D = 0, rho rho^* = 0, the symmetric part and consistency of the two
/// extension rules, on seeded data.
inline Report verify_derived_identities(const PreCourantAlgebroid& p, const SampleConfig& cfg = {}) {
  Report rep("verify-identities");
  const auto& b = p.bundle();
  Sampler s(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  auto& pro1 = rep.check("leibniz-second-argument");
  auto& pro2 = rep.check("leibniz-first-argument");
  auto& pro3 = rep.check("exact-left-annihilates");
  auto& pro3b = rep.check("exact-right");
  auto& pro4 = rep.check("anchor-kills-image-of-D");
  auto& skew = rep.check("symmetric-part");
  auto& cons = rep.check("extension-consistency");

  std::vector<Poly> fs;
  for (std::size_t m = 0; m < b.dim(); ++m) fs.push_back(Poly::var(m));
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const std::string tag = "trial " + std::to_string(t);
    Section e1 = s.section(b, cfg.max_degree), e2 = s.section(b, cfg.max_degree);
    Poly f = t < fs.size() ? fs[t] : s.nonzero_poly(b.dim(), 2);
    Poly g = s.nonzero_poly(b.dim(), 2);
    Section e12 = p.bracket(e1, e2);
    std::string where = tag + " f=" + b.format(f) + " " + detail::args(b, {&e1, &e2});

    Section l1 = p.bracket(e1, f * e2);
    Section r1 = f * e12 + b.anchor_apply(e1).apply(f) * e2;
    pro1.expect(l1 == r1, [&] { return Witness{where, b.format(l1), b.format(r1)}; });

    Section l2 = p.bracket(f * e1, e2);
    Section r2 = f * e12 - b.anchor_apply(e2).apply(f) * e1 + b.pairing(e1, e2) * b.dee(f);
    pro2.expect(l2 == r2, [&] { return Witness{where, b.format(l2), b.format(r2)}; });

    Section df = b.dee(f);
    Section l3 = p.bracket(df, e1);
    pro3.expect(l3.is_zero(), [&] { return Witness{"(Df) o e1 at " + where, b.format(l3), "0"}; });

    Section l4 = p.bracket(e1, df);
    Section r4 = b.dee(b.anchor_apply(e1).apply(f));
    pro3b.expect(l4 == r4, [&] { return Witness{"e1 o Df at " + where, b.format(l4), b.format(r4)}; });

    VectorField rd = b.anchor_apply(df);
    pro4.expect(rd.is_zero(), [&] { return Witness{"rho(Df) at " + where, rd.to_string(b.chart()), "0"}; });
    std::vector<Poly> xi(b.dim());
    for (auto& c : xi) c = s.poly(b.dim(), cfg.max_degree);
    VectorField rx = b.anchor_apply(b.rho_star(xi));
    pro4.expect(rx.is_zero(), [&] { return Witness{"rho(rho^* xi) at " + tag, rx.to_string(b.chart()), "0"}; });

    Section sym = e12 + p.bracket(e2, e1);
    Section dp = b.dee(b.pairing(e1, e2));
    skew.expect(sym == dp, [&] { return Witness{where, b.format(sym), b.format(dp)}; });

    // (f e1) o (g e2): first-argument rule applied before the second-argument rule
    Section direct = p.bracket(f * e1, g * e2);
    Section ge2 = g * e2;
    Section e1ge2 = g * e12 + b.anchor_apply(e1).apply(g) * e2;
    Section via = f * e1ge2 - b.anchor_apply(ge2).apply(f) * e1 + b.pairing(e1, ge2) * b.dee(f);
    cons.expect(direct == via, [&] { return Witness{where + " g=" + b.format(g), b.format(direct), b.format(via)}; });
  }
  return rep;
}

}  // namespace precourant
