#pragma once

// Leibniz 2-algebras and Lie 2-algebras on the complex Gamma(Ker rho) -> Gamma(E),
// and morphisms between them.

#include "cochain.hpp"

#include <functional>
#include <memory>

namespace precourant {

enum class Flavor { leibniz, lie };

inline const char* to_string(Flavor f) { return f == Flavor::leibniz ? "leibniz" : "lie"; }

/// Two-term complex V1 -> V0 with V1 = Gamma(Ker rho), V0 = Gamma(E) and d the
/// inclusion. l2 uses one formula in every degree; l3 takes degree-0 triples.
struct TwoTermAlgebra {
  using Binary = std::function<Section(const Section&, const Section&)>;
  using Ternary = std::function<Section(const Section&, const Section&, const Section&)>;

  Flavor flavor = Flavor::leibniz;
  std::shared_ptr<const PreCourantAlgebroid> source;
  Binary l2;
  Ternary l3;
  /// Sections spanning the degree-1 space over functions.
  std::vector<Section> kernel;

  const CourantBundle& bundle() const { return source->bundle(); }
  Section d(const Section& m) const { return m; }
};

/// e1 o e2 - 1/2 D<e1,e2>, the skew-symmetrized bracket.
inline Section skew_bracket(const PreCourantAlgebroid& p, const Section& a, const Section& b) {
  return p.bracket(a, b) - Rational(1, 2) * p.bundle().dee(p.bundle().pairing(a, b));
}

/// T(e1,e2,e3) = 1/6 (<[[e1,e2]],e3> + c.p.).
inline Poly lie2_T(const PreCourantAlgebroid& p, const Section& a, const Section& b, const Section& c) {
  const auto& bb = p.bundle();
  Poly s = bb.pairing(skew_bracket(p, a, b), c) + bb.pairing(skew_bracket(p, b, c), a) + bb.pairing(skew_bracket(p, c, a), b);
  return Rational(1, 6) * s;
}

/// J - D T.
inline Section lie2_curly_J(const PreCourantAlgebroid& p, const Section& a, const Section& b, const Section& c) {
  return p.jacobiator(a, b, c) - p.bundle().dee(lie2_T(p, a, b, c));
}

struct Lie2Components {
  Section skew;
  std::optional<Poly> T;
  std::optional<Section> curly_J;
};

inline Lie2Components lie2_components(const PreCourantAlgebroid& p, const Section& a, const Section& b) {
  return {skew_bracket(p, a, b), std::nullopt, std::nullopt};
}

inline Lie2Components lie2_components(const PreCourantAlgebroid& p, const Section& a, const Section& b, const Section& c) {
  return {skew_bracket(p, a, b), lie2_T(p, a, b, c), lie2_curly_J(p, a, b, c)};
}

inline TwoTermAlgebra build_leibniz2(const PreCourantAlgebroid& p, std::vector<Section> kernel) {
  auto src = std::make_shared<const PreCourantAlgebroid>(p);
  TwoTermAlgebra a;
  a.flavor = Flavor::leibniz;
  a.source = src;
  a.l2 = [src](const Section& x, const Section& y) { return src->bracket(x, y); };
  a.l3 = [src](const Section& x, const Section& y, const Section& z) { return src->jacobiator(x, y, z); };
  a.kernel = std::move(kernel);
  return a;
}

inline TwoTermAlgebra build_lie2(const PreCourantAlgebroid& p, std::vector<Section> kernel) {
  auto src = std::make_shared<const PreCourantAlgebroid>(p);
  TwoTermAlgebra a;
  a.flavor = Flavor::lie;
  a.source = src;
  a.l2 = [src](const Section& x, const Section& y) { return skew_bracket(*src, x, y); };
  a.l3 = [src](const Section& x, const Section& y, const Section& z) { return lie2_curly_J(*src, x, y, z); };
  a.kernel = std::move(kernel);
  return a;
}

namespace detail {

inline void require_kernel(const TwoTermAlgebra& alg) {
  for (const auto& k : alg.kernel)
    if (!alg.bundle().anchor_apply(k).is_zero())
      throw std::invalid_argument("degree-1 generator " + alg.bundle().format(k) + " is not in the kernel of the anchor");
}

struct TwoTermSample {
  Section w, x, y, z, m, n;
  std::string describe(const CourantBundle& b) const {
    return "w=" + b.format(w) + "; x=" + b.format(x) + "; y=" + b.format(y) + "; z=" + b.format(z) + "; m=" + b.format(m) +
           "; n=" + b.format(n);
  }
};

inline TwoTermSample sample(const TwoTermAlgebra& alg, Sampler& s, unsigned max_degree) {
  const auto& b = alg.bundle();
  return {s.section(b, max_degree), s.section(b, max_degree), s.section(b, max_degree), s.section(b, max_degree),
          s.combination(b, alg.kernel, max_degree), s.combination(b, alg.kernel, max_degree)};
}

/// Conditions (a1)-(a3), (b1)-(b4) and closure of degree-1 values.
inline void check_ab(const TwoTermAlgebra& alg, const TwoTermSample& t, const std::string& where, Report& rep) {
  const auto& b = alg.bundle();
  const auto& l2 = alg.l2;
  const auto& l3 = alg.l3;
  auto eq = [&](const char* name, const Section& lhs, const Section& rhs) {
    rep.check(name).expect(lhs == rhs, [&] { return Witness{where, b.format(lhs), b.format(rhs)}; });
  };
  const auto &x = t.x, &y = t.y, &z = t.z, &m = t.m, &n = t.n;
  Section xm = l2(x, m), mx = l2(m, x);
  eq("a1", alg.d(xm), l2(x, alg.d(m)));
  eq("a2", alg.d(mx), l2(alg.d(m), x));
  eq("a3", l2(alg.d(m), n), l2(m, alg.d(n)));
  Section xyz = l3(x, y, z);
  Section xy = l2(x, y);
  eq("b1", alg.d(xyz), l2(x, l2(y, z)) - l2(xy, z) - l2(y, l2(x, z)));
  eq("b2", l3(x, y, alg.d(m)), l2(x, l2(y, m)) - l2(xy, m) - l2(y, xm));
  eq("b3", l3(x, alg.d(m), y), l2(x, l2(m, y)) - l2(xm, y) - l2(m, xy));
  eq("b4", l3(alg.d(m), x, y), l2(m, xy) - l2(mx, y) - l2(x, l2(m, y)));
  auto& clo = rep.check("degree-1-closure");
  for (const Section* v : {&xm, &mx, &xyz}) {
    VectorField r = b.anchor_apply(*v);
    clo.expect(r.is_zero(), [&] { return Witness{where, "rho = " + r.to_string(b.chart()), "0"}; });
  }
}

}  // namespace detail

/// Conditions (a1)-(c) on seeded tuples.
inline Report verify_leibniz2(const TwoTermAlgebra& alg, const SampleConfig& cfg = {}) {
  if (alg.flavor != Flavor::leibniz) throw std::invalid_argument("verify_leibniz2 expects a Leibniz 2-algebra");
  detail::require_kernel(alg);
  Report rep("leibniz2");
  rep.note("degree-1 space: Gamma(Ker rho)");
  const auto& b = alg.bundle();
  Sampler s(cfg.seed ^ 0x1e1b2ULL);
  for (const char* n : {"a1", "a2", "a3", "b1", "b2", "b3", "b4", "c", "degree-1-closure"}) rep.check(n);
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    auto t = detail::sample(alg, s, cfg.max_degree);
    std::string where = "trial " + std::to_string(i);
    detail::check_ab(alg, t, where, rep);
    const auto& l2 = alg.l2;
    const auto& l3 = alg.l3;
    const auto &w = t.w, &x = t.x, &y = t.y, &z = t.z;
    Section lhs = l2(w, l3(x, y, z)) - l2(x, l3(w, y, z)) + l2(y, l3(w, x, z)) + l2(l3(w, x, y), z) - l3(l2(w, x), y, z) -
                  l3(x, l2(w, y), z) - l3(x, y, l2(w, z)) + l3(w, l2(x, y), z) + l3(w, y, l2(x, z)) - l3(w, x, l2(y, z));
    rep.check("c").expect(lhs.is_zero(), [&] { return Witness{where + ": " + t.describe(b), b.format(lhs), "0"}; });
  }
  return rep;
}

/// Skew-symmetry of l2 and l3, rho l3 = 0, the homotopy Jacobi identity on
/// quadruples and (a1)-(b4).
inline Report verify_lie2(const TwoTermAlgebra& alg, const SampleConfig& cfg = {}) {
  if (alg.flavor != Flavor::lie) throw std::invalid_argument("verify_lie2 expects a Lie 2-algebra");
  detail::require_kernel(alg);
  Report rep("lie2");
  rep.note("degree-1 space: Gamma(Ker rho)");
  const auto& b = alg.bundle();
  const auto& l2 = alg.l2;
  const auto& l3 = alg.l3;
  Sampler s(cfg.seed ^ 0x11e2ULL);
  for (const char* n : {"l2-skew", "l3-skew", "l3-in-kernel", "homotopy-jacobi", "a1", "a2", "a3", "b1", "b2", "b3", "b4", "degree-1-closure"})
    rep.check(n);
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    auto t = detail::sample(alg, s, cfg.max_degree);
    std::string where = "trial " + std::to_string(i);
    detail::check_ab(alg, t, where, rep);

    Section sum = l2(t.x, t.y) + l2(t.y, t.x);
    rep.check("l2-skew").expect(sum.is_zero(), [&] { return Witness{where + " l2(x,y)+l2(y,x)", b.format(sum), "0"}; });
    Section sm = l2(t.x, t.m) + l2(t.m, t.x);
    rep.check("l2-skew").expect(sm.is_zero(), [&] { return Witness{where + " l2(x,m)+l2(m,x)", b.format(sm), "0"}; });

    const Section* e[3] = {&t.x, &t.y, &t.z};
    Section base = l3(t.x, t.y, t.z);
    std::array<int, 3> perm{0, 1, 2};
    do {
      int sign = KForm::permutation_sign({std::size_t(perm[0]), std::size_t(perm[1]), std::size_t(perm[2])});
      Section v = l3(*e[perm[0]], *e[perm[1]], *e[perm[2]]);
      Section want = sign > 0 ? base : -base;
      rep.check("l3-skew").expect(v == want, [&] {
        return Witness{where + " permutation " + std::to_string(perm[0]) + std::to_string(perm[1]) + std::to_string(perm[2]), b.format(v), b.format(want)};
      });
    } while (std::next_permutation(perm.begin(), perm.end()));
    VectorField rl3 = b.anchor_apply(base);
    rep.check("l3-in-kernel").expect(rl3.is_zero(), [&] { return Witness{where, rl3.to_string(b.chart()), "0"}; });

    // sum_i (-1)^{i+1} l2(e_i, l3(..^e_i..)) + sum_{i<j} (-1)^{i+j} l3(l2(e_i,e_j), ..^e_i..^e_j..)
    std::array<const Section*, 4> q{&t.w, &t.x, &t.y, &t.z};
    Section lhs = b.zero();
    for (std::size_t i = 0; i < 4; ++i) {
      std::vector<const Section*> rest;
      for (std::size_t k = 0; k < 4; ++k)
        if (k != i) rest.push_back(q[k]);
      Section v = l2(*q[i], l3(*rest[0], *rest[1], *rest[2]));
      if (i % 2)
        lhs -= v;
      else
        lhs += v;
    }
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) {
        std::vector<const Section*> rest;
        for (std::size_t k = 0; k < 4; ++k)
          if (k != i && k != j) rest.push_back(q[k]);
        Section v = l3(l2(*q[i], *q[j]), *rest[0], *rest[1]);
        if ((i + j) % 2)
          lhs -= v;
        else
          lhs += v;
      }
    rep.check("homotopy-jacobi").expect(lhs.is_zero(), [&] { return Witness{where + ": " + t.describe(b), b.format(lhs), "0"}; });
  }
  return rep;
}

/// Cross-checks of the Lie 2-algebra ingredients of an algebroid: the skew
/// bracket is the skew part of o, [[e,e]] = 0, and J - DT equals the cyclic
/// sum [[e1,[[e2,e3]]]] + c.p.
inline Report verify_lie2_components(const PreCourantAlgebroid& p, const SampleConfig& cfg = {}) {
  Report rep("lie2-components");
  const auto& b = p.bundle();
  Sampler s(cfg.seed ^ 0xc0ffeeULL);
  auto& half = rep.check("skew-part-of-bracket");
  auto& self = rep.check("skew-bracket-alternating");
  auto& cyc = rep.check("curly-J-is-skew-jacobiator");
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    Section x = s.section(b, cfg.max_degree), y = s.section(b, cfg.max_degree), z = s.section(b, cfg.max_degree);
    std::string where = "trial " + std::to_string(i) + " " + detail::args(b, {&x, &y, &z});
    Section sk = skew_bracket(p, x, y);
    Section hp = Rational(1, 2) * (p.bracket(x, y) - p.bracket(y, x));
    half.expect(sk == hp, [&] { return Witness{where, b.format(sk), b.format(hp)}; });
    Section xx = skew_bracket(p, x, x);
    self.expect(xx.is_zero(), [&] { return Witness{where, b.format(xx), "0"}; });
    Section cj = lie2_curly_J(p, x, y, z);
    Section jac = skew_bracket(p, x, skew_bracket(p, y, z)) + skew_bracket(p, y, skew_bracket(p, z, x)) +
                  skew_bracket(p, z, skew_bracket(p, x, y));
    cyc.expect(cj == jac, [&] { return Witness{where, b.format(cj), b.format(jac)}; });
  }
  return rep;
}

/// Morphism (f0, f1, f2) between two-term algebras.
struct Morphism2 {
  std::function<Section(const Section&)> f0;
  std::function<Section(const Section&)> f1;
  TwoTermAlgebra::Binary f2;
  const TwoTermAlgebra* source = nullptr;
  const TwoTermAlgebra* target = nullptr;
};

/// (id, id, f2) between two algebras on the same bundle.
inline Morphism2 identity_morphism(const TwoTermAlgebra& src, const TwoTermAlgebra& dst, TwoTermAlgebra::Binary f2 = {}) {
  Morphism2 m;
  m.f0 = [](const Section& x) { return x; };
  m.f1 = [](const Section& x) { return x; };
  const std::size_t r = dst.bundle().rank();
  m.f2 = f2 ? std::move(f2) : TwoTermAlgebra::Binary([r](const Section&, const Section&) { return Section(r); });
  m.source = &src;
  m.target = &dst;
  return m;
}

/// Chain-map condition, the three degree equations and the coherence equation.
inline Report verify_morphism(const Morphism2& mor, const SampleConfig& cfg = {}) {
  if (!mor.source || !mor.target) throw std::invalid_argument("morphism without source or target");
  const auto& src = *mor.source;
  const auto& dst = *mor.target;
  if (src.flavor != dst.flavor) throw std::invalid_argument("morphism between algebras of different flavor");
  detail::require_kernel(src);
  Report rep("morphism");
  const auto& b = dst.bundle();
  Sampler s(cfg.seed ^ 0x3011ULL);
  for (const char* n : {"chain-map", "f1-in-kernel", "degree-0", "degree-1-left", "degree-1-right", "coherence"}) rep.check(n);
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    auto t = detail::sample(src, s, cfg.max_degree);
    std::string where = "trial " + std::to_string(i) + ": " + t.describe(b);
    auto eq = [&](const char* name, const Section& lhs, const Section& rhs) {
      rep.check(name).expect(lhs == rhs, [&] { return Witness{where, b.format(lhs), b.format(rhs)}; });
    };
    const auto &x = t.x, &y = t.y, &z = t.z, &m = t.m;
    Section f1m = mor.f1(m);
    eq("chain-map", mor.f0(src.d(m)), dst.d(f1m));
    VectorField rf = b.anchor_apply(f1m);
    rep.check("f1-in-kernel").expect(rf.is_zero(), [&] { return Witness{where, rf.to_string(b.chart()), "0"}; });
    Section fx = mor.f0(x), fy = mor.f0(y), fz = mor.f0(z);
    eq("degree-0", dst.l2(fx, fy) - mor.f0(src.l2(x, y)), dst.d(mor.f2(x, y)));
    eq("degree-1-left", dst.l2(fx, f1m) - mor.f1(src.l2(x, m)), mor.f2(x, src.d(m)));
    eq("degree-1-right", dst.l2(f1m, fx) - mor.f1(src.l2(m, x)), mor.f2(src.d(m), x));
    Section lhs = mor.f1(src.l3(x, y, z)) + dst.l2(fx, mor.f2(y, z)) - dst.l2(fy, mor.f2(x, z)) - dst.l2(mor.f2(x, y), fz) -
                  mor.f2(src.l2(x, y), z) + mor.f2(x, src.l2(y, z)) - mor.f2(y, src.l2(x, z)) - dst.l3(fx, fy, fz);
    eq("coherence", lhs, b.zero());
  }
  return rep;
}

}  // namespace precourant
