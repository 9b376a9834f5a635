#pragma once

// Deformations o~ = o + omega, B-field transformations, the Pontryagin
// representative, naive cohomology and the quotient Lie algebroid test.

#include "twoalg.hpp"

namespace precourant {

/// omega in C^2_D(E, Ker rho), given by its values on frame pairs and
/// extended function-bilinearly.
class Deformation {
public:
  Deformation() = default;
  Deformation(std::size_t rank, std::vector<Section> table) : rank_(rank), table_(std::move(table)) {
    if (table_.size() != rank_ * rank_) throw std::invalid_argument("deformation table must have rank^2 entries");
    for (const auto& s : table_)
      if (s.rank() != rank_) throw rank_mismatch("deformation value has the wrong rank");
  }
  static Deformation zero(std::size_t rank) { return Deformation(rank, std::vector<Section>(rank * rank, Section(rank))); }

  /// Values of a Ker-valued 2-cochain on frame pairs.
  static Deformation from_cochain(const CourantBundle& b, const KerCochain& w) {
    if (w.degree() != 2) throw std::invalid_argument("a deformation is a Ker-valued 2-cochain");
    std::vector<Section> t;
    for (std::size_t i = 0; i < b.rank(); ++i)
      for (std::size_t j = 0; j < b.rank(); ++j) {
        Section a[2] = {b.frame(i), b.frame(j)};
        t.push_back(w.evaluate(b, a));
      }
    return Deformation(b.rank(), std::move(t));
  }

  std::size_t rank() const { return rank_; }
  const Section& at(std::size_t i, std::size_t j) const { return table_.at(i * rank_ + j); }
  const std::vector<Section>& table() const { return table_; }
  bool is_zero() const {
    return std::all_of(table_.begin(), table_.end(), [](const Section& s) { return s.is_zero(); });
  }

  Section evaluate(const Section& a, const Section& b) const {
    Section out(rank_);
    for (std::size_t i = 0; i < rank_; ++i) {
      if (a[i].is_zero()) continue;
      for (std::size_t j = 0; j < rank_; ++j) {
        if (b[j].is_zero() || at(i, j).is_zero()) continue;
        out += (a[i] * b[j]) * at(i, j);
      }
    }
    return out;
  }

  Deformation operator-() const {
    auto t = table_;
    for (auto& s : t) s = -s;
    return Deformation(rank_, std::move(t));
  }
  friend Deformation operator+(const Deformation& a, const Deformation& b) {
    if (a.rank_ != b.rank_) throw rank_mismatch("deformations of different rank");
    auto t = a.table_;
    for (std::size_t k = 0; k < t.size(); ++k) t[k] += b.table_[k];
    return Deformation(a.rank_, std::move(t));
  }
  bool operator==(const Deformation&) const = default;

private:
  std::size_t rank_ = 0;
  std::vector<Section> table_;
};

/// omega(e1, e2) = rho^*(h(rho e1, rho e2, .)) for a 3-form h.
inline Deformation twist_deformation(const CourantBundle& b, const KForm& h) {
  if (h.degree() != 3) throw std::invalid_argument("twist needs a 3-form");
  if (h.dim() != b.dim()) throw chart_mismatch("3-form lives on a different chart");
  std::vector<VectorField> rho;
  for (std::size_t i = 0; i < b.rank(); ++i) rho.push_back(b.anchor_apply(b.frame(i)));
  std::vector<Section> t;
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j) {
      if (rho[i].is_zero() || rho[j].is_zero() || h.is_zero()) {
        t.push_back(b.zero());
        continue;
      }
      VectorField xy[2] = {rho[i], rho[j]};
      t.push_back(b.rho_star(insert(xy, h)));
    }
  return Deformation(b.rank(), std::move(t));
}

/// Im omega in Ker rho, <omega(e1,e2),e3> totally alternating and
/// i_{D x_m} omega^flat = 0, on frame tuples.
inline Report validate_deformation(const PreCourantAlgebroid& p, const Deformation& w) {
  Report rep("validate-deformation");
  const auto& b = p.bundle();
  const std::size_t r = b.rank();
  if (w.rank() != r) throw rank_mismatch("deformation rank differs from bundle rank");
  auto& img = rep.check("image-in-kernel");
  auto& alt = rep.check("flat-alternating");
  auto& dee = rep.check("contraction-with-D");
  std::vector<std::vector<Poly>> low(r * r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      VectorField x = b.anchor_apply(w.at(i, j));
      img.expect(x.is_zero(), [&] { return Witness{"rho omega" + detail::frame_args(b, {i, j}), x.to_string(b.chart()), "0"}; });
      low[i * r + j] = b.lower(w.at(i, j));
    }
  auto fl = [&](std::size_t i, std::size_t j, std::size_t k) -> const Poly& { return low[i * r + j][k]; };
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k) {
        const Poly& v = fl(i, j, k);
        Poly a = -fl(j, i, k), c = -fl(i, k, j);
        alt.expect(v == a && v == c, [&] {
          return Witness{"<omega" + detail::frame_args(b, {i, j}) + ", " + b.frame_names()[k] + ">", b.format(v),
                         v == a ? b.format(c) : b.format(a)};
        });
      }
  for (std::size_t m = 0; m < b.dim(); ++m) {
    Section d = b.dee(Poly::var(m));
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k) {
        Poly v = b.pairing(w.evaluate(d, b.frame(j)), b.frame(k));
        dee.expect(v.is_zero(), [&] {
          return Witness{"omega^flat(D" + b.chart().var(m) + ", " + b.frame_names()[j] + ", " + b.frame_names()[k] + ")", b.format(v), "0"};
        });
      }
  }
  return rep;
}

/// Table of o + omega; omega must pass validation.
inline PreCourantAlgebroid apply_deformation(const PreCourantAlgebroid& p, const Deformation& w) {
  auto rep = validate_deformation(p, w);
  if (!rep.passed()) {
    const auto* f = rep.first_failure();
    throw std::invalid_argument("invalid deformation (" + f->name + "): " + f->witness->where);
  }
  auto t = p.table();
  for (std::size_t k = 0; k < t.size(); ++k) t[k] += w.table()[k];
  return PreCourantAlgebroid(p.bundle(), std::move(t));
}

/// omega(e1, e2) = e1 o~ e2 - e1 o e2 on frame pairs.
inline Deformation extract_deformation(const PreCourantAlgebroid& p, const PreCourantAlgebroid& q) {
  if (!(p.bundle() == q.bundle())) throw std::invalid_argument("algebroids live on different bundles");
  auto t = q.table();
  for (std::size_t k = 0; k < t.size(); ++k) t[k] -= p.table()[k];
  return Deformation(p.rank(), std::move(t));
}

inline KerCochain to_ker_cochain(const CourantBundle& b, const Deformation& w) {
  return KerCochain(Cochain::from_increasing(b.rank(), 3, [&](const Cochain::Index& idx) {
    return b.pairing(w.at(idx[0], idx[1]), b.frame(idx[2]));
  }));
}

/// omega^2(e1,e2,e3) = 2 (omega(e1, omega(e2,e3)) + c.p.).
inline Section omega_squared(const Deformation& w, const Section& a, const Section& b, const Section& c) {
  return Rational(2) * (w.evaluate(a, w.evaluate(b, c)) + w.evaluate(b, w.evaluate(c, a)) + w.evaluate(c, w.evaluate(a, b)));
}

/// J~ = J + partial omega + 1/2 omega^2 on frame triples and seeded sections.
inline Report verify_deformation_identity(const PreCourantAlgebroid& p, const Deformation& w, const SampleConfig& cfg = {},
                                          const std::vector<Section>* lift = nullptr) {
  Report rep("deform");
  const auto& b = p.bundle();
  rep.merge(validate_deformation(p, w));
  if (!rep.passed()) return rep;
  PreCourantAlgebroid q = apply_deformation(p, w);
  auto& id = rep.check("deformed-jacobiator");
  auto ev = [&](std::span<const Section> a) { return w.evaluate(a[0], a[1]); };
  bool sq_zero = true;
  auto run = [&](const Section& x, const Section& y, const Section& z, const std::string& where) {
    Section lhs = q.jacobiator(x, y, z);
    Section args[3] = {x, y, z};
    Section sq = omega_squared(w, x, y, z);
    if (!sq.is_zero()) sq_zero = false;
    Section rhs = p.jacobiator(x, y, z) + cobound_partial_eval(p, ev, args) + Rational(1, 2) * sq;
    id.expect(lhs == rhs, [&] { return Witness{where, b.format(lhs), b.format(rhs)}; });
  };
  const std::size_t r = b.rank();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k) run(b.frame(i), b.frame(j), b.frame(k), "frames " + detail::frame_args(b, {i, j, k}));
  Sampler s(cfg.seed ^ 0xdef0ULL);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Section x = s.section(b, cfg.max_degree), y = s.section(b, cfg.max_degree), z = s.section(b, cfg.max_degree);
    run(x, y, z, "trial " + std::to_string(t) + " " + detail::args(b, {&x, &y, &z}));
  }
  rep.note(std::string("omega^2 vanishes on all tested triples: ") + (sq_zero ? "yes" : "no"));

  // the Leibniz 2-algebras are isomorphic through (id, id, omega)
  auto kernel = kernel_generators(b, lift);
  auto src = build_leibniz2(p, kernel);
  auto dst = build_leibniz2(q, kernel);
  auto mor = identity_morphism(src, dst, [w](const Section& x, const Section& y) { return w.evaluate(x, y); });
  rep.merge(verify_morphism(mor, cfg), "morphism-");
  return rep;
}

/// B^sharp(e) = rho^*(i_{rho e} beta).
inline Section b_sharp(const CourantBundle& b, const KForm& beta, const Section& e) {
  VectorField x = b.anchor_apply(e);
  if (x.is_zero() || beta.is_zero()) return b.zero();
  return b.rho_star(contract(x, beta));
}

/// e^B(e) = e + B^sharp(e).
inline Section b_transform(const CourantBundle& b, const KForm& beta, const Section& e) { return e + b_sharp(b, beta, e); }

/// Checks of the B-field transformation e -> e + (rho^* beta)^sharp(e).
inline Report bfield_verify(const PreCourantAlgebroid& p, const KForm& beta, const SampleConfig& cfg = {}) {
  Report rep("bfield");
  const auto& b = p.bundle();
  if (beta.degree() != 2) throw std::invalid_argument("a B-field is a 2-form");
  if (beta.dim() != b.dim()) throw chart_mismatch("2-form lives on a different chart");
  KForm dbeta = ext_d(beta);
  KForm neg = -beta;
  Deformation tw = twist_deformation(b, dbeta);
  PreCourantAlgebroid q = apply_deformation(p, tw);
  auto& conj = rep.check("conjugated-bracket");
  auto& metric = rep.check("metric-preserved");
  auto& anchor = rep.check("anchor-preserved");
  auto& jac = rep.check("jacobiator-invariant");
  auto& closed = rep.check("closed-gives-automorphism");

  auto pair_checks = [&](const Section& x, const Section& y, const std::string& where) {
    Section lhs = q.bracket(x, y);
    Section rhs = b_transform(b, neg, p.bracket(b_transform(b, beta, x), b_transform(b, beta, y)));
    conj.expect(lhs == rhs, [&] { return Witness{where, b.format(lhs), b.format(rhs)}; });
    Poly pl = b.pairing(b_transform(b, beta, x), b_transform(b, beta, y));
    Poly pr = b.pairing(x, y);
    metric.expect(pl == pr, [&] { return Witness{where, b.format(pl), b.format(pr)}; });
    VectorField al = b.anchor_apply(b_transform(b, beta, x));
    VectorField ar = b.anchor_apply(x);
    anchor.expect(al == ar, [&] { return Witness{where, al.to_string(b.chart()), ar.to_string(b.chart())}; });
  };
  const std::size_t r = b.rank();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) pair_checks(b.frame(i), b.frame(j), "frames " + detail::frame_args(b, {i, j}));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k) {
        Section l = q.jacobiator(b.frame(i), b.frame(j), b.frame(k));
        Section rr = p.jacobiator(b.frame(i), b.frame(j), b.frame(k));
        jac.expect(l == rr, [&] { return Witness{"frames " + detail::frame_args(b, {i, j, k}), b.format(l), b.format(rr)}; });
      }
  Sampler s(cfg.seed ^ 0xbf1e1dULL);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Section x = s.section(b, cfg.max_degree), y = s.section(b, cfg.max_degree), z = s.section(b, cfg.max_degree);
    std::string where = "trial " + std::to_string(t) + " " + detail::args(b, {&x, &y, &z});
    pair_checks(x, y, where);
    Section l = q.jacobiator(x, y, z);
    Section rr = p.jacobiator(x, y, z);
    jac.expect(l == rr, [&] { return Witness{where, b.format(l), b.format(rr)}; });
  }
  if (dbeta.is_zero()) {
    closed.expect(q.table() == p.table(), [&] { return Witness{"bracket table", "deformed table differs", "original table"}; });
    rep.note("d beta = 0: e^B is an automorphism");
  } else {
    closed.expect(true, [] { return Witness{}; });
    rep.note("d beta = " + dbeta.to_string(b.chart()));
  }
  return rep;
}

namespace detail {

/// Condition S1: J(frame triples) in rho^*(T^*M).
inline void check_S1(const PreCourantAlgebroid& p, const std::vector<Section>* lift, const std::vector<Section>& kernel, Check& c) {
  const auto& b = p.bundle();
  Cochain::for_each_increasing(b.rank(), 3, [&](const Cochain::Index& idx) {
    Section j = p.jacobiator(b.frame(idx[0]), b.frame(idx[1]), b.frame(idx[2]));
    c.expect(in_rho_star_image(b, j, lift, kernel), [&] {
      return Witness{"J" + frame_args(b, {idx[0], idx[1], idx[2]}), b.format(j), "a value in rho^*(T^*M)"};
    });
  });
}

}  // namespace detail

struct PontryaginResult {
  Report report{"pontryagin"};
  std::optional<KForm> H;
};

/// H(d_i1, ..., d_i4) = <J(sigma_i1, sigma_i2, sigma_i3), sigma_i4> for a lift
/// sigma with rho(sigma_m) = d/dx_m, after checking S1, S2, dH = 0 and
/// J^flat = rho^* H.
inline PontryaginResult pontryagin_representative(const PreCourantAlgebroid& p, const std::vector<Section>& lift) {
  PontryaginResult res;
  auto& rep = res.report;
  const auto& b = p.bundle();
  rep.merge(check_lift(b, lift));
  if (!rep.passed()) return res;
  for (const auto& s : lift) b.check(s);
  rep.note("transitive: the lift is a right inverse of the anchor");
  auto kernel = kernel_generators(b, &lift);
  auto& s1 = rep.check("S1-jacobiator-in-image");
  detail::check_S1(p, &lift, kernel, s1);
  auto& s2 = rep.check("S2-kernel-annihilates");
  for (const auto& k : kernel)
    for (std::size_t i = 0; i < b.rank(); ++i)
      for (std::size_t j = 0; j < b.rank(); ++j) {
        Section v = p.jacobiator(k, b.frame(i), b.frame(j));
        s2.expect(v.is_zero(), [&] { return Witness{"J(" + b.format(k) + ", " + b.frame_names()[i] + ", " + b.frame_names()[j] + ")", b.format(v), "0"}; });
      }
  if (!rep.passed()) return res;

  const std::size_t n = b.dim();
  KForm H(n, 4);
  if (n >= 4) {
    Cochain::for_each_increasing(n, 4, [&](const Cochain::Index& ix) {
      Section j = p.jacobiator(lift[ix[0]], lift[ix[1]], lift[ix[2]]);
      H.set(ix, b.pairing(j, lift[ix[3]]));
    });
  }
  auto& closed = rep.check("H-closed");
  KForm dH = ext_d(H);
  closed.expect(dH.is_zero(), [&] { return Witness{"dH", dH.to_string(b.chart()), "0"}; });
  auto& pull = rep.check("J-flat-equals-rho-star-H");
  Cochain jf = jacobiator_flat(p);
  Cochain::for_each_increasing(b.rank(), 4, [&](const Cochain::Index& ix) {
    std::vector<VectorField> xs;
    for (auto i : ix) xs.push_back(b.anchor_apply(b.frame(i)));
    Poly rhs = H.evaluate(xs);
    Poly lhs = jf.at(ix);
    pull.expect(lhs == rhs, [&] { return Witness{"J^flat" + detail::frame_args(b, {ix[0], ix[1], ix[2], ix[3]}), b.format(lhs), b.format(rhs)}; });
  });
  res.H = H;
  rep.note("H = " + H.to_string(b.chart()));
  return res;
}

/// J^flat = rho^*(dh) on frame quadruples; when it holds, o - rho^*(h(rho.,rho.,.))
/// has vanishing Jacobiator on frame triples.
inline Report pontryagin_vanishing_check(const PreCourantAlgebroid& p, const KForm& h) {
  Report rep("pontryagin-vanishing");
  const auto& b = p.bundle();
  if (h.degree() != 3) throw std::invalid_argument("vanishing witness must be a 3-form");
  KForm dh = ext_d(h);
  Cochain jf = jacobiator_flat(p);
  auto& eq = rep.check("J-flat-equals-rho-star-dh");
  Cochain::for_each_increasing(b.rank(), 4, [&](const Cochain::Index& ix) {
    std::vector<VectorField> xs;
    for (auto i : ix) xs.push_back(b.anchor_apply(b.frame(i)));
    Poly rhs = dh.evaluate(xs);
    Poly lhs = jf.at(ix);
    eq.expect(lhs == rhs, [&] { return Witness{"J^flat" + detail::frame_args(b, {ix[0], ix[1], ix[2], ix[3]}), b.format(lhs), b.format(rhs)}; });
  });
  if (!rep.passed()) return rep;
  PreCourantAlgebroid q = apply_deformation(p, -twist_deformation(b, h));
  auto& cj = rep.check("deformed-jacobiator-vanishes");
  const std::size_t r = b.rank();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k) {
        Section v = q.jacobiator(b.frame(i), b.frame(j), b.frame(k));
        cj.expect(v.is_zero(), [&] { return Witness{"deformed J" + detail::frame_args(b, {i, j, k}), b.format(v), "0"}; });
      }
  return rep;
}

/// D^2 = 0 and partial^2 = 0 on the samples, given J in rho^*(T^*M).
inline Report naive_cohomology_check(const PreCourantAlgebroid& p, const std::vector<Cochain>& samples, const std::vector<Section>* lift = nullptr) {
  Report rep("naive-cohomology");
  const auto& b = p.bundle();
  auto kernel = kernel_generators(b, lift);
  auto& pre = rep.check("S1-jacobiator-in-image");
  detail::check_S1(p, lift, kernel, pre);
  auto& d2 = rep.check("D-squared-zero");
  auto& p2 = rep.check("partial-squared-zero");
  if (!pre.passed) {
    rep.skipped = true;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      Cochain dd = cobound_D_unchecked(p, cobound_D_unchecked(p, samples[s]));
      if (!dd.is_zero()) {
        rep.note("D^2 counterexample on sample " + std::to_string(s) + ": " + dd.format(b));
        break;
      }
    }
    return rep;
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& psi = samples[s];
    std::string where = "sample " + std::to_string(s) + ": " + psi.format(b);
    if (!is_in_CkD(b, psi).passed()) {
      d2.fail(Witness{where, "not in C^k_D", "member"});
      continue;
    }
    Cochain d1 = cobound_D(p, psi);
    if (!is_in_CkD(b, d1).passed()) {
      d2.fail(Witness{where, "D psi left C^k_D", "member"});
      continue;
    }
    Cochain dd = cobound_D(p, d1);
    d2.expect(dd.is_zero(), [&] { return Witness{where, dd.format(b), "0"}; });
    if (psi.degree() == 0) continue;
    try {
      KerCochain phi = cochain_sharp(b, psi);
      KerCochain pp = cobound_partial(p, cobound_partial(p, phi));
      p2.expect(pp.is_zero(), [&] { return Witness{where, pp.flat().format(b), "0"}; });
    } catch (const std::domain_error& e) {
      p2.fail(Witness{where, e.what(), "alternating"});
    }
  }
  return rep;
}

/// Jacobi identity of the bracket induced on E / (Ker rho)^perp, using
/// representatives from the supplied complement basis.
inline Report quotient_jacobi_check(const PreCourantAlgebroid& p, const std::vector<Section>& complement, const std::vector<Section>* lift,
                                    const SampleConfig& cfg = {}) {
  Report rep("quotient-jacobi");
  const auto& b = p.bundle();
  for (const auto& c : complement) b.check(c);
  auto kernel = kernel_generators(b, lift);
  auto& pre = rep.check("S1-jacobiator-in-image");
  detail::check_S1(p, lift, kernel, pre);
  if (!pre.passed) {
    rep.skipped = true;
    return rep;
  }
  auto in_perp = [&](const Section& s) { return in_rho_star_image(b, s, lift, kernel); };
  Sampler s(cfg.seed ^ 0x9001ULL);

  auto& basis = rep.check("complement-basis");
  for (int k = 0; k < 3; ++k) {
    auto pt = k == 0 ? std::vector<Rational>(b.dim(), Rational(0)) : s.point(b.dim());
    RationalMatrix m(complement.size() + b.dim(), b.rank());
    for (std::size_t a = 0; a < complement.size(); ++a)
      for (std::size_t i = 0; i < b.rank(); ++i) m(a, i) = complement[a][i].evaluate(pt);
    for (std::size_t x = 0; x < b.dim(); ++x) {
      Section d = b.dee(Poly::var(x));
      for (std::size_t i = 0; i < b.rank(); ++i) m(complement.size() + x, i) = d[i].evaluate(pt);
    }
    std::size_t rk = rank(m);
    basis.expect(rk == b.rank(), [&] { return Witness{"complement with rho^*(T^*M) at sample point", "rank " + std::to_string(rk), "rank " + std::to_string(b.rank())}; });
  }

  auto& wd = rep.check("bracket-well-defined");
  auto& jac = rep.check("jacobi-modulo-perp");
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Section x = s.combination(b, complement, cfg.max_degree), y = s.combination(b, complement, cfg.max_degree),
            z = s.combination(b, complement, cfg.max_degree);
    std::string where = "trial " + std::to_string(t) + " " + detail::args(b, {&x, &y, &z});
    std::vector<Poly> xi(b.dim());
    for (auto& c : xi) c = s.poly(b.dim(), cfg.max_degree);
    Section v = b.rho_star(xi);
    Section l = skew_bracket(p, x, v);
    wd.expect(in_perp(l), [&] { return Witness{where + " with " + b.format(v), b.format(l), "a value in (Ker rho)^perp"}; });
    Section cyc = skew_bracket(p, x, skew_bracket(p, y, z)) + skew_bracket(p, y, skew_bracket(p, z, x)) + skew_bracket(p, z, skew_bracket(p, x, y));
    jac.expect(in_perp(cyc), [&] { return Witness{where, b.format(cyc), "a value in (Ker rho)^perp"}; });
  }
  return rep;
}

}  // namespace precourant
