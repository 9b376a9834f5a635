#include "support.hpp"

#include <gtest/gtest.h>

using namespace precourant;
using namespace testing_support;

namespace {

const Chart C1 = Chart::standard(1);
const Chart C2 = Chart::standard(2);
const Chart C3 = Chart::standard(3);
const Chart C4 = Chart::standard(4);

SampleConfig trials(std::size_t n) {
  SampleConfig cfg;
  cfg.trials = n;
  return cfg;
}

RationalMatrix identity(std::size_t n) { return RationalMatrix::identity(n); }

RationalMatrix hyperbolic(std::size_t m) {
  RationalMatrix p(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) p(i, m + i) = p(m + i, i) = 1;
  return p;
}

/// Structure constants from a list of (i, j, k, c) meaning [b_i, b_j] has c b_k; antisymmetry filled in.
QuadraticLieAlgebra algebra(std::vector<std::string> names, std::vector<std::tuple<int, int, int, long>> br, RationalMatrix pairing) {
  const std::size_t m = names.size();
  std::vector<Rational> c(m * m * m, Rational(0));
  for (auto [i, j, k, v] : br) {
    c[(i * m + j) * m + k] += v;
    c[(j * m + i) * m + k] -= v;
  }
  return QuadraticLieAlgebra(std::move(names), std::move(c), std::move(pairing));
}

QuadraticLieAlgebra nonabelian2(RationalMatrix pairing) { return algebra({"a", "b"}, {{0, 1, 1, 1}}, std::move(pairing)); }

QuadraticLieAlgebra so3() { return algebra({"a", "b", "c"}, {{0, 1, 2, 1}, {1, 2, 0, 1}, {2, 0, 1, 1}}, identity(3)); }

// ---------------------------------------------------------------------------

TEST(QuadraticLie, AbelianDouble) {
  auto g = QuadraticLieAlgebra::abelian({"a"}, identity(1));
  auto d = lie_double(g);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.names()[1], "a_dual");
  EXPECT_EQ(d.pairing(), hyperbolic(1));
  for (const auto& c : d.structure()) EXPECT_EQ(c, 0);
  EXPECT_TRUE(validate_quadratic_lie(d).passed());
}

TEST(QuadraticLie, NonabelianDoubleValidates) {
  auto g = nonabelian2(identity(2));
  EXPECT_TRUE(validate_lie_algebra(g).passed());
  auto rep = validate_quadratic_lie(g);
  EXPECT_FALSE(rep.find("ad-invariance")->passed);
  auto d = lie_double(g);
  EXPECT_EQ(d.dim(), 4u);
  auto dr = validate_quadratic_lie(d);
  EXPECT_TRUE(dr.passed()) << failures(dr);
}

TEST(QuadraticLie, DoubleCoadjointAction) {
  // ([b_i, b_k^*], b_j) = -b_k^*([b_i, b_j]) = -c_ijk
  auto g = so3();
  auto d = lie_double(g);
  const std::size_t m = g.dim();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        EXPECT_EQ(d.pair(d.bracket(d.basis(i), d.basis(m + k)), d.basis(j)), -g.structure(i, j, k));
        EXPECT_EQ(d.bracket(d.basis(i), d.basis(j))[k], g.structure(i, j, k));
      }
  EXPECT_TRUE(validate_quadratic_lie(d).passed());
}

TEST(QuadraticLie, So3KillingPairing) {
  auto g = so3();
  EXPECT_TRUE(validate_quadratic_lie(g).passed());
  RationalMatrix killing(3, 3);
  for (int i = 0; i < 3; ++i) killing(i, i) = -2;
  auto gk = algebra({"a", "b", "c"}, {{0, 1, 2, 1}, {1, 2, 0, 1}, {2, 0, 1, 1}}, killing);
  EXPECT_TRUE(validate_quadratic_lie(gk).passed());
}

TEST(QuadraticLie, JacobiFailureHasWitness) {
  auto g = algebra({"a", "b", "c"}, {{0, 1, 2, 1}, {1, 2, 0, 1}, {0, 2, 0, 1}}, identity(3));
  auto rep = validate_lie_algebra(g);
  ASSERT_FALSE(rep.find("jacobi")->passed);
  EXPECT_NE(rep.find("jacobi")->witness->where.find("[a,[b,c]]"), std::string::npos);
  EXPECT_THROW(lie_double(g), construction_error);
}

TEST(QuadraticLie, NonAntisymmetricFails) {
  std::vector<Rational> c(8, Rational(0));
  c[(0 * 2 + 1) * 2 + 1] = 1;  // [a,b] = b but [b,a] = 0
  QuadraticLieAlgebra g({"a", "b"}, c, identity(2));
  EXPECT_FALSE(validate_lie_algebra(g).find("antisymmetry")->passed);
}

// ---------------------------------------------------------------------------

/// Double of [a,b] = b acting on R^1 by rho(a) = -x1 d/dx1, rho(b) = d/dx1.
TwistedAction affine_action() {
  auto d = lie_double(nonabelian2(identity(2)));
  PolyMatrix rho(4, 1);
  rho(0, 0) = P("-x1", C1);
  rho(1, 0) = Poly(1);
  return TwistedAction{d, C1, rho, std::vector<Section>(16, Section(4))};
}

TEST(TwistedAction, GenuineActionPasses) {
  auto ta = affine_action();
  auto rep = validate_twisted_action(ta);
  EXPECT_TRUE(rep.passed()) << failures(rep);
}

TEST(TwistedAction, UntwistedActionIsCourant) {
  auto p = from_twisted_action(affine_action());
  EXPECT_TRUE(verify_axioms(p, trials(4)).passed());
  const auto& b = p.bundle();
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j)
      for (std::size_t k = 0; k < b.rank(); ++k) EXPECT_TRUE(p.jacobiator(b.frame(i), b.frame(j), b.frame(k)).is_zero());
  auto xs = random_sections(b, 81, 9);
  for (std::size_t i = 0; i + 2 < xs.size(); i += 3) EXPECT_TRUE(p.jacobiator(xs[i], xs[i + 1], xs[i + 2]).is_zero());
}

TEST(TwistedAction, AbelianOnLine) {
  auto g = QuadraticLieAlgebra::abelian({"a", "b"}, hyperbolic(1));
  PolyMatrix rho(2, 1);
  rho(0, 0) = Poly(1);
  TwistedAction ta{g, C1, rho, std::vector<Section>(4, Section(2))};
  auto p = from_twisted_action(ta);
  auto rep = verify_jacobiator_theorem(p, trials(4));
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(jacobiator_flat(p).is_zero());
}

TEST(TwistedAction, ZeroAnchorGivesPointwiseBracket) {
  auto g = so3();
  TwistedAction ta{g, C2, PolyMatrix(3, 2), std::vector<Section>(9, Section(3))};
  auto p = from_twisted_action(ta);
  auto xs = random_sections(p.bundle(), 82, 6);
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) EXPECT_EQ(p.bracket(xs[i], xs[i + 1]), ta.pointwise_bracket(xs[i], xs[i + 1]));
  EXPECT_TRUE(jacobiator_flat(p).is_zero());
}

TEST(TwistedAction, KernelViolationFails) {
  auto g = QuadraticLieAlgebra::abelian({"a", "b"}, hyperbolic(1));
  PolyMatrix rho(2, 1);
  rho(0, 0) = Poly(1);
  std::vector<Section> k(4, Section(2));
  k[0 * 2 + 1] = Section({Poly(0), Poly(1)});  // k(a, b) = b with b in Ker rho
  k[1 * 2 + 0] = Section({Poly(0), Poly(-1)});
  TwistedAction ta{g, C1, rho, k};
  auto rep = validate_twisted_action(ta);
  ASSERT_FALSE(rep.find("k-vanishes-on-kernel")->passed);
  EXPECT_NE(rep.find("k-vanishes-on-kernel")->witness->where.find(" at ("), std::string::npos);
  try {
    from_twisted_action(ta);
    FAIL() << "expected construction_error";
  } catch (const construction_error& e) {
    EXPECT_EQ(e.check(), "k-vanishes-on-kernel");
  }
}

TEST(TwistedAction, NonAntisymmetricKFails) {
  auto ta = affine_action();
  ta.k[0 * 4 + 3] = Section({Poly(0), Poly(0), Poly(0), Poly(1)});
  EXPECT_FALSE(validate_twisted_action(ta).find("k-antisymmetric")->passed);
}

/// The synthetic twisted action of the golden manifest, rebuilt by hand.
TwistedAction synthetic() {
  auto g = lie_double(algebra({"a", "b", "c", "e"}, {{0, 1, 1, 1}}, identity(4)));
  PolyMatrix rho(8, 4);
  for (int i = 0; i < 4; ++i) rho(i, i) = Poly(1);
  std::vector<Section> k(64, Section(8));
  auto set = [&](int i, int j, Section v) {
    k[i * 8 + j] = v;
    k[j * 8 + i] = -v;
  };
  Section kab(8), kbc(8);
  kab[1] = Poly(-1);
  kab[6] = P("x4", C4);
  kbc[4] = P("x1", C4);
  set(0, 1, kab);
  set(1, 2, kbc);
  return TwistedAction{g, C4, rho, k};
}

TEST(TwistedAction, SyntheticMatchesGoldenAndTheorem) {
  auto ta = synthetic();
  auto rep = validate_twisted_action(ta);
  ASSERT_TRUE(rep.passed()) << failures(rep);
  auto p = from_twisted_action(ta);
  auto m = golden("twisted_action_synthetic");
  EXPECT_EQ(p.table(), m.algebroid->table());
  EXPECT_FALSE(jacobiator_flat(p).is_zero());
  auto jt = verify_jacobiator_theorem(p, trials(3));
  EXPECT_TRUE(jt.passed()) << failures(jt);
}

TEST(TwistedAction, BracketFormulaMatchesTableExtension) {
  auto ta = synthetic();
  auto p = from_twisted_action(ta);
  auto xs = random_sections(p.bundle(), 83, 8);
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) EXPECT_EQ(p.bracket(xs[i], xs[i + 1]), twisted_action_bracket(ta, xs[i], xs[i + 1]));
}

// ---------------------------------------------------------------------------

std::vector<Section> zero_beta(const CourantBundle& b) { return std::vector<Section>(b.rank() * b.rank(), b.zero()); }

TEST(ConnectionBeta, FlatZeroIsStandard) {
  auto b = CourantBundle::standard(C3);
  auto p = from_connection_beta(b, Connection{}, zero_beta(b));
  EXPECT_EQ(p.table(), standard(C3).table());
}

TEST(ConnectionBeta, TwistBetaIsTwistedExample) {
  auto b = CourantBundle::standard(C4);
  KForm h = F("x4*dx1&dx2&dx3", C4);
  auto p = from_connection_beta(b, Connection{}, twist_deformation(b, h).table());
  EXPECT_EQ(p.table(), twisted_exact(C4, h).table());
}

TEST(ConnectionBeta, NonSkewBetaRejected) {
  auto b = CourantBundle::standard(C3);
  auto beta = zero_beta(b);
  beta[3 * b.rank() + 4] = b.parse_section("dx3");  // beta(dx1, dx2) = dx3, not skew
  try {
    from_connection_beta(b, Connection{}, beta);
    FAIL() << "expected construction_error";
  } catch (const construction_error& e) {
    EXPECT_EQ(e.check(), "beta-skew");
  }
}

/// Torsion-free metric connection on TR^2 + T*R^2: nabla_{d1} d1 = x2 d2, nabla_{d1} dx2 = -x2 dx1.
Connection curved() {
  Connection c;
  c.gamma.assign(2, PolyMatrix(4, 4));
  c.gamma[0](1, 0) = P("x2", C2);
  c.gamma[0](2, 3) = P("-x2", C2);
  return c;
}

TEST(ConnectionBeta, CurvedConnectionFormulaMatchesTable) {
  auto b = CourantBundle::standard(C2);
  auto c = curved();
  auto rep = validate_connection_beta(b, c, zero_beta(b));
  ASSERT_TRUE(rep.passed()) << failures(rep);
  auto p = from_connection_beta(b, c, zero_beta(b));
  EXPECT_TRUE(verify_axioms(p, trials(6)).passed());
  auto xs = random_sections(b, 84, 10);
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) EXPECT_EQ(p.bracket(xs[i], xs[i + 1]), connection_beta_bracket(b, c, zero_beta(b), xs[i], xs[i + 1]));
  EXPECT_TRUE(verify_jacobiator_theorem(p, trials(3)).passed());
}

TEST(ConnectionBeta, NonMetricConnectionRejected) {
  auto b = CourantBundle::standard(C2);
  Connection c;
  c.gamma.assign(2, PolyMatrix(4, 4));
  c.gamma[0](1, 0) = P("x2", C2);  // no compensating cotangent term
  EXPECT_FALSE(validate_connection_beta(b, c, zero_beta(b)).find("metric-connection")->passed);
}

TEST(ConnectionBeta, TorsionViolatesAnchorCondition) {
  auto b = CourantBundle::standard(C2);
  Connection c;
  c.gamma.assign(2, PolyMatrix(4, 4));
  c.gamma[0](1, 1) = Poly(1);  // nabla_{d1} d2 = d2, nabla_{d1} dx2 = -dx2
  c.gamma[0](3, 3) = Poly(-1);
  auto rep = validate_connection_beta(b, c, zero_beta(b));
  EXPECT_TRUE(rep.find("metric-connection")->passed);
  EXPECT_FALSE(rep.find("anchor-condition")->passed);
}

// ---------------------------------------------------------------------------

/// 2[(R12,R34) - (R13,R24) + (R14,R23)], the S4 sum collapsed by hand.
Poly rr_closed_form(const DissectionData& dd) {
  auto R = [&](std::size_t i, std::size_t j) { return dd.curvature(i, j); };
  return Rational(2) * (dd.pair(R(0, 1), R(2, 3)) - dd.pair(R(0, 2), R(1, 3)) + dd.pair(R(0, 3), R(1, 2)));
}

TEST(Dissection, RankZeroIsStandard) {
  DissectionData dd(C3, {}, RationalMatrix(0, 0));
  auto p = from_dissection(dd);
  EXPECT_EQ(p.bundle(), CourantBundle::standard(C3));
  EXPECT_EQ(p.table(), standard(C3).table());
  EXPECT_TRUE(dissection_jacobiator_check(dd).passed());
}

TEST(Dissection, ConstantCurvatureOnPlane) {
  DissectionData dd(C2, {"r1", "r2"}, identity(2));
  dd.set_curvature(0, 1, {Poly(1), Poly(0)});
  auto rep = dissection_jacobiator_check(dd);
  EXPECT_TRUE(rep.passed()) << failures(rep);
  auto pd = dissection_pontryagin(dd);
  EXPECT_TRUE(pd.conditions_hold);
  EXPECT_TRUE(pd.H.is_zero());
  EXPECT_TRUE(pd.report.passed()) << failures(pd.report);
}

TEST(Dissection, GoldenRank2MatchesBruteForce) {
  auto m = golden("dissection_rank2");
  const auto& dd = *m.dissection;
  auto rep = dissection_jacobiator_check(dd);
  EXPECT_TRUE(rep.passed()) << failures(rep);
  EXPECT_EQ(r_wedge_r(dd).coefficient({0, 1, 2, 3}), rr_closed_form(dd));
  auto pd = dissection_pontryagin(dd);
  ASSERT_TRUE(pd.conditions_hold);
  EXPECT_TRUE(pd.report.passed()) << failures(pd.report);
  KForm expected(4, 4);
  expected.set({0, 1, 2, 3}, Rational(1, 2) * rr_closed_form(dd));
  EXPECT_EQ(pd.H, expected);
  EXPECT_EQ(pd.H.to_string(C4), "dx1&dx2&dx3&dx4");
  // the lift-based representative carries the opposite orientation convention
  auto res = pontryagin_representative(*m.algebroid, *m.lift);
  ASSERT_TRUE(res.H.has_value());
  EXPECT_EQ(*res.H, -pd.H);
}

TEST(Dissection, NonFlatConnectionExercisesCurvatureTerm) {
  // so(3) fibre over R^2 with nabla_{d1} = x2 ad(r1) and R = 0: the curvature defect is nonzero
  RationalMatrix g = identity(3);
  DissectionData dd(C2, {"r1", "r2", "r3"}, g);
  dd.set_fiber_bracket(0, 1, {Poly(0), Poly(0), Poly(1)});
  dd.set_fiber_bracket(1, 2, {Poly(1), Poly(0), Poly(0)});
  dd.set_fiber_bracket(2, 0, {Poly(0), Poly(1), Poly(0)});
  PolyMatrix ad1(3, 3);
  ad1(2, 1) = P("x2", C2);  // [r1, r2] = r3
  ad1(1, 2) = P("-x2", C2);  // [r1, r3] = -r2
  dd.set_gamma(0, ad1);
  ASSERT_TRUE(validate_dissection(dd).passed());
  DissectionTerms T{dd};
  bool v_nonzero = false;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) v_nonzero = v_nonzero || !T.V(0, a, b, 1).is_zero();
  EXPECT_TRUE(v_nonzero);
  auto p = from_dissection(dd);
  const auto& bb = p.bundle();
  Section j = p.jacobiator(bb.frame(0), bb.frame(1), bb.frame(3));
  EXPECT_FALSE(j.is_zero());
  auto rep = dissection_jacobiator_check(dd);
  EXPECT_TRUE(rep.passed()) << failures(rep);
  EXPECT_FALSE(dissection_pontryagin(dd).conditions_hold);
  EXPECT_TRUE(verify_axioms(p, trials(4)).passed());
}

TEST(Dissection, NonSkewConnectionFailsValidation) {
  DissectionData dd(C2, {"r1"}, identity(1));
  PolyMatrix g(1, 1);
  g(0, 0) = Poly(1);
  dd.set_gamma(0, g);
  EXPECT_FALSE(validate_dissection(dd).find("metric-connection")->passed);
}

TEST(Dissection, SetterRejectsDiagonal) {
  DissectionData dd(C2, {"r1"}, identity(1));
  EXPECT_THROW(dd.set_curvature(1, 1, {Poly(1)}), std::invalid_argument);
  EXPECT_THROW(dd.set_fiber_bracket(0, 0, {Poly(1)}), std::invalid_argument);
}

}  // namespace
