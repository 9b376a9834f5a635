#include "support.hpp"

#include <gtest/gtest.h>

using namespace precourant;
using namespace testing_support;

namespace {

const Chart C2 = Chart::standard(2);
const Chart C3 = Chart::standard(3);

PolyMatrix poly_matrix(const std::vector<std::vector<std::string>>& rows, const Chart& c) {
  PolyMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = P(rows[i][j], c);
  return m;
}

RationalMatrix diag(std::vector<long> d) {
  RationalMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

TEST(Bundle, StandardPassesValidation) {
  auto b = CourantBundle::standard(C3);
  EXPECT_EQ(b.rank(), 6u);
  EXPECT_TRUE(validate_bundle(b).passed()) << failures(validate_bundle(b));
  EXPECT_EQ(b.frame_names().front(), "px1");
  EXPECT_EQ(b.frame_names().back(), "dx3");
}

TEST(Bundle, AnchorOnCotangentFrameBreaksRhoRhoStar) {
  auto std_b = CourantBundle::standard(C3);
  PolyMatrix a = std_b.anchor();
  a(3, 0) = Poly(1);  // dx1 -> d/dx1
  CourantBundle b(C3, std_b.metric(), a, std_b.frame_names());
  auto rep = validate_bundle(b);
  ASSERT_FALSE(rep.passed());
  EXPECT_FALSE(rep.find("rho-rho-star-zero")->passed);
  EXPECT_TRUE(rep.find("metric-symmetric")->passed);
}

TEST(Bundle, RankOneZeroAnchor) {
  CourantBundle b(Chart::standard(1), diag({1}), PolyMatrix(1, 1));
  EXPECT_TRUE(validate_bundle(b).passed());
}

TEST(Bundle, NonSymmetricOrSingularMetricFails) {
  RationalMatrix g(2, 2);
  g(0, 1) = 1;
  CourantBundle b(Chart::standard(1), g, PolyMatrix(2, 1));
  auto rep = validate_bundle(b);
  EXPECT_FALSE(rep.find("metric-symmetric")->passed);
  EXPECT_FALSE(rep.find("metric-invertible")->passed);
}

TEST(Bundle, ConstructorRejectsShapeErrors) {
  EXPECT_THROW(CourantBundle(C2, diag({1, 1}), PolyMatrix(3, 2)), std::invalid_argument);
  EXPECT_THROW(CourantBundle(C2, diag({1, 1}), PolyMatrix(2, 3)), std::invalid_argument);
  EXPECT_THROW(CourantBundle(C2, diag({1, 1}), PolyMatrix(2, 2), {"a", "a"}), std::invalid_argument);
  EXPECT_THROW(CourantBundle(C2, diag({1, 1}), PolyMatrix(2, 2), {"a", "x1"}), std::invalid_argument);
}

TEST(Bundle, DeeOfProduct) {
  auto b = CourantBundle::standard(C2);
  EXPECT_EQ(b.dee(P("x1*x2", C2)), b.parse_section("x2*dx1 + x1*dx2"));
}

TEST(Bundle, Pairing) {
  auto b = CourantBundle::standard(C2);
  EXPECT_EQ(b.pairing(b.parse_section("px1 + x2*dx2"), b.parse_section("x1*dx1 + px2")), P("x1 + x2", C2));
}

TEST(Bundle, KernelCoisotropyPointwise) {
  Chart c1 = Chart::standard(1);
  // g = diag(1,-1), rho(e1) = rho(e2) = d/dx1: kernel spanned by e1 - e2, which is null.
  CourantBundle ok(c1, diag({1, -1}), poly_matrix({{"1"}, {"1"}}, c1));
  std::vector<std::vector<Rational>> pts = {{Rational(0)}, {Rational(2)}};
  EXPECT_TRUE(validate_bundle(ok).passed());
  EXPECT_TRUE(kernel_coisotropy_check(ok, pts).passed());
  // g = diag(1,1), rho(e1) = d/dx1, rho(e2) = 0: kernel spanned by e2, not coisotropic.
  CourantBundle bad(c1, diag({1, 1}), poly_matrix({{"1"}, {"0"}}, c1));
  auto rep = kernel_coisotropy_check(bad, pts);
  EXPECT_FALSE(rep.passed());
  ASSERT_TRUE(rep.find("kernel-coisotropic")->witness.has_value());
}

TEST(Bundle, ParseSectionRejectsUnknownFrame) {
  auto b = CourantBundle::standard(C2);
  EXPECT_THROW(b.parse_section("qx1"), parse_error);
  EXPECT_THROW(b.parse_section("x1"), parse_error);
}

TEST(Bundle, ConstantKernelOfStandardBundleIsCotangent) {
  auto b = CourantBundle::standard(C2);
  auto k = constant_kernel(b);
  EXPECT_EQ(k.size(), 2u);
  for (const auto& s : k) EXPECT_TRUE(b.anchor_apply(s).is_zero());
}

TEST(Bundle, LiftCheck) {
  auto b = CourantBundle::standard(C2);
  EXPECT_TRUE(check_lift(b, {b.frame(0), b.frame(1)}).passed());
  EXPECT_FALSE(check_lift(b, {b.frame(1), b.frame(0)}).passed());
}

// Properties on a non-trivial bundle: rank 4 over R^2 with a polynomial anchor.
class BundleProperties : public ::testing::Test {
protected:
  CourantBundle b = [] {
    RationalMatrix g(4, 4);
    g(0, 2) = g(2, 0) = 1;
    g(1, 3) = g(3, 1) = 1;
    PolyMatrix a(4, 2);
    a(0, 0) = Poly(1);
    a(1, 0) = P("x2", C2);
    a(1, 1) = P("x1", C2);
    return CourantBundle(C2, g, a);
  }();
};

TEST_F(BundleProperties, Validates) { EXPECT_TRUE(validate_bundle(b).passed()) << failures(validate_bundle(b)); }

TEST_F(BundleProperties, PairingWithDeeIsAnchorAction) {
  Sampler s(5);
  for (int t = 0; t < 20; ++t) {
    Poly f = s.poly(2, 3);
    Section e = s.section(b, 2);
    EXPECT_EQ(b.pairing(b.dee(f), e), b.anchor_apply(e).apply(f));
  }
}

TEST_F(BundleProperties, RhoKillsRhoStar) {
  Sampler s(6);
  for (int t = 0; t < 20; ++t) EXPECT_TRUE(b.anchor_apply(b.dee(s.poly(2, 3))).is_zero());
}

TEST_F(BundleProperties, PairingSymmetricAndLinear) {
  Sampler s(8);
  for (int t = 0; t < 20; ++t) {
    Section x = s.section(b, 2), y = s.section(b, 2);
    Poly f = s.poly(2, 2);
    EXPECT_EQ(b.pairing(x, y), b.pairing(y, x));
    EXPECT_EQ(b.pairing(f * x, y), f * b.pairing(x, y));
  }
}

TEST_F(BundleProperties, LowerRaiseRoundTrip) {
  Sampler s(9);
  for (int t = 0; t < 10; ++t) {
    Section x = s.section(b, 2);
    EXPECT_EQ(b.raise(b.lower(x)), x);
  }
}

}  // namespace
