#include "support.hpp"

#include <gtest/gtest.h>

using namespace precourant;
using namespace testing_support;

namespace {

const Chart C3 = Chart::standard(3);
const Chart C4 = Chart::standard(4);

TEST(Poly, ParseAndPrintCanonically) {
  Poly p = P("(3/2)*x1^2*x3 - x2 + 2*x2", C3);
  EXPECT_EQ(p.to_string(C3), P("x2 + 3/2*x1^2*x3", C3).to_string(C3));
  EXPECT_EQ(P("x1*x2 - x2*x1", C3), Poly());
  EXPECT_EQ(P("(x1 + x2)^2", C3), P("x1^2 + 2*x1*x2 + x2^2", C3));
  EXPECT_EQ(P("0", C3).to_string(C3), "0");
}

TEST(Poly, ArithmeticRing) {
  Sampler s(7);
  for (int t = 0; t < 20; ++t) {
    Poly a = s.poly(3, 3), b = s.poly(3, 3), c = s.poly(3, 3);
    EXPECT_EQ((a + b) * c, a * c + b * c);
    EXPECT_EQ(a * (b * c), (a * b) * c);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a - a, Poly());
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ((a * b).derivative(i), a.derivative(i) * b + a * b.derivative(i));
  }
}

TEST(Poly, Evaluate) {
  std::vector<Rational> pt = {Rational(1, 2), Rational(-1), Rational(3)};
  EXPECT_EQ(P("x1*x2 + x3^2", C3).evaluate(pt), Rational(17, 2));
}

TEST(Parse, ErrorPositions) {
  auto pos = [](const std::string& s) -> std::optional<std::size_t> {
    try {
      parse_poly(s, C3);
    } catch (const parse_error& e) {
      return e.position();
    }
    return std::nullopt;
  };
  EXPECT_EQ(pos("x1^"), 2u);
  EXPECT_EQ(pos("x1 +"), 4u);
  EXPECT_EQ(pos("(x1"), 3u);
  EXPECT_EQ(pos("x1**2"), 3u);
  EXPECT_EQ(pos("x4"), 0u);
  EXPECT_FALSE(pos("x1^2 - 1/3*x3").has_value());
}

TEST(Parse, FormLiterals) {
  KForm a = F("x1*dx2&dx1", C3);
  EXPECT_EQ(a.degree(), 2u);
  EXPECT_EQ(a.coefficient({0, 1}), P("-x1", C3));
  EXPECT_THROW(F("dx1 + dx1&dx2", C3), parse_error);
  EXPECT_EQ(F("0", C3, 2).degree(), 2u);
}

TEST(VectorFields, Apply) {
  // x2 d1 applied to x1 x2
  EXPECT_EQ(vf_apply(V({"x2", "0", "0"}, C3), P("x1*x2", C3)), P("x2^2", C3));
}

TEST(VectorFields, Bracket) {
  VectorField d1 = VectorField::coordinate(3, 0), d2 = VectorField::coordinate(3, 1);
  EXPECT_EQ(vf_bracket(P("x1", C3) * d2, d1), Poly(-1) * d2);
  EXPECT_EQ(vf_bracket(V({"x1", "0", "0"}, C3), V({"0", "x1", "0"}, C3)), V({"0", "x1", "0"}, C3));
}

TEST(VectorFields, BracketIsLieAndActsAsCommutator) {
  Sampler s(11);
  auto vf = [&] { return VectorField({s.poly(3, 2), s.poly(3, 2), s.poly(3, 2)}); };
  for (int t = 0; t < 10; ++t) {
    VectorField x = vf(), y = vf(), z = vf();
    Poly f = s.poly(3, 3);
    EXPECT_TRUE((vf_bracket(x, y) + vf_bracket(y, x)).is_zero());
    EXPECT_TRUE((vf_bracket(x, vf_bracket(y, z)) + vf_bracket(y, vf_bracket(z, x)) + vf_bracket(z, vf_bracket(x, y))).is_zero());
    EXPECT_EQ(vf_bracket(x, y).apply(f), x.apply(y.apply(f)) - y.apply(x.apply(f)));
  }
}

TEST(Forms, Wedge) {
  EXPECT_EQ(wedge(F("x1*dx2", C3), F("dx1", C3)), F("-x1*dx1&dx2", C3));
  EXPECT_TRUE(wedge(F("dx1", C3), F("dx1", C3)).is_zero());
}

TEST(Forms, ExteriorDerivative) {
  EXPECT_EQ(ext_d(F("x1*dx2", C3)), F("dx1&dx2", C3));
  EXPECT_EQ(ext_d(F("x4*dx1&dx2&dx3", C4)), F("dx4&dx1&dx2&dx3", C4));
  EXPECT_EQ(ext_d(F("x4*dx1&dx2&dx3", C4)), F("-dx1&dx2&dx3&dx4", C4));
  EXPECT_EQ(ext_d(KForm::function(3, P("x1*x2", C3))), F("x2*dx1 + x1*dx2", C3));
}

TEST(Forms, Contraction) {
  VectorField d2 = VectorField::coordinate(3, 1), d3 = VectorField::coordinate(3, 2);
  EXPECT_EQ(contract(d2, F("dx1&dx2", C3)), F("-dx1", C3));
  EXPECT_TRUE(contract(d3, F("dx1&dx2", C3)).is_zero());
}

TEST(Forms, LieDerivative) {
  VectorField d1 = VectorField::coordinate(3, 0);
  EXPECT_EQ(lie_derivative(d1, F("x1*dx2", C3)), F("dx2", C3));
  EXPECT_EQ(lie_derivative(V({"x1", "0", "0"}, C3), F("dx1", C3)), F("dx1", C3));
}

class FormProperties : public ::testing::Test {
protected:
  Sampler s{2024};
  KForm form(std::size_t deg) {
    KForm a(4, deg);
    for (int t = 0; t < 3; ++t) {
      KForm::Index idx;
      std::vector<bool> used(4, false);
      while (idx.size() < deg) {
        std::size_t i = s.below(4);
        if (used[i]) continue;
        used[i] = true;
        idx.push_back(static_cast<std::uint8_t>(i));
      }
      std::sort(idx.begin(), idx.end());
      a.add(idx, s.poly(4, 2));
    }
    return a;
  }
  VectorField vf() { return VectorField({s.poly(4, 2), s.poly(4, 2), s.poly(4, 2), s.poly(4, 2)}); }
};

TEST_F(FormProperties, DSquaredIsZero) {
  for (std::size_t deg = 0; deg <= 2; ++deg)
    for (int t = 0; t < 5; ++t) EXPECT_TRUE(ext_d(ext_d(form(deg))).is_zero());
}

TEST_F(FormProperties, ContractionTwiceIsZero) {
  for (int t = 0; t < 5; ++t) {
    VectorField x = vf();
    EXPECT_TRUE(contract(x, contract(x, form(3))).is_zero());
  }
}

TEST_F(FormProperties, WedgeAssociativeAndGradedCommutative) {
  for (int t = 0; t < 5; ++t) {
    KForm a = form(1), b = form(2), c = form(1);
    EXPECT_EQ(wedge(wedge(a, b), c), wedge(a, wedge(b, c)));
    EXPECT_EQ(wedge(a, b), wedge(b, a));
    EXPECT_EQ(wedge(a, c), -wedge(c, a));
  }
}

TEST_F(FormProperties, LieDerivativeIsDerivationAndCommutesWithD) {
  for (int t = 0; t < 5; ++t) {
    VectorField x = vf();
    KForm a = form(1), b = form(2);
    EXPECT_EQ(lie_derivative(x, wedge(a, b)), wedge(lie_derivative(x, a), b) + wedge(a, lie_derivative(x, b)));
    EXPECT_EQ(ext_d(lie_derivative(x, a)), lie_derivative(x, ext_d(a)));
  }
}

TEST_F(FormProperties, DIsAntiderivation) {
  for (int t = 0; t < 5; ++t) {
    KForm a = form(1), b = form(2);
    EXPECT_EQ(ext_d(wedge(a, b)), wedge(ext_d(a), b) - wedge(a, ext_d(b)));
  }
}

TEST_F(FormProperties, EvaluationMatchesContraction) {
  for (int t = 0; t < 5; ++t) {
    KForm a = form(2);
    VectorField xs[2] = {vf(), vf()};
    EXPECT_EQ(a.evaluate(xs), contract(xs[1], contract(xs[0], a)).coefficient({}));
  }
}

TEST(Forms, ChartMismatchThrows) {
  EXPECT_THROW(wedge(F("dx1", C3), F("dx1", C4)), std::invalid_argument);
}

}  // namespace
