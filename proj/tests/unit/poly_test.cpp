#include <gtest/gtest.h>

#include <random>

#include "fwdflat/poly.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using fwdflat::Poly;

namespace {

Poly x(const char* n) { return Poly::variable(n); }

std::vector<mpq_class> dense(const Poly& p, const std::string& var) {
  std::vector<mpq_class> out(p.degree_in(var) + 1);
  for (const auto& t : p.terms()) out[t.mono.degree_in(var)] += t.coef;
  return out;
}

}  // namespace

TEST(Poly, CanonicalOrdering) {
  Poly a = x("x1") * x("x2") + x("x3") + 1;
  Poly b = Poly(1) + x("x3") + x("x2") * x("x1");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.to_string(), "x1*x2 + x3 + 1");
  EXPECT_EQ((x("x1") - x("x1")).is_zero(), true);
}

TEST(Poly, Printing) {
  Poly p = pow(x("x1"), 2) * mpq_class(3) - x("u1") * mpq_class(1, 2) - 4;
  EXPECT_EQ(p.to_string(), "3*x1^2 - 1/2*u1 - 4");
  EXPECT_EQ(Poly().to_string(), "0");
  EXPECT_EQ((-x("a")).to_string(), "-a");
}

TEST(Poly, DerivativeAndCoefficients) {
  Poly p = x("x1") * (x("x3") + 1);
  EXPECT_EQ(derivative(p, "x3"), x("x1"));
  EXPECT_EQ(derivative(p, "x1"), x("x3") + 1);
  EXPECT_TRUE(derivative(Poly(7), "x1").is_zero());
  auto c = coefficients_in(p, "x3");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], x("x1"));
  EXPECT_EQ(c[1], x("x1"));
  EXPECT_EQ(from_coefficients(c, "x3"), p);
}

TEST(Poly, ExactDivision) {
  Poly a = x("x1") + x("x2");
  Poly b = x("x1") - 2 * x("u1");
  auto q = exact_divide(a * b, b);
  ASSERT_TRUE(q.has_value());
  EXPECT_EQ(*q, a);
  EXPECT_FALSE(exact_divide(a * b + 1, b).has_value());
}

TEST(Poly, GcdKnownFactors) {
  Poly common = x("x1") * x("x2") + x("u1") + 3;
  Poly a = common * (x("x1") + 1);
  Poly b = common * (x("x2") - x("u1"));
  EXPECT_EQ(gcd(a, b), make_monic(common));
  EXPECT_EQ(gcd(x("x1"), x("x2")), Poly(1));
  EXPECT_EQ(gcd(Poly(), Poly()), Poly());
  EXPECT_EQ(gcd(Poly(), a), make_monic(a));
  EXPECT_EQ(gcd(pow(x("x1"), 3) * x("x2"), pow(x("x1"), 2) * pow(x("x2"), 4)), pow(x("x1"), 2) * x("x2"));
}

TEST(PolyProperty, UnivariateGcdMatchesEuclid) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vars{"t"};
  for (int i = 0; i < 200; ++i) {
    Poly g = gen::poly(rng, vars, 3, 3);
    Poly a = gen::poly(rng, vars, 4, 4) * g;
    Poly b = gen::poly(rng, vars, 4, 4) * g;
    if (a.is_zero() || b.is_zero()) continue;
    auto expected = oracle::univariate_gcd(dense(a, "t"), dense(b, "t"));
    EXPECT_EQ(dense(gcd(a, b), "t"), expected) << a.to_string() << " | " << b.to_string();
  }
}

TEST(PolyProperty, MultivariateGcdDividesAndIsMaximal) {
  std::mt19937_64 rng(12);
  const std::vector<std::string> vars{"x1", "x2", "u1"};
  for (int i = 0; i < 150; ++i) {
    Poly g = gen::poly(rng, vars, 3, 2);
    Poly p = gen::poly(rng, vars, 3, 2);
    Poly q = gen::poly(rng, vars, 3, 2);
    if (g.is_zero() || p.is_zero() || q.is_zero()) continue;
    Poly a = g * p, b = g * q;
    Poly d = gcd(a, b);
    ASSERT_TRUE(exact_divide(a, d).has_value());
    ASSERT_TRUE(exact_divide(b, d).has_value());
    // g divides every common divisor's multiple, so g must divide the gcd.
    EXPECT_TRUE(exact_divide(d, g).has_value()) << a.to_string() << " | " << b.to_string();
    EXPECT_EQ(gcd(b, a), d);
  }
}

TEST(PolyProperty, RingAxiomsAtPoints) {
  std::mt19937_64 rng(13);
  const std::vector<std::string> vars{"x1", "x2"};
  for (int i = 0; i < 100; ++i) {
    Poly a = gen::poly(rng, vars, 3, 3), b = gen::poly(rng, vars, 3, 3), c = gen::poly(rng, vars, 3, 3);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a - a, Poly());
  }
}
