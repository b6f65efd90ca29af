#include <gtest/gtest.h>

#include <random>

#include "fwdflat/error.hpp"
#include "fwdflat/expr_parser.hpp"
#include "fwdflat/geometry.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fwdflat;

namespace {

const Chart xu({"x1", "x2", "x3", "x4", "u1", "u2"});
const Chart small({"x1", "x2", "u"});

Row parse_row(std::initializer_list<const char*> entries) {
  Row r;
  for (auto e : entries) r.push_back(parse_scalar(e));
  return r;
}

VectorField field(const Chart& c, std::initializer_list<const char*> entries) { return {c, parse_row(entries)}; }
OneForm form(const Chart& c, std::initializer_list<const char*> entries) { return {c, parse_row(entries)}; }

const char* const example_f[] = {
    "(x2+x3+3*x4)/(u1+2*u2+1)",
    "x1*(x3+1)*(u1+2*u2-3)+x4-3*u2",
    "u1+2*u2",
    "x1*(x3+1)+u2",
};

Codistribution span_df() {
  std::vector<OneForm> df;
  for (auto f : example_f) df.push_back(differential(parse_scalar(f), xu));
  return Codistribution(xu, df);
}

}  // namespace

TEST(Geometry, GenericRankOfExampleJacobian) {
  EXPECT_EQ(span_df().dim(), 4u);
  Matrix proportional{parse_row({"1", "u1"}), parse_row({"u1", "u1^2"})};
  EXPECT_EQ(generic_rank(proportional), 1u);
}

TEST(Geometry, Membership) {
  Codistribution p(small, {form(small, {"1", "u", "0"})});
  EXPECT_FALSE(p.contains(OneForm::coordinate(small, "x2")));
  EXPECT_TRUE(p.contains(form(small, {"x1", "x1*u", "0"})));
  Codistribution p2(xu, {form(xu, {"1", "0", "0", "0", "0", "0"}), form(xu, {"0", "0", "1", "0", "0", "0"}),
                         form(xu, {"0", "1", "0", "3", "0", "0"})});
  EXPECT_FALSE(p2.contains(form(xu, {"1", "0", "0", "3", "0", "0"})));
  EXPECT_TRUE(p2.contains(form(xu, {"0", "1", "0", "3", "0", "0"})));
  EXPECT_THROW((void)p.contains(OneForm::coordinate(xu, "x1")), Error);
}

TEST(Geometry, LieBracket) {
  EXPECT_TRUE(is_zero(lie_bracket(VectorField::coordinate(xu, "u1"), VectorField::coordinate(xu, "u2"))));
  const Chart c3({"x1", "x2", "x3"});
  EXPECT_TRUE(is_zero(lie_bracket(field(c3, {"1", "0", "x2"}), field(c3, {"0", "1", "x1"}))));
  EXPECT_TRUE(is_zero(lie_bracket(field(xu, {"0", "-3", "0", "1", "0", "0"}), VectorField::coordinate(xu, "u1"))));
}

TEST(Geometry, ExteriorDerivativeAndInteriorProduct) {
  TwoForm d0 = exterior_derivative(form(small, {"1", "3", "0"}));
  for (const auto& r : d0.coeffs) EXPECT_TRUE(is_zero_row(r));

  const Chart c({"x1", "x3"});
  TwoForm dw = exterior_derivative(form(c, {"(x3+1)/x1", "1"}));
  // (1/x1) dx3 ^ dx1 has coefficient -1/x1 on dx1 ^ dx3.
  EXPECT_EQ(dw.coeffs[1][0], parse_scalar("1/x1"));
  EXPECT_EQ(dw.coeffs[0][1], parse_scalar("-1/x1"));

  VectorField d0v = field(xu, {"0", "0", "0", "0", "-2", "1"});
  EXPECT_TRUE(interior_product(d0v, form(xu, {"0", "0", "0", "0", "1", "2"})).is_zero());
}

TEST(Geometry, LieDerivative) {
  const Chart tx({"th1", "th2", "xi1"});
  OneForm w = form(tx, {"xi1^2*th2", "0", "0"});
  EXPECT_EQ(lie_derivative(VectorField::coordinate(tx, "xi1"), w).coeffs, parse_row({"2*xi1*th2", "0", "0"}));
  EXPECT_TRUE(is_zero(lie_derivative(field(small, {"1", "2", "0"}), form(small, {"3", "0", "1"}))));
  OneForm l = lie_derivative(field(small, {"-u", "1", "0"}), form(small, {"1", "u", "0"}));
  EXPECT_EQ(l.coeffs, parse_row({"0", "0", "-1"}));
}

TEST(Geometry, Annihilators) {
  Distribution e0(xu, {VectorField::coordinate(xu, "u1"), VectorField::coordinate(xu, "u2")});
  Codistribution dx(xu, {OneForm::coordinate(xu, "x1"), OneForm::coordinate(xu, "x2"), OneForm::coordinate(xu, "x3"),
                         OneForm::coordinate(xu, "x4")});
  EXPECT_TRUE(same_span(annihilator(e0), dx));

  std::vector<VectorField> all;
  for (const auto& v : xu.vars()) all.push_back(VectorField::coordinate(xu, v));
  EXPECT_EQ(annihilator(Distribution(xu, all)).dim(), 0u);

  Distribution e2(xu, {field(xu, {"1", "0", "-(x3+1)/x1", "0", "0", "0"}), VectorField::coordinate(xu, "x2"),
                       VectorField::coordinate(xu, "x4"), VectorField::coordinate(xu, "u1"),
                       VectorField::coordinate(xu, "u2")});
  EXPECT_TRUE(same_span(annihilator(e2), Codistribution(xu, {form(xu, {"(x3+1)/x1", "0", "1", "0", "0", "0"})})));
  EXPECT_TRUE(is_involutive(e2));
}

TEST(Geometry, Intersections) {
  Codistribution dx(xu, {OneForm::coordinate(xu, "x1"), OneForm::coordinate(xu, "x2"), OneForm::coordinate(xu, "x3"),
                         OneForm::coordinate(xu, "x4")});
  EXPECT_EQ(intersect(dx, span_df()).dim(), 2u);
  EXPECT_TRUE(same_span(intersect(dx, dx), dx));

  Codistribution a(small, {OneForm::coordinate(small, "x1"), OneForm::coordinate(small, "x2")});
  Codistribution b(small, {OneForm::coordinate(small, "u"), form(small, {"1", "u", "0"})});
  EXPECT_TRUE(same_span(intersect(a, b), Codistribution(small, {form(small, {"1", "u", "0"})})));
}

TEST(Geometry, InvariantClosure) {
  Codistribution p(small, {form(small, {"1", "u", "0"})});
  Distribution d(small, {field(small, {"-u", "1", "0"})});
  Codistribution closed = invariant_closure(p, d);
  EXPECT_TRUE(same_span(closed, Codistribution(small, {form(small, {"1", "u", "0"}), OneForm::coordinate(small, "u")})));
  EXPECT_TRUE(same_span(invariant_closure(closed, d), closed));
}

TEST(Geometry, Integrability) {
  EXPECT_TRUE(is_integrable(Codistribution(xu, {OneForm::coordinate(xu, "x1")})));
  EXPECT_TRUE(is_integrable(Codistribution(xu, {form(xu, {"(x3+1)/x1", "0", "1", "0", "0", "0"})})));
  const Chart c3({"x", "y", "z"});
  EXPECT_FALSE(is_integrable(Codistribution(c3, {form(c3, {"-y", "0", "1"})})));
}

class GeometryProperty : public ::testing::Test {
 protected:
  std::mt19937_64 rng{51};
  Chart chart{std::vector<std::string>{"x1", "x2", "u1", "u2"}};

  Row random_row(int density = 2) {
    Row r;
    for (std::size_t i = 0; i < chart.size(); ++i)
      r.push_back(std::uniform_int_distribution<int>(0, density)(rng) == 0 ? Scalar()
                                                                            : Scalar(gen::poly(rng, chart.vars(), 2, 2)));
    return r;
  }
  VectorField random_field() { return {chart, random_row()}; }
  OneForm random_form() { return {chart, random_row()}; }
};

TEST_F(GeometryProperty, AnnihilatorDuality) {
  for (int i = 0; i < 40; ++i) {
    std::vector<VectorField> fields;
    for (int k = 0; k < 1 + i % 3; ++k) fields.push_back(random_field());
    Distribution d(chart, fields);
    Codistribution p = annihilator(d);
    EXPECT_EQ(d.dim() + p.dim(), chart.size());
    for (const auto& v : d.basis())
      for (const auto& w : p.basis()) EXPECT_TRUE(interior_product(v, w).is_zero());
    EXPECT_TRUE(same_span(annihilator(p), d));
  }
}

TEST_F(GeometryProperty, BracketAntisymmetryAndCartan) {
  for (int i = 0; i < 30; ++i) {
    VectorField v = random_field(), w = random_field();
    EXPECT_TRUE(is_zero(lie_bracket(v, w) + lie_bracket(w, v)));
    Scalar g = gen::poly(rng, chart.vars(), 3, 3);
    OneForm dg = differential(g, chart);
    EXPECT_EQ(lie_derivative(v, dg).coeffs, differential(interior_product(v, dg), chart).coeffs);
    EXPECT_TRUE(is_involutive(Distribution(chart, {v})));
  }
}

TEST_F(GeometryProperty, ClosureContainsSeedAndIsStable) {
  for (int i = 0; i < 20; ++i) {
    Codistribution p0(chart, {random_form()});
    Distribution d(chart, {VectorField::coordinate(chart, "u1"), random_field()});
    Codistribution c = invariant_closure(p0, d);
    EXPECT_TRUE(c.includes(p0));
    EXPECT_TRUE(same_span(invariant_closure(c, d), c));
  }
}

TEST_F(GeometryProperty, CorankOneIsIntegrable) {
  for (int i = 0; i < 20; ++i) {
    std::vector<OneForm> forms{random_form(), random_form(), random_form()};
    Codistribution p(chart, forms);
    if (p.dim() + 1 != chart.size()) continue;
    EXPECT_TRUE(is_integrable(p));
  }
  const Chart plane({"a", "b"});
  EXPECT_TRUE(is_integrable(Codistribution(plane, {{plane, {parse_scalar("a*b+1"), parse_scalar("a^2")}}})));
}

TEST_F(GeometryProperty, IntersectionDimensionMatchesPointRanks) {
  for (int i = 0; i < 25; ++i) {
    Codistribution p(chart, {random_form(), random_form()});
    Codistribution q(chart, {random_form(), p.basis()[0] + random_form()});
    Codistribution both = intersect(p, q);
    for (const auto& w : both.basis()) {
      EXPECT_TRUE(p.contains(w));
      EXPECT_TRUE(q.contains(w));
    }
    std::size_t rank_sum = 0;
    for (int k = 0; k < 8; ++k) {
      auto pt = oracle::random_point(rng, chart.vars());
      oracle::DenseMatrix m;
      for (const auto* c : {&p, &q})
        for (const auto& w : c->basis()) {
          m.emplace_back();
          for (const auto& s : w.coeffs) m.back().push_back(eval_at(s, pt));
        }
      rank_sum = std::max(rank_sum, oracle::rank(m));
    }
    EXPECT_EQ(both.dim(), p.dim() + q.dim() - rank_sum);
  }
}
