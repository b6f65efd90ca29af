#include <gtest/gtest.h>

#include <random>

#include "fwdflat/dtsystem.hpp"
#include "fwdflat/error.hpp"
#include "fwdflat/expr_parser.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fwdflat;

namespace {

Scalar S(const char* text) { return parse_scalar(text); }

std::vector<Scalar> parse_all(std::initializer_list<const char*> texts) {
  std::vector<Scalar> out;
  for (auto t : texts) out.push_back(S(t));
  return out;
}

Point origin(const std::vector<std::string>& vars) {
  Point p;
  for (const auto& v : vars) p[v] = 0;
  return p;
}

DiscreteSystem example_system(AdaptedChartHint hint = {}) {
  return DiscreteSystem("example", {"x1", "x2", "x3", "x4"}, {"u1", "u2"},
                        parse_all({"(x2+x3+3*x4)/(u1+2*u2+1)", "x1*(x3+1)*(u1+2*u2-3)+x4-3*u2", "u1+2*u2",
                                   "x1*(x3+1)+u2"}),
                        origin({"x1", "x2", "x3", "x4", "u1", "u2"}), std::move(hint));
}

AdaptedChartHint xi_hint(std::vector<std::string> xi) {
  AdaptedChartHint h;
  h.xi_vars = std::move(xi);
  return h;
}

Codistribution span_dth(const Chart& y, std::initializer_list<std::initializer_list<const char*>> rows) {
  std::vector<OneForm> forms;
  for (auto r : rows) {
    OneForm w{y, {}};
    for (auto e : r) w.coeffs.push_back(S(e));
    forms.push_back(w);
  }
  return Codistribution(y, forms);
}

}  // namespace

TEST(DtSystem, Submersivity) {
  EXPECT_TRUE(check_submersive(example_system()));
  EXPECT_TRUE(check_submersive({"x"}, {"u"}, {S("x")}));
  EXPECT_FALSE(check_submersive({"x1", "x2", "x3"}, {"u1", "u2"}, parse_all({"u1", "u2", "u1*u2"})));
  try {
    DiscreteSystem("bad", {"x1", "x2", "x3"}, {"u1", "u2"}, parse_all({"u1", "u2", "u1*u2"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SubmersivityFailed);
  }
}

TEST(DtSystem, SubmersivityInvariantUnderInputChange) {
  DiscreteSystem sys = example_system();
  Bindings b{{"u1", S("u1+u2")}, {"u2", S("u2")}};
  std::vector<Scalar> g;
  for (const auto& fi : sys.f()) g.push_back(substitute(fi, b));
  EXPECT_TRUE(check_submersive(sys.states(), sys.inputs(), g));
}

TEST(DtSystem, ConstructionRejectsBadInput) {
  auto code_of = [](auto&& make) {
    try {
      make();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InternalInconsistency;
  };
  EXPECT_EQ(code_of([] { DiscreteSystem("s", {"x"}, {}, {S("x")}); }), Errc::InvalidSystem);
  EXPECT_EQ(code_of([] { DiscreteSystem("s", {"x", "x"}, {"u"}, parse_all({"u", "x"})); }), Errc::InvalidSystem);
  EXPECT_EQ(code_of([] { DiscreteSystem("s", {"th1"}, {"u"}, {S("u")}); }), Errc::InvalidSystem);
  EXPECT_EQ(code_of([] { DiscreteSystem("s", {"x"}, {"u"}, {S("u+y")}); }), Errc::InvalidSystem);
  EXPECT_EQ(code_of([] { DiscreteSystem("s", {"x"}, {"u"}, {S("u+1")}, Point{{"x", 0}, {"u", 0}}); }),
            Errc::EquilibriumMismatch);
  EXPECT_EQ(code_of([] { DiscreteSystem("s", {"x"}, {"u"}, {S("1/u")}, Point{{"x", 0}, {"u", 0}}); }),
            Errc::EquilibriumMismatch);
}

TEST(DtSystem, ExampleChartWithXiHint) {
  DiscreteSystem sys = example_system(xi_hint({"x1", "x3"}));
  AdaptedChart c = build_adapted_chart(sys);
  EXPECT_EQ(c.xi_vars(), (std::vector<std::string>{"x1", "x3"}));
  const auto inv = c.inverse_bindings();
  EXPECT_EQ(inv.at("x1"), S("xi1"));
  EXPECT_EQ(inv.at("x3"), S("xi2"));
  EXPECT_EQ(inv.at("u2"), S("th4 - xi1*(xi2+1)"));
  EXPECT_EQ(inv.at("u1"), S("th3 - 2*(th4 - xi1*(xi2+1))"));
  // x4 from the second equation, x2 from the first.
  EXPECT_EQ(inv.at("x4"), S("th2 - xi1*(xi2+1)*(th3-3) + 3*(th4 - xi1*(xi2+1))"));
  EXPECT_EQ(inv.at("x2"), S("th1*(th3+1) - xi2 - 3*(th2 - xi1*(xi2+1)*(th3-3) + 3*(th4 - xi1*(xi2+1)))"));
}

TEST(DtSystem, AutomaticChartSelection) {
  DiscreteSystem sys = example_system();
  AdaptedChart c = build_adapted_chart(sys);
  EXPECT_EQ(c.xi_vars().size(), 2u);
  for (std::size_t j = 0; j < c.base().size(); ++j)
    EXPECT_EQ(substitute(c.inverse()[j], c.forward_bindings()), Scalar::variable(c.base()[j]));
}

TEST(DtSystem, SmallCharts) {
  DiscreteSystem a("a", {"x"}, {"u"}, {S("u")}, Point{{"x", 0}, {"u", 0}}, xi_hint({"x"}));
  AdaptedChart ca = build_adapted_chart(a);
  EXPECT_EQ(ca.inverse_bindings().at("u"), S("th1"));

  DiscreteSystem b("b", {"x1", "x2"}, {"u"}, parse_all({"u", "x1+x2*u"}), std::nullopt, xi_hint({"x2"}));
  AdaptedChart cb = build_adapted_chart(b);
  EXPECT_EQ(cb.inverse_bindings().at("x1"), S("th2 - xi1*th1"));
  EXPECT_EQ(cb.inverse_bindings().at("u"), S("th1"));
}

TEST(DtSystem, HintedInverse) {
  AdaptedChartHint h = xi_hint({"x2"});
  h.inverse = {{"x1", S("th2 - xi1*th1")}, {"u", S("th1")}};
  DiscreteSystem b("b", {"x1", "x2"}, {"u"}, parse_all({"u", "x1+x2*u"}), std::nullopt, h);
  EXPECT_EQ(build_adapted_chart(b).inverse_bindings().at("x1"), S("th2 - xi1*th1"));

  h.inverse["x1"] = S("th2 + xi1*th1");
  b.set_hint(h);
  try {
    build_adapted_chart(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::HintInvalid);
  }
}

TEST(DtSystem, InversionFailureIsReported) {
  DiscreteSystem sys("cubic", {"x1", "x2"}, {"u"}, parse_all({"u^3 + x1^3", "x2^3 + u^3*x1^3"}));
  try {
    build_adapted_chart(sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InversionFailed);
    EXPECT_NE(std::string(e.what()).find("hint"), std::string::npos);
  }
}

TEST(DtSystem, SolveTriangularReportsStuckResiduals) {
  auto sol = solve_triangular(parse_all({"a^2 - t"}), {"a"});
  EXPECT_FALSE(sol.solved);
  ASSERT_EQ(sol.stuck.size(), 1u);
  auto ok = solve_triangular(parse_all({"a + b - s", "a - t"}), {"a", "b"});
  ASSERT_TRUE(ok.solved);
  EXPECT_EQ(ok.values.at("a"), S("t"));
  EXPECT_EQ(ok.values.at("b"), S("s - t"));
}

TEST(DtSystem, ToAdaptedInputFields) {
  DiscreteSystem sys = example_system(xi_hint({"x1", "x3"}));
  AdaptedChart c = build_adapted_chart(sys);
  Distribution e0(sys.chart(), {VectorField::coordinate(sys.chart(), "u1"), VectorField::coordinate(sys.chart(), "u2")});
  Distribution ey = c.to_adapted(e0);
  EXPECT_EQ(ey.dim(), 2u);
  const Chart& y = c.adapted();
  VectorField a{y, {S("1"), S("0"), S("-(th3+1)/th1"), S("-xi1*(xi2+1)*(th3+1)/(3*th1)"), S("0"), S("0")}};
  VectorField b{y, {S("0"), S("-3"), S("0"), S("1"), S("0"), S("0")}};
  EXPECT_TRUE(same_span(ey, Distribution(y, {a, b})));
  EXPECT_TRUE(same_span(c.to_base(ey), e0));
}

TEST(DtSystem, ToAdaptedStateForms) {
  DiscreteSystem sys = example_system(xi_hint({"x1", "x3"}));
  AdaptedChart c = build_adapted_chart(sys);
  std::vector<OneForm> dx;
  for (const auto& x : sys.states()) dx.push_back(OneForm::coordinate(sys.chart(), x));
  Codistribution p1(sys.chart(), dx);
  Codistribution py = c.to_adapted(p1);
  EXPECT_EQ(py.dim(), 4u);
  const Chart& y = c.adapted();
  EXPECT_TRUE(py.contains(OneForm::coordinate(y, "xi1")));
  EXPECT_TRUE(py.contains(OneForm::coordinate(y, "xi2")));
  EXPECT_TRUE(py.contains(OneForm{y, {S("(th3+1)/th1"), S("0"), S("1"), S("0"), S("0"), S("0")}}));
  EXPECT_TRUE(same_span(c.to_base(py), p1));
}

TEST(DtSystem, IdentityLikeChartKeepsScalars) {
  DiscreteSystem a("a", {"x"}, {"u"}, {S("u")}, std::nullopt, xi_hint({"x"}));
  AdaptedChart c = build_adapted_chart(a);
  EXPECT_EQ(c.to_adapted(S("x*u")), S("xi1*th1"));
  EXPECT_EQ(c.to_base(S("xi1*th1")), S("x*u"));
}

TEST(DtSystem, Pushforward) {
  DiscreteSystem sys = example_system(xi_hint({"x1", "x3"}));
  AdaptedChart c = build_adapted_chart(sys);
  const Chart& y = c.adapted();
  VectorField v{y, {S("0"), S("-3"), S("0"), S("1"), S("0"), S("0")}};
  VectorField p = pushforward_projectable(v, c);
  EXPECT_EQ(p.chart, xplus_chart(4));
  EXPECT_EQ(p.coeffs[1], S("-3"));
  EXPECT_EQ(p.coeffs[3], S("1"));
  EXPECT_TRUE(is_zero(pushforward_projectable(VectorField::coordinate(y, "xi1"), c)));
  VectorField bad{y, {S("1"), S("0"), S("-(th3+1)/th1"), S("-xi1*(xi2+1)*(th3+1)/(3*th1)"), S("0"), S("0")}};
  try {
    pushforward_projectable(bad, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotProjectable);
  }
}

TEST(DtSystem, PullbackPi) {
  DiscreteSystem sys = example_system();
  const Chart xp = xplus_chart(4);
  Distribution d1(xp, {VectorField{xp, {S("0"), S("-3"), S("0"), S("1")}}});
  Distribution e1 = pullback_pi(d1, sys);
  const Chart& z = sys.chart();
  EXPECT_TRUE(same_span(e1, Distribution(z, {VectorField{z, {S("0"), S("-3"), S("0"), S("1"), S("0"), S("0")}},
                                             VectorField::coordinate(z, "u1"), VectorField::coordinate(z, "u2")})));
  EXPECT_EQ(pullback_pi(Distribution(xp, {}), sys).dim(), 2u);
  std::vector<VectorField> all;
  for (const auto& v : xp.vars()) all.push_back(VectorField::coordinate(xp, v));
  EXPECT_EQ(pullback_pi(Distribution(xp, all), sys).dim(), 6u);
}

TEST(DtSystem, PushThenPullKeepsCoefficients) {
  DiscreteSystem sys = example_system(xi_hint({"x1", "x3"}));
  AdaptedChart c = build_adapted_chart(sys);
  const Chart& y = c.adapted();
  VectorField v{y, {S("th2/(th1+1)"), S("0"), S("th4^2"), S("1"), S("xi1"), S("0")}};
  Distribution back = pullback_pi(Distribution(xplus_chart(4), {pushforward_projectable(v, c)}), sys);
  const Chart& z = sys.chart();
  EXPECT_TRUE(back.contains(VectorField{z, {S("x2/(x1+1)"), S("0"), S("x4^2"), S("1"), S("0"), S("0")}}));
}

TEST(DtSystem, BackwardShift) {
  DiscreteSystem sys = example_system(xi_hint({"x1", "x3"}));
  AdaptedChart c = build_adapted_chart(sys);
  const Chart& y = c.adapted();
  Codistribution pplus = span_dth(y, {{"1", "0", "0", "0", "0", "0"},
                                      {"0", "0", "1", "0", "0", "0"},
                                      {"0", "1", "0", "3", "0", "0"}});
  Codistribution p2 = backward_shift_codistribution(pplus, c, sys);
  const Chart& z = sys.chart();
  std::vector<OneForm> expected{OneForm::coordinate(z, "x1"), OneForm::coordinate(z, "x3"),
                                OneForm{z, {S("0"), S("1"), S("0"), S("3"), S("0"), S("0")}}};
  EXPECT_TRUE(same_span(p2, Codistribution(z, expected)));
  EXPECT_EQ(backward_shift_codistribution(Codistribution(y, {}), c, sys).dim(), 0u);
  try {
    backward_shift_codistribution(span_dth(y, {{"1", "xi1", "0", "0", "0", "0"}}), c, sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotShiftable);
  }
}

TEST(DtSystem, BackwardShiftFindsXiFreeBasis) {
  DiscreteSystem sys = example_system(xi_hint({"x1", "x3"}));
  AdaptedChart c = build_adapted_chart(sys);
  const Chart& y = c.adapted();
  // xi-dependent generators of a xi-free codistribution.
  Codistribution pplus = span_dth(y, {{"1", "xi1", "0", "0", "0", "0"}, {"0", "1", "0", "0", "0", "0"}});
  EXPECT_EQ(backward_shift_codistribution(pplus, c, sys).dim(), 2u);
}

TEST(DtSystem, ShiftRoundTrip) {
  DiscreteSystem sys = example_system(xi_hint({"x1", "x3"}));
  AdaptedChart c = build_adapted_chart(sys);
  const Chart& y = c.adapted();
  Codistribution pplus = span_dth(y, {{"(th3+1)/th1", "0", "1", "0", "0", "0"}, {"0", "1", "0", "3", "0", "0"}});
  Codistribution q = backward_shift_codistribution(pplus, c, sys);
  // Shifting q forward: coefficients x -> f, dx_i -> df_i, then into the adapted chart.
  Matrix jac = sys.jacobian();
  for (const auto& w : q.basis()) {
    OneForm shifted = OneForm::zero(sys.chart());
    for (std::size_t i = 0; i < sys.n(); ++i) {
      if (w.coeffs[i].is_zero()) continue;
      Scalar coef = forward_shift(w.coeffs[i], sys);
      for (std::size_t k = 0; k < shifted.coeffs.size(); ++k) shifted.coeffs[k] += coef * jac[i][k];
    }
    EXPECT_TRUE(pplus.contains(c.to_adapted(shifted)));
  }
}

TEST(DtSystem, ForwardShift) {
  DiscreteSystem sys = example_system();
  EXPECT_EQ(forward_shift(S("x3"), sys), S("u1+2*u2"));
  EXPECT_EQ(forward_shift(S("7/2"), sys), S("7/2"));
  EXPECT_EQ(forward_shift(S("x1*(x3+1)"), sys), S("(x2+x3+3*x4)/(u1+2*u2+1)*(u1+2*u2+1)"));
  try {
    forward_shift(S("u1"), sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedShift);
  }
}

TEST(DtSystemProperty, RandomTriangularChartsRoundTrip) {
  // x_i+ = x_{i+1} + p_i(x_1..x_i) for i < n, x_n+ = u + p_n(x): always triangularly invertible
  // with xi = x1.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 2;
    std::vector<std::string> states;
    for (std::size_t i = 0; i < n; ++i) states.push_back("x" + std::to_string(i + 1));
    std::vector<Scalar> f;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> lower(states.begin(), states.begin() + static_cast<long>(i) + 1);
      Scalar next = i + 1 < n ? Scalar::variable(states[i + 1]) : Scalar::variable("u");
      f.push_back(next + Scalar(gen::poly(rng, lower, 2, 2)));
    }
    DiscreteSystem sys("rand", states, {"u"}, f, std::nullopt, xi_hint({"x1"}));
    AdaptedChart c = build_adapted_chart(sys);
    for (std::size_t j = 0; j < c.base().size(); ++j)
      ASSERT_EQ(substitute(c.inverse()[j], c.forward_bindings()), Scalar::variable(c.base()[j]));
    for (std::size_t i = 0; i < c.adapted().size(); ++i)
      ASSERT_EQ(substitute(c.forward()[i], c.inverse_bindings()), Scalar::variable(c.adapted()[i]));
    // Oracle: Jacobian rank at a random point.
    Point p = oracle::random_point(rng, c.base().vars());
    oracle::DenseMatrix jac;
    for (const auto& g : c.forward()) {
      std::vector<mpq_class> row;
      for (const auto& v : c.base().vars()) row.push_back(eval_at(differentiate(g, v), p));
      jac.push_back(row);
    }
    EXPECT_EQ(oracle::rank(jac), n + 1);
  }
}
