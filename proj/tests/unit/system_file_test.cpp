#include <gtest/gtest.h>

#include <random>

#include "fwdflat/error.hpp"
#include "fwdflat/expr_parser.hpp"
#include "fwdflat/system_file.hpp"
#include "generators.hpp"

using namespace fwdflat;

namespace {

std::string data(const std::string& name) { return std::string(FWDFLAT_TEST_DATA) + "/" + name; }

// Code and message of the error thrown while parsing and building `text`.
std::pair<Errc, std::string> failure(const std::string& text) {
  try {
    (void)parse_system_text(text, "t.sys").to_system();
  } catch (const Error& e) {
    return {e.code(), e.message()};
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return {Errc::InternalInconsistency, ""};
}

}  // namespace

TEST(SystemFile, ExampleFixture) {
  DiscreteSystem sys = parse_system(data("example.sys"));
  EXPECT_EQ(sys.name(), "example");
  EXPECT_EQ(sys.n(), 4u);
  EXPECT_EQ(sys.m(), 2u);
  EXPECT_EQ(sys.f()[0], parse_scalar("(x2+x3+3*x4)/(u1+2*u2+1)"));
  EXPECT_EQ(sys.f()[3], parse_scalar("x1*(x3+1)+u2"));
  ASSERT_TRUE(sys.equilibrium());
  for (const auto& v : sys.chart().vars()) EXPECT_EQ(sys.equilibrium()->at(v), 0);
  EXPECT_EQ(sys.hint().xi_vars, (std::vector<std::string>{"x1", "x3"}));
}

TEST(SystemFile, SingleEquation) {
  DiscreteSystem sys = parse_system_text("inputs: u1\ndynamics:\n  x1+ = x1 + u1\n").to_system();
  EXPECT_EQ(sys.n(), 1u);
  EXPECT_EQ(sys.m(), 1u);
  EXPECT_EQ(sys.states(), std::vector<std::string>{"x1"});
  EXPECT_FALSE(sys.equilibrium());
}

TEST(SystemFile, InlineSectionsCommentsAndOrder) {
  const char* text =
      "# two states\r\n"
      "name: swapped   # trailing comment\n"
      "states: a, b\n"
      "inputs: w\n"
      "dynamics: b+ = w\n"
      "  a+ = b\n"
      "\n"
      "equilibrium: 1, 2, 2\n";
  EXPECT_THROW(parse_system_text(text).to_system(), Error);  // a+ = b gives 2, not 1
  SystemFile sf = parse_system_text(text);
  EXPECT_EQ(sf.name, "swapped");
  EXPECT_EQ(sf.f[0], Scalar::variable("b"));
  EXPECT_EQ(sf.f[1], Scalar::variable("w"));
  EXPECT_EQ(sf.equilibrium->at("w"), 2);
}

TEST(SystemFile, NonRationalExpression) {
  EXPECT_THROW(parse_system(data("nonrational.sys")), Error);
  auto [code, msg] = failure("inputs: u1\ndynamics:\n  x1+ = sin(x1) + u1\n");
  EXPECT_EQ(code, Errc::NonRationalExpression);
  EXPECT_EQ(msg.rfind("t.sys:3:9:", 0), 0u) << msg;
}

TEST(SystemFile, ParseErrorsCarryLineAndColumn) {
  auto [code, msg] = failure("inputs: u1\ndynamics:\n  x1+ = x1 + * u1\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_EQ(msg.rfind("t.sys:3:", 0), 0u) << msg;

  std::tie(code, msg) = failure("inputs: u1\ndynamics:\n  x1 = u1\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_EQ(msg.rfind("t.sys:3:3:", 0), 0u) << msg;

  std::tie(code, msg) = failure("inputs: u1\ndynamics:\n  x1+ = u1 + y\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_NE(msg.find("undeclared variable y"), std::string::npos) << msg;

  std::tie(code, msg) = failure("x1+ = u1\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_EQ(msg.rfind("t.sys:1:1:", 0), 0u) << msg;

  std::tie(code, msg) = failure("states: x1, x2\ninputs: u1\ndynamics:\n  x1+ = u1\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_NE(msg.find("no equation for state x2"), std::string::npos) << msg;

  std::tie(code, msg) = failure("inputs: u1\ndynamics:\n  x1+ = u1\n  x1+ = u1\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_EQ(msg.rfind("t.sys:4:3:", 0), 0u) << msg;

  std::tie(code, msg) = failure("inputs: u1\ndynamics:\n  x1+ = u1\nequilibrium: x1 = a\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_EQ(msg.rfind("t.sys:4:19:", 0), 0u) << msg;

  std::tie(code, msg) = failure("inputs: u1\ndynamics:\n  x1+ = u1\nequilibrium: 0\n");
  EXPECT_EQ(code, Errc::ParseError);

  std::tie(code, msg) = failure("inputs: u1\ndynamics:\n  x1+ = u1\nhints:\n  foo: 1\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_EQ(msg.rfind("t.sys:5:3:", 0), 0u) << msg;

  std::tie(code, msg) = failure("inputs: u1\ninputs: u2\ndynamics:\n  x1+ = u1\n");
  EXPECT_EQ(code, Errc::ParseError);
  EXPECT_EQ(msg.rfind("t.sys:2:1:", 0), 0u) << msg;
}

TEST(SystemFile, SemanticErrors) {
  EXPECT_EQ(failure("inputs: u1\ndynamics:\n  x1+ = x1\n  x2+ = 2*x1\n").first, Errc::SubmersivityFailed);
  EXPECT_EQ(failure("inputs: u1\ndynamics:\n  x1+ = x1 + u1 + 1\nequilibrium: 0, 0\n").first,
            Errc::EquilibriumMismatch);
  EXPECT_EQ(failure("inputs: u1\ndynamics:\n  th1+ = u1\n").first, Errc::InvalidSystem);
}

TEST(SystemFile, Hints) {
  SystemFile sf = parse_system_text(
      "inputs: u1\n"
      "dynamics:\n"
      "  x1+ = x2\n"
      "  x2+ = u1\n"
      "hints:\n"
      "  xi = x1\n"
      "  inverse: x2 = th1, u1 = th2\n"
      "  integrals: x1; x1 + x2\n");
  EXPECT_EQ(sf.chart_hint.xi_vars, std::vector<std::string>{"x1"});
  EXPECT_EQ(sf.chart_hint.inverse.at("x2"), Scalar::variable("th1"));
  ASSERT_EQ(sf.integral_hints.size(), 2u);
  EXPECT_EQ(sf.integral_hints[1], parse_scalar("x1+x2"));
  DiscreteSystem sys = sf.to_system();
  AdaptedChart chart = build_adapted_chart(sys);
  EXPECT_EQ(chart.xi_vars(), std::vector<std::string>{"x1"});
}

TEST(SystemFile, HintLists) {
  EXPECT_EQ(parse_name_list("x1, x3"), (std::vector<std::string>{"x1", "x3"}));
  EXPECT_THROW(parse_name_list("x1, 3"), Error);
  auto gs = parse_expression_list("x1; x2 + 3*x4;");
  ASSERT_EQ(gs.size(), 2u);
  EXPECT_EQ(gs[1], parse_scalar("x2+3*x4"));
}

TEST(SystemFile, FormatRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    DiscreteSystem sys = gen::random_flat_system(rng, "rt");
    DiscreteSystem back = parse_system_text(format_system(sys)).to_system();
    EXPECT_EQ(back.states(), sys.states());
    EXPECT_EQ(back.inputs(), sys.inputs());
    EXPECT_EQ(back.f(), sys.f());
    EXPECT_EQ(back.equilibrium(), sys.equilibrium());
  }
  DiscreteSystem ex = parse_system(data("example.sys"));
  DiscreteSystem back = parse_system_text(format_system(ex)).to_system();
  EXPECT_EQ(back.f(), ex.f());
  EXPECT_EQ(back.hint().xi_vars, ex.hint().xi_vars);
}

TEST(SystemFile, CorpusLoads) {
  for (const char* f : {"example.sys", "shift.sys", "chain.sys", "chain2.sys", "stalled.sys", "random_flat_1.sys",
                        "random_flat_2.sys", "random_flat_3.sys"}) {
    EXPECT_NO_THROW(parse_system(data(f))) << f;
  }
}
