#include <gtest/gtest.h>

#include <algorithm>

#include "fbd/cfg.hpp"
#include "fbd/interp.hpp"
#include "fbd/parser.hpp"
#include "fbd/pretty.hpp"
#include "fbd/sexpr.hpp"
#include "support/programs.hpp"

using namespace fbd;

namespace {

std::vector<std::pair<std::string, std::string>> branch_edges(const Cfg& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : cfg.edges())
    if (e.kind == EdgeKind::true_branch || e.kind == EdgeKind::false_branch) out.emplace_back(e.from, e.to);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Parser, ProgramPLabels) {
  const auto p = parse(testdata::program_p);
  EXPECT_EQ(p.name, "P");
  ASSERT_EQ(p.params.size(), 2u);
  ASSERT_EQ(p.body.size(), 3u);
  EXPECT_EQ(p.body[0].kind, StmtKind::branch);
  EXPECT_EQ(p.body[0].label, 1);
  EXPECT_EQ(p.body[0].then_body.at(0).label, 2);
  EXPECT_EQ(p.body[0].else_body.at(0).label, 4);
  EXPECT_EQ(p.body[1].kind, StmtKind::branch);
  EXPECT_EQ(p.body[1].label, 5);
  EXPECT_EQ(p.body[2].kind, StmtKind::check);
  EXPECT_EQ(p.body[2].label, 9);
}

TEST(Parser, AssertOnlyProgram) {
  const auto p = parse("int T() {\n  assert(true);\n}\n");
  ASSERT_EQ(p.body.size(), 1u);
  EXPECT_TRUE(p.has_assert());
}

TEST(Parser, UseBeforeDefinition) {
  try {
    parse("int U(int x) {\n  b = a + 1;\n  assert(b > 0);\n}\n");
    FAIL() << "expected a semantic error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::semantic);
  }
}

TEST(Parser, DefinedOnOneArmOnly) {
  EXPECT_THROW(parse("int U(int x) {\n  if (x > 0)\n    a = 1;\n  assert(a > 0);\n}\n"), SemanticError);
}

TEST(Parser, SyntaxErrorPosition) {
  try {
    parse("int S(int x) {\n  a = x +;\n  assert(a > 0);\n}\n");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.kind(), ErrorKind::syntax);
  }
}

TEST(Parser, MissingAssertRejected) {
  EXPECT_THROW(parse("int M(int x) {\n  a = x;\n}\n"), Error);
  EXPECT_NO_THROW(parse_without_assert("int M(int x) {\n  a = x;\n}\n"));
}

TEST(Parser, WithAssertionReplacesAssert) {
  const auto p = with_assertion(parse(testdata::program_p), parse_predicate("b == 1"));
  ASSERT_TRUE(p.has_assert());
  EXPECT_EQ(to_infix(p.assertion().expr, Syntax::program), "b == 1");
  EXPECT_EQ(p.assertion().label, 9);
}

TEST(Pretty, RoundTrip) {
  for (const auto& src : {testdata::program_p, testdata::diamond, testdata::counting_loop}) {
    const auto p = parse(src);
    const auto again = parse(pretty(p));
    EXPECT_EQ(pretty(again), pretty(p));
  }
}

TEST(Sexpr, RoundTrip) {
  const auto t = lor(land(bool_var("g"), eq(int_var("a"), add(int_var("b"), int_const(-3)))),
                     lnot(lt(mul(int_var("c"), int_const(2)), neg(int_var("d")))));
  EXPECT_TRUE(same(parse_sexpr(to_sexpr(t)), t));
  EXPECT_TRUE(same(parse_sexpr("(when g (= a (+ b 1)))"), when(bool_var("g"), eq(int_var("a"), add(int_var("b"), int_const(1))))));
}

TEST(Cfg, ProgramPBranches) {
  const auto cfg = build_cfg(parse(testdata::program_p));
  const std::vector<std::pair<std::string, std::string>> want{{"1", "2"}, {"1", "4"}, {"5", "6"}, {"5", "8"}};
  EXPECT_EQ(branch_edges(cfg), want);
  EXPECT_TRUE(cfg.exit_reachable_from_all());
}

TEST(Cfg, StraightLineHasNoBranches) {
  const auto cfg = build_cfg(parse("int S(int x) {\n  a = x;\n  b = a + 1;\n  assert(b > a);\n}\n"));
  EXPECT_TRUE(branch_edges(cfg).empty());
  EXPECT_TRUE(cfg.branches().empty());
}

TEST(Cfg, LoopHasBackEdge) {
  const auto cfg = build_cfg(parse(testdata::counting_loop));
  int back = 0, cond_true = 0, cond_false = 0;
  for (const auto& e : cfg.edges()) {
    back += e.kind == EdgeKind::back;
    cond_true += e.kind == EdgeKind::true_branch;
    cond_false += e.kind == EdgeKind::false_branch;
  }
  EXPECT_EQ(back, 1);
  EXPECT_EQ(cond_true, 1);
  EXPECT_EQ(cond_false, 1);
}

TEST(Interpreter, ProgramPVerdicts) {
  const auto p = parse(testdata::program_p);
  const auto fail = interpret(p, {{"x", 0}, {"y", 0}}, Width{});
  EXPECT_EQ(fail.verdict, Verdict::violated);
  EXPECT_EQ(fail.env.at("b"), 1);
  const auto other = interpret(p, {{"x", 0}, {"y", 5}}, Width{});
  EXPECT_EQ(other.verdict, Verdict::violated);
  EXPECT_EQ(other.env.at("b"), 2);
}

TEST(Interpreter, OverflowIsChecked) {
  const auto p = parse("int O(int x) {\n  a = x + 1;\n  assert(a > x);\n}\n");
  EXPECT_EQ(interpret(p, {{"x", 127}}, Width::of(8)).verdict, Verdict::overflow);
  EXPECT_EQ(interpret(p, {{"x", 126}}, Width::of(8)).verdict, Verdict::passed);
}

TEST(Interpreter, LoopTripCount) {
  const auto r = interpret(parse(testdata::counting_loop), {{"n", 3}}, Width{});
  EXPECT_EQ(r.verdict, Verdict::passed);
  EXPECT_EQ(r.max_trip_count, 3);
}

TEST(Width, Range) {
  EXPECT_THROW(Width::of(1), Error);
  EXPECT_THROW(Width::of(33), Error);
  EXPECT_EQ(Width::of(8).min(), -128);
  EXPECT_EQ(Width::of(8).max(), 127);
  EXPECT_EQ(Width::of(8).wrap(130), -126);
}
