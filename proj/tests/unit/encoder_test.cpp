#include <gtest/gtest.h>

#include <set>

#include "fbd/encoder.hpp"
#include "fbd/parser.hpp"
#include "fbd/ssa.hpp"
#include "fbd/tracer.hpp"
#include "support/programs.hpp"

using namespace fbd;

namespace {

std::set<std::string> origins(const TraceFormula& tf) {
  std::set<std::string> out;
  for (const auto& c : tf.clauses()) out.insert(c.origin);
  return out;
}

}  // namespace

TEST(FormulaGenerator, ProgramPFirstTrace) {
  const auto ssa = build_ssa(parse(testdata::program_p), 1);
  const auto t = execute(ssa, {{"x", 0}, {"y", 0}});
  TraceFormula tf;
  formula_generator(t, tf, ssa);
  ASSERT_EQ(tf.size(), 6u);
  const auto g1 = bool_var("guard_1"), g2 = bool_var("guard_2");
  const auto a1 = int_var("a_1"), a3 = int_var("a_3"), b1 = int_var("b_1"), b3 = int_var("b_3");
  EXPECT_TRUE(same(tf.at("c1").constraint, iff(g1, ge(int_var("x_1"), int_const(0)))));
  EXPECT_TRUE(same(tf.at("c2").constraint, eq(a1, int_var("x_1"))));
  EXPECT_TRUE(same(tf.at("c3").constraint,
                   lor(land(g1, eq(a3, a1)), land(lnot(g1), eq(a3, int_var("a_2"))))));
  EXPECT_TRUE(same(tf.at("c5").constraint, eq(b1, add(a3, int_const(1)))));
  EXPECT_TRUE(same(tf.at("c6").constraint,
                   lor(land(g2, eq(b3, b1)), land(lnot(g2), eq(b3, int_var("b_2"))))));
  EXPECT_FALSE(tf.at("c3").soft());
  EXPECT_FALSE(tf.at("c6").soft());
  EXPECT_TRUE(tf.at("c1").soft());
  EXPECT_EQ(tf.at("c5").line, 6);
  EXPECT_EQ(tf.scope(), (std::set<std::string>{"1", "2", "phi1", "5", "6", "phi2"}));
}

TEST(FormulaGenerator, SecondTraceAddsOneClause) {
  const auto ssa = build_ssa(parse(testdata::program_p), 1);
  const auto t1 = execute(ssa, {{"x", 0}, {"y", 0}});
  TraceFormula tf;
  formula_generator(t1, tf, ssa);
  const auto t2 = execute_hijacked(ssa, {{"x", 0}, {"y", 0}}, t1, Branch{"5", false});
  formula_generator(t2, tf, ssa);
  ASSERT_EQ(tf.size(), 7u);
  EXPECT_TRUE(same(tf.at("c7").constraint, eq(int_var("b_2"), add(int_var("a_3"), int_const(2)))));
  EXPECT_EQ(tf.at("c7").origin, "8");
  EXPECT_EQ(tf.by_origin("8")->id, "c7");
}

TEST(FormulaGenerator, Idempotent) {
  const auto ssa = build_ssa(parse(testdata::program_p), 1);
  const auto t = execute(ssa, {{"x", 0}, {"y", 0}});
  TraceFormula tf;
  formula_generator(t, tf, ssa);
  const auto before = dump_formula(tf);
  formula_generator(t, tf, ssa);
  EXPECT_EQ(dump_formula(tf), before);
}

TEST(EncodeAllPaths, ProgramPHasEightClauses) {
  const auto tf = encode_all_paths(build_ssa(parse(testdata::program_p), 1));
  EXPECT_EQ(tf.size(), 8u);
  EXPECT_EQ(origins(tf), (std::set<std::string>{"1", "2", "4", "phi1", "5", "6", "8", "phi2"}));
}

// Two diamonds in sequence have four paths; the union of their trace
// formulas is exactly the all-paths formula.
TEST(EncodeAllPaths, UnionOfPathFormulas) {
  const auto ssa = build_ssa(parse("int Q(int x, int y) {\n  if (x > 0)\n    a = 1;\n  else\n    a = 2;\n"
                                   "  if (y > 0)\n    b = a;\n  else\n    b = a + x;\n  assert(b > 0);\n}\n"),
                             1);
  EXPECT_EQ(count_paths(ssa), 4u);
  TraceFormula tf;
  for (int x : {-1, 1})
    for (int y : {-1, 1}) formula_generator(execute(ssa, {{"x", x}, {"y", y}}), tf, ssa);
  EXPECT_EQ(origins(tf), origins(encode_all_paths(ssa)));
  EXPECT_EQ(tf.size(), encode_all_paths(ssa).size());
}

TEST(EncodeAllPaths, BlowUpCap) {
  EXPECT_THROW(encode_all_paths(build_ssa(parse(testdata::program_p), 1), 4), Error);
}

TEST(Concretize, NonlinearRightOperand) {
  Clause c;
  c.kind = ClauseKind::assign;
  c.origin = "3";
  c.constraint = eq(int_var("b_1"), mul(int_var("a_1"), int_var("c_1")));
  const std::map<std::string, std::int64_t> log{{"a_1", 2}, {"c_1", 3}};
  const auto out = concretize(c, log, ConcretizePolicy::nonlinear);
  EXPECT_TRUE(out.concretized);
  EXPECT_TRUE(same(out.constraint, eq(int_var("b_1"), mul(int_var("a_1"), int_const(3)))));
  const auto both = concretize(c, log, ConcretizePolicy::nonlinear_both);
  EXPECT_TRUE(same(both.constraint, eq(int_var("b_1"), mul(int_const(2), int_const(3)))));
  EXPECT_FALSE(concretize(c, log, ConcretizePolicy::none).concretized);
}

TEST(Concretize, LinearClauseUnchanged) {
  Clause c;
  c.kind = ClauseKind::assign;
  c.origin = "2";
  c.constraint = eq(int_var("b_1"), add(int_var("a_1"), int_const(1)));
  const auto out = concretize(c, {{"a_1", 4}}, ConcretizePolicy::nonlinear);
  EXPECT_FALSE(out.concretized);
  EXPECT_TRUE(same(out.constraint, c.constraint));
}

TEST(Concretize, UnloggedOperandIsAnError) {
  Clause c;
  c.kind = ClauseKind::assign;
  c.origin = "3";
  c.constraint = eq(int_var("b_1"), mul(int_var("a_1"), int_var("c_1")));
  EXPECT_THROW(concretize(c, {{"a_1", 2}}, ConcretizePolicy::nonlinear), Error);
}

TEST(Clause, PathGuardOnBranchArm) {
  const auto ssa = build_ssa(parse(testdata::program_p), 1);
  const auto tf = encode_all_paths(ssa);
  EXPECT_FALSE(tf.by_origin("1")->path);
  ASSERT_TRUE(tf.by_origin("2")->path);
  EXPECT_TRUE(same(tf.by_origin("2")->path, bool_var("guard_1")));
  EXPECT_TRUE(same(tf.by_origin("4")->path, lnot(bool_var("guard_1"))));
}
