#include <gtest/gtest.h>

#include <sstream>

#include "fbd/driver.hpp"
#include "fbd/instance_io.hpp"
#include "fbd/oracle.hpp"
#include "fbd/parser.hpp"
#include "fbd/suite.hpp"
#include "support/programs.hpp"

using namespace fbd;

namespace {

const char* p_suite = R"({
  "output": "b",
  "fault_line": 6,
  "tests": [
    {"id": "fail", "input": {"x": 0, "y": 0}},
    {"id": "pass", "input": {"x": 1, "y": 7}},
    {"id": "own", "input": {"x": 2, "y": 1}, "assert": "b > a"}
  ]
})";

// A golden P: line 6 computes a - 1, so b <= a holds everywhere.
const char* p_golden = R"(int P(int x, int y) {
  if (x >= 0)
    a = x;
  else
    a = -x;
  if (y < 5)
    b = a - 1;
  else
    b = a + 2;
  assert(true);
}
)";

}  // namespace

TEST(Suite, ParseFields) {
  const auto s = parse_suite(p_suite);
  EXPECT_EQ(s.output, "b");
  EXPECT_EQ(s.fault_line, 6);
  ASSERT_EQ(s.tests.size(), 3u);
  EXPECT_EQ(s.tests[1].input.at("y"), 7);
  EXPECT_EQ(s.tests[2].assertion, "b > a");
}

TEST(Suite, MalformedRejected) {
  EXPECT_THROW(parse_suite("{"), Error);
  EXPECT_THROW(parse_suite(R"({"tests": [{"input": {"x": "a"}}]})"), Error);
  EXPECT_THROW(parse_suite(R"({"tests": [{"input": {"x": 1}, "expected": 1, "assert": "x > 0"}]})"), Error);
}

TEST(Suite, DeriveExpectedFromGolden) {
  const auto s = derive_assertions(parse(p_golden), parse_suite(p_suite));
  EXPECT_EQ(s.tests[0].expected, -1);
  EXPECT_EQ(s.tests[1].expected, 3);
  EXPECT_FALSE(s.tests[2].expected);
  EXPECT_EQ(s.tests[2].assertion, "b > a");
}

TEST(Suite, ExplicitAssertionPassesThrough) {
  const auto faulty = parse(testdata::program_p);
  const auto s = parse_suite(p_suite);
  const auto p = program_for(faulty, s, s.tests[2]);
  EXPECT_EQ(to_infix(p.assertion().expr, Syntax::program), "b > a");
  const auto own = parse_suite(R"({"tests": [{"input": {"x": 0, "y": 0}}]})");
  EXPECT_TRUE(same_program(program_for(faulty, own, own.tests[0]), faulty));
}

TEST(Suite, ClassifyAgainstGolden) {
  const auto s = derive_assertions(parse(p_golden), parse_suite(p_suite));
  const auto c = classify(parse(testdata::program_p), s);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_TRUE(c[0].failing);
  EXPECT_FALSE(c[1].failing);
  EXPECT_FALSE(c[2].failing);
}

TEST(Suite, EmptySuiteHasNoFailingTest) {
  const auto s = parse_suite(R"({"tests": []})");
  const auto c = classify(parse(testdata::program_p), s);
  EXPECT_TRUE(c.empty());
  EXPECT_THROW(ochiai(collect_coverage(c, Width{}, 1)), Error);
}

TEST(Suite, JsonRoundTrip) {
  const auto s = parse_suite(p_suite);
  const auto again = parse_suite(to_json(s).dump());
  EXPECT_EQ(to_json(again).dump(), to_json(s).dump());
}

TEST(Instance, RoundTripPreservesComss) {
  const auto p = parse(testdata::program_p);
  auto run = run_ba_detailed(DebugSession::make(p, {{"x", 0}, {"y", 0}}, Mode{Strategy::ba, false}));
  auto inst = run.instance;
  inst.soft[0].weight = Weight(3, 2);
  const auto text = dump_instance(inst);
  const auto back = parse_instance(text);
  EXPECT_EQ(dump_instance(back), text);
  ASSERT_EQ(back.soft.size(), inst.soft.size());
  ASSERT_EQ(back.hard.size(), inst.hard.size());
  for (std::size_t i = 0; i < inst.soft.size(); ++i) {
    EXPECT_TRUE(same(back.soft[i].constraint, inst.soft[i].constraint));
    EXPECT_EQ(static_cast<bool>(back.soft[i].path), static_cast<bool>(inst.soft[i].path));
  }
  EXPECT_EQ(back.soft[0].weight, Weight(3, 2));
  std::set<std::vector<std::string>> a, b;
  for (const auto& c : enumerate_comss(inst, 3, ComssMode::plain).items) a.insert(c.clause_ids);
  for (const auto& c : enumerate_comss(back, 3, ComssMode::plain).items) b.insert(c.clause_ids);
  EXPECT_EQ(a, b);
}

TEST(Instance, MalformedRejected) {
  EXPECT_THROW(parse_instance("width 8\nc1 soft assign (= x\n"), Error);
  EXPECT_THROW(parse_instance("width 8\n[weights]\nc9 2\n"), Error);
}
