#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fbd/encoder.hpp"
#include "fbd/parser.hpp"
#include "fbd/weights.hpp"
#include "support/programs.hpp"

using namespace fbd;

namespace {

TestCoverage cov(std::string id, bool failing, std::set<int> lines) {
  TestCoverage t;
  t.test_id = std::move(id);
  t.failing = failing;
  t.lines = std::move(lines);
  return t;
}

// Ochiai straight from its definition: ef / sqrt(F * (ef + ep)).
double reference_ochiai(const CoverageMatrix& m, int line) {
  double ef = 0, ep = 0, f = 0;
  for (const auto& t : m.tests) {
    f += t.failing;
    if (t.lines.count(line)) (t.failing ? ef : ep) += 1;
  }
  return ef == 0 ? 0.0 : ef / std::sqrt(f * (ef + ep));
}

}  // namespace

TEST(Ochiai, KnownValues) {
  CoverageMatrix m;
  m.tests = {cov("t1", true, {1, 2, 4}), cov("t2", true, {1, 2}), cov("t3", false, {1, 3, 4})};
  const auto s = ochiai(m);
  EXPECT_DOUBLE_EQ(s.at(2), 1.0);
  EXPECT_DOUBLE_EQ(s.at(3), 0.0);
  EXPECT_DOUBLE_EQ(s.at(4), 0.5);
  for (int l : {1, 2, 3, 4}) EXPECT_NEAR(s.at(l), reference_ochiai(m, l), 1e-12) << l;
}

TEST(Ochiai, NeedsAFailingTest) {
  CoverageMatrix m;
  EXPECT_THROW(ochiai(m), Error);
  m.tests = {cov("t1", false, {1})};
  EXPECT_THROW(ochiai(m), Error);
}

TEST(WeightFor, ReciprocalOfSuspiciousness) {
  EXPECT_EQ(weight_for(0.5), Weight(2));
  EXPECT_EQ(weight_for(1.0), Weight(1));
  EXPECT_EQ(weight_for(0.25), Weight(4));
  EXPECT_EQ(weight_for(1.0 / 3.0), Weight(3));
  EXPECT_THROW(weight_for(0.0), Error);
}

TEST(ToWeights, ZeroSuspiciousnessGetsTopWeight) {
  const auto ssa = build_ssa(parse(testdata::program_p), 1);
  auto tf = encode_all_paths(ssa);
  to_weights({{1, 1.0}, {2, 0.5}, {4, 0.5}, {5, 0.25}, {6, 1.0}, {8, 0.0}}, tf);
  Weight finite(0);
  for (const auto& c : tf.clauses()) {
    if (!c.soft()) {
      EXPECT_FALSE(c.weight);
      continue;
    }
    ASSERT_TRUE(c.weight);
    if (c.line != 8) finite += *c.weight;
  }
  EXPECT_EQ(finite, Weight(1 + 2 + 2 + 4 + 1));
  EXPECT_EQ(*tf.by_origin("8")->weight, finite + 1);
  EXPECT_EQ(*tf.by_origin("6")->weight, Weight(1));
}

TEST(Coverage, FileRoundTrip) {
  CoverageMatrix m;
  m.tests = {cov("t1", true, {1, 2, 5, 6, 9}), cov("t2", false, {1, 4, 5, 8, 9})};
  m.tests[0].branches = {Branch{"1", true}, Branch{"5", true}};
  std::ostringstream os;
  write_coverage(os, m);
  std::istringstream is(os.str());
  const auto back = read_coverage(is);
  ASSERT_EQ(back.tests.size(), 2u);
  EXPECT_EQ(back.tests[0].test_id, "t1");
  EXPECT_TRUE(back.tests[0].failing);
  EXPECT_EQ(back.tests[0].lines, m.tests[0].lines);
  EXPECT_EQ(back.tests[0].branches, m.tests[0].branches);
  EXPECT_EQ(back.tests[1].lines, m.tests[1].lines);
}

TEST(Coverage, MalformedLineRejected) {
  std::istringstream is("t1 maybe 1 2\n");
  EXPECT_THROW(read_coverage(is), Error);
}
