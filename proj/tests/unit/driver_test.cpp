#include <gtest/gtest.h>

#include "fbd/driver.hpp"
#include "fbd/parser.hpp"
#include "fbd/report.hpp"
#include "support/programs.hpp"

using namespace fbd;

namespace {

const InputVector failing_input{{"x", 0}, {"y", 0}};

FaultReport with_entities(std::string input, std::vector<std::pair<int, double>> ranks) {
  FaultReport r;
  r.program = "P";
  r.mode = "ofc";
  r.input = std::move(input);
  for (auto [line, rank] : ranks) r.entities.push_back(EntityRank{line, rank, "s" + std::to_string(line)});
  return r;
}

}  // namespace

TEST(Ofc, ProgramP) {
  const auto r = run_ofc(DebugSession::make(parse(testdata::program_p), failing_input, Mode{Strategy::ofc, false}));
  EXPECT_EQ(r.line_sets(), (std::set<std::set<int>>{{6}, {5, 8}}));
  EXPECT_EQ(r.iterations, 2);
  EXPECT_EQ(r.formula_clauses, 7u);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.input, "x=0, y=0");
}

TEST(Ba, ProgramPSameCoMsss) {
  const auto p = parse(testdata::program_p);
  const auto ba = run_ba(DebugSession::make(p, failing_input, Mode{Strategy::ba, false}));
  const auto ofc = run_ofc(DebugSession::make(p, failing_input, Mode{Strategy::ofc, false}));
  EXPECT_EQ(ba.statement_sets(), ofc.statement_sets());
  EXPECT_EQ(ba.iterations, 1);
  EXPECT_EQ(ba.formula_clauses, 8u);
  EXPECT_EQ(ba.paths_explored, 4u);
}

TEST(Ba, WeightedPutsLineSixFirst) {
  const SuspiciousnessMap susp{{1, 0.5}, {2, 0.5}, {5, 0.5}, {6, 1.0}, {8, 0.5}};
  const auto r = run_ba(DebugSession::make(parse(testdata::program_p), failing_input, Mode{Strategy::ba, true}, {}, susp));
  ASSERT_FALSE(r.entries.empty());
  EXPECT_EQ(r.entries.front().lines(), std::set<int>{6});
  ASSERT_FALSE(r.entities.empty());
  EXPECT_EQ(r.entities.front().line, 6);
  EXPECT_EQ(r.entities.front().rank, 1.0);
}

TEST(Ofc, UnweightedEntitiesShareMidRank) {
  const auto r = run_ofc(DebugSession::make(parse(testdata::program_p), failing_input, Mode{Strategy::ofc, false}));
  ASSERT_EQ(r.entities.size(), 3u);
  for (const auto& e : r.entities) EXPECT_EQ(e.rank, 1.5);
}

TEST(Ofc, NoConditionalsNeedsOneIteration) {
  const auto p = parse("int S(int x) {\n  a = x + 1;\n  b = a * 2;\n  assert(b == x);\n}\n");
  const auto r = run_ofc(DebugSession::make(p, {{"x", 1}}, Mode{Strategy::ofc, false}));
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.line_sets(), (std::set<std::set<int>>{{2}}));
}

TEST(Session, PassingInputRejected) {
  const auto p = parse(testdata::program_p);
  EXPECT_THROW(run_ofc(DebugSession::make(p, {{"x", 0}, {"y", 0}}, Mode{Strategy::ba, false})), Error);
  const auto ok = parse("int S(int x) {\n  a = x;\n  assert(a == x);\n}\n");
  EXPECT_THROW(run_ofc(DebugSession::make(ok, {{"x", 1}}, Mode{Strategy::ofc, false})), AnalysisError);
}

TEST(Session, LoopUnrollCoversFailingRun) {
  const auto p = parse("int L(int n) {\n  i = 0;\n  while (i < n)\n    i = i + 2;\n  assert(i == n);\n}\n");
  Options o;
  o.unroll = 1;
  const auto r = run_ofc(DebugSession::make(p, {{"n", 5}}, Mode{Strategy::ofc, false}, o));
  EXPECT_GE(r.unroll, 3);
  EXPECT_FALSE(r.entries.empty());
}

TEST(Merge, AveragesCommonLines) {
  const auto m = merge_reports({with_entities("x=0", {{6, 1.0}, {5, 2.0}}), with_entities("x=1", {{8, 1.0}, {6, 2.0}})});
  ASSERT_EQ(m.entities.size(), 1u);
  EXPECT_EQ(m.entities[0].line, 6);
  EXPECT_EQ(m.entities[0].rank, 1.5);
  EXPECT_EQ(m.input, "x=0; x=1");
}

TEST(Merge, DisjointReportsGiveEmptyResult) {
  const auto m = merge_reports({with_entities("x=0", {{5, 1.0}}), with_entities("x=1", {{8, 1.0}})});
  EXPECT_TRUE(m.entities.empty());
  EXPECT_FALSE(m.note.empty());
}

TEST(Merge, SingleReportUnchanged) {
  const auto r = with_entities("x=0", {{6, 1.0}, {5, 2.0}});
  const auto m = merge_reports({r});
  ASSERT_EQ(m.entities.size(), 2u);
  EXPECT_EQ(m.entities[1].line, 5);
  EXPECT_THROW(merge_reports({}), Error);
}

TEST(Report, JsonFields) {
  const auto r = run_ofc(DebugSession::make(parse(testdata::program_p), failing_input, Mode{Strategy::ofc, false}));
  const auto j = to_json(r, false);
  EXPECT_EQ(j.at("program"), "P");
  EXPECT_EQ(j.at("mode"), "ofc");
  EXPECT_EQ(j.at("iterations"), 2);
  EXPECT_EQ(j.at("comss").size(), 2u);
  EXPECT_FALSE(j.contains("timing"));
  EXPECT_EQ(j.at("ranking").size(), 3u);
  EXPECT_NE(to_text(r, false).find("b = a + 1"), std::string::npos);
}
