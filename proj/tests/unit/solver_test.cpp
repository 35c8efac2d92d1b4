#include <gtest/gtest.h>

#include <set>

#include "fbd/driver.hpp"
#include "fbd/oracle.hpp"
#include "fbd/parser.hpp"
#include "fbd/solver.hpp"
#include "support/programs.hpp"

using namespace fbd;

namespace {

Clause clause(std::string id, Term t, Hardness h = Hardness::soft, int line = 0) {
  Clause c;
  c.id = std::move(id);
  c.constraint = std::move(t);
  c.hardness = h;
  c.line = line;
  c.origin = c.id;
  return c;
}

std::set<std::vector<std::string>> id_sets(const std::vector<CoMss>& items) {
  std::set<std::vector<std::string>> out;
  for (const auto& c : items) out.insert(c.clause_ids);
  return out;
}

const Term x = int_var("x"), y = int_var("y");

}  // namespace

TEST(Sat, SatisfiableWithModel) {
  const auto r = sat({eq(add(x, y), int_const(10)), gt(x, int_const(7)), gt(y, int_const(0))}, Width::of(8));
  ASSERT_EQ(r.status, SatStatus::sat);
  const auto xv = r.model.ints.at("x"), yv = r.model.ints.at("y");
  EXPECT_EQ(xv + yv, 10);
  EXPECT_GT(xv, 7);
  EXPECT_GT(yv, 0);
}

TEST(Sat, Unsatisfiable) {
  EXPECT_EQ(sat({gt(x, int_const(3)), lt(x, int_const(2))}, Width::of(8)).status, SatStatus::unsat);
}

TEST(Sat, OverflowMakesClauseFalse) {
  EXPECT_EQ(sat({eq(x, int_const(127)), gt(add(x, int_const(1)), x)}, Width::of(8)).status, SatStatus::unsat);
  EXPECT_EQ(sat({eq(x, int_const(127)), gt(add(x, int_const(1)), x)}, Width::of(16)).status, SatStatus::sat);
}

TEST(Sat, WhenIgnoresOverflowOffPath) {
  const auto g = bool_var("g");
  const auto c = when(g, eq(y, mul(x, int_const(100))));
  EXPECT_EQ(sat({eq(x, int_const(100)), lnot(g), c}, Width::of(8)).status, SatStatus::sat);
  EXPECT_EQ(sat({eq(x, int_const(100)), g, c}, Width::of(8)).status, SatStatus::unsat);
}

TEST(Sat, AgreesWithSearchOracle) {
  const std::vector<std::vector<Term>> cases{
      {eq(mul(x, y), int_const(12)), lt(x, y), gt(x, int_const(2))},
      {eq(mul(x, x), int_const(50))},
      {iff(bool_var("g"), ge(x, int_const(0))), bool_var("g"), lt(x, int_const(-3))},
  };
  for (const auto& cs : cases)
    EXPECT_EQ(sat(cs, Width::of(8)).status, search_sat(cs, Width::of(8)).status);
}

TEST(Comss, ProgramPFirstFormulaIsUnsat) {
  const auto p = parse(testdata::program_p);
  OfcEngine engine(DebugSession::make(p, {{"x", 0}, {"y", 0}}, Mode{}, Options{}));
  engine.step();
  std::vector<Term> all;
  for (const auto& c : engine.instance().hard) all.push_back(solver_term(c));
  for (const auto& c : engine.instance().soft) all.push_back(solver_term(c));
  EXPECT_EQ(sat(all, Width{}).status, SatStatus::unsat);
}

TEST(Comss, SingleSoftClause) {
  MaxSatInstance inst{Width::of(8), {clause("h1", eq(x, int_const(1)), Hardness::hard)}, {clause("c1", eq(x, int_const(2)))}};
  const auto r = enumerate_comss(inst, 3, ComssMode::plain);
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(id_sets(r.items), (std::set<std::vector<std::string>>{{"c1"}}));
}

TEST(Comss, DuplicateSoftClausesMustBothGo) {
  MaxSatInstance inst{Width::of(8),
                      {clause("h1", eq(x, int_const(1)), Hardness::hard)},
                      {clause("c1", eq(x, int_const(2))), clause("c2", eq(x, int_const(2)))}};
  const auto r = enumerate_comss(inst, 3, ComssMode::plain);
  EXPECT_EQ(id_sets(r.items), (std::set<std::vector<std::string>>{{"c1", "c2"}}));
  EXPECT_TRUE(enumerate_comss(inst, 1, ComssMode::plain).items.empty());
}

TEST(Comss, SatisfiableInstanceHasNone) {
  MaxSatInstance inst{Width::of(8), {}, {clause("c1", eq(x, int_const(2))), clause("c2", gt(y, x))}};
  EXPECT_TRUE(enumerate_comss(inst, 3, ComssMode::plain).items.empty());
}

TEST(Comss, MatchesBruteForce) {
  MaxSatInstance inst{Width::of(8),
                      {clause("h1", eq(x, int_const(1)), Hardness::hard), clause("h2", gt(y, int_const(5)), Hardness::hard)},
                      {clause("c1", eq(y, add(x, int_const(1)))), clause("c2", lt(y, int_const(3))),
                       clause("c3", eq(int_var("z"), y)), clause("c4", lt(int_var("z"), int_const(0))),
                       clause("c5", eq(y, int_const(9)))}};
  const auto r = enumerate_comss(inst, 5, ComssMode::plain);
  EXPECT_EQ(id_sets(r.items), id_sets(brute_force_comss(inst, 5)));
  for (const auto& c : r.items) {
    EXPECT_TRUE(is_correction(inst, c.clause_ids));
    EXPECT_TRUE(is_minimal(inst, c.clause_ids));
  }
}

TEST(Comss, WeightedOrderPrefersCheapDrops) {
  MaxSatInstance inst{Width::of(8),
                      {clause("h1", eq(x, int_const(1)), Hardness::hard)},
                      {clause("c1", eq(y, x)), clause("c2", eq(y, int_const(4)))}};
  inst.soft[0].weight = Weight(5);
  inst.soft[1].weight = Weight(1, 2);
  const auto r = enumerate_comss(inst, 2, ComssMode::weighted);
  ASSERT_EQ(r.items.size(), 2u);
  EXPECT_EQ(r.items[0].clause_ids, std::vector<std::string>{"c2"});
  EXPECT_EQ(r.items[0].mss_weight, Weight(5));
  EXPECT_EQ(r.items[1].clause_ids, std::vector<std::string>{"c1"});
}

TEST(Comss, SizeBoundMustBePositive) {
  MaxSatInstance inst{Width::of(8), {}, {clause("c1", eq(x, int_const(2)))}};
  EXPECT_THROW(enumerate_comss(inst, 0, ComssMode::plain), Error);
}
