#pragma once

// Spectrum-based suspiciousness (Ochiai) and clause weights 1/susp.

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fbd/cfg.hpp"
#include "fbd/encoder.hpp"
#include "fbd/error.hpp"
#include "fbd/ssa.hpp"
#include "fbd/tracer.hpp"

namespace fbd {

struct TestCoverage {
  std::string test_id;
  bool failing = false;
  std::set<int> lines;
  std::set<Branch> branches;  // conditional label as text, polarity
};

struct CoverageMatrix {
  std::vector<TestCoverage> tests;

  std::size_t failing_count() const {
    std::size_t n = 0;
    for (const auto& t : tests) n += t.failing ? 1 : 0;
    return n;
  }
};

/// Statement label -> suspiciousness in [0, 1].
using SuspiciousnessMap = std::map<int, double>;

/// Source-level coverage of one trace: statement labels and branches.
inline TestCoverage coverage_of(const SsaProgram& ssa, const Trace& t, std::string test_id, bool failing) {
  TestCoverage c{std::move(test_id), failing, {}, {}};
  for (const auto& s : t.steps) {
    const auto& n = ssa.node(s.id);
    if (!n.is<SsaPhi>()) c.lines.insert(n.line);
  }
  for (const auto& b : t.covered) c.branches.insert(Branch{std::to_string(ssa.node(b.conditional).line), b.polarity});
  return c;
}

inline SuspiciousnessMap ochiai(const CoverageMatrix& cov) {
  if (cov.tests.empty()) throw AnalysisError("coverage matrix is empty");
  const auto f = cov.failing_count();
  if (f == 0) throw AnalysisError("coverage matrix has no failing test");
  std::map<int, std::pair<int, int>> counts;  // label -> (ef, ep)
  for (const auto& t : cov.tests)
    for (auto l : t.lines) (t.failing ? counts[l].first : counts[l].second) += 1;
  SuspiciousnessMap out;
  for (const auto& [l, c] : counts) {
    const auto [ef, ep] = c;
    out[l] = ef == 0 ? 0.0 : ef / std::sqrt(static_cast<double>(f) * (ef + ep));
  }
  return out;
}

/// Denominator of the rational grid weights are rounded to (lcm of 1..16).
inline constexpr std::int64_t weight_grid = 720720;

/// 1/susp on the weight grid; exact whenever 1/susp has a denominator dividing the grid.
inline Weight weight_for(double susp) {
  if (!(susp > 0.0)) throw AnalysisError("finite weights need positive suspiciousness");
  const auto scaled = std::llround(static_cast<double>(weight_grid) / susp);
  return Weight(std::max<std::int64_t>(scaled, 1), weight_grid);
}

/// Weighs every soft clause by its origin line. Lines with zero (or no)
/// suspiciousness get the top weight: the sum of all finite weights plus one.
inline void to_weights(const SuspiciousnessMap& susp, TraceFormula& tf) {
  Weight finite(0);
  std::vector<Clause*> top;
  for (auto& c : tf.clauses()) {
    if (!c.soft()) continue;
    auto it = susp.find(c.line);
    if (it == susp.end() || it->second <= 0.0) {
      top.push_back(&c);
    } else {
      c.weight = weight_for(it->second);
      finite += *c.weight;
    }
  }
  for (auto* c : top) c->weight = finite + 1;
}

/// Line format: `<test id> <pass|fail> <label>... [; <label>T|F ...]`.
inline void write_coverage(std::ostream& os, const CoverageMatrix& cov) {
  for (const auto& t : cov.tests) {
    os << t.test_id << ' ' << (t.failing ? "fail" : "pass");
    for (auto l : t.lines) os << ' ' << l;
    if (!t.branches.empty()) {
      os << " ;";
      for (const auto& b : t.branches) os << ' ' << b.conditional << (b.polarity ? 'T' : 'F');
    }
    os << '\n';
  }
}

inline CoverageMatrix read_coverage(std::istream& is) {
  CoverageMatrix cov;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    TestCoverage t;
    std::string outcome, tok;
    if (!(ls >> t.test_id >> outcome) || (outcome != "pass" && outcome != "fail"))
      throw Error(ErrorKind::syntax, "coverage line " + std::to_string(lineno) + ": expected '<id> pass|fail ...'");
    t.failing = outcome == "fail";
    bool branches = false;
    while (ls >> tok) {
      if (tok == ";") {
        branches = true;
        continue;
      }
      try {
        if (branches) {
          const char pol = tok.back();
          if (pol != 'T' && pol != 'F') throw std::invalid_argument(tok);
          t.branches.insert(Branch{tok.substr(0, tok.size() - 1), pol == 'T'});
        } else {
          std::size_t used = 0;
          t.lines.insert(std::stoi(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        }
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::syntax, "coverage line " + std::to_string(lineno) + ": bad entry '" + tok + "'");
      }
    }
    cov.tests.push_back(std::move(t));
  }
  return cov;
}

}  // namespace fbd
