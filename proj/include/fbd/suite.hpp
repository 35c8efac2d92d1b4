#pragma once

// Test suites: inputs with expected outputs or explicit assertions, golden
// derivation of expected outputs, per-test programs and coverage runs.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbd/ast.hpp"
#include "fbd/error.hpp"
#include "fbd/interp.hpp"
#include "fbd/parser.hpp"
#include "fbd/ssa.hpp"
#include "fbd/tracer.hpp"
#include "fbd/weights.hpp"

namespace fbd {

struct TestCase {
  std::string id;
  InputVector input;
  std::optional<std::int64_t> expected;  // value of the suite's output variable
  std::optional<std::string> assertion;  // explicit predicate, e.g. "b <= a"
};

struct TestSuite {
  std::string output;                 // observed output variable
  std::optional<std::string> golden;  // path of the golden program, relative to the suite file
  std::optional<int> fault_line;      // known faulty line, for rank tables
  std::vector<TestCase> tests;
};

inline TestSuite suite_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& m) { return Error(ErrorKind::syntax, "test suite: " + m); };
  if (!j.is_object()) throw bad("expected a JSON object");
  TestSuite s;
  if (j.contains("output")) s.output = j.at("output").get<std::string>();
  if (j.contains("golden")) s.golden = j.at("golden").get<std::string>();
  if (j.contains("fault_line")) s.fault_line = j.at("fault_line").get<int>();
  if (!j.contains("tests") || !j.at("tests").is_array()) throw bad("missing 'tests' array");
  int n = 0;
  for (const auto& t : j.at("tests")) {
    ++n;
    TestCase c;
    c.id = t.contains("id") ? t.at("id").get<std::string>() : "t" + std::to_string(n);
    if (!t.contains("input") || !t.at("input").is_object()) throw bad("test " + c.id + " has no 'input' object");
    for (const auto& [k, v] : t.at("input").items()) {
      if (!v.is_number_integer()) throw bad("test " + c.id + ": input '" + k + "' is not an integer");
      c.input[k] = v.get<std::int64_t>();
    }
    if (t.contains("expected")) c.expected = t.at("expected").get<std::int64_t>();
    if (t.contains("assert")) c.assertion = t.at("assert").get<std::string>();
    if (c.expected && c.assertion) throw bad("test " + c.id + " has both 'expected' and 'assert'");
    s.tests.push_back(std::move(c));
  }
  return s;
}

inline TestSuite parse_suite(const std::string& text) {
  try {
    return suite_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::syntax, std::string("test suite: ") + e.what());
  }
}

inline nlohmann::ordered_json to_json(const TestSuite& s) {
  nlohmann::ordered_json j;
  if (!s.output.empty()) j["output"] = s.output;
  if (s.golden) j["golden"] = *s.golden;
  if (s.fault_line) j["fault_line"] = *s.fault_line;
  auto tests = nlohmann::ordered_json::array();
  for (const auto& t : s.tests) {
    nlohmann::ordered_json jt;
    jt["id"] = t.id;
    jt["input"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.input) jt["input"][k] = v;
    if (t.expected) jt["expected"] = *t.expected;
    if (t.assertion) jt["assert"] = *t.assertion;
    tests.push_back(jt);
  }
  j["tests"] = tests;
  return j;
}

/// Runs the golden program on every test lacking an oracle and records the
/// value of the output variable as the expected value.
inline TestSuite derive_assertions(const Program& golden, TestSuite suite, Width w = {}) {
  for (auto& t : suite.tests) {
    if (t.expected || t.assertion) continue;
    if (suite.output.empty()) throw Error(ErrorKind::usage, "the suite names no 'output' variable to derive");
    const auto probe = golden.has_assert() ? golden : with_assertion(golden, bool_const(true));
    const auto run = interpret(probe, t.input, w);
    if (run.verdict == Verdict::violated)
      throw AnalysisError("golden program violates its own assertion on test " + t.id);
    if (run.verdict != Verdict::passed)
      throw AnalysisError("golden program " + std::string(to_string(run.verdict)) + " on test " + t.id);
    auto it = run.env.find(suite.output);
    if (it == run.env.end()) throw AnalysisError("golden program never assigns '" + suite.output + "'");
    t.expected = it->second;
  }
  return suite;
}

/// The faulty program with the test's assertion in place of its own.
inline Program program_for(const Program& faulty, const TestSuite& suite, const TestCase& t) {
  if (t.assertion) return with_assertion(faulty, parse_predicate(*t.assertion));
  if (t.expected) {
    if (suite.output.empty()) throw Error(ErrorKind::usage, "test " + t.id + " has 'expected' but the suite has no 'output'");
    return with_assertion(faulty, eq(int_var(suite.output), int_const(*t.expected)));
  }
  if (faulty.has_assert()) return faulty;
  throw Error(ErrorKind::usage, "test " + t.id + " has no assertion, the program has no assert and no golden program is given");
}

struct ClassifiedTest {
  TestCase test;
  Program program;
  RunResult run;
  bool failing = false;
};

/// Runs every test; overflowing or non-terminating runs count as failing.
inline std::vector<ClassifiedTest> classify(const Program& faulty, const TestSuite& suite, Width w = {}) {
  std::vector<ClassifiedTest> out;
  for (const auto& t : suite.tests) {
    auto p = program_for(faulty, suite, t);
    auto run = interpret(p, t.input, w);
    const bool failing = run.verdict != Verdict::passed;
    out.push_back(ClassifiedTest{t, std::move(p), std::move(run), failing});
  }
  return out;
}

/// Statement and branch coverage of every test, from traces of the unrolled program.
inline CoverageMatrix collect_coverage(const std::vector<ClassifiedTest>& tests, Width w, int unroll) {
  CoverageMatrix cov;
  for (const auto& t : tests) {
    const int bound = std::max(unroll, t.run.max_trip_count);
    const auto ssa = build_ssa(t.program, std::max(bound, 1));
    const auto trace = execute(ssa, t.test.input, w);
    cov.tests.push_back(coverage_of(ssa, trace, t.test.id, t.failing));
  }
  return cov;
}

}  // namespace fbd
