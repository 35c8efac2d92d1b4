#pragma once

// Mode comparison over a corpus of (program, test suite) pairs.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbd/driver.hpp"
#include "fbd/parser.hpp"
#include "fbd/suite.hpp"

namespace fbd {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::file, "cannot read '" + p.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// A program with its suite, golden-derived expectations applied.
struct Subject {
  std::string name;
  Program faulty;
  TestSuite suite;
};

inline Subject load_subject(const std::filesystem::path& program, const std::filesystem::path& suite_path,
                            const std::optional<std::filesystem::path>& golden_override = std::nullopt,
                            Width w = {}) {
  Subject s{program.stem().string(), parse_without_assert(read_file(program)), parse_suite(read_file(suite_path))};
  std::optional<std::filesystem::path> golden = golden_override;
  if (!golden && s.suite.golden) golden = suite_path.parent_path() / *s.suite.golden;
  if (golden) s.suite = derive_assertions(parse_without_assert(read_file(*golden)), s.suite, w);
  return s;
}

/// Failing tests usable as debugging sessions, weighted-mode suspiciousness included.
struct Prepared {
  std::vector<ClassifiedTest> tests;
  std::vector<const ClassifiedTest*> failing;  // assertion violated
  SuspiciousnessMap susp;
};

inline Prepared prepare(const Subject& s, const Options& o) {
  Prepared p;
  p.tests = classify(s.faulty, s.suite, o.width);
  for (const auto& t : p.tests)
    if (t.run.verdict == Verdict::violated) p.failing.push_back(&t);
  if (p.failing.empty()) throw AnalysisError(s.name + ": no test violates its assertion");
  p.susp = ochiai(collect_coverage(p.tests, o.width, o.unroll));
  return p;
}

struct CompareRow {
  std::string program;
  std::string mode;
  std::optional<double> rank;  // of the known faulty line
  int iterations = 0;
  double ms_per_iteration = 0.0;
  double total_ms = 0.0;
  std::size_t clauses = 0;
  std::uint64_t paths_explored = 0;
  std::uint64_t total_paths = 0;
  std::string status = "ok";
};

inline std::vector<CompareRow> compare_modes(const Subject& s, const Options& o) {
  std::vector<CompareRow> rows;
  const auto prep = prepare(s, o);
  const auto& first = *prep.failing.front();
  for (const auto& m : all_modes()) {
    CompareRow row;
    row.program = s.name;
    row.mode = m.str();
    try {
      const auto r = run_session(DebugSession::make(first.program, first.test.input, m, o, prep.susp));
      if (s.suite.fault_line) row.rank = r.rank_of(*s.suite.fault_line);
      row.iterations = r.iterations;
      double solve = 0.0;
      for (auto ms : r.iteration_ms) solve += ms;
      row.ms_per_iteration = r.iterations ? solve / r.iterations : 0.0;
      row.total_ms = r.total_ms;
      row.clauses = r.formula_clauses;
      row.paths_explored = r.paths_explored;
      row.total_paths = r.total_paths;
      if (!r.converged) row.status = "not converged";
      else if (!r.complete) row.status = "timeout";
    } catch (const Error& e) {
      row.status = e.kind() == ErrorKind::blow_up ? "blow-up" : std::string("error: ") + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Program/suite pairs of a corpus directory: every X.mimp with a sibling X.json.
inline std::vector<std::pair<std::filesystem::path, std::filesystem::path>> corpus_entries(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::file, "'" + dir.string() + "' is not a directory");
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".mimp") continue;
    auto suite = e.path();
    suite.replace_extension(".json");
    if (std::filesystem::exists(suite)) out.emplace_back(e.path(), suite);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string compare_table(const std::vector<CompareRow>& rows, bool timing = true) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "program" << std::setw(8) << "mode" << std::setw(6) << "rank" << std::setw(7)
     << "#iter";
  if (timing) os << std::setw(13) << "ms/iter" << std::setw(12) << "total ms";
  os << std::setw(9) << "clauses" << std::setw(9) << "paths" << "status\n";
  for (const auto& r : rows) {
    std::ostringstream rank, paths;
    if (r.rank) rank << std::fixed << std::setprecision(1) << *r.rank;
    else rank << "-";
    paths << r.paths_explored << "/" << r.total_paths;
    os << std::setw(16) << r.program << std::setw(8) << r.mode << std::setw(6) << rank.str() << std::setw(7)
       << r.iterations;
    if (timing)
      os << std::setw(13) << std::fixed << std::setprecision(3) << r.ms_per_iteration << std::setw(12)
         << std::setprecision(3) << r.total_ms;
    os << std::setw(9) << r.clauses << std::setw(9) << paths.str() << r.status << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json compare_json(const std::vector<CompareRow>& rows, bool timing = true) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["program"] = r.program;
    j["mode"] = r.mode;
    j["rank"] = r.rank ? nlohmann::ordered_json(*r.rank) : nlohmann::ordered_json(nullptr);
    j["iterations"] = r.iterations;
    if (timing) {
      j["ms_per_iteration"] = r.ms_per_iteration;
      j["total_ms"] = r.total_ms;
    }
    j["clauses"] = r.clauses;
    j["paths_explored"] = r.paths_explored;
    j["total_paths"] = r.total_paths;
    j["status"] = r.status;
    out.push_back(j);
  }
  return out;
}

}  // namespace fbd
