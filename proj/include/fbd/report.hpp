#pragma once

#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fbd/driver.hpp"

namespace fbd {

inline std::string rank_str(double r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << r;
  return os.str();
}

inline std::string to_text(const FaultReport& r, bool timing = true) {
  std::ostringstream os;
  os << "program " << r.program << "  mode " << r.mode;
  if (!r.input.empty()) os << "  input " << r.input;
  os << "\niterations " << r.iterations << "  paths " << r.paths_explored << "/" << r.total_paths << "  clauses "
     << r.formula_clauses << "  unroll " << r.unroll;
  if (!r.converged) os << "  (not converged)";
  if (!r.complete) os << "  (incomplete)";
  os << '\n';
  if (timing) os << "time " << std::fixed << std::setprecision(2) << r.total_ms << " ms\n";
  for (const auto& e : r.entries) {
    os << "CoMSS " << e.rank << " (MSS weight " << weight_str(e.mss_weight) << ")\n";
    for (const auto& c : e.clauses) {
      os << "  line " << std::left << std::setw(4) << c.line << ' ' << std::setw(24) << c.source << ' '
         << c.constraint << (c.concretized ? "  [concretized]" : "") << '\n';
    }
    os << std::right;
  }
  if (r.entries.empty() && !r.entities.empty()) os << "(merged)\n";
  os << "rank  line  statement\n";
  for (const auto& e : r.entities)
    os << std::left << std::setw(5) << rank_str(e.rank) << ' ' << std::setw(5) << e.line << ' ' << e.source << '\n'
       << std::right;
  if (r.entities.empty()) os << "(no statements)\n";
  if (!r.note.empty()) os << "note: " << r.note << '\n';
  return os.str();
}

inline nlohmann::ordered_json to_json(const FaultReport& r, bool timing = true) {
  nlohmann::ordered_json j;
  j["program"] = r.program;
  j["mode"] = r.mode;
  j["input"] = r.input;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["complete"] = r.complete;
  j["paths_explored"] = r.paths_explored;
  j["total_paths"] = r.total_paths;
  j["formula_clauses"] = r.formula_clauses;
  j["unroll"] = r.unroll;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : r.entries) {
    nlohmann::ordered_json je;
    je["rank"] = e.rank;
    je["mss_weight"] = weight_str(e.mss_weight);
    auto cs = nlohmann::ordered_json::array();
    for (const auto& c : e.clauses) {
      cs.push_back({{"clause", c.clause_id},
                    {"statement", c.statement},
                    {"line", c.line},
                    {"source", c.source},
                    {"constraint", c.constraint},
                    {"concretized", c.concretized}});
    }
    je["clauses"] = cs;
    entries.push_back(je);
  }
  j["comss"] = entries;
  auto ents = nlohmann::ordered_json::array();
  for (const auto& e : r.entities) ents.push_back({{"line", e.line}, {"rank", e.rank}, {"source", e.source}});
  j["ranking"] = ents;
  if (!r.note.empty()) j["note"] = r.note;
  if (timing) j["timing"] = {{"total_ms", r.total_ms}, {"iteration_ms", r.iteration_ms}};
  return j;
}

}  // namespace fbd
