#pragma once

// Debugging sessions: the on-demand formula loop (OFC), the all-paths
// baseline (BA), fault reports and merging of reports across failing inputs.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fbd/ast.hpp"
#include "fbd/encoder.hpp"
#include "fbd/error.hpp"
#include "fbd/interp.hpp"
#include "fbd/solver.hpp"
#include "fbd/ssa.hpp"
#include "fbd/tracer.hpp"
#include "fbd/weights.hpp"

namespace fbd {

enum class Strategy { ofc, ba };

struct Mode {
  Strategy strategy = Strategy::ofc;
  bool weighted = false;

  std::string str() const { return std::string(strategy == Strategy::ofc ? "ofc" : "ba") + (weighted ? "+cw" : ""); }

  static Mode parse(const std::string& s) {
    if (s == "ba") return Mode{Strategy::ba, false};
    if (s == "ba+cw") return Mode{Strategy::ba, true};
    if (s == "ofc") return Mode{Strategy::ofc, false};
    if (s == "ofc+cw") return Mode{Strategy::ofc, true};
    throw Error(ErrorKind::usage, "unknown mode '" + s + "' (expected ba, ba+cw, ofc or ofc+cw)");
  }
  friend bool operator==(const Mode&, const Mode&) = default;
};

inline const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes{{Strategy::ba, false}, {Strategy::ba, true}, {Strategy::ofc, false},
                                       {Strategy::ofc, true}};
  return modes;
}

struct Options {
  Width width;
  int unroll = 8;
  int max_comss_size = 5;
  int max_iters = 64;
  Limits limits;
  std::size_t blow_up_cap = default_blow_up_cap;
  ConcretizePolicy concretize = ConcretizePolicy::none;
};

struct DebugSession {
  std::shared_ptr<const Program> program;  // carries the failing assertion
  InputVector input;
  Mode mode;
  Options options;
  SuspiciousnessMap susp;  // used by weighted modes

  static DebugSession make(Program p, InputVector in, Mode m, Options o = {}, SuspiciousnessMap s = {}) {
    return DebugSession{std::make_shared<const Program>(std::move(p)), std::move(in), m, o, std::move(s)};
  }
};

/// Verifies that the session's input violates its assertion and returns the
/// unroll bound the session will use.
inline int session_unroll_bound(const DebugSession& s) {
  if (s.options.unroll < 1) throw Error(ErrorKind::usage, "unroll bound must be >= 1");
  const auto run = interpret(*s.program, s.input, s.options.width);
  switch (run.verdict) {
    case Verdict::violated: break;
    case Verdict::passed: throw AnalysisError("the input does not violate the assertion; nothing to debug");
    case Verdict::overflow:
      throw AnalysisError("the failing run overflows " + std::to_string(s.options.width.bits) +
                          "-bit arithmetic; use a larger --width");
    case Verdict::truncated: throw AnalysisError("the failing run does not terminate within the loop cap");
  }
  if (run.max_trip_count <= s.options.unroll) return s.options.unroll;
  if (s.mode.strategy == Strategy::ba)
    throw AnalysisError("the failing run needs " + std::to_string(run.max_trip_count) +
                        " loop iterations; raise --unroll to at least that");
  return run.max_trip_count;
}

/// Hard input equalities and assertion, plus the formula's hard and soft clauses.
inline MaxSatInstance build_instance(const SsaProgram& ssa, const TraceFormula& tf, const InputVector& input,
                                     Width w) {
  MaxSatInstance inst{w, {}, {}};
  int k = 0;
  for (const auto& [src, v] : ssa.params) {
    Clause c;
    c.id = "i" + std::to_string(++k);
    c.kind = ClauseKind::input;
    c.constraint = eq(int_var(v), int_const(input.at(src)));
    c.origin = "input";
    c.hardness = Hardness::hard;
    inst.hard.push_back(std::move(c));
  }
  const auto& an = ssa.at(ssa.assertion);
  Clause a;
  a.id = "a1";
  a.kind = ClauseKind::assertion;
  a.constraint = ssa.assert_node().pred;
  a.origin = an.id;
  a.line = an.line;
  a.hardness = Hardness::hard;
  inst.hard.push_back(std::move(a));
  for (const auto& c : tf.clauses()) (c.soft() ? inst.soft : inst.hard).push_back(c);
  return inst;
}

struct ReportClause {
  std::string clause_id;
  std::string statement;  // SSA statement id
  int line = 0;
  std::string source;
  std::string constraint;
  bool concretized = false;
};

struct ReportEntry {
  int rank = 0;
  std::vector<ReportClause> clauses;
  Weight mss_weight;

  std::set<int> lines() const {
    std::set<int> out;
    for (const auto& c : clauses) out.insert(c.line);
    return out;
  }
};

struct EntityRank {
  int line = 0;
  double rank = 0.0;
  std::string source;
};

struct FaultReport {
  std::string program;
  std::string mode;
  std::string input;  // e.g. "x=0, y=0"
  std::vector<ReportEntry> entries;
  std::vector<EntityRank> entities;  // ascending rank
  int iterations = 0;
  bool converged = true;
  bool complete = true;
  std::uint64_t paths_explored = 0;
  std::uint64_t total_paths = 0;
  std::size_t formula_clauses = 0;
  int unroll = 0;
  std::vector<double> iteration_ms;  // solver time per iteration
  double total_ms = 0.0;
  std::string note;

  /// CoMSSs as sets of statement ids, for comparing modes.
  std::set<std::set<std::string>> statement_sets() const {
    std::set<std::set<std::string>> out;
    for (const auto& e : entries) {
      std::set<std::string> s;
      for (const auto& c : e.clauses) s.insert(c.statement);
      out.insert(s);
    }
    return out;
  }
  std::set<std::set<int>> line_sets() const {
    std::set<std::set<int>> out;
    for (const auto& e : entries) out.insert(e.lines());
    return out;
  }
  std::optional<double> rank_of(int line) const {
    for (const auto& e : entities)
      if (e.line == line) return e.rank;
    return std::nullopt;
  }
};

inline std::string input_str(const InputVector& in) {
  std::string s;
  for (const auto& [k, v] : in) s += (s.empty() ? "" : ", ") + k + "=" + std::to_string(v);
  return s;
}

/// Fills entries and entity ranks from the CoMSSs of an instance.
/// Weighted modes rank lines by first appearance; plain modes report an
/// unordered set, every line ranked at half the number of reported lines.
inline void fill_entries(FaultReport& r, const SsaProgram& ssa, const MaxSatInstance& inst, const ComssResult& res,
                         bool ordered) {
  r.entries.clear();
  r.entities.clear();
  r.complete = r.complete && res.complete;
  std::vector<int> order;
  std::map<int, std::string> text;
  for (std::size_t i = 0; i < res.items.size(); ++i) {
    ReportEntry e;
    e.rank = static_cast<int>(i + 1);
    e.mss_weight = res.items[i].mss_weight;
    for (const auto& id : res.items[i].clause_ids) {
      const auto& c = inst.soft_clause(id);
      const auto& n = ssa.node(c.origin);
      e.clauses.push_back(ReportClause{id, c.origin, c.line, n.text, to_infix(c.constraint), c.concretized});
      if (std::find(order.begin(), order.end(), c.line) == order.end()) order.push_back(c.line);
      text.emplace(c.line, n.text);
    }
    r.entries.push_back(std::move(e));
  }
  const double half = static_cast<double>(order.size()) / 2.0;
  if (!ordered) std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i)
    r.entities.push_back(EntityRank{order[i], ordered ? static_cast<double>(i + 1) : half, text[order[i]]});
}

struct IterationRecord {
  int index = 0;
  std::optional<Branch> flip;  // branch forced to obtain this trace
  std::shared_ptr<const Trace> trace;
  std::vector<std::string> new_clauses;
  ComssResult comss;
  std::optional<Branch> next_flip;
  std::size_t formula_size = 0;
  double solve_ms = 0.0;
};

/// The OFC loop, one iteration per step().
class OfcEngine {
public:
  explicit OfcEngine(DebugSession s) : session_(std::move(s)) {
    start_ = std::chrono::steady_clock::now();
    unroll_ = session_unroll_bound(session_);
    ssa_ = build_ssa(*session_.program, unroll_);
  }

  bool done() const { return done_; }

  const IterationRecord& step() {
    if (done_) throw AnalysisError("the session has already finished");
    IterationRecord rec;
    rec.index = static_cast<int>(iterations_.size()) + 1;
    rec.flip = flip_;
    const auto& w = session_.options.width;

    // Step 1: trace and formula.
    rec.trace = trace_generator(session_.input, visited_, flip_, ssa_, w);
    flip_.reset();
    paths_.insert(rec.trace->decisions);
    const auto before = tf_.size();
    formula_generator(*rec.trace, tf_, ssa_, session_.options.concretize);
    for (auto i = before; i < tf_.size(); ++i) rec.new_clauses.push_back(tf_.clauses()[i].id);
    rec.formula_size = tf_.size();

    // Step 2: solve.
    instance_ = build_instance(ssa_, weighted_formula(), session_.input, w);
    const auto t0 = std::chrono::steady_clock::now();
    rec.comss = enumerate_comss(instance_, session_.options.max_comss_size,
                                session_.mode.weighted ? ComssMode::weighted : ComssMode::plain,
                                session_.options.limits);
    rec.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    // Step 3: expand at the first implicated conditional with an unvisited branch.
    for (const auto& c : rec.comss.items) {
      for (const auto& id : c.clause_ids) {
        const auto& clause = instance_.soft_clause(id);
        if (clause.kind != ClauseKind::guard_def) continue;
        const Branch t{clause.origin, true}, f{clause.origin, false};
        if (visited_.contains(t) && !visited_.contains(f)) rec.next_flip = f;
        else if (visited_.contains(f) && !visited_.contains(t)) rec.next_flip = t;
        if (rec.next_flip) break;
      }
      if (rec.next_flip) break;
    }
    flip_ = rec.next_flip;
    if (!flip_) done_ = true;
    if (!rec.comss.complete) done_ = true;
    iterations_.push_back(std::move(rec));
    if (!done_ && static_cast<int>(iterations_.size()) >= session_.options.max_iters) {
      done_ = true;
      capped_ = true;
    }
    return iterations_.back();
  }

  FaultReport run() {
    while (!done_) step();
    return report();
  }

  FaultReport report() const {
    if (iterations_.empty()) throw AnalysisError("no iteration has run");
    FaultReport r;
    r.program = session_.program->name;
    r.mode = session_.mode.str();
    r.input = input_str(session_.input);
    r.iterations = static_cast<int>(iterations_.size());
    r.converged = !capped_;
    r.paths_explored = paths_.size();
    r.total_paths = count_paths(ssa_);
    r.formula_clauses = tf_.size();
    r.unroll = unroll_;
    for (const auto& it : iterations_) r.iteration_ms.push_back(it.solve_ms);
    fill_entries(r, ssa_, instance_, iterations_.back().comss, session_.mode.weighted);
    if (capped_) r.note = "iteration cap reached before convergence; the report is partial";
    else if (!r.complete) r.note = "solver budget exhausted; the CoMSS list is incomplete";
    if (std::any_of(tf_.clauses().begin(), tf_.clauses().end(), [](const Clause& c) { return c.concretized; }))
      r.note += std::string(r.note.empty() ? "" : "; ") + "formula contains concretized clauses";
    r.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    return r;
  }

  const SsaProgram& ssa() const { return ssa_; }
  const TraceFormula& formula() const { return tf_; }
  const VisitedBranches& visited() const { return visited_; }
  const std::vector<IterationRecord>& iterations() const { return iterations_; }
  const MaxSatInstance& instance() const { return instance_; }
  int unroll() const { return unroll_; }

private:
  TraceFormula weighted_formula() const {
    TraceFormula copy = tf_;
    if (session_.mode.weighted) to_weights(session_.susp, copy);
    return copy;
  }

  DebugSession session_;
  int unroll_ = 0;
  SsaProgram ssa_;
  TraceFormula tf_;
  VisitedBranches visited_;
  std::optional<Branch> flip_;
  std::set<std::vector<Branch>> paths_;
  std::vector<IterationRecord> iterations_;
  MaxSatInstance instance_;
  bool done_ = false;
  bool capped_ = false;
  std::chrono::steady_clock::time_point start_;
};

inline FaultReport run_ofc(const DebugSession& s) {
  if (s.mode.strategy != Strategy::ofc) throw Error(ErrorKind::usage, "run_ofc needs an OFC mode");
  return OfcEngine(s).run();
}

/// Result of the all-paths baseline, with the artifacts it built.
struct BaRun {
  SsaProgram ssa;
  TraceFormula formula;
  MaxSatInstance instance;
  FaultReport report;
};

inline BaRun run_ba_detailed(const DebugSession& s) {
  if (s.mode.strategy != Strategy::ba) throw Error(ErrorKind::usage, "run_ba needs a BA mode");
  const auto start = std::chrono::steady_clock::now();
  BaRun out;
  const int unroll = session_unroll_bound(s);
  out.ssa = build_ssa(*s.program, unroll);
  out.formula = encode_all_paths(out.ssa, s.options.blow_up_cap);
  if (s.mode.weighted) to_weights(s.susp, out.formula);
  out.instance = build_instance(out.ssa, out.formula, s.input, s.options.width);
  const auto t0 = std::chrono::steady_clock::now();
  auto res = enumerate_comss(out.instance, s.options.max_comss_size,
                             s.mode.weighted ? ComssMode::weighted : ComssMode::plain, s.options.limits);
  const auto now = std::chrono::steady_clock::now();
  auto& r = out.report;
  r.program = s.program->name;
  r.mode = s.mode.str();
  r.input = input_str(s.input);
  r.iterations = 1;
  r.total_paths = count_paths(out.ssa);
  r.paths_explored = r.total_paths;
  r.formula_clauses = out.formula.size();
  r.unroll = unroll;
  r.iteration_ms.push_back(std::chrono::duration<double, std::milli>(now - t0).count());
  fill_entries(r, out.ssa, out.instance, res, s.mode.weighted);
  if (!r.complete) r.note = "solver budget exhausted; the CoMSS list is incomplete";
  r.total_ms = std::chrono::duration<double, std::milli>(now - start).count();
  return out;
}

inline FaultReport run_ba(const DebugSession& s) { return run_ba_detailed(s).report; }

inline FaultReport run_session(const DebugSession& s) {
  return s.mode.strategy == Strategy::ofc ? run_ofc(s) : run_ba(s);
}

/// Keeps the lines reported for every failing input, ranked by their mean
/// rank (ties by line).
inline FaultReport merge_reports(const std::vector<FaultReport>& reports) {
  if (reports.empty()) throw AnalysisError("merge_reports needs at least one report");
  if (reports.size() == 1) return reports.front();
  FaultReport out;
  out.program = reports.front().program;
  out.mode = reports.front().mode;
  std::map<int, std::pair<double, int>> acc;  // line -> (rank sum, count)
  std::map<int, std::string> text;
  for (const auto& r : reports) {
    if (r.program != out.program) throw AnalysisError("merge_reports: reports come from different programs");
    out.input += (out.input.empty() ? "" : "; ") + r.input;
    out.iterations += r.iterations;
    out.converged = out.converged && r.converged;
    out.complete = out.complete && r.complete;
    out.paths_explored = std::max(out.paths_explored, r.paths_explored);
    out.total_paths = std::max(out.total_paths, r.total_paths);
    out.formula_clauses = std::max(out.formula_clauses, r.formula_clauses);
    out.unroll = std::max(out.unroll, r.unroll);
    out.total_ms += r.total_ms;
    for (auto ms : r.iteration_ms) out.iteration_ms.push_back(ms);
    for (const auto& e : r.entities) {
      acc[e.line].first += e.rank;
      acc[e.line].second += 1;
      text.emplace(e.line, e.source);
    }
  }
  for (const auto& [line, a] : acc)
    if (a.second == static_cast<int>(reports.size()))
      out.entities.push_back(EntityRank{line, a.first / static_cast<double>(a.second), text[line]});
  std::stable_sort(out.entities.begin(), out.entities.end(), [](const EntityRank& a, const EntityRank& b) {
    return a.rank != b.rank ? a.rank < b.rank : a.line < b.line;
  });
  if (out.entities.empty()) out.note = "no statement is reported for every failing input";
  return out;
}

}  // namespace fbd
