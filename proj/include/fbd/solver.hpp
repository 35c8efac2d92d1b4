#pragma once

// Satisfiability of width-W constraints and minimal correction subset
// enumeration for (weighted) partial MAX-SAT instances.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fbd/bitblast.hpp"
#include "fbd/cdcl.hpp"
#include "fbd/encoder.hpp"
#include "fbd/error.hpp"
#include "fbd/term.hpp"

namespace fbd {

struct Model {
  std::map<std::string, std::int64_t> ints;
  std::map<std::string, bool> bools;

  Valuation valuation() const {
    return [this](const std::string& name, Sort s) -> std::int64_t {
      if (s == Sort::boolean) return bools.at(name) ? 1 : 0;
      return ints.at(name);
    };
  }
};

enum class SatStatus { sat, unsat, timeout };

struct SatResult {
  SatStatus status = SatStatus::unsat;
  Model model;
};

/// Solver resource limits; an exhausted limit yields a timeout, never a guess.
struct Limits {
  std::optional<std::chrono::milliseconds> timeout;
  std::int64_t conflicts = -1;

  cdcl::Budget budget(std::chrono::steady_clock::time_point start) const {
    cdcl::Budget b;
    b.conflicts = conflicts;
    if (timeout) b.deadline = start + *timeout;
    return b;
  }
};

/// Decides the conjunction of `constraints` at width `w`.
inline SatResult sat(const std::vector<Term>& constraints, Width w, const Limits& limits = {}) {
  cdcl::Solver s;
  BitBlaster bb(s, w);
  std::map<std::string, Sort> vars;
  for (const auto& c : constraints) {
    collect_vars(c, vars);
    s.add_clause({bb.encode(c)});
  }
  SatResult out;
  switch (s.solve({}, limits.budget(std::chrono::steady_clock::now()))) {
    case cdcl::Result::unsat: out.status = SatStatus::unsat; return out;
    case cdcl::Result::unknown: out.status = SatStatus::timeout; return out;
    case cdcl::Result::sat: break;
  }
  out.status = SatStatus::sat;
  for (const auto& [name, sort] : vars) {
    if (sort == Sort::boolean) out.model.bools[name] = bb.bool_value(name);
    else out.model.ints[name] = bb.int_value(name);
  }
  return out;
}

struct MaxSatInstance {
  Width width;
  std::vector<Clause> hard;
  std::vector<Clause> soft;

  const Clause& soft_clause(const std::string& id) const {
    for (const auto& c : soft)
      if (c.id == id) return c;
    throw AnalysisError("no soft clause '" + id + "'");
  }
  Weight weight_of(const Clause& c) const { return c.weight.value_or(Weight(1)); }
  Weight total_weight() const {
    Weight sum(0);
    for (const auto& c : soft) sum += weight_of(c);
    return sum;
  }
};

enum class ComssMode { plain, weighted };

struct CoMss {
  std::vector<std::string> clause_ids;  // ascending by clause_id_less
  Weight mss_weight;

  friend bool operator==(const CoMss& a, const CoMss& b) { return a.clause_ids == b.clause_ids; }
};

struct ComssResult {
  std::vector<CoMss> items;
  bool complete = true;
};

/// Ordering of the enumeration output: heavier MSS first, then smaller
/// CoMSS, then clause ids.
inline bool comss_before(const CoMss& a, const CoMss& b) {
  if (a.mss_weight != b.mss_weight) return a.mss_weight > b.mss_weight;
  if (a.clause_ids.size() != b.clause_ids.size()) return a.clause_ids.size() < b.clause_ids.size();
  return std::lexicographical_compare(a.clause_ids.begin(), a.clause_ids.end(), b.clause_ids.begin(),
                                      b.clause_ids.end(), clause_id_less);
}

namespace detail {

inline std::int64_t weight_scale(const std::vector<Weight>& ws) {
  std::int64_t l = 1;
  for (const auto& w : ws) l = std::lcm(l, w.denominator());
  return l;
}

class ComssEnumerator {
public:
  ComssEnumerator(const MaxSatInstance& inst, int max_size, ComssMode mode, const Limits& limits)
      : inst_(inst), max_size_(max_size), mode_(mode), limits_(limits), bb_(s_, inst.width) {}

  ComssResult run() {
    start_ = std::chrono::steady_clock::now();
    ComssResult out;
    for (const auto& c : inst_.hard) s_.add_clause({bb_.encode(solver_term(c))});
    switch (s_.solve({}, budget())) {
      case cdcl::Result::unsat: throw AnalysisError("malformed instance: the hard clauses are unsatisfiable");
      case cdcl::Result::unknown: out.complete = false; return out;
      case cdcl::Result::sat: break;
    }

    std::vector<Weight> ws;
    for (const auto& c : inst_.soft) ws.push_back(mode_ == ComssMode::weighted ? inst_.weight_of(c) : Weight(1));
    const auto scale = weight_scale(ws);
    for (std::size_t i = 0; i < inst_.soft.size(); ++i) {
      const auto lit = bb_.encode(solver_term(inst_.soft[i]));
      const auto sel = cdcl::Lit::make(s_.new_var());
      s_.add_clause({~sel, lit});
      selectors_.push_back(sel);
      const auto w = ws[i] * scale;
      scaled_.push_back(static_cast<std::uint64_t>(w.numerator()));
    }
    const bool unit = std::all_of(scaled_.begin(), scaled_.end(), [](auto w) { return w == 1; });
    cost_ = sum_bits(scaled_);
    if (max_size_ >= 0 && static_cast<std::size_t>(max_size_) < inst_.soft.size()) {
      const auto count = unit ? cost_ : sum_bits(std::vector<std::uint64_t>(scaled_.size(), 1));
      s_.add_clause({bb_.ule_const(count, static_cast<std::uint64_t>(max_size_))});
    }

    for (;;) {
      // Lowest cost among the remaining correction sets.
      auto r = s_.solve({}, budget());
      if (r == cdcl::Result::unsat) break;
      if (r == cdcl::Result::unknown) {
        out.complete = false;
        break;
      }
      auto best = model_cost();
      bool timed_out = false;
      while (best > 0) {
        const auto bound = bb_.ule_const(cost_, best - 1);
        r = s_.solve({bound}, budget());
        if (r == cdcl::Result::sat) {
          best = model_cost();
        } else {
          timed_out = r == cdcl::Result::unknown;
          break;
        }
      }
      if (timed_out) {
        out.complete = false;
        break;
      }
      if (best == 0) break;  // full formula satisfiable: nothing to correct

      // Every correction set at that cost.
      const auto at_most = bb_.ule_const(cost_, best);
      std::vector<CoMss> level;
      for (;;) {
        r = s_.solve({at_most}, budget());
        if (r == cdcl::Result::unknown) {
          out.complete = false;
          break;
        }
        if (r == cdcl::Result::unsat) break;
        level.push_back(record());
      }
      std::sort(level.begin(), level.end(), comss_before);
      for (auto& c : level) out.items.push_back(std::move(c));
      if (!out.complete) break;
    }
    return out;
  }

private:
  cdcl::Budget budget() const { return limits_.budget(start_); }

  BitBlaster::Bits sum_bits(const std::vector<std::uint64_t>& weights) {
    std::vector<BitBlaster::Bits> terms;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      BitBlaster::Bits t;
      for (auto w = weights[i]; w; w >>= 1) t.push_back((w & 1U) ? ~selectors_[i] : bb_.false_lit());
      terms.push_back(std::move(t));
    }
    if (terms.empty()) return {bb_.false_lit()};
    while (terms.size() > 1) {
      std::vector<BitBlaster::Bits> next;
      for (std::size_t i = 0; i + 1 < terms.size(); i += 2) next.push_back(bb_.add_unsigned(terms[i], terms[i + 1]));
      if (terms.size() % 2) next.push_back(terms.back());
      terms = std::move(next);
    }
    return terms.front();
  }

  std::uint64_t model_cost() const {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < selectors_.size(); ++i)
      if (!s_.model_value(selectors_[i])) c += scaled_[i];
    return c;
  }

  CoMss record() {
    CoMss c;
    std::vector<cdcl::Lit> block;
    Weight dropped(0);
    for (std::size_t i = 0; i < selectors_.size(); ++i) {
      if (s_.model_value(selectors_[i])) continue;
      c.clause_ids.push_back(inst_.soft[i].id);
      block.push_back(selectors_[i]);
      dropped += mode_ == ComssMode::weighted ? inst_.weight_of(inst_.soft[i]) : Weight(1);
    }
    std::sort(c.clause_ids.begin(), c.clause_ids.end(), clause_id_less);
    Weight total(0);
    for (const auto& sc : inst_.soft) total += mode_ == ComssMode::weighted ? inst_.weight_of(sc) : Weight(1);
    c.mss_weight = total - dropped;
    s_.add_clause(block);
    return c;
  }

  const MaxSatInstance& inst_;
  int max_size_;
  ComssMode mode_;
  Limits limits_;
  cdcl::Solver s_;
  BitBlaster bb_;
  std::vector<cdcl::Lit> selectors_;
  std::vector<std::uint64_t> scaled_;
  BitBlaster::Bits cost_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// All CoMSSs of size at most `max_size`, ordered by comss_before.
inline ComssResult enumerate_comss(const MaxSatInstance& inst, int max_size, ComssMode mode,
                                   const Limits& limits = {}) {
  if (max_size < 1) throw Error(ErrorKind::usage, "CoMSS size bound must be >= 1");
  return detail::ComssEnumerator(inst, max_size, mode, limits).run();
}

/// Constraints of hard plus the soft clauses outside `dropped`.
inline std::vector<Term> kept_constraints(const MaxSatInstance& inst, const std::vector<std::string>& dropped) {
  std::vector<Term> out;
  for (const auto& c : inst.hard) out.push_back(solver_term(c));
  for (const auto& c : inst.soft)
    if (std::find(dropped.begin(), dropped.end(), c.id) == dropped.end()) out.push_back(solver_term(c));
  return out;
}

}  // namespace fbd
