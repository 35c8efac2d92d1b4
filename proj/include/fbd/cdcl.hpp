#pragma once

// Conflict-driven clause-learning SAT solver: two watched literals, first-UIP
// learning, VSIDS, phase saving, Luby restarts and assumption literals.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace fbd::cdcl {

using Var = int;

struct Lit {
  int x = -2;

  static Lit make(Var v, bool negated = false) { return Lit{2 * v + (negated ? 1 : 0)}; }
  Var var() const { return x >> 1; }
  bool negated() const { return x & 1; }
  Lit operator~() const { return Lit{x ^ 1}; }
  friend bool operator==(Lit a, Lit b) { return a.x == b.x; }
  friend bool operator!=(Lit a, Lit b) { return a.x != b.x; }
  friend bool operator<(Lit a, Lit b) { return a.x < b.x; }
};

inline constexpr Lit undef_lit{-2};

enum class Result { sat, unsat, unknown };

/// Resource limits for one solve call.
struct Budget {
  std::int64_t conflicts = -1;  // negative: unlimited
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

class Solver {
public:
  Var new_var() {
    const Var v = static_cast<Var>(assign_.size());
    assign_.push_back(undef);
    level_.push_back(0);
    reason_.push_back(no_reason);
    phase_.push_back(1);
    seen_.push_back(0);
    activity_.push_back(0.0);
    heap_index_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
  }

  int num_vars() const { return static_cast<int>(assign_.size()); }
  std::size_t num_clauses() const { return num_original_; }
  bool okay() const { return ok_; }

  /// Adds a permanent clause. Returns false once the clause set is unsatisfiable at level 0.
  bool add_clause(std::vector<Lit> lits) {
    if (!ok_) return false;
    cancel_until(0);
    std::sort(lits.begin(), lits.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      const Lit p = lits[i];
      if (value(p) == l_true || (i + 1 < lits.size() && lits[i + 1] == ~p)) return true;
      if (value(p) == l_false || (!kept.empty() && kept.back() == p)) continue;
      kept.push_back(p);
    }
    ++num_original_;
    if (kept.empty()) return ok_ = false;
    if (kept.size() == 1) {
      enqueue(kept[0], no_reason);
      if (propagate() != no_reason) ok_ = false;
      return ok_;
    }
    attach(new_clause(std::move(kept), false));
    return true;
  }

  Result solve(const std::vector<Lit>& assumptions = {}, const Budget& budget = {}) {
    model_.clear();
    if (!ok_) return Result::unsat;
    assumptions_ = assumptions;
    budget_ = budget;
    conflicts_this_call_ = 0;
    Result r = Result::unknown;
    for (int restart = 0; r == Result::unknown; ++restart) {
      const auto limit = static_cast<std::int64_t>(luby(2.0, restart) * 100);
      r = search(limit);
      if (r == Result::unknown && out_of_budget()) break;
    }
    if (r == Result::sat) {
      model_.resize(assign_.size());
      for (std::size_t v = 0; v < assign_.size(); ++v) model_[v] = assign_[v] == l_true;
    }
    cancel_until(0);
    return r;
  }

  /// Value of `v` in the last satisfying assignment.
  bool model_value(Var v) const { return model_.at(static_cast<std::size_t>(v)); }
  bool model_value(Lit p) const { return model_value(p.var()) != p.negated(); }

  std::int64_t conflicts() const { return total_conflicts_; }

private:
  using LBool = std::int8_t;
  static constexpr LBool l_false = 0, l_true = 1, undef = 2;
  static constexpr std::uint32_t no_reason = std::numeric_limits<std::uint32_t>::max();

  struct ClauseData {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0.0;
  };
  struct Watcher {
    std::uint32_t cref;
    Lit blocker;
  };

  LBool value(Lit p) const {
    const LBool a = assign_[static_cast<std::size_t>(p.var())];
    return a == undef ? undef : static_cast<LBool>(a ^ static_cast<LBool>(p.negated()));
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  std::uint32_t new_clause(std::vector<Lit> lits, bool learnt) {
    clauses_.push_back(ClauseData{std::move(lits), learnt, false, 0.0});
    return static_cast<std::uint32_t>(clauses_.size() - 1);
  }
  void attach(std::uint32_t cref) {
    const auto& c = clauses_[cref].lits;
    watches_[static_cast<std::size_t>(c[0].x)].push_back(Watcher{cref, c[1]});
    watches_[static_cast<std::size_t>(c[1].x)].push_back(Watcher{cref, c[0]});
  }

  void enqueue(Lit p, std::uint32_t from) {
    const auto v = static_cast<std::size_t>(p.var());
    assign_[v] = p.negated() ? l_false : l_true;
    level_[v] = decision_level();
    reason_[v] = from;
    trail_.push_back(p);
  }

  // Returns the conflicting clause, or no_reason.
  std::uint32_t propagate() {
    std::uint32_t conflict = no_reason;
    while (qhead_ < trail_.size()) {
      const Lit p = trail_[qhead_++];
      const Lit false_lit = ~p;
      auto& ws = watches_[static_cast<std::size_t>(false_lit.x)];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        const Watcher w = ws[i];
        if (value(w.blocker) == l_true) {
          ws[j++] = ws[i++];
          continue;
        }
        auto& c = clauses_[w.cref].lits;
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        ++i;
        const Lit first = c[0];
        if (first != w.blocker && value(first) == l_true) {
          ws[j++] = Watcher{w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) != l_false) {
            std::swap(c[1], c[k]);
            watches_[static_cast<std::size_t>(c[1].x)].push_back(Watcher{w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = Watcher{w.cref, first};
        if (value(first) == l_false) {
          conflict = w.cref;
          qhead_ = trail_.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != no_reason) break;
    }
    return conflict;
  }

  void analyze(std::uint32_t conflict, std::vector<Lit>& learnt, int& back_level) {
    learnt.assign(1, undef_lit);
    int path = 0;
    Lit p = undef_lit;
    std::size_t index = trail_.size();
    do {
      auto& cd = clauses_[conflict];
      if (cd.learnt) bump_clause(cd);
      for (std::size_t k = (p == undef_lit ? 0 : 1); k < cd.lits.size(); ++k) {
        const Lit q = cd.lits[k];
        const auto v = static_cast<std::size_t>(q.var());
        if (seen_[v] || level_[v] == 0) continue;
        bump_var(q.var());
        seen_[v] = 1;
        if (level_[v] >= decision_level()) ++path;
        else learnt.push_back(q);
      }
      while (!seen_[static_cast<std::size_t>(trail_[--index].var())]) {
      }
      p = trail_[index];
      conflict = reason_[static_cast<std::size_t>(p.var())];
      seen_[static_cast<std::size_t>(p.var())] = 0;
      --path;
    } while (path > 0);
    learnt[0] = ~p;

    // Drop literals implied by the rest of the clause through their reasons.
    analyze_stack_.assign(learnt.begin(), learnt.end());
    std::size_t j = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      const auto r = reason_[static_cast<std::size_t>(learnt[i].var())];
      bool redundant = r != no_reason;
      if (redundant) {
        for (std::size_t k = 1; k < clauses_[r].lits.size(); ++k) {
          const auto v = static_cast<std::size_t>(clauses_[r].lits[k].var());
          if (!seen_[v] && level_[v] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) learnt[j++] = learnt[i];
    }
    learnt.resize(j);
    for (const auto& q : analyze_stack_) seen_[static_cast<std::size_t>(q.var())] = 0;

    back_level = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i)
        if (level_[static_cast<std::size_t>(learnt[i].var())] > level_[static_cast<std::size_t>(learnt[max_i].var())])
          max_i = i;
      std::swap(learnt[1], learnt[max_i]);
      back_level = level_[static_cast<std::size_t>(learnt[1].var())];
    }
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t c = trail_.size(); c-- > trail_lim_[static_cast<std::size_t>(lvl)];) {
      const auto v = static_cast<std::size_t>(trail_[c].var());
      phase_[v] = assign_[v];
      assign_[v] = undef;
      reason_[v] = no_reason;
      if (heap_index_[v] < 0) heap_insert(static_cast<Var>(v));
    }
    qhead_ = trail_lim_[static_cast<std::size_t>(lvl)];
    trail_.resize(trail_lim_[static_cast<std::size_t>(lvl)]);
    trail_lim_.resize(static_cast<std::size_t>(lvl));
  }

  Lit pick_branch() {
    while (!heap_.empty()) {
      const Var v = heap_pop();
      if (assign_[static_cast<std::size_t>(v)] == undef) return Lit::make(v, phase_[static_cast<std::size_t>(v)] != l_true);
    }
    return undef_lit;
  }

  bool out_of_budget() const {
    if (budget_.conflicts >= 0 && conflicts_this_call_ >= budget_.conflicts) return true;
    if (budget_.deadline && std::chrono::steady_clock::now() >= *budget_.deadline) return true;
    return false;
  }

  Result search(std::int64_t restart_limit) {
    std::int64_t conflicts = 0;
    std::vector<Lit> learnt;
    for (;;) {
      const auto conflict = propagate();
      if (conflict != no_reason) {
        ++conflicts;
        ++conflicts_this_call_;
        ++total_conflicts_;
        if (decision_level() == 0) {
          ok_ = false;
          return Result::unsat;
        }
        int back_level = 0;
        analyze(conflict, learnt, back_level);
        cancel_until(back_level);
        if (learnt.size() == 1) {
          enqueue(learnt[0], no_reason);
        } else {
          const auto cref = new_clause(learnt, true);
          learnts_.push_back(cref);
          attach(cref);
          bump_clause(clauses_[cref]);
          enqueue(learnt[0], cref);
        }
        var_inc_ /= 0.95;
        clause_inc_ /= 0.999;
        if ((conflicts_this_call_ & 255) == 0 && out_of_budget()) {
          cancel_until(0);
          return Result::unknown;
        }
        continue;
      }
      if (conflicts >= restart_limit || out_of_budget()) {
        cancel_until(0);
        return Result::unknown;
      }
      if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts()) reduce_db();

      Lit next = undef_lit;
      while (static_cast<std::size_t>(decision_level()) < assumptions_.size()) {
        const Lit a = assumptions_[static_cast<std::size_t>(decision_level())];
        if (value(a) == l_true) {
          trail_lim_.push_back(trail_.size());
        } else if (value(a) == l_false) {
          cancel_until(0);
          return Result::unsat;
        } else {
          next = a;
          break;
        }
      }
      if (next == undef_lit) {
        next = pick_branch();
        if (next == undef_lit) return Result::sat;
      }
      trail_lim_.push_back(trail_.size());
      enqueue(next, no_reason);
    }
  }

  double max_learnts() const {
    return std::max(2000.0, static_cast<double>(num_original_) / 3.0) * learnt_growth_;
  }

  bool locked(std::uint32_t cref) const {
    const auto& c = clauses_[cref].lits;
    const auto v = static_cast<std::size_t>(c[0].var());
    return reason_[v] == cref && value(c[0]) == l_true;
  }

  void reduce_db() {
    std::sort(learnts_.begin(), learnts_.end(), [&](std::uint32_t a, std::uint32_t b) {
      const bool ba = clauses_[a].lits.size() == 2, bb = clauses_[b].lits.size() == 2;
      if (ba != bb) return !ba;
      return clauses_[a].activity < clauses_[b].activity;
    });
    std::vector<std::uint32_t> keep;
    const std::size_t half = learnts_.size() / 2;
    for (std::size_t i = 0; i < learnts_.size(); ++i) {
      const auto cref = learnts_[i];
      if (i < half && clauses_[cref].lits.size() > 2 && !locked(cref)) {
        clauses_[cref].deleted = true;
        clauses_[cref].lits.clear();
        clauses_[cref].lits.shrink_to_fit();
      } else {
        keep.push_back(cref);
      }
    }
    learnts_ = std::move(keep);
    for (auto& ws : watches_) {
      ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher& w) { return clauses_[w.cref].deleted; }),
               ws.end());
    }
    learnt_growth_ *= 1.1;
  }

  void bump_var(Var v) {
    auto& a = activity_[static_cast<std::size_t>(v)];
    a += var_inc_;
    if (a > 1e100) {
      for (auto& x : activity_) x *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_index_[static_cast<std::size_t>(v)] >= 0) heap_up(heap_index_[static_cast<std::size_t>(v)]);
  }

  void bump_clause(ClauseData& c) {
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
      for (auto cref : learnts_) clauses_[cref].activity *= 1e-20;
      clause_inc_ *= 1e-20;
    }
  }

  static double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      --seq;
      x = x % size;
    }
    double r = 1.0;
    for (int i = 0; i < seq; ++i) r *= y;
    return r;
  }

  // Max-heap of variables keyed by activity.
  bool heap_before(Var a, Var b) const {
    const auto aa = activity_[static_cast<std::size_t>(a)], ab = activity_[static_cast<std::size_t>(b)];
    return aa > ab || (aa == ab && a < b);
  }
  void heap_insert(Var v) {
    heap_index_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(static_cast<int>(heap_.size()) - 1);
  }
  void heap_up(int i) {
    const Var v = heap_[static_cast<std::size_t>(i)];
    while (i > 0) {
      const int parent = (i - 1) / 2;
      if (!heap_before(v, heap_[static_cast<std::size_t>(parent)])) break;
      heap_[static_cast<std::size_t>(i)] = heap_[static_cast<std::size_t>(parent)];
      heap_index_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(i)])] = i;
      i = parent;
    }
    heap_[static_cast<std::size_t>(i)] = v;
    heap_index_[static_cast<std::size_t>(v)] = i;
  }
  void heap_down(int i) {
    const Var v = heap_[static_cast<std::size_t>(i)];
    const int n = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && heap_before(heap_[static_cast<std::size_t>(child + 1)], heap_[static_cast<std::size_t>(child)]))
        ++child;
      if (!heap_before(heap_[static_cast<std::size_t>(child)], v)) break;
      heap_[static_cast<std::size_t>(i)] = heap_[static_cast<std::size_t>(child)];
      heap_index_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(i)])] = i;
      i = child;
    }
    heap_[static_cast<std::size_t>(i)] = v;
    heap_index_[static_cast<std::size_t>(v)] = i;
  }
  Var heap_pop() {
    const Var top = heap_.front();
    heap_index_[static_cast<std::size_t>(top)] = -1;
    const Var last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_index_[static_cast<std::size_t>(last)] = 0;
      heap_down(0);
    }
    return top;
  }

  bool ok_ = true;
  std::vector<ClauseData> clauses_;
  std::vector<std::uint32_t> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<LBool> assign_;
  std::vector<int> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<LBool> phase_;
  std::vector<char> seen_;
  std::vector<double> activity_;
  std::vector<int> heap_index_;
  std::vector<Var> heap_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<Lit> assumptions_;
  std::vector<Lit> analyze_stack_;
  std::vector<bool> model_;
  Budget budget_;
  std::size_t num_original_ = 0;
  std::int64_t conflicts_this_call_ = 0;
  std::int64_t total_conflicts_ = 0;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  double learnt_growth_ = 1.0;
};

}  // namespace fbd::cdcl
