#pragma once

// Concrete execution of loop-free SSA programs, execution hijacking and the
// first-covering branch map.

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fbd/cfg.hpp"
#include "fbd/error.hpp"
#include "fbd/interp.hpp"
#include "fbd/ssa.hpp"

namespace fbd {

struct TraceStep {
  std::string id;
  std::string var;  // SSA variable defined by the step; empty for assert and truncation
  std::int64_t value = 0;
};

struct Trace {
  static constexpr std::size_t no_flip = std::numeric_limits<std::size_t>::max();

  std::vector<TraceStep> steps;
  Verdict verdict = Verdict::passed;
  std::vector<Branch> decisions;  // in execution order
  std::set<Branch> covered;
  std::size_t flip_step = no_flip;  // index of the forced conditional step, if hijacked

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& s : steps) out.push_back(s.id);
    return out;
  }

  bool executed(const std::string& id) const {
    for (const auto& s : steps)
      if (s.id == id) return true;
    return false;
  }

  /// Values of SSA variables, optionally restricted to steps before the flip.
  std::map<std::string, std::int64_t> state(bool before_flip_only = false) const {
    std::map<std::string, std::int64_t> out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (before_flip_only && i >= flip_step) break;
      if (!steps[i].var.empty()) out[steps[i].var] = steps[i].value;
    }
    return out;
  }
};

/// Branch -> trace that first covered it. Entries are never replaced.
class VisitedBranches {
public:
  bool insert(const Branch& b, std::shared_ptr<const Trace> t) { return map_.emplace(b, std::move(t)).second; }
  bool contains(const Branch& b) const { return map_.count(b) > 0; }
  std::shared_ptr<const Trace> at(const Branch& b) const {
    auto it = map_.find(b);
    if (it == map_.end()) throw AnalysisError("branch " + b.str() + " has not been visited");
    return it->second;
  }
  std::size_t size() const { return map_.size(); }
  std::set<Branch> keys() const {
    std::set<Branch> out;
    for (const auto& [b, t] : map_) out.insert(b);
    return out;
  }

private:
  std::map<Branch, std::shared_ptr<const Trace>> map_;
};

namespace detail {

class SsaExecutor {
public:
  SsaExecutor(const SsaProgram& ssa, Width w, std::vector<Branch> forced)
      : ssa_(ssa), width_(w), forced_(std::move(forced)) {}

  Trace run(const InputVector& input) {
    if (ssa_.has_loops) throw AnalysisError("execution requires a loop-free (unrolled) SSA program");
    check_inputs(ssa_.source->params, input);
    for (const auto& [src, v] : ssa_.params) {
      const auto x = input.at(src);
      if (!width_.fits(x)) overflow_ = true;
      env_[v] = width_.wrap(x);
    }
    const bool finished = block(ssa_.body);
    if (!finished) trace_.verdict = Verdict::truncated;
    else if (overflow_) trace_.verdict = Verdict::overflow;
    return std::move(trace_);
  }

private:
  std::int64_t value(const Term& t) {
    auto r = eval(t, valuation_of(env_), width_);
    overflow_ = overflow_ || r.overflow;
    return r.value;
  }

  void step(const std::string& id, const std::string& var, std::int64_t v) {
    trace_.steps.push_back(TraceStep{id, var, v});
    if (!var.empty()) env_[var] = v;
  }

  bool decide(const SsaNode& n, const SsaBranch& br) {
    const auto computed = value(br.pred);
    step(n.id, br.guard, computed);
    bool taken = computed != 0;
    const auto k = trace_.decisions.size();
    if (k < forced_.size()) {
      if (forced_[k].conditional != n.id)
        throw AnalysisError("hijack replay diverged at " + n.id + ", expected " + forced_[k].conditional);
      taken = forced_[k].polarity;
      if (k + 1 == forced_.size()) trace_.flip_step = trace_.steps.size() - 1;
    }
    trace_.decisions.push_back(Branch{n.id, taken});
    trace_.covered.insert(Branch{n.id, taken});
    return taken;
  }

  bool block(const Block& b) {
    for (auto i : b) {
      const auto& n = ssa_.at(i);
      if (auto* a = n.as<SsaAssign>()) {
        step(n.id, a->lhs, value(a->rhs));
      } else if (auto* br = n.as<SsaBranch>()) {
        const bool taken = decide(n, *br);
        if (!block(taken ? br->then_block : br->else_block)) return false;
        for (auto p : br->join_phis) {
          const auto& pn = ssa_.at(p);
          const auto& phi = *pn.as<SsaPhi>();
          step(pn.id, phi.lhs, env_.at(taken ? phi.rhs_true : phi.rhs_false));
        }
      } else if (auto* c = n.as<SsaAssert>()) {
        const auto v = value(c->pred);
        step(n.id, "", v);
        trace_.verdict = v ? Verdict::passed : Verdict::violated;
      } else if (auto* t = n.as<SsaTruncation>()) {
        const auto v = value(t->pred);
        step(n.id, "", v);
        if (v) return false;
      } else {
        throw AnalysisError("unexpected phi outside a join");
      }
    }
    return true;
  }

  const SsaProgram& ssa_;
  Width width_;
  std::vector<Branch> forced_;
  std::map<std::string, std::int64_t> env_;
  bool overflow_ = false;
  Trace trace_;
};

}  // namespace detail

inline Trace execute(const SsaProgram& ssa, const InputVector& input, Width w = {}) {
  return detail::SsaExecutor(ssa, w, {}).run(input);
}

/// Replays old_trace's decisions up to the first occurrence of flip's
/// conditional, takes `flip` there, then runs natively.
inline Trace execute_hijacked(const SsaProgram& ssa, const InputVector& input, const Trace& old_trace,
                              const Branch& flip, Width w = {}) {
  std::vector<Branch> forced;
  for (const auto& d : old_trace.decisions) {
    if (d.conditional == flip.conditional) {
      forced.push_back(flip);
      return detail::SsaExecutor(ssa, w, std::move(forced)).run(input);
    }
    forced.push_back(d);
  }
  throw AnalysisError("conditional " + flip.conditional + " does not occur in the trace being hijacked");
}

/// One trace-generation step. `flip` is the branch to take; the trace being
/// hijacked is the one that first covered its sibling.
inline std::shared_ptr<const Trace> trace_generator(const InputVector& input, VisitedBranches& visited,
                                                    const std::optional<Branch>& flip, const SsaProgram& ssa,
                                                    Width w = {}) {
  std::shared_ptr<const Trace> t;
  if (!flip) {
    t = std::make_shared<const Trace>(execute(ssa, input, w));
  } else {
    auto old = visited.at(flip->sibling());
    t = std::make_shared<const Trace>(execute_hijacked(ssa, input, *old, *flip, w));
  }
  for (const auto& b : t->covered) visited.insert(b, t);
  return t;
}

/// One step per line: statement id, defined variable (or "-"), value.
inline std::string dump_trace(const Trace& t) {
  std::ostringstream os;
  for (const auto& s : t.steps) os << s.id << ' ' << (s.var.empty() ? "-" : s.var) << ' ' << s.value << '\n';
  os << "verdict " << to_string(t.verdict) << '\n';
  return os.str();
}

}  // namespace fbd
