#pragma once

// Trace formulas: one origin-tagged clause per encoded SSA statement.

#include <boost/rational.hpp>

#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fbd/error.hpp"
#include "fbd/ssa.hpp"
#include "fbd/term.hpp"
#include "fbd/tracer.hpp"

namespace fbd {

using Weight = boost::rational<std::int64_t>;

inline std::string weight_str(const Weight& w) {
  return w.denominator() == 1 ? std::to_string(w.numerator())
                              : std::to_string(w.numerator()) + "/" + std::to_string(w.denominator());
}

enum class ClauseKind { guard_def, phi_def, assign, truncation, input, assertion };
enum class Hardness { hard, soft };

inline const char* to_string(ClauseKind k) {
  switch (k) {
    case ClauseKind::guard_def: return "guard";
    case ClauseKind::phi_def: return "phi";
    case ClauseKind::assign: return "assign";
    case ClauseKind::truncation: return "truncation";
    case ClauseKind::input: return "input";
    case ClauseKind::assertion: return "assertion";
  }
  return "?";
}

inline ClauseKind clause_kind_from(const std::string& s) {
  for (auto k : {ClauseKind::guard_def, ClauseKind::phi_def, ClauseKind::assign, ClauseKind::truncation,
                 ClauseKind::input, ClauseKind::assertion})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::syntax, "unknown clause kind '" + s + "'");
}

struct Clause {
  std::string id;
  ClauseKind kind = ClauseKind::assign;
  Term constraint;
  std::string origin;  // statement id, or "input"/"assert"
  int line = 0;
  Hardness hardness = Hardness::soft;
  std::optional<Weight> weight;
  bool concretized = false;
  Term path;  // condition under which the statement runs; null: every run

  bool soft() const { return hardness == Hardness::soft; }
  /// Numeric part of the id, for ordering ("c10" after "c9").
  int number() const {
    std::size_t i = 0;
    while (i < id.size() && !std::isdigit(static_cast<unsigned char>(id[i]))) ++i;
    return i < id.size() ? std::stoi(id.substr(i)) : 0;
  }
};

/// The constraint handed to the solver: overflow inside it only counts on
/// runs that execute the statement.
inline Term solver_term(const Clause& c) { return c.path ? when(c.path, c.constraint) : c.constraint; }

/// Orders clause ids numerically when they share a prefix.
inline bool clause_id_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    long n = i < s.size() ? std::stol(s.substr(i)) : -1;
    return std::pair{s.substr(0, i), n};
  };
  auto [pa, na] = split(a);
  auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  if (na != nb) return na < nb;
  return a < b;
}

class TraceFormula {
public:
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::vector<Clause>& clauses() { return clauses_; }
  const std::set<std::string>& scope() const { return scope_; }
  const std::map<std::string, std::string>& clause_origin() const { return origin_; }
  std::size_t size() const { return clauses_.size(); }
  bool in_scope(const std::string& stmt) const { return scope_.count(stmt) > 0; }

  const Clause& add(Clause c) {
    c.id = "c" + std::to_string(clauses_.size() + 1);
    scope_.insert(c.origin);
    origin_[c.id] = c.origin;
    clauses_.push_back(std::move(c));
    return clauses_.back();
  }

  const Clause* find(const std::string& id) const {
    for (const auto& c : clauses_)
      if (c.id == id) return &c;
    return nullptr;
  }
  const Clause& at(const std::string& id) const {
    auto* c = find(id);
    if (!c) throw AnalysisError("no clause '" + id + "'");
    return *c;
  }
  const Clause* by_origin(const std::string& stmt) const {
    for (const auto& c : clauses_)
      if (c.origin == stmt) return &c;
    return nullptr;
  }

private:
  std::vector<Clause> clauses_;
  std::set<std::string> scope_;
  std::map<std::string, std::string> origin_;
};

/// Operand classes replaced by logged values.
enum class ConcretizePolicy {
  none,
  nonlinear,       // right operand of each variable-by-variable product
  nonlinear_both,  // both operands of such products
  all,             // every variable on the defining side of the clause
};

namespace detail {

inline Term concretize_term(const Term& t, ConcretizePolicy policy, const std::map<std::string, std::int64_t>& log,
                            bool& changed, const std::string& where) {
  auto ground = [&](const Term& x) {
    return transform(x, [&](const Term& v) -> Term {
      if (v->op() != Op::int_var) return v;
      auto it = log.find(v->name());
      if (it == log.end()) throw AnalysisError(where + ": no logged value for '" + v->name() + "'");
      changed = true;
      return int_const(it->second);
    });
  };
  if (policy == ConcretizePolicy::all) return ground(t);
  if (t->op() == Op::mul && has_vars(t->arg(0)) && has_vars(t->arg(1))) {
    auto l = concretize_term(t->arg(0), policy, log, changed, where);
    auto r = ground(t->arg(1));
    if (policy == ConcretizePolicy::nonlinear_both) l = ground(l);
    return mul(l, r);
  }
  if (t->args().empty()) return t;
  std::vector<Term> args;
  bool differs = false;
  for (const auto& a : t->args()) {
    args.push_back(concretize_term(a, policy, log, changed, where));
    differs = differs || args.back() != a;
  }
  return differs ? make(t->op(), std::move(args)) : t;
}

}  // namespace detail

/// Replaces selected operands of an assignment or guard clause by logged values.
inline Clause concretize(const Clause& c, const std::map<std::string, std::int64_t>& log,
                         ConcretizePolicy policy = ConcretizePolicy::nonlinear) {
  if (policy == ConcretizePolicy::none) return c;
  if (c.kind != ClauseKind::assign && c.kind != ClauseKind::guard_def) return c;
  bool changed = false;
  auto rhs = detail::concretize_term(c.constraint->arg(1), policy, log, changed, "statement " + c.origin);
  if (!changed) return c;
  Clause out = c;
  out.constraint = detail::make(c.constraint->op(), {c.constraint->arg(0), rhs});
  out.concretized = true;
  return out;
}

/// Clause encoding one SSA statement, or nothing for the assert.
inline std::optional<Clause> statement_clause(const SsaProgram& ssa, const SsaNode& n) {
  Clause c;
  c.origin = n.id;
  c.line = n.line;
  if (n.path && !(n.path->op() == Op::bool_const && n.path->truth())) c.path = n.path;
  if (auto* a = n.as<SsaAssign>()) {
    c.kind = ClauseKind::assign;
    c.constraint = eq(int_var(a->lhs), a->rhs);
  } else if (auto* br = n.as<SsaBranch>()) {
    if (br->loop) throw AnalysisError("statement " + n.id + ": loops must be unrolled before encoding");
    c.kind = ClauseKind::guard_def;
    c.constraint = iff(bool_var(br->guard), br->pred);
  } else if (auto* p = n.as<SsaPhi>()) {
    const auto& cond = ssa.node(p->conditional);
    auto g = bool_var(cond.as<SsaBranch>()->guard);
    c.kind = ClauseKind::phi_def;
    c.hardness = Hardness::hard;
    c.constraint = lor(land(g, eq(int_var(p->lhs), int_var(p->rhs_true))),
                       land(lnot(g), eq(int_var(p->lhs), int_var(p->rhs_false))));
  } else if (auto* t = n.as<SsaTruncation>()) {
    c.kind = ClauseKind::truncation;
    c.hardness = Hardness::hard;
    c.constraint = t->path_condition->op() == Op::bool_const ? lnot(t->pred) : implies(t->path_condition, lnot(t->pred));
  } else {
    return std::nullopt;
  }
  return c;
}

/// Adds a clause for every statement of `trace` not yet in scope.
inline void formula_generator(const Trace& trace, TraceFormula& tf, const SsaProgram& ssa,
                              ConcretizePolicy policy = ConcretizePolicy::none) {
  std::map<std::string, std::int64_t> log;
  if (policy != ConcretizePolicy::none) log = trace.state(true);
  for (const auto& s : trace.steps) {
    if (tf.in_scope(s.id)) continue;
    auto c = statement_clause(ssa, ssa.node(s.id));
    if (!c) continue;
    tf.add(policy == ConcretizePolicy::none ? std::move(*c) : concretize(*c, log, policy));
  }
}

/// Default cap on the all-paths formula size.
inline constexpr std::size_t default_blow_up_cap = 20000;

/// Encodes every statement of the unrolled program (all paths at once).
inline TraceFormula encode_all_paths(const SsaProgram& ssa, std::size_t cap = default_blow_up_cap) {
  if (ssa.has_loops) throw AnalysisError("loops must be unrolled before encoding");
  TraceFormula tf;
  std::function<void(const Block&)> walk = [&](const Block& b) {
    for (auto i : b) {
      const auto& n = ssa.at(i);
      if (auto c = statement_clause(ssa, n)) {
        if (tf.size() >= cap)
          throw Error(ErrorKind::blow_up, "all-paths formula exceeds " + std::to_string(cap) + " clauses");
        tf.add(std::move(*c));
      }
      if (auto* br = n.as<SsaBranch>()) {
        walk(br->then_block);
        walk(br->else_block);
        walk(br->join_phis);
      }
    }
  };
  walk(ssa.body);
  return tf;
}

/// One clause per line: id, hardness, weight ("-" if none), kind, origin,
/// line, constraint as an S-expression.
inline std::string clause_line(const Clause& c) {
  std::ostringstream os;
  os << c.id << ' ' << (c.soft() ? "soft" : "hard") << ' ' << (c.weight ? weight_str(*c.weight) : "-") << ' '
     << to_string(c.kind) << ' ' << c.origin << ' ' << c.line << ' ' << to_sexpr(c.constraint);
  if (c.concretized) os << " ; concretized";
  if (c.path) os << (c.concretized ? ", " : " ; ") << "when " << to_sexpr(c.path);
  return os.str();
}

inline std::string dump_formula(const TraceFormula& tf) {
  std::ostringstream os;
  for (const auto& c : tf.clauses()) os << clause_line(c) << '\n';
  return os.str();
}

}  // namespace fbd
