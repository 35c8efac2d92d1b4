#pragma once

// Reference decision procedure and CoMSS enumeration for small instances.
// Independent of the bit-blaster: it searches variable assignments directly
// and evaluates constraints with the term evaluator.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fbd/error.hpp"
#include "fbd/solver.hpp"
#include "fbd/term.hpp"

namespace fbd {

namespace detail {

enum class K : std::uint8_t { f, t, u };

struct Partial {
  K value = K::u;          // Kleene value ignoring overflow (booleans)
  std::optional<std::int64_t> number;  // integer value, when ground
  K overflow = K::f;       // t: some arithmetic subterm overflows; u: not yet known
};

class SearchSat {
public:
  SearchSat(std::vector<Term> cs, Width w) : width_(w) {
    for (auto& c : cs) add_conjuncts(c);
    std::map<std::string, Sort> vars;
    for (const auto& c : constraints_) collect_vars(c, vars);
    for (const auto& [name, sort] : vars) sorts_[name] = sort;
  }

  std::optional<Model> solve() {
    if (!search()) return std::nullopt;
    Model m;
    for (const auto& [name, sort] : sorts_) {
      auto it = env_.find(name);
      const auto v = it == env_.end() ? 0 : it->second;
      if (sort == Sort::boolean) m.bools[name] = v != 0;
      else m.ints[name] = v;
    }
    return m;
  }

private:
  void add_conjuncts(const Term& t) {
    if (t->op() == Op::land) {
      for (const auto& a : t->args()) add_conjuncts(a);
    } else {
      constraints_.push_back(t);
    }
  }

  Partial eval(const Term& t) const {
    switch (t->op()) {
      case Op::int_const: return Partial{K::u, width_.wrap(t->value()), width_.fits(t->value()) ? K::f : K::t};
      case Op::bool_const: return Partial{t->truth() ? K::t : K::f, std::nullopt, K::f};
      case Op::int_var:
      case Op::bool_var: {
        auto it = env_.find(t->name());
        if (it == env_.end()) return Partial{K::u, std::nullopt, K::f};
        if (t->op() == Op::bool_var) return Partial{it->second ? K::t : K::f, std::nullopt, K::f};
        return Partial{K::u, it->second, K::f};
      }
      default: break;
    }
    std::vector<Partial> a;
    for (const auto& x : t->args()) a.push_back(eval(x));
    K ovf = K::f;
    for (const auto& p : a) ovf = p.overflow == K::t ? K::t : (p.overflow == K::u && ovf != K::t ? K::u : ovf);
    Partial r;
    r.overflow = ovf;
    auto ground2 = a.size() == 2 && a[0].number && a[1].number;
    switch (t->op()) {
      case Op::neg:
      case Op::add:
      case Op::sub:
      case Op::mul: {
        const bool ground = t->op() == Op::neg ? a[0].number.has_value() : ground2;
        if (!ground) {
          if (r.overflow != K::t) r.overflow = K::u;
          return r;
        }
        std::int64_t exact = 0;
        if (t->op() == Op::neg) exact = -*a[0].number;
        if (t->op() == Op::add) exact = *a[0].number + *a[1].number;
        if (t->op() == Op::sub) exact = *a[0].number - *a[1].number;
        if (t->op() == Op::mul) exact = *a[0].number * *a[1].number;
        r.number = width_.wrap(exact);
        if (!width_.fits(exact)) r.overflow = K::t;
        return r;
      }
      case Op::eq:
      case Op::ne:
      case Op::lt:
      case Op::le:
      case Op::gt:
      case Op::ge: {
        if (!ground2) return r;
        const auto x = *a[0].number, y = *a[1].number;
        bool v = false;
        switch (t->op()) {
          case Op::eq: v = x == y; break;
          case Op::ne: v = x != y; break;
          case Op::lt: v = x < y; break;
          case Op::le: v = x <= y; break;
          case Op::gt: v = x > y; break;
          default: v = x >= y; break;
        }
        r.value = v ? K::t : K::f;
        return r;
      }
      case Op::lnot: r.value = a[0].value == K::u ? K::u : (a[0].value == K::t ? K::f : K::t); return r;
      case Op::land: {
        r.value = K::t;
        for (const auto& p : a) {
          if (p.value == K::f) r.value = K::f;
          else if (p.value == K::u && r.value == K::t) r.value = K::u;
        }
        return r;
      }
      case Op::lor: {
        r.value = K::f;
        for (const auto& p : a) {
          if (p.value == K::t) r.value = K::t;
          else if (p.value == K::u && r.value == K::f) r.value = K::u;
        }
        return r;
      }
      case Op::iff:
        r.value = (a[0].value == K::u || a[1].value == K::u) ? K::u : (a[0].value == a[1].value ? K::t : K::f);
        return r;
      case Op::implies:
        if (a[0].value == K::f || a[1].value == K::t) r.value = K::t;
        else if (a[0].value == K::t && a[1].value == K::f) r.value = K::f;
        else r.value = K::u;
        return r;
      case Op::when: {
        r.value = a[1].value;
        const K guarded = a[0].value == K::f || a[1].overflow == K::f ? K::f
                          : a[0].value == K::t && a[1].overflow == K::t ? K::t
                                                                         : K::u;
        r.overflow = a[0].overflow == K::t || guarded == K::t ? K::t
                     : a[0].overflow == K::f && guarded == K::f ? K::f
                                                                 : K::u;
        return r;
      }
      default: break;
    }
    throw std::logic_error("oracle: unknown op");
  }

  static bool definitely_false(const Partial& p) { return p.value == K::f || p.overflow == K::t; }
  static bool definitely_true(const Partial& p) { return p.value == K::t && p.overflow == K::f; }

  void assign(const std::string& name, std::int64_t v) {
    env_[name] = v;
    trail_.push_back(name);
  }

  // Applies forced assignments implied by `t` having to hold. Returns false on conflict.
  bool imply(const Term& t, bool& changed) {
    const auto p = eval(t);
    if (definitely_false(p)) return false;
    if (definitely_true(p)) return true;
    switch (t->op()) {
      case Op::bool_var:
        if (!env_.count(t->name())) {
          assign(t->name(), 1);
          changed = true;
        }
        return true;
      case Op::lnot:
        if (t->arg(0)->op() == Op::bool_var && !env_.count(t->arg(0)->name())) {
          assign(t->arg(0)->name(), 0);
          changed = true;
        }
        return true;
      case Op::land:
        for (const auto& a : t->args())
          if (!imply(a, changed)) return false;
        return true;
      case Op::lor: {
        const Term* open = nullptr;
        for (const auto& a : t->args()) {
          if (definitely_false(eval(a))) continue;
          if (open) return true;
          open = &a;
        }
        return open ? imply(*open, changed) : false;
      }
      case Op::implies:
        if (eval(t->arg(0)).value == K::t) return imply(t->arg(1), changed);
        return true;
      case Op::when:
        if (eval(t->arg(0)).value == K::t) return imply(t->arg(1), changed);
        return true;
      case Op::eq:
        for (int side = 0; side < 2; ++side) {
          const auto& v = t->arg(side);
          const auto& other = t->arg(1 - side);
          if (v->op() != Op::int_var || env_.count(v->name())) continue;
          const auto o = eval(other);
          if (!o.number) continue;
          if (o.overflow == K::t) return false;
          assign(v->name(), *o.number);
          changed = true;
          return true;
        }
        return true;
      case Op::iff:
        for (int side = 0; side < 2; ++side) {
          const auto& g = t->arg(side);
          if (g->op() != Op::bool_var || env_.count(g->name())) continue;
          const auto o = eval(t->arg(1 - side));
          if (o.value == K::u) continue;
          assign(g->name(), o.value == K::t ? 1 : 0);
          changed = true;
          return true;
        }
        return true;
      default: return true;
    }
  }

  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& c : constraints_)
        if (!imply(c, changed)) return false;
    }
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      env_.erase(trail_.back());
      trail_.pop_back();
    }
  }

  void unassigned_vars(const Term& t, std::vector<std::string>& out) const {
    if (t->is_var()) {
      if (!env_.count(t->name()) && std::find(out.begin(), out.end(), t->name()) == out.end()) out.push_back(t->name());
      return;
    }
    for (const auto& a : t->args()) unassigned_vars(a, out);
  }

  bool search() {
    const auto mark = trail_.size();
    if (!propagate()) {
      undo(mark);
      return false;
    }
    const Term* open = nullptr;
    for (const auto& c : constraints_) {
      const auto p = eval(c);
      if (definitely_false(p)) {
        undo(mark);
        return false;
      }
      if (!definitely_true(p) && !open) open = &c;
    }
    if (!open) return true;
    std::vector<std::string> vars;
    unassigned_vars(*open, vars);
    std::stable_partition(vars.begin(), vars.end(), [&](const std::string& v) { return sorts_.at(v) == Sort::boolean; });
    const auto& v = vars.front();
    const bool is_bool = sorts_.at(v) == Sort::boolean;
    const std::int64_t lo = is_bool ? 0 : width_.min();
    const std::int64_t hi = is_bool ? 1 : width_.max();
    for (auto x = lo; x <= hi; ++x) {
      const auto inner = trail_.size();
      assign(v, x);
      if (search()) return true;
      undo(inner);
    }
    undo(mark);
    return false;
  }

  Width width_;
  std::vector<Term> constraints_;
  std::map<std::string, Sort> sorts_;
  std::map<std::string, std::int64_t> env_;
  std::vector<std::string> trail_;
};

}  // namespace detail

inline constexpr std::size_t oracle_max_soft = 20;
inline constexpr int oracle_max_width = 8;

/// Exhaustive-search decision procedure (exponential; small widths only).
inline SatResult search_sat(const std::vector<Term>& constraints, Width w) {
  if (w.bits > oracle_max_width) throw AnalysisError("search_sat supports widths up to 8");
  auto m = detail::SearchSat(constraints, w).solve();
  SatResult r;
  r.status = m ? SatStatus::sat : SatStatus::unsat;
  if (m) r.model = std::move(*m);
  return r;
}

inline bool is_correction(const MaxSatInstance& inst, const std::vector<std::string>& dropped) {
  return search_sat(kept_constraints(inst, dropped), inst.width).status == SatStatus::sat;
}

/// Adding back any dropped clause makes the kept set unsatisfiable.
inline bool is_minimal(const MaxSatInstance& inst, const std::vector<std::string>& dropped) {
  for (const auto& id : dropped) {
    auto cs = kept_constraints(inst, dropped);
    cs.push_back(solver_term(inst.soft_clause(id)));
    if (search_sat(cs, inst.width).status == SatStatus::sat) return false;
  }
  return true;
}

/// Largest assignment space, in bits, that brute_force_comss tabulates.
inline constexpr int oracle_table_bits = 20;

namespace detail {

/// Soft-clause masks (bit i: soft[i] holds) of every assignment that satisfies
/// all hard clauses, by enumerating the whole assignment space.
inline std::set<std::uint32_t> achievable_masks(const MaxSatInstance& inst) {
  std::map<std::string, Sort> sorts;
  std::vector<Term> terms;
  for (const auto& c : inst.hard) terms.push_back(solver_term(c));
  for (const auto& c : inst.soft) terms.push_back(solver_term(c));
  for (const auto& t : terms) collect_vars(t, sorts);
  std::vector<std::pair<std::string, Sort>> vars(sorts.begin(), sorts.end());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vars.size(); ++i) index[vars[i].first] = i;

  // Each clause is evaluated once, right after its last variable is assigned.
  std::vector<std::vector<std::size_t>> due(vars.size() + 1);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    std::map<std::string, Sort> used;
    collect_vars(terms[k], used);
    std::size_t last = 0;
    for (const auto& [name, sort] : used) last = std::max(last, index.at(name) + 1);
    due[last].push_back(k);
  }
  const auto nhard = inst.hard.size();
  std::vector<std::int64_t> values(vars.size(), 0);
  const Valuation val = [&](const std::string& name, Sort) { return values[index.at(name)]; };
  std::set<std::uint32_t> masks;
  auto check = [&](std::size_t level, std::uint32_t& mask) {
    for (auto k : due[level]) {
      const bool ok = holds(terms[k], val, inst.width);
      if (k < nhard) {
        if (!ok) return false;
      } else if (ok) {
        mask |= std::uint32_t{1} << (k - nhard);
      }
    }
    return true;
  };
  std::function<void(std::size_t, std::uint32_t)> walk = [&](std::size_t d, std::uint32_t mask) {
    if (d == vars.size()) {
      masks.insert(mask);
      return;
    }
    const bool is_bool = vars[d].second == Sort::boolean;
    const std::int64_t lo = is_bool ? 0 : inst.width.min();
    const std::int64_t hi = is_bool ? 1 : inst.width.max();
    for (auto x = lo; x <= hi; ++x) {
      values[d] = x;
      auto m = mask;
      if (check(d + 1, m)) walk(d + 1, m);
    }
  };
  std::uint32_t root = 0;
  if (check(0, root)) walk(0, root);
  return masks;
}

inline int assignment_bits(const MaxSatInstance& inst) {
  std::map<std::string, Sort> sorts;
  for (const auto& c : inst.hard) collect_vars(c.constraint, sorts);
  for (const auto& c : inst.soft) collect_vars(c.constraint, sorts);
  for (const auto& c : inst.hard)
    if (c.path) collect_vars(c.path, sorts);
  for (const auto& c : inst.soft)
    if (c.path) collect_vars(c.path, sorts);
  int bits = 0;
  for (const auto& [name, sort] : sorts) bits += sort == Sort::boolean ? 1 : inst.width.bits;
  return bits;
}

}  // namespace detail

/// All CoMSSs of size at most `max_size`, in the same order as
/// enumerate_comss. Small assignment spaces are tabulated exhaustively and
/// the CoMSSs read off as complements of the maximal satisfiable masks;
/// larger ones fall back to subset enumeration with search_sat.
inline std::vector<CoMss> brute_force_comss(const MaxSatInstance& inst, int max_size,
                                            ComssMode mode = ComssMode::plain) {
  if (inst.soft.size() > oracle_max_soft || inst.width.bits > oracle_max_width)
    throw AnalysisError("brute_force_comss is limited to 20 soft clauses and width 8");
  auto weight = [&](const std::string& id) { return mode == ComssMode::weighted ? inst.weight_of(inst.soft_clause(id)) : Weight(1); };
  Weight total(0);
  for (const auto& c : inst.soft) total += weight(c.id);
  std::vector<CoMss> found;

  if (detail::assignment_bits(inst) <= oracle_table_bits) {
    const auto masks = detail::achievable_masks(inst);
    if (masks.empty()) throw AnalysisError("malformed instance: the hard clauses are unsatisfiable");
    const std::uint32_t full = inst.soft.empty() ? 0 : (std::uint32_t{1} << inst.soft.size()) - 1;
    if (masks.count(full)) return found;
    for (auto m : masks) {
      const bool maximal = std::none_of(masks.begin(), masks.end(), [&](std::uint32_t o) { return o != m && (o & m) == m; });
      if (!maximal) continue;
      std::vector<std::string> dropped;
      Weight kept(0);
      for (std::size_t i = 0; i < inst.soft.size(); ++i) {
        if (m >> i & 1) kept += weight(inst.soft[i].id);
        else dropped.push_back(inst.soft[i].id);
      }
      if (static_cast<int>(dropped.size()) > max_size) continue;
      std::sort(dropped.begin(), dropped.end(), clause_id_less);
      found.push_back(CoMss{dropped, kept});
    }
    std::stable_sort(found.begin(), found.end(), comss_before);
    return found;
  }

  std::vector<Term> hard;
  for (const auto& c : inst.hard) hard.push_back(solver_term(c));
  if (search_sat(hard, inst.width).status == SatStatus::unsat)
    throw AnalysisError("malformed instance: the hard clauses are unsatisfiable");
  std::vector<std::string> ids;
  for (const auto& c : inst.soft) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end(), clause_id_less);
  if (is_correction(inst, {})) return found;
  const auto n = ids.size();
  for (std::size_t k = 1; k <= std::min<std::size_t>(static_cast<std::size_t>(max_size), n); ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      std::vector<std::string> subset;
      for (auto i : idx) subset.push_back(ids[i]);
      const bool superset = std::any_of(found.begin(), found.end(), [&](const CoMss& f) {
        return std::includes(subset.begin(), subset.end(), f.clause_ids.begin(), f.clause_ids.end(), clause_id_less);
      });
      if (!superset && is_correction(inst, subset)) {
        if (!is_minimal(inst, subset)) throw std::logic_error("brute_force_comss: non-minimal correction set");
        Weight dropped(0);
        for (const auto& id : subset) dropped += weight(id);
        found.push_back(CoMss{subset, total - dropped});
      }
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  std::stable_sort(found.begin(), found.end(), comss_before);
  return found;
}

}  // namespace fbd
