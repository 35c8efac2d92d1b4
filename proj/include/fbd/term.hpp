#pragma once

// Terms over fixed-width signed integers and booleans. The same term type
// carries MiniImp expressions (over source variable names), SSA expressions
// (over versioned names) and solver constraints.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbd/error.hpp"

namespace fbd {

/// Bit width of the integer domain. Arithmetic is checked: a result outside
/// [min(), max()] is an overflow, never a silent wraparound.
struct Width {
  int bits = 32;

  static Width of(int bits) {
    if (bits < 2 || bits > 32) throw Error(ErrorKind::usage, "width must be in [2, 32], got " + std::to_string(bits));
    return Width{bits};
  }
  std::int64_t min() const { return -(std::int64_t{1} << (bits - 1)); }
  std::int64_t max() const { return (std::int64_t{1} << (bits - 1)) - 1; }
  bool fits(std::int64_t v) const { return v >= min() && v <= max(); }
  std::int64_t wrap(std::int64_t v) const {
    const auto mask = (std::uint64_t{1} << bits) - 1;
    auto u = static_cast<std::uint64_t>(v) & mask;
    if (u >> (bits - 1)) u |= ~mask;
    return static_cast<std::int64_t>(u);
  }
  friend bool operator==(Width, Width) = default;
};

enum class Sort : std::uint8_t { integer, boolean };

enum class Op : std::uint8_t {
  int_const,
  int_var,
  neg,
  add,
  sub,
  mul,
  bool_const,
  bool_var,
  lnot,
  land,
  lor,
  iff,
  implies,
  eq,
  ne,
  lt,
  le,
  gt,
  ge,
  when,  // (when pc c): c, with overflow in c mattering only where pc holds
};

class Node;
using Term = std::shared_ptr<const Node>;

class Node {
public:
  Node(Op op, std::int64_t value, std::string name, std::vector<Term> args)
      : op_(op), value_(value), name_(std::move(name)), args_(std::move(args)) {}

  Op op() const { return op_; }
  std::int64_t value() const { return value_; }
  bool truth() const { return value_ != 0; }
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }
  const Term& arg(std::size_t i) const { return args_.at(i); }

  Sort sort() const {
    switch (op_) {
      case Op::int_const:
      case Op::int_var:
      case Op::neg:
      case Op::add:
      case Op::sub:
      case Op::mul:
        return Sort::integer;
      default:
        return Sort::boolean;
    }
  }
  bool is_var() const { return op_ == Op::int_var || op_ == Op::bool_var; }
  bool is_const() const { return op_ == Op::int_const || op_ == Op::bool_const; }
  bool is_arithmetic() const { return op_ == Op::neg || op_ == Op::add || op_ == Op::sub || op_ == Op::mul; }

private:
  Op op_;
  std::int64_t value_;
  std::string name_;
  std::vector<Term> args_;
};

namespace detail {

inline Term make(Op op, std::vector<Term> args) {
  return std::make_shared<const Node>(op, 0, std::string{}, std::move(args));
}

inline void require(const Term& t, Sort s, const char* where) {
  if (!t) throw std::invalid_argument(std::string(where) + ": null operand");
  if (t->sort() != s)
    throw std::invalid_argument(std::string(where) + ": expected " +
                                (s == Sort::integer ? "integer" : "boolean") + " operand");
}

}  // namespace detail

inline Term int_const(std::int64_t v) { return std::make_shared<const Node>(Op::int_const, v, std::string{}, std::vector<Term>{}); }
inline Term int_var(std::string name) { return std::make_shared<const Node>(Op::int_var, 0, std::move(name), std::vector<Term>{}); }
inline Term bool_const(bool b) { return std::make_shared<const Node>(Op::bool_const, b ? 1 : 0, std::string{}, std::vector<Term>{}); }
inline Term bool_var(std::string name) { return std::make_shared<const Node>(Op::bool_var, 0, std::move(name), std::vector<Term>{}); }

inline Term neg(Term a) {
  detail::require(a, Sort::integer, "neg");
  return detail::make(Op::neg, {std::move(a)});
}

inline Term arith(Op op, Term a, Term b) {
  detail::require(a, Sort::integer, "arith");
  detail::require(b, Sort::integer, "arith");
  if (op != Op::add && op != Op::sub && op != Op::mul) throw std::invalid_argument("arith: not an arithmetic operator");
  return detail::make(op, {std::move(a), std::move(b)});
}
inline Term add(Term a, Term b) { return arith(Op::add, std::move(a), std::move(b)); }
inline Term sub(Term a, Term b) { return arith(Op::sub, std::move(a), std::move(b)); }
inline Term mul(Term a, Term b) { return arith(Op::mul, std::move(a), std::move(b)); }

inline Term compare(Op op, Term a, Term b) {
  detail::require(a, Sort::integer, "compare");
  detail::require(b, Sort::integer, "compare");
  switch (op) {
    case Op::eq:
    case Op::ne:
    case Op::lt:
    case Op::le:
    case Op::gt:
    case Op::ge:
      break;
    default:
      throw std::invalid_argument("compare: not a comparison operator");
  }
  return detail::make(op, {std::move(a), std::move(b)});
}
inline Term eq(Term a, Term b) { return compare(Op::eq, std::move(a), std::move(b)); }
inline Term ne(Term a, Term b) { return compare(Op::ne, std::move(a), std::move(b)); }
inline Term lt(Term a, Term b) { return compare(Op::lt, std::move(a), std::move(b)); }
inline Term le(Term a, Term b) { return compare(Op::le, std::move(a), std::move(b)); }
inline Term gt(Term a, Term b) { return compare(Op::gt, std::move(a), std::move(b)); }
inline Term ge(Term a, Term b) { return compare(Op::ge, std::move(a), std::move(b)); }

inline Term lnot(Term a) {
  detail::require(a, Sort::boolean, "not");
  return detail::make(Op::lnot, {std::move(a)});
}

inline Term land(std::vector<Term> args) {
  for (const auto& a : args) detail::require(a, Sort::boolean, "and");
  if (args.empty()) return bool_const(true);
  if (args.size() == 1) return args.front();
  return detail::make(Op::land, std::move(args));
}
inline Term land(Term a, Term b) { return land(std::vector<Term>{std::move(a), std::move(b)}); }

inline Term lor(std::vector<Term> args) {
  for (const auto& a : args) detail::require(a, Sort::boolean, "or");
  if (args.empty()) return bool_const(false);
  if (args.size() == 1) return args.front();
  return detail::make(Op::lor, std::move(args));
}
inline Term lor(Term a, Term b) { return lor(std::vector<Term>{std::move(a), std::move(b)}); }

inline Term iff(Term a, Term b) {
  detail::require(a, Sort::boolean, "iff");
  detail::require(b, Sort::boolean, "iff");
  return detail::make(Op::iff, {std::move(a), std::move(b)});
}

/// `c` whose arithmetic is checked for overflow only when `pc` holds.
inline Term when(Term pc, Term c) {
  detail::require(pc, Sort::boolean, "when");
  detail::require(c, Sort::boolean, "when");
  if (pc->op() == Op::bool_const && pc->truth()) return c;
  return detail::make(Op::when, {std::move(pc), std::move(c)});
}

inline Term implies(Term a, Term b) {
  detail::require(a, Sort::boolean, "implies");
  detail::require(b, Sort::boolean, "implies");
  return detail::make(Op::implies, {std::move(a), std::move(b)});
}

/// Structural equality.
inline bool same(const Term& a, const Term& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op() != b->op() || a->value() != b->value() || a->name() != b->name()) return false;
  if (a->args().size() != b->args().size()) return false;
  for (std::size_t i = 0; i < a->args().size(); ++i)
    if (!same(a->arg(i), b->arg(i))) return false;
  return true;
}

inline void collect_vars(const Term& t, std::map<std::string, Sort>& out) {
  if (t->is_var()) {
    auto [it, inserted] = out.emplace(t->name(), t->sort());
    if (!inserted && it->second != t->sort())
      throw AnalysisError("variable '" + t->name() + "' used as both integer and boolean");
    return;
  }
  for (const auto& a : t->args()) collect_vars(a, out);
}

inline bool contains_arithmetic(const Term& t) {
  if (t->is_arithmetic()) return true;
  for (const auto& a : t->args())
    if (contains_arithmetic(a)) return true;
  return false;
}

inline bool has_vars(const Term& t) {
  if (t->is_var()) return true;
  for (const auto& a : t->args())
    if (has_vars(a)) return true;
  return false;
}

/// Rebuilds `t` bottom-up; `leaf` may replace variables (return nullptr to keep).
inline Term transform(const Term& t, const std::function<Term(const Term&)>& leaf) {
  if (t->is_var()) {
    auto r = leaf(t);
    return r ? r : t;
  }
  if (t->args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t->args().size());
  bool changed = false;
  for (const auto& a : t->args()) {
    args.push_back(transform(a, leaf));
    changed = changed || args.back() != a;
  }
  if (!changed) return t;
  return detail::make(t->op(), std::move(args));
}

inline Term rename(const Term& t, const std::function<std::string(const std::string&)>& fn) {
  return transform(t, [&](const Term& v) -> Term {
    auto n = fn(v->name());
    if (n == v->name()) return nullptr;
    return v->op() == Op::int_var ? int_var(n) : bool_var(n);
  });
}

inline Term substitute(const Term& t, const std::map<std::string, Term>& sub) {
  return transform(t, [&](const Term& v) -> Term {
    auto it = sub.find(v->name());
    return it == sub.end() ? nullptr : it->second;
  });
}

// ---------------------------------------------------------------------------
// Printing

inline const char* sexpr_symbol(Op op) {
  switch (op) {
    case Op::neg:
    case Op::sub: return "-";
    case Op::add: return "+";
    case Op::mul: return "*";
    case Op::lnot: return "not";
    case Op::land: return "and";
    case Op::lor: return "or";
    case Op::iff: return "iff";
    case Op::implies: return "=>";
    case Op::eq: return "=";
    case Op::ne: return "!=";
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::gt: return ">";
    case Op::ge: return ">=";
    case Op::when: return "when";
    default: return "?";
  }
}

inline void write_sexpr(std::ostream& os, const Term& t) {
  switch (t->op()) {
    case Op::int_const: os << t->value(); return;
    case Op::bool_const: os << (t->truth() ? "true" : "false"); return;
    case Op::int_var:
    case Op::bool_var: os << t->name(); return;
    default: break;
  }
  os << '(' << sexpr_symbol(t->op());
  for (const auto& a : t->args()) {
    os << ' ';
    write_sexpr(os, a);
  }
  os << ')';
}

inline std::string to_sexpr(const Term& t) {
  std::ostringstream os;
  write_sexpr(os, t);
  return os.str();
}

/// `program` prints MiniImp concrete syntax; `formula` prints clause-style
/// text (`=` for equality, `and`/`or`/`not`).
enum class Syntax { program, formula };

namespace detail {

inline int precedence(Op op) {
  switch (op) {
    case Op::implies: return 0;
    case Op::iff: return 1;
    case Op::lor: return 2;
    case Op::land: return 3;
    case Op::lnot: return 4;
    case Op::eq:
    case Op::ne:
    case Op::lt:
    case Op::le:
    case Op::gt:
    case Op::ge: return 5;
    case Op::add:
    case Op::sub: return 6;
    case Op::mul: return 7;
    case Op::neg: return 8;
    default: return 9;
  }
}

inline void write_infix(std::ostream& os, const Term& t, Syntax syntax, int outer) {
  const int p = precedence(t->op());
  const bool paren = p < outer;
  auto bin = [&](const char* sym, int lp, int rp) {
    if (paren) os << '(';
    write_infix(os, t->arg(0), syntax, lp);
    os << ' ' << sym << ' ';
    write_infix(os, t->arg(1), syntax, rp);
    if (paren) os << ')';
  };
  const bool prog = syntax == Syntax::program;
  switch (t->op()) {
    case Op::int_const:
      if (t->value() < 0 && outer > 6) os << '(' << t->value() << ')';
      else os << t->value();
      return;
    case Op::bool_const: os << (t->truth() ? "true" : "false"); return;
    case Op::int_var:
    case Op::bool_var: os << t->name(); return;
    case Op::neg:
      os << '-';
      write_infix(os, t->arg(0), syntax, 9);
      return;
    case Op::add: bin("+", 6, 7); return;
    case Op::sub: bin("-", 6, 7); return;
    case Op::mul: bin("*", 7, 8); return;
    case Op::eq: bin(prog ? "==" : "=", 6, 6); return;
    case Op::ne: bin("!=", 6, 6); return;
    case Op::lt: bin("<", 6, 6); return;
    case Op::le: bin("<=", 6, 6); return;
    case Op::gt: bin(">", 6, 6); return;
    case Op::ge: bin(">=", 6, 6); return;
    case Op::iff: bin(prog ? "<=>" : "=", 9, 9); return;
    case Op::implies: bin("=>", 9, 9); return;
    case Op::when:
      os << "when(";
      write_infix(os, t->arg(0), syntax, 0);
      os << ", ";
      write_infix(os, t->arg(1), syntax, 0);
      os << ')';
      return;
    case Op::lnot:
      if (paren) os << '(';
      os << (prog ? "!" : "not ");
      write_infix(os, t->arg(0), syntax, 9);
      if (paren) os << ')';
      return;
    case Op::land:
    case Op::lor: {
      const char* sym = t->op() == Op::land ? (prog ? "&&" : "and") : (prog ? "||" : "or");
      if (paren) os << '(';
      for (std::size_t i = 0; i < t->args().size(); ++i) {
        if (i) os << ' ' << sym << ' ';
        write_infix(os, t->arg(i), syntax, p + 1);
      }
      if (paren) os << ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string to_infix(const Term& t, Syntax syntax = Syntax::formula) {
  std::ostringstream os;
  detail::write_infix(os, t, syntax, 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Concrete evaluation

struct Checked {
  std::int64_t value = 0;
  bool overflow = false;
};

/// Returns the value of a variable; throws if it is unbound.
using Valuation = std::function<std::int64_t(const std::string&, Sort)>;

inline Checked eval(const Term& t, const Valuation& val, Width w) {
  auto both = [&](auto&& fn) {
    auto a = eval(t->arg(0), val, w);
    auto b = eval(t->arg(1), val, w);
    return fn(a, b);
  };
  auto arith_result = [&](std::int64_t exact, bool ovf) {
    return Checked{w.wrap(exact), ovf || !w.fits(exact)};
  };
  switch (t->op()) {
    case Op::int_const: return Checked{w.wrap(t->value()), !w.fits(t->value())};
    case Op::bool_const: return Checked{t->truth() ? 1 : 0, false};
    case Op::int_var: return Checked{val(t->name(), Sort::integer), false};
    case Op::bool_var: return Checked{val(t->name(), Sort::boolean) != 0 ? 1 : 0, false};
    case Op::neg: {
      auto a = eval(t->arg(0), val, w);
      return arith_result(-a.value, a.overflow);
    }
    case Op::add: return both([&](Checked a, Checked b) { return arith_result(a.value + b.value, a.overflow || b.overflow); });
    case Op::sub: return both([&](Checked a, Checked b) { return arith_result(a.value - b.value, a.overflow || b.overflow); });
    case Op::mul: return both([&](Checked a, Checked b) { return arith_result(a.value * b.value, a.overflow || b.overflow); });
    case Op::eq: return both([](Checked a, Checked b) { return Checked{a.value == b.value, a.overflow || b.overflow}; });
    case Op::ne: return both([](Checked a, Checked b) { return Checked{a.value != b.value, a.overflow || b.overflow}; });
    case Op::lt: return both([](Checked a, Checked b) { return Checked{a.value < b.value, a.overflow || b.overflow}; });
    case Op::le: return both([](Checked a, Checked b) { return Checked{a.value <= b.value, a.overflow || b.overflow}; });
    case Op::gt: return both([](Checked a, Checked b) { return Checked{a.value > b.value, a.overflow || b.overflow}; });
    case Op::ge: return both([](Checked a, Checked b) { return Checked{a.value >= b.value, a.overflow || b.overflow}; });
    case Op::iff: return both([](Checked a, Checked b) { return Checked{a.value == b.value, a.overflow || b.overflow}; });
    case Op::implies: return both([](Checked a, Checked b) { return Checked{!a.value || b.value, a.overflow || b.overflow}; });
    case Op::when: return both([](Checked pc, Checked c) { return Checked{c.value, pc.overflow || (pc.value && c.overflow)}; });
    case Op::lnot: {
      auto a = eval(t->arg(0), val, w);
      return Checked{!a.value, a.overflow};
    }
    case Op::land:
    case Op::lor: {
      const bool is_and = t->op() == Op::land;
      Checked r{is_and ? 1 : 0, false};
      // No short-circuit: every operand is evaluated so overflow anywhere is seen.
      for (const auto& a : t->args()) {
        auto v = eval(a, val, w);
        r.overflow = r.overflow || v.overflow;
        if (is_and) r.value = r.value && v.value;
        else r.value = r.value || v.value;
      }
      return r;
    }
  }
  throw std::logic_error("eval: unknown op");
}

/// A clause holds iff it evaluates to true and no arithmetic subterm overflows.
inline bool holds(const Term& t, const Valuation& val, Width w) {
  auto r = eval(t, val, w);
  return !r.overflow && r.value != 0;
}

inline Valuation valuation_of(const std::map<std::string, std::int64_t>& env) {
  return [&env](const std::string& name, Sort) -> std::int64_t {
    auto it = env.find(name);
    if (it == env.end()) throw AnalysisError("unbound variable '" + name + "'");
    return it->second;
  };
}

}  // namespace fbd
