#pragma once

// Random MiniImp programs with seeded single-statement faults, and random
// MAX-SAT instances, for property tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fbd/encoder.hpp"
#include "fbd/interp.hpp"
#include "fbd/parser.hpp"
#include "fbd/solver.hpp"

namespace fbd::testgen {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick_of(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(v.size()) - 1))];
}

struct Operand {
  std::string var;  // empty: constant
  int value = 0;
  std::string str() const { return var.empty() ? std::to_string(value) : var; }
};

struct Expr {
  Operand lhs;
  std::string op;  // "", "+", "-", "*"
  Operand rhs;
  std::string str() const { return op.empty() ? lhs.str() : lhs.str() + " " + op + " " + rhs.str(); }
};

struct Pred {
  std::string var;
  std::string rel;
  Operand rhs;
  std::string str() const { return var + " " + rel + " " + rhs.str(); }
};

struct GStmt {
  enum Kind { assign, branch, loop } kind = assign;
  std::string var;
  Expr expr;
  Pred pred;
  std::vector<GStmt> then_body, else_body;
  bool has_else = false;
  bool mutable_ = true;  // loop counters stay intact
};

struct Generated {
  std::vector<std::string> params;
  std::vector<GStmt> body;
  std::string output = "r";
};

class ProgramGenerator {
public:
  ProgramGenerator(Rng& rng, int max_stmts = 30, int max_conds = 3, int max_trip = 3)
      : rng_(rng), max_stmts_(max_stmts), max_conds_(max_conds), max_trip_(max_trip) {}

  Generated run() {
    Generated g;
    g.params = {"x", "y"};
    if (chance(rng_, 0.3)) g.params.push_back("z");
    std::set<std::string> defined(g.params.begin(), g.params.end());
    budget_ = pick(rng_, 4, max_stmts_ - 1);
    conds_ = pick(rng_, 0, max_conds_);
    loops_ = 0;
    g.body = block(defined, budget_, 0, false);
    GStmt out;
    out.var = "r";
    out.expr = expr(defined);
    g.body.push_back(out);
    return g;
  }

private:
  std::vector<GStmt> block(std::set<std::string>& defined, int n, int depth, bool in_loop) {
    std::vector<GStmt> out;
    while (n > 0) {
      const int roll = pick(rng_, 0, 9);
      if (conds_ > 0 && depth < 2 && n >= 3 && roll < 3) {
        --conds_;
        GStmt s;
        s.kind = GStmt::branch;
        s.pred = pred(defined);
        const int inner = std::min(n - 1, pick(rng_, 1, 4));
        const int t = std::max(1, inner / 2 + (chance(rng_, 0.5) ? 0 : inner % 2));
        auto d1 = defined, d2 = defined;
        s.then_body = block(d1, t, depth + 1, in_loop);
        s.has_else = inner - t > 0 && chance(rng_, 0.8);
        if (s.has_else) s.else_body = block(d2, inner - t, depth + 1, in_loop);
        for (const auto& v : d1)
          if (d2.count(v)) defined.insert(v);
        n -= 1 + count(s.then_body) + count(s.else_body);
        out.push_back(std::move(s));
      } else if (conds_ > 0 && !in_loop && n >= 4 && roll == 3 && loops_ < 2) {
        --conds_;
        const std::string i = loops_ == 0 ? "i" : "j";
        ++loops_;
        GStmt init;
        init.var = i;
        init.expr = Expr{Operand{"", 0}, "", {}};
        init.mutable_ = false;
        out.push_back(init);
        defined.insert(i);
        GStmt s;
        s.kind = GStmt::loop;
        s.pred = Pred{i, "<", Operand{"", pick(rng_, 1, max_trip_)}};
        s.mutable_ = false;
        auto d = defined;
        s.then_body = block(d, std::min(n - 3, pick(rng_, 1, 3)), depth + 1, true);
        GStmt inc;
        inc.var = i;
        inc.expr = Expr{Operand{i, 0}, "+", Operand{"", 1}};
        inc.mutable_ = false;
        s.then_body.push_back(inc);
        n -= 2 + count(s.then_body);
        out.push_back(std::move(s));
      } else {
        GStmt s;
        s.var = pick_of(rng_, std::vector<std::string>{"a", "b", "c", "d"});
        s.expr = expr(defined);
        defined.insert(s.var);
        --n;
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  static int count(const std::vector<GStmt>& b) {
    int n = 0;
    for (const auto& s : b) n += 1 + count(s.then_body) + count(s.else_body);
    return n;
  }

  Operand operand(const std::set<std::string>& defined, bool allow_const = true) {
    std::vector<std::string> vars;
    for (const auto& v : defined)
      if (v != "i" && v != "j") vars.push_back(v);
    if (allow_const && (vars.empty() || chance(rng_, 0.4))) return Operand{"", pick(rng_, 0, 5)};
    return Operand{pick_of(rng_, vars), 0};
  }

  Expr expr(const std::set<std::string>& defined) {
    Expr e;
    e.lhs = operand(defined, false);
    const int r = pick(rng_, 0, 9);
    if (r < 2) return e;
    e.op = r < 6 ? "+" : r < 9 ? "-" : "*";
    e.rhs = e.op == "*" ? Operand{"", pick(rng_, 2, 3)} : operand(defined);
    return e;
  }

  Pred pred(const std::set<std::string>& defined) {
    Pred p;
    p.var = operand(defined, false).var;
    p.rel = pick_of(rng_, std::vector<std::string>{"<", "<=", ">", ">=", "==", "!="});
    p.rhs = chance(rng_, 0.6) ? Operand{"", pick(rng_, -2, 4)} : operand(defined);
    return p;
  }

  Rng& rng_;
  int max_stmts_, max_conds_, max_trip_;
  int budget_ = 0, conds_ = 0, loops_ = 0;
};

inline void render_block(std::ostringstream& os, const std::vector<GStmt>& b, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& s : b) {
    switch (s.kind) {
      case GStmt::assign: os << pad << s.var << " = " << s.expr.str() << ";\n"; break;
      case GStmt::branch:
        os << pad << "if (" << s.pred.str() << ") {\n";
        render_block(os, s.then_body, indent + 1);
        if (s.has_else) {
          os << pad << "} else {\n";
          render_block(os, s.else_body, indent + 1);
        }
        os << pad << "}\n";
        break;
      case GStmt::loop:
        os << pad << "while (" << s.pred.str() << ") {\n";
        render_block(os, s.then_body, indent + 1);
        os << pad << "}\n";
        break;
    }
  }
}

inline std::string render(const Generated& g, const std::string& name = "G") {
  std::ostringstream os;
  os << "int " << name << "(";
  for (std::size_t i = 0; i < g.params.size(); ++i) os << (i ? ", " : "") << "int " << g.params[i];
  os << ") {\n";
  render_block(os, g.body, 1);
  os << "}\n";
  return os.str();
}

inline void collect_mutable(std::vector<GStmt>& b, std::vector<GStmt*>& out) {
  for (auto& s : b) {
    if (s.mutable_) out.push_back(&s);
    collect_mutable(s.then_body, out);
    collect_mutable(s.else_body, out);
  }
}

/// Applies one random single-statement fault in place.
inline void mutate(Generated& g, Rng& rng) {
  std::vector<GStmt*> sites;
  collect_mutable(g.body, sites);
  GStmt& s = *pick_of(rng, sites);
  if (s.kind == GStmt::branch) {
    if (chance(rng, 0.5) && s.pred.rhs.var.empty()) {
      s.pred.rhs.value += chance(rng, 0.5) ? 1 : -1;
    } else {
      static const std::vector<std::pair<std::string, std::string>> swaps{
          {"<", "<="}, {"<=", "<"}, {">", ">="}, {">=", ">"}, {"==", "!="}, {"!=", "=="}};
      for (const auto& [from, to] : swaps)
        if (s.pred.rel == from) {
          s.pred.rel = to;
          break;
        }
    }
    return;
  }
  auto& e = s.expr;
  const int r = pick(rng, 0, 2);
  if (r == 0 && e.op == "+") e.op = "-";
  else if (r == 0 && e.op == "-") e.op = "+";
  else if (!e.op.empty() && e.rhs.var.empty()) e.rhs.value += e.op == "*" ? 1 : (chance(rng, 0.5) ? 1 : -1);
  else if (e.op.empty()) {
    e.op = "+";
    e.rhs = Operand{"", 1};
  } else {
    e.op = e.op == "-" ? "+" : "-";
  }
}

/// A faulty program with a failing input and the golden value of its output.
struct FaultyCase {
  std::string golden_src, faulty_src;
  Program faulty;  // carries `r == expected`
  InputVector input;
  std::int64_t expected = 0;
  std::vector<std::string> params;
};

inline std::vector<InputVector> input_grid(const std::vector<std::string>& params, int lo, int hi) {
  std::vector<InputVector> out{InputVector{}};
  for (const auto& p : params) {
    std::vector<InputVector> next;
    for (const auto& in : out)
      for (int v = lo; v <= hi; ++v) {
        auto e = in;
        e[p] = v;
        next.push_back(e);
      }
    out = std::move(next);
  }
  return out;
}

inline std::optional<FaultyCase> make_faulty_case(Rng& rng, Width w, int max_trip = 3) {
  ProgramGenerator gen(rng, 30, 3, max_trip);
  auto g = gen.run();
  auto f = g;
  mutate(f, rng);
  FaultyCase c;
  c.golden_src = render(g);
  c.faulty_src = render(f);
  if (c.golden_src == c.faulty_src) return std::nullopt;
  c.params = g.params;
  const auto golden = with_assertion(parse_without_assert(c.golden_src), bool_const(true));
  const auto faulty = with_assertion(parse_without_assert(c.faulty_src), bool_const(true));
  auto grid = input_grid(g.params, -4, 4);
  std::shuffle(grid.begin(), grid.end(), rng);
  for (const auto& in : grid) {
    const auto a = interpret(golden, in, w);
    const auto b = interpret(faulty, in, w);
    if (a.verdict != Verdict::passed || b.verdict != Verdict::passed) continue;
    if (a.env.at("r") == b.env.at("r")) continue;
    c.input = in;
    c.expected = a.env.at("r");
    c.faulty = with_assertion(faulty, eq(int_var("r"), int_const(c.expected)));
    return c;
  }
  return std::nullopt;
}

/// Random MAX-SAT instance over small-width integers and booleans.
inline MaxSatInstance random_instance(Rng& rng, Width w, int max_soft = 10, int int_vars = 3) {
  std::vector<std::string> ints{"p", "q", "s"};
  ints.resize(static_cast<std::size_t>(std::clamp(int_vars, 1, 3)));
  const std::vector<std::string> bools{"g", "h"};
  auto atom = [&]() -> Term {
    if (chance(rng, 0.5)) return int_var(pick_of(rng, ints));
    return int_const(pick(rng, w.min() / 2, w.max() / 2));
  };
  auto arith_term = [&]() -> Term {
    switch (pick(rng, 0, 4)) {
      case 0: return add(atom(), atom());
      case 1: return sub(atom(), atom());
      case 2: return mul(int_var(pick_of(rng, ints)), int_const(pick(rng, -2, 3)));
      default: return atom();
    }
  };
  std::function<Term(int)> constraint = [&](int depth) -> Term {
    const int r = pick(rng, 0, depth > 0 ? 9 : 6);
    switch (r) {
      case 0: return eq(int_var(pick_of(rng, ints)), arith_term());
      case 1: return lt(arith_term(), arith_term());
      case 2: return le(arith_term(), arith_term());
      case 3: return ne(arith_term(), atom());
      case 4: return bool_var(pick_of(rng, bools));
      case 5: return lnot(bool_var(pick_of(rng, bools)));
      case 6: return iff(bool_var(pick_of(rng, bools)), ge(arith_term(), atom()));
      case 7: return lor(constraint(depth - 1), constraint(depth - 1));
      case 8: return land(constraint(depth - 1), constraint(depth - 1));
      default: return implies(bool_var(pick_of(rng, bools)), constraint(depth - 1));
    }
  };
  MaxSatInstance inst{w, {}, {}};
  const int nh = pick(rng, 0, 2);
  for (int i = 0; i < nh; ++i) {
    Clause c;
    c.id = "h" + std::to_string(i + 1);
    c.kind = ClauseKind::assign;
    c.hardness = Hardness::hard;
    c.constraint = constraint(1);
    c.origin = c.id;
    inst.hard.push_back(c);
  }
  const int ns = pick(rng, 2, max_soft);
  for (int i = 0; i < ns; ++i) {
    Clause c;
    c.id = "c" + std::to_string(i + 1);
    c.kind = ClauseKind::assign;
    c.hardness = Hardness::soft;
    c.constraint = constraint(1);
    c.origin = std::to_string(i + 1);
    c.line = i + 1;
    if (chance(rng, 0.5)) c.weight = Weight(pick(rng, 1, 12), pick(rng, 1, 4));
    if (chance(rng, 0.2)) c.path = chance(rng, 0.5) ? bool_var(pick_of(rng, bools)) : lnot(bool_var(pick_of(rng, bools)));
    inst.soft.push_back(c);
  }
  return inst;
}

}  // namespace fbd::testgen
