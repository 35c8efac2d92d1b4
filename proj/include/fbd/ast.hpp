#pragma once

// MiniImp abstract syntax. Statements are labelled with their line number
// relative to the procedure header (header line = 0).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fbd/term.hpp"

namespace fbd {

enum class StmtKind {
  assign,
  branch,    // if / else
  loop,      // while
  check,     // assert
  truncate,  // loop-exit marker produced by unrolling, never parsed
};

struct Stmt {
  StmtKind kind = StmtKind::assign;
  int label = 0;
  /// Replica path for statements copied by loop unrolling ("2", "1.3");
  /// empty for statements written in the source.
  std::string occurrence;
  std::string var;  // assign: target variable
  Term expr;        // assign: right-hand side; others: predicate
  std::vector<Stmt> then_body;  // branch: true arm; loop: body
  std::vector<Stmt> else_body;  // branch: false arm
  bool has_else = false;

  /// Unique statement id: the label, plus "@occurrence" for replicas.
  std::string id() const { return occurrence.empty() ? std::to_string(label) : std::to_string(label) + "@" + occurrence; }
};

struct Param {
  std::string name;
  int label = 0;
};

struct Program {
  std::string name;
  std::vector<Param> params;
  std::vector<Stmt> body;

  bool has_assert() const { return !body.empty() && body.back().kind == StmtKind::check; }
  const Stmt& assertion() const { return body.back(); }

  std::vector<std::string> param_names() const {
    std::vector<std::string> out;
    for (const auto& p : params) out.push_back(p.name);
    return out;
  }
};

/// Integer input assignment for the parameters.
using InputVector = std::map<std::string, std::int64_t>;

/// Calls `fn` on every statement (pre-order).
template <class Fn>
void for_each_stmt(const std::vector<Stmt>& block, Fn&& fn) {
  for (const auto& s : block) {
    fn(s);
    for_each_stmt(s.then_body, fn);
    for_each_stmt(s.else_body, fn);
  }
}

/// Source text of a statement's head, as shown in reports.
inline std::string statement_text(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::assign: return s.var + " = " + to_infix(s.expr, Syntax::program) + ";";
    case StmtKind::branch: return "if (" + to_infix(s.expr, Syntax::program) + ")";
    case StmtKind::loop: return "while (" + to_infix(s.expr, Syntax::program) + ")";
    case StmtKind::check: return "assert(" + to_infix(s.expr, Syntax::program) + ");";
    case StmtKind::truncate: return "while (" + to_infix(s.expr, Syntax::program) + ") /* unroll bound */";
  }
  return {};
}

/// Structural equality of statement lists (labels included).
inline bool same_body(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.kind != y.kind || x.label != y.label || x.occurrence != y.occurrence || x.var != y.var ||
        x.has_else != y.has_else || !same(x.expr, y.expr))
      return false;
    if (!same_body(x.then_body, y.then_body) || !same_body(x.else_body, y.else_body)) return false;
  }
  return true;
}

inline bool same_program(const Program& a, const Program& b) {
  if (a.name != b.name || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].name != b.params[i].name) return false;
  return same_body(a.body, b.body);
}

}  // namespace fbd
