#pragma once

// Structured SSA form. Each if/else join gets one binary phi per variable
// assigned in either arm, governed by that conditional. Loops are either
// kept (with loop-header phis) or unrolled into nested guarded replicas
// ending in a truncation marker.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fbd/ast.hpp"
#include "fbd/cfg.hpp"
#include "fbd/error.hpp"
#include "fbd/term.hpp"

namespace fbd {

using NodeIndex = std::size_t;
using Block = std::vector<NodeIndex>;

struct SsaAssign {
  std::string lhs;
  Term rhs;
  std::string var;  // source variable
};

struct SsaBranch {
  std::string guard;
  Term pred;
  Block then_block;
  Block else_block;
  Block join_phis;  // evaluated after the arms rejoin
  bool loop = false;
  Block header_phis;  // loop form only
};

/// Binary phi. For a loop-header phi, rhs_true is the back-edge value and
/// rhs_false the value on loop entry.
struct SsaPhi {
  std::string lhs;
  std::string conditional;
  std::string rhs_true;
  std::string rhs_false;
  std::string var;
  bool loop_header = false;
};

struct SsaAssert {
  Term pred;
};

/// Loop condition re-evaluated after the last unrolled replica. Reaching it
/// with the condition still true means the unroll bound was too small.
struct SsaTruncation {
  Term pred;
  Term path_condition;
};

struct SsaNode {
  std::string id;
  int line = 0;
  std::string text;  // source text of the originating statement
  Term path;         // conjunction of enclosing branch outcomes
  std::variant<SsaAssign, SsaBranch, SsaPhi, SsaAssert, SsaTruncation> body;

  template <class T>
  const T* as() const { return std::get_if<T>(&body); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(body); }
};

class SsaProgram {
public:
  std::shared_ptr<const Program> source;
  std::vector<SsaNode> nodes;
  Block body;
  std::vector<std::pair<std::string, std::string>> params;  // (source name, SSA name)
  std::map<std::string, std::string> final_versions;        // definitely-assigned vars at exit
  int unroll_bound = 0;                                     // 0: loops kept
  bool has_loops = false;
  NodeIndex assertion = 0;

  const SsaNode& at(NodeIndex i) const { return nodes.at(i); }

  const SsaNode* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes[it->second];
  }
  const SsaNode& node(const std::string& id) const {
    auto* n = find(id);
    if (!n) throw AnalysisError("no SSA statement '" + id + "'");
    return *n;
  }
  NodeIndex index_of(const std::string& id) const { return index_.at(id); }

  std::string ssa_param(const std::string& name) const {
    for (const auto& [src, ssa] : params)
      if (src == name) return ssa;
    throw AnalysisError("unknown parameter '" + name + "'");
  }

  const SsaAssert& assert_node() const { return *nodes.at(assertion).as<SsaAssert>(); }

  NodeIndex add(SsaNode n) {
    index_[n.id] = nodes.size();
    nodes.push_back(std::move(n));
    return nodes.size() - 1;
  }

private:
  std::map<std::string, NodeIndex> index_;
};

namespace detail {

inline void assigned_vars(const std::vector<Stmt>& body, std::vector<std::string>& out) {
  for_each_stmt(body, [&](const Stmt& s) {
    if (s.kind == StmtKind::assign && std::find(out.begin(), out.end(), s.var) == out.end()) out.push_back(s.var);
  });
}

class SsaBuilder {
public:
  SsaProgram build(std::shared_ptr<const Program> source, int unroll_bound, bool has_loops) {
    out_.source = source;
    out_.unroll_bound = unroll_bound;
    out_.has_loops = has_loops;
    std::map<std::string, std::string> cur;
    for (const auto& p : source->params) {
      cur[p.name] = fresh(p.name);
      out_.params.emplace_back(p.name, cur[p.name]);
    }
    out_.body = block(source->body, cur);
    out_.final_versions = cur;
    return std::move(out_);
  }

private:
  std::string fresh(const std::string& var) { return var + "_" + std::to_string(++version_[var]); }

  static Term renamed(const Term& t, const std::map<std::string, std::string>& cur, int line) {
    return rename(t, [&](const std::string& name) {
      auto it = cur.find(name);
      if (it == cur.end())
        throw SemanticError("line " + std::to_string(line) + ": variable '" + name + "' used before definition");
      return it->second;
    });
  }

  NodeIndex phi(const std::string& var, const std::string& cond, const std::string& t, const std::string& f,
                int line, bool header, const std::map<std::string, std::string>& cur) {
    SsaNode n;
    n.id = "phi" + std::to_string(++phis_);
    n.line = line;
    SsaPhi p{cur.at(var), cond, t, f, var, header};
    n.text = p.lhs + " = phi(" + t + ", " + f + ")";
    n.body = std::move(p);
    return out_.add(std::move(n));
  }

  Block block(const std::vector<Stmt>& body, std::map<std::string, std::string>& cur) {
    Block out;
    for (const auto& s : body) out.push_back(statement(s, cur));
    return out;
  }

  NodeIndex statement(const Stmt& s, std::map<std::string, std::string>& cur) {
    SsaNode n;
    n.id = s.id();
    n.line = s.label;
    n.text = statement_text(s);
    n.path = land(path_);
    switch (s.kind) {
      case StmtKind::assign: {
        auto rhs = renamed(s.expr, cur, s.label);
        cur[s.var] = fresh(s.var);
        n.body = SsaAssign{cur[s.var], rhs, s.var};
        return out_.add(std::move(n));
      }
      case StmtKind::check: {
        n.body = SsaAssert{renamed(s.expr, cur, s.label)};
        out_.assertion = out_.add(std::move(n));
        return out_.assertion;
      }
      case StmtKind::truncate: {
        n.body = SsaTruncation{renamed(s.expr, cur, s.label), land(path_)};
        return out_.add(std::move(n));
      }
      case StmtKind::branch: return branch(s, std::move(n), cur);
      case StmtKind::loop: return loop(s, std::move(n), cur);
    }
    throw std::logic_error("ssa: unknown statement kind");
  }

  NodeIndex branch(const Stmt& s, SsaNode n, std::map<std::string, std::string>& cur) {
    SsaBranch b;
    b.guard = "guard_" + std::to_string(++guards_);
    b.pred = renamed(s.expr, cur, s.label);
    const auto id = n.id;
    const auto guard = b.guard;
    n.body = std::move(b);
    const auto idx = out_.add(std::move(n));

    auto cur_t = cur;
    auto cur_f = cur;
    path_.push_back(bool_var(guard));
    auto then_block = block(s.then_body, cur_t);
    path_.back() = lnot(bool_var(guard));
    auto else_block = block(s.else_body, cur_f);
    path_.pop_back();

    std::vector<std::string> vars;
    assigned_vars(s.then_body, vars);
    assigned_vars(s.else_body, vars);
    Block phis;
    for (const auto& v : vars) {
      const bool in_t = cur_t.count(v) > 0;
      const bool in_f = cur_f.count(v) > 0;
      if (in_t && in_f) {
        if (cur_t[v] == cur_f[v]) continue;
        cur[v] = fresh(v);
        phis.push_back(phi(v, id, cur_t[v], cur_f[v], s.label, false, cur));
      } else {
        cur.erase(v);  // not assigned on every path through the join
      }
    }
    auto& node = std::get<SsaBranch>(out_.nodes[idx].body);
    node.then_block = std::move(then_block);
    node.else_block = std::move(else_block);
    node.join_phis = std::move(phis);
    return idx;
  }

  NodeIndex loop(const Stmt& s, SsaNode n, std::map<std::string, std::string>& cur) {
    SsaBranch b;
    b.loop = true;
    b.guard = "guard_" + std::to_string(++guards_);
    const auto id = n.id;
    n.body = std::move(b);
    const auto idx = out_.add(std::move(n));

    std::vector<std::string> vars;
    assigned_vars(s.then_body, vars);
    Block headers;
    std::vector<std::pair<std::string, NodeIndex>> carried;
    for (const auto& v : vars) {
      if (!cur.count(v)) continue;
      const auto entry = cur[v];
      cur[v] = fresh(v);
      auto h = phi(v, id, "", entry, s.label, true, cur);
      headers.push_back(h);
      carried.emplace_back(v, h);
    }
    auto pred = renamed(s.expr, cur, s.label);
    auto cur_b = cur;
    path_.push_back(bool_var(std::get<SsaBranch>(out_.nodes[idx].body).guard));
    auto body = block(s.then_body, cur_b);
    path_.pop_back();
    for (const auto& [v, h] : carried) {
      auto& p = std::get<SsaPhi>(out_.nodes[h].body);
      p.rhs_true = cur_b.at(v);
      out_.nodes[h].text = p.lhs + " = phi(" + p.rhs_true + ", " + p.rhs_false + ")";
    }
    auto& node = std::get<SsaBranch>(out_.nodes[idx].body);
    node.pred = pred;
    node.then_block = std::move(body);
    node.header_phis = std::move(headers);
    return idx;
  }

  SsaProgram out_;
  std::map<std::string, int> version_;
  int guards_ = 0;
  int phis_ = 0;
  std::vector<Term> path_;
};

inline std::string join_occurrence(const std::string& prefix, int j) {
  return prefix.empty() ? std::to_string(j) : prefix + "." + std::to_string(j);
}

inline std::vector<Stmt> unroll_block(const std::vector<Stmt>& body, int bound, const std::string& prefix) {
  std::vector<Stmt> out;
  for (const auto& s : body) {
    if (s.kind != StmtKind::loop) {
      Stmt c = s;
      c.occurrence = prefix;
      c.then_body = unroll_block(s.then_body, bound, prefix);
      c.else_body = unroll_block(s.else_body, bound, prefix);
      out.push_back(std::move(c));
      continue;
    }
    Stmt inner;
    inner.kind = StmtKind::truncate;
    inner.label = s.label;
    inner.occurrence = join_occurrence(prefix, bound + 1);
    inner.expr = s.expr;
    for (int j = bound; j >= 1; --j) {
      Stmt rep;
      rep.kind = StmtKind::branch;
      rep.label = s.label;
      rep.occurrence = join_occurrence(prefix, j);
      rep.expr = s.expr;
      rep.then_body = unroll_block(s.then_body, bound, rep.occurrence);
      rep.then_body.push_back(std::move(inner));
      inner = std::move(rep);
    }
    out.push_back(std::move(inner));
  }
  return out;
}

inline bool has_loop(const std::vector<Stmt>& body) {
  bool any = false;
  for_each_stmt(body, [&](const Stmt& s) { any = any || s.kind == StmtKind::loop; });
  return any;
}

}  // namespace detail

/// SSA form of the CFG's program; loops keep their back edges (header phis).
inline SsaProgram to_ssa(const Cfg& cfg) {
  const auto& p = cfg.program();
  return detail::SsaBuilder{}.build(cfg.program_ptr(), 0, detail::has_loop(p.body));
}

/// Loop-free SSA where every loop is replicated `bound` times.
inline SsaProgram unroll_loops(const SsaProgram& ssa, int bound) {
  if (bound < 1) throw Error(ErrorKind::usage, "unroll bound must be >= 1");
  if (!ssa.has_loops) {
    SsaProgram copy = ssa;
    copy.unroll_bound = bound;
    return copy;
  }
  auto unrolled = std::make_shared<Program>(*ssa.source);
  unrolled->body = detail::unroll_block(ssa.source->body, bound, "");
  auto out = detail::SsaBuilder{}.build(unrolled, bound, false);
  out.source = ssa.source;
  return out;
}

/// Convenience: parse-level program to unrolled SSA.
inline SsaProgram build_ssa(const Program& p, int bound) { return unroll_loops(to_ssa(build_cfg(p)), bound); }

/// Number of complete paths through a loop-free SSA program (saturating).
inline std::uint64_t count_paths(const SsaProgram& ssa) {
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max() / 4;
  std::function<std::uint64_t(const Block&)> paths = [&](const Block& b) -> std::uint64_t {
    std::uint64_t n = 1;
    for (auto i : b) {
      if (auto* br = ssa.at(i).as<SsaBranch>()) {
        auto k = paths(br->then_block) + paths(br->else_block);
        n = (k != 0 && n > cap / k) ? cap : n * k;
      }
    }
    return n;
  };
  return paths(ssa.body);
}

/// Number of definitions (parameters, assignments and phis) of each SSA variable.
inline std::map<std::string, int> definition_counts(const SsaProgram& ssa) {
  std::map<std::string, int> out;
  for (const auto& [src, v] : ssa.params) ++out[v];
  for (const auto& n : ssa.nodes) {
    if (auto* a = n.as<SsaAssign>()) ++out[a->lhs];
    if (auto* p = n.as<SsaPhi>()) ++out[p->lhs];
  }
  return out;
}

/// Textual dump laid out like the SSA listing of a procedure.
inline std::string dump_ssa(const SsaProgram& ssa) {
  std::ostringstream os;
  os << "int " << ssa.source->name << "(";
  for (std::size_t i = 0; i < ssa.params.size(); ++i) os << (i ? ", int " : "int ") << ssa.params[i].second;
  os << ") {\n";
  auto label = [](const std::string& id) {
    std::string l = id + ".";
    return std::string(l.size() < 8 ? 8 - l.size() : 0, ' ') + l + "  ";
  };
  std::function<void(const Block&, int)> walk = [&](const Block& b, int depth) {
    const std::string ind(static_cast<std::size_t>(depth) * 2, ' ');
    for (auto i : b) {
      const auto& n = ssa.at(i);
      if (auto* a = n.as<SsaAssign>()) {
        os << label(n.id) << ind << a->lhs << " = " << to_infix(a->rhs, Syntax::program) << ";\n";
      } else if (auto* p = n.as<SsaPhi>()) {
        os << label(n.id) << ind << p->lhs << " = phi(" << p->rhs_true << ", " << p->rhs_false << ");"
           << (p->loop_header ? "  // loop header" : "") << "\n";
      } else if (auto* br = n.as<SsaBranch>()) {
        for (auto h : br->header_phis) walk(Block{h}, depth);
        os << label(n.id) << ind << (br->loop ? "while (" : "if (") << to_infix(br->pred, Syntax::program)
           << ")  // " << br->guard << "\n";
        walk(br->then_block, depth + 1);
        if (!br->else_block.empty()) {
          os << std::string(10, ' ') << ind << "else\n";
          walk(br->else_block, depth + 1);
        }
        walk(br->join_phis, depth);
      } else if (auto* c = n.as<SsaAssert>()) {
        os << label(n.id) << ind << "assert(" << to_infix(c->pred, Syntax::program) << ");\n";
      } else if (auto* t = n.as<SsaTruncation>()) {
        os << label(n.id) << ind << "assume(!(" << to_infix(t->pred, Syntax::program) << "));  // unroll bound\n";
      }
    }
  };
  walk(ssa.body, 0);
  os << "}\n";
  return os.str();
}

}  // namespace fbd
