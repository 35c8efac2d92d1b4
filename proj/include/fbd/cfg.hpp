#pragma once

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fbd/ast.hpp"

namespace fbd {

/// One outgoing edge of a conditional: (conditional statement id, polarity).
struct Branch {
  std::string conditional;
  bool polarity = true;

  Branch sibling() const { return Branch{conditional, !polarity}; }
  std::string str() const { return "(" + conditional + (polarity ? ",T)" : ",F)"); }
  auto operator<=>(const Branch&) const = default;
};

enum class EdgeKind { flow, true_branch, false_branch, back };

struct CfgEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::flow;
};

/// Control-flow graph over statement ids plus "entry" and "exit".
class Cfg {
public:
  static constexpr const char* entry_id = "entry";
  static constexpr const char* exit_id = "exit";

  explicit Cfg(std::shared_ptr<const Program> program) : program_(std::move(program)) {
    nodes_ = {entry_id, exit_id};
    for_each_stmt(program_->body, [&](const Stmt& s) {
      nodes_.push_back(s.id());
      if (s.kind == StmtKind::branch || s.kind == StmtKind::loop) conditionals_.push_back(s.id());
    });
    const auto first = build(program_->body, exit_id, "");
    edges_.push_back(CfgEdge{entry_id, first, EdgeKind::flow});
  }

  const Program& program() const { return *program_; }
  std::shared_ptr<const Program> program_ptr() const { return program_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<CfgEdge>& edges() const { return edges_; }

  std::vector<CfgEdge> out_edges(const std::string& node) const {
    std::vector<CfgEdge> out;
    for (const auto& e : edges_)
      if (e.from == node) out.push_back(e);
    return out;
  }

  /// Branches in program order, true edge first.
  std::vector<Branch> branches() const {
    std::vector<Branch> out;
    for (const auto& c : conditionals_) {
      out.push_back(Branch{c, true});
      out.push_back(Branch{c, false});
    }
    return out;
  }

  /// Node the branch leads to (a statement id or "exit").
  std::string branch_target(const Branch& b) const {
    const auto kind = b.polarity ? EdgeKind::true_branch : EdgeKind::false_branch;
    for (const auto& e : edges_)
      if (e.from == b.conditional && e.kind == kind) return e.to;
    throw std::out_of_range("no branch " + b.str());
  }

  bool exit_reachable_from_all() const {
    std::set<std::string> seen{exit_id};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& e : edges_)
        if (seen.count(e.to) && seen.insert(e.from).second) grew = true;
    }
    return seen.size() == nodes_.size();
  }

private:
  // Adds edges for `body` flowing into `succ`; returns the block's entry node.
  std::string build(const std::vector<Stmt>& body, const std::string& succ, const std::string& back_target) {
    std::string next = succ;
    for (auto it = body.rbegin(); it != body.rend(); ++it) {
      const auto& s = *it;
      const auto id = s.id();
      auto flow_kind = [&](const std::string& to) { return to == back_target ? EdgeKind::back : EdgeKind::flow; };
      switch (s.kind) {
        case StmtKind::assign:
        case StmtKind::check:
        case StmtKind::truncate:
          edges_.push_back(CfgEdge{id, next, flow_kind(next)});
          break;
        case StmtKind::branch: {
          const auto t = build(s.then_body, next, back_target);
          const auto f = build(s.else_body, next, back_target);
          edges_.push_back(CfgEdge{id, t, EdgeKind::true_branch});
          edges_.push_back(CfgEdge{id, f, EdgeKind::false_branch});
          break;
        }
        case StmtKind::loop: {
          const auto body_entry = build(s.then_body, id, id);
          edges_.push_back(CfgEdge{id, body_entry, EdgeKind::true_branch});
          edges_.push_back(CfgEdge{id, next, EdgeKind::false_branch});
          break;
        }
      }
      next = id;
    }
    return next;
  }

  std::shared_ptr<const Program> program_;
  std::vector<std::string> nodes_;
  std::vector<std::string> conditionals_;
  std::vector<CfgEdge> edges_;
};

inline Cfg build_cfg(const Program& p) { return Cfg(std::make_shared<const Program>(p)); }

}  // namespace fbd
