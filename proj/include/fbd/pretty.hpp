#pragma once

// Pretty-printer for MiniImp. Each statement is emitted on the line matching
// its label, so parse(pretty(p)) reproduces the labels of p.

#include <sstream>
#include <string>

#include "fbd/ast.hpp"
#include "fbd/error.hpp"

namespace fbd {

namespace detail {

class LineWriter {
public:
  void at(int line, int depth, const std::string& text) {
    if (!pending_.empty()) {
      if (line > line_ + 1) {
        newline();
        os_ << indent(pending_depth_) << pending_;
        has_text_ = true;
      } else {
        os_ << ' ' << pending_;
      }
      pending_.clear();
    }
    while (line_ < line) newline();
    if (has_text_) os_ << ' ';
    else os_ << indent(depth);
    os_ << text;
    has_text_ = true;
  }

  void close(int depth, const std::string& text) {
    if (pending_.empty()) pending_depth_ = depth;
    else pending_ += ' ';
    pending_ += text;
  }

  std::string finish() {
    if (!pending_.empty()) {
      newline();
      os_ << indent(pending_depth_) << pending_;
      pending_.clear();
    }
    os_ << '\n';
    return os_.str();
  }

private:
  static std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }
  void newline() {
    os_ << '\n';
    ++line_;
    has_text_ = false;
  }

  std::ostringstream os_;
  int line_ = 0;
  bool has_text_ = false;
  std::string pending_;
  int pending_depth_ = 0;
};

inline void print_block(LineWriter& w, const std::vector<Stmt>& body, int depth) {
  for (const auto& s : body) {
    const auto pred = s.expr ? to_infix(s.expr, Syntax::program) : std::string{};
    switch (s.kind) {
      case StmtKind::assign: w.at(s.label, depth, s.var + " = " + pred + ";"); break;
      case StmtKind::check: w.at(s.label, depth, "assert(" + pred + ");"); break;
      case StmtKind::branch:
        w.at(s.label, depth, "if (" + pred + ") {");
        print_block(w, s.then_body, depth + 1);
        if (s.has_else) {
          w.close(depth, "} else {");
          print_block(w, s.else_body, depth + 1);
        }
        w.close(depth, "}");
        break;
      case StmtKind::loop:
        w.at(s.label, depth, "while (" + pred + ") {");
        print_block(w, s.then_body, depth + 1);
        w.close(depth, "}");
        break;
      case StmtKind::truncate:
        throw std::logic_error("pretty: unrolled programs have no source form");
    }
  }
}

}  // namespace detail

inline std::string pretty(const Program& p) {
  detail::LineWriter w;
  std::string header = "int " + p.name + "(";
  for (std::size_t i = 0; i < p.params.size(); ++i) header += (i ? ", int " : "int ") + p.params[i].name;
  header += ") {";
  w.at(0, 0, header);
  detail::print_block(w, p.body, 1);
  w.close(0, "}");
  return w.finish();
}

}  // namespace fbd
