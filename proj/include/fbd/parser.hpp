#pragma once

// Lexer, recursive-descent parser and static checks for MiniImp.
// Grammar: docs/lang.md.

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fbd/ast.hpp"
#include "fbd/error.hpp"
#include "fbd/term.hpp"

namespace fbd {

namespace detail {

enum class Tok { ident, number, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int line = 1;
  int column = 1;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      const int l = line, cl = col;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) throw SyntaxError(l, cl, "unterminated comment");
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::number;
      t.text = std::string(src.substr(i, j - i));
      if (t.text.size() > 12) throw SyntaxError(line, col, "integer literal too large: " + t.text);
      advance(j - i);
    } else {
      static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
      t.kind = Tok::punct;
      for (const char* op : two) {
        if (src.substr(i, 2) == op) t.text = op;
      }
      if (t.text.empty()) {
        if (std::string_view("(){};,=<>+-*!").find(c) == std::string_view::npos)
          throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    const auto& type = expect_ident("expected 'int' before procedure name");
    if (type.text != "int") throw SemanticError(type.text + " procedure: only 'int' procedures are supported");
    header_line_ = type.line;
    p.name = expect_ident("expected procedure name").text;
    expect("(");
    if (!peek_is(")")) {
      do {
        const auto& ty = expect_ident("expected parameter type");
        const auto& nm = expect_ident("expected parameter name");
        if (ty.text != "int")
          throw SemanticError("line " + std::to_string(label_of(ty)) + ": parameter '" + nm.text +
                              "' has non-integer type '" + ty.text + "'");
        check_name(nm);
        p.params.push_back(Param{nm.text, label_of(nm)});
      } while (accept(","));
    }
    expect(")");
    expect("{");
    while (!peek_is("}")) {
      if (peek().kind == Tok::end) fail(peek(), "expected '}' at end of procedure");
      p.body.push_back(statement());
    }
    expect("}");
    if (peek().kind != Tok::end) fail(peek(), "unexpected input after procedure");
    return p;
  }

  Term predicate_only() {
    auto t = expr();
    if (peek().kind != Tok::end) fail(peek(), "unexpected input after predicate");
    return t;
  }

private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool peek_is(std::string_view s) const { return peek().kind == Tok::punct && peek().text == s; }
  bool peek_kw(std::string_view s) const { return peek().kind == Tok::ident && peek().text == s; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw SyntaxError(t.line, t.column, msg + (t.kind == Tok::end ? " (at end of input)" : ", found '" + t.text + "'"));
  }

  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool accept(std::string_view s) {
    if (peek_is(s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail(peek(), "expected '" + std::string(s) + "'");
  }
  const Token& expect_ident(const std::string& msg) {
    if (peek().kind != Tok::ident) fail(peek(), msg);
    return next();
  }

  int label_of(const Token& t) const { return t.line - header_line_; }

  static bool reserved(const std::string& s) {
    static const std::set<std::string> kw = {"if", "else", "while", "assert", "int", "true", "false",
                                             "and", "or", "not", "guard"};
    return kw.count(s) > 0;
  }
  static void check_name(const Token& t) {
    if (reserved(t.text)) throw SyntaxError(t.line, t.column, "'" + t.text + "' is reserved");
    if (t.text.find('_') != std::string::npos)
      throw SyntaxError(t.line, t.column, "identifiers may not contain '_' (reserved for SSA names): " + t.text);
  }

  std::vector<Stmt> block() {
    std::vector<Stmt> out;
    if (accept("{")) {
      while (!accept("}")) {
        if (peek().kind == Tok::end) fail(peek(), "expected '}'");
        out.push_back(statement());
      }
      return out;
    }
    out.push_back(statement());
    return out;
  }

  Stmt statement() {
    const Token& first = peek();
    Stmt s;
    s.label = label_of(first);
    if (s.label < 1) fail(first, "statement must start on a line after the procedure header");
    if (peek_kw("if")) {
      next();
      s.kind = StmtKind::branch;
      expect("(");
      s.expr = expr();
      expect(")");
      s.then_body = block();
      if (peek_kw("else")) {
        next();
        s.has_else = true;
        s.else_body = block();
      }
      return s;
    }
    if (peek_kw("while")) {
      next();
      s.kind = StmtKind::loop;
      expect("(");
      s.expr = expr();
      expect(")");
      s.then_body = block();
      return s;
    }
    if (peek_kw("assert")) {
      next();
      s.kind = StmtKind::check;
      expect("(");
      s.expr = expr();
      expect(")");
      expect(";");
      return s;
    }
    if (peek_kw("int") && peek(1).kind == Tok::ident) next();  // optional declaration keyword
    const auto& name = expect_ident("expected statement");
    check_name(name);
    s.kind = StmtKind::assign;
    s.var = name.text;
    expect("=");
    s.expr = expr();
    expect(";");
    return s;
  }

  // Precedence climbing: or < and < not < comparison < additive < multiplicative < unary.
  Term expr() { return disjunction(); }

  Term disjunction() {
    auto lhs = conjunction();
    while (accept("||") || accept_kw("or")) lhs = lor(need_bool(lhs), need_bool(conjunction()));
    return lhs;
  }
  Term conjunction() {
    auto lhs = negation();
    while (accept("&&") || accept_kw("and")) lhs = land(need_bool(lhs), need_bool(negation()));
    return lhs;
  }
  Term negation() {
    if (accept("!") || accept_kw("not")) return lnot(need_bool(negation()));
    return comparison();
  }
  Term comparison() {
    auto lhs = additive();
    static const std::pair<const char*, Op> ops[] = {{"==", Op::eq}, {"!=", Op::ne}, {"<=", Op::le},
                                                     {">=", Op::ge}, {"<", Op::lt},  {">", Op::gt}};
    for (const auto& [sym, op] : ops) {
      if (accept(sym)) {
        auto rhs = additive();
        return compare(op, need_int(lhs), need_int(rhs));
      }
    }
    return lhs;
  }
  Term additive() {
    auto lhs = multiplicative();
    while (true) {
      if (accept("+")) lhs = add(need_int(lhs), need_int(multiplicative()));
      else if (accept("-")) lhs = sub(need_int(lhs), need_int(multiplicative()));
      else return lhs;
    }
  }
  Term multiplicative() {
    auto lhs = unary();
    while (accept("*")) lhs = mul(need_int(lhs), need_int(unary()));
    return lhs;
  }
  Term unary() {
    if (accept("-")) {
      auto a = unary();
      if (a->op() == Op::int_const) return int_const(-a->value());
      return neg(need_int(a));
    }
    return primary();
  }
  Term primary() {
    const Token& t = peek();
    if (accept("(")) {
      auto e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::number) {
      next();
      return int_const(std::stoll(t.text));
    }
    if (t.kind == Tok::ident) {
      if (t.text == "true" || t.text == "false") {
        next();
        return bool_const(t.text == "true");
      }
      check_name(t);
      next();
      return int_var(t.text);
    }
    fail(t, "expected expression");
  }

  bool accept_kw(std::string_view s) {
    if (peek_kw(s)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Term need_bool(const Term& t) const {
    if (t->sort() != Sort::boolean) fail(toks_[pos_ > 0 ? pos_ - 1 : 0], "expected a predicate");
    return t;
  }
  Term need_int(const Term& t) const {
    if (t->sort() != Sort::integer) fail(toks_[pos_ > 0 ? pos_ - 1 : 0], "expected an integer expression");
    return t;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int header_line_ = 1;
};

/// Definite-assignment analysis; throws on a use of a variable that is not
/// assigned on every path reaching it.
class DefinednessChecker {
public:
  void run(const Program& p) {
    std::set<std::string> defined;
    for (const auto& prm : p.params) {
      if (!defined.insert(prm.name).second) throw SemanticError("duplicate parameter '" + prm.name + "'");
    }
    block(p.body, defined);
  }

private:
  static void uses(const Term& t, const std::set<std::string>& defined, const Stmt& s) {
    std::map<std::string, Sort> vars;
    collect_vars(t, vars);
    for (const auto& [v, sort] : vars) {
      if (!defined.count(v))
        throw SemanticError("line " + std::to_string(s.label) + ": variable '" + v + "' used before definition");
    }
  }

  void block(const std::vector<Stmt>& body, std::set<std::string>& defined) {
    for (const auto& s : body) {
      switch (s.kind) {
        case StmtKind::assign:
          uses(s.expr, defined, s);
          defined.insert(s.var);
          break;
        case StmtKind::branch: {
          uses(s.expr, defined, s);
          auto t = defined;
          auto f = defined;
          block(s.then_body, t);
          block(s.else_body, f);
          for (const auto& v : t)
            if (f.count(v)) defined.insert(v);
          break;
        }
        case StmtKind::loop: {
          uses(s.expr, defined, s);
          auto inner = defined;
          block(s.then_body, inner);
          break;
        }
        case StmtKind::check:
        case StmtKind::truncate:
          uses(s.expr, defined, s);
          break;
      }
    }
  }
};

inline void check_program(const Program& p) {
  std::set<int> labels;
  int asserts = 0;
  for_each_stmt(p.body, [&](const Stmt& s) {
    if (!labels.insert(s.label).second)
      throw SemanticError("line " + std::to_string(s.label) + ": more than one statement on this line");
    if (s.kind == StmtKind::check) ++asserts;
    if (s.kind == StmtKind::assign && s.expr->sort() != Sort::integer)
      throw SemanticError("line " + std::to_string(s.label) + ": non-integer type assigned to '" + s.var + "'");
    if (s.kind != StmtKind::assign && s.expr->sort() != Sort::boolean)
      throw SemanticError("line " + std::to_string(s.label) + ": condition is not a predicate");
  });
  if (asserts == 0) throw SemanticError("missing assert: the program needs exactly one assert statement");
  if (asserts > 1) throw SemanticError("more than one assert statement");
  if (!p.has_assert()) throw SemanticError("the assert must be the last top-level statement");
  DefinednessChecker{}.run(p);
}

}  // namespace detail

/// Parses and validates a MiniImp program.
inline Program parse(std::string_view source) {
  detail::Parser parser(detail::lex(source));
  auto p = parser.program();
  detail::check_program(p);
  return p;
}

/// Parses a program whose assert may be missing (the test harness supplies
/// one per test). All other checks apply.
inline Program parse_without_assert(std::string_view source) {
  detail::Parser parser(detail::lex(source));
  auto p = parser.program();
  bool any_assert = false;
  for_each_stmt(p.body, [&](const Stmt& s) { any_assert = any_assert || s.kind == StmtKind::check; });
  if (any_assert) {
    detail::check_program(p);
    return p;
  }
  // Validate with a placeholder assert appended after the last line.
  Stmt placeholder;
  placeholder.kind = StmtKind::check;
  placeholder.expr = bool_const(true);
  int last = 0;
  for (const auto& prm : p.params) last = std::max(last, prm.label);
  for_each_stmt(p.body, [&](const Stmt& s) { last = std::max(last, s.label); });
  placeholder.label = last + 1;
  Program probe = p;
  probe.body.push_back(placeholder);
  detail::check_program(probe);
  return p;
}

/// Parses a standalone predicate over program variables, e.g. "b <= a".
inline Term parse_predicate(std::string_view text) {
  detail::Parser parser(detail::lex(text));
  auto t = parser.predicate_only();
  if (t->sort() != Sort::boolean) throw SemanticError("assertion '" + std::string(text) + "' is not a predicate");
  return t;
}

/// Returns `p` with its assert replaced by (or extended with) `assertion`.
/// The assert keeps its label; a new one is placed after the last line.
inline Program with_assertion(Program p, Term assertion) {
  Stmt a;
  a.kind = StmtKind::check;
  a.expr = std::move(assertion);
  if (p.has_assert()) {
    a.label = p.body.back().label;
    p.body.back() = a;
  } else {
    int last = 0;
    for (const auto& prm : p.params) last = std::max(last, prm.label);
    for_each_stmt(p.body, [&](const Stmt& s) { last = std::max(last, s.label); });
    a.label = last + 1;
    p.body.push_back(a);
  }
  detail::check_program(p);
  return p;
}

}  // namespace fbd
