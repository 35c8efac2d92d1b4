#pragma once

// Reader for the S-expression term syntax produced by to_sexpr(). Variable
// sorts are taken from the position they occur in: operands of arithmetic
// and comparisons are integers, everything else is boolean.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "fbd/error.hpp"
#include "fbd/term.hpp"

namespace fbd {

namespace detail {

class SexprReader {
public:
  explicit SexprReader(std::string_view text) : text_(text) {}

  Term read(Sort expected) {
    auto t = read_term(expected);
    skip_ws();
    return t;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  std::size_t position() const { return pos_; }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::syntax, "s-expression at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string atom() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected atom");
    return std::string(text_.substr(start, pos_ - start));
  }

  static bool is_number(const std::string& s) {
    std::size_t i = (s[0] == '-' && s.size() > 1) ? 1 : 0;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  }

  Term read_term(Sort expected) {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] != '(') {
      auto a = atom();
      if (is_number(a)) {
        if (expected != Sort::integer) fail("integer literal in boolean position: " + a);
        return int_const(std::stoll(a));
      }
      if (a == "true" || a == "false") {
        if (expected != Sort::boolean) fail("boolean literal in integer position: " + a);
        return bool_const(a == "true");
      }
      return expected == Sort::integer ? int_var(a) : bool_var(a);
    }
    ++pos_;
    const auto head = atom();
    auto args_of = [&](Sort s) {
      std::vector<Term> args;
      while (true) {
        skip_ws();
        if (pos_ >= text_.size()) fail("unterminated list");
        if (text_[pos_] == ')') {
          ++pos_;
          return args;
        }
        args.push_back(read_term(s));
      }
    };
    auto need = [&](const std::vector<Term>& args, std::size_t n) {
      if (args.size() != n) fail("'" + head + "' expects " + std::to_string(n) + " operands");
    };
    auto want = [&](Sort s) {
      if (expected != s) fail("'" + head + "' in wrong sort position");
    };
    if (head == "+" || head == "*") {
      want(Sort::integer);
      auto a = args_of(Sort::integer);
      need(a, 2);
      return head == "+" ? add(a[0], a[1]) : mul(a[0], a[1]);
    }
    if (head == "-") {
      want(Sort::integer);
      auto a = args_of(Sort::integer);
      if (a.size() == 1) return neg(a[0]);
      need(a, 2);
      return sub(a[0], a[1]);
    }
    static const std::pair<const char*, Op> cmps[] = {{"=", Op::eq}, {"!=", Op::ne}, {"<", Op::lt},
                                                      {"<=", Op::le}, {">", Op::gt}, {">=", Op::ge}};
    for (const auto& [sym, op] : cmps) {
      if (head == sym) {
        want(Sort::boolean);
        auto a = args_of(Sort::integer);
        need(a, 2);
        return compare(op, a[0], a[1]);
      }
    }
    want(Sort::boolean);
    auto a = args_of(Sort::boolean);
    if (head == "not") {
      need(a, 1);
      return lnot(a[0]);
    }
    if (head == "and") return land(std::move(a));
    if (head == "or") return lor(std::move(a));
    if (head == "iff") {
      need(a, 2);
      return iff(a[0], a[1]);
    }
    if (head == "=>") {
      need(a, 2);
      return implies(a[0], a[1]);
    }
    if (head == "when") {
      need(a, 2);
      return when(a[0], a[1]);
    }
    fail("unknown operator '" + head + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one boolean-sorted S-expression (the whole text must be consumed).
inline Term parse_sexpr(std::string_view text) {
  detail::SexprReader r(text);
  auto t = r.read(Sort::boolean);
  if (!r.at_end()) throw Error(ErrorKind::syntax, "trailing input after s-expression");
  return t;
}

}  // namespace fbd
