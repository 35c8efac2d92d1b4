#pragma once

// Reference interpreter over the MiniImp AST. It defines the language
// semantics; SSA conversion and unrolling are checked against it.

#include <cstdint>
#include <map>
#include <string>

#include "fbd/ast.hpp"
#include "fbd/error.hpp"
#include "fbd/term.hpp"

namespace fbd {

enum class Verdict { passed, violated, truncated, overflow };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::passed: return "passed";
    case Verdict::violated: return "violated";
    case Verdict::truncated: return "truncated";
    case Verdict::overflow: return "overflow";
  }
  return "?";
}

struct RunResult {
  Verdict verdict = Verdict::passed;
  std::map<std::string, std::int64_t> env;  // final values of source variables
  int max_trip_count = 0;                   // most iterations of any single loop entry
  std::size_t steps = 0;
};

inline void check_inputs(const std::vector<Param>& params, const InputVector& input) {
  for (const auto& p : params)
    if (!input.count(p.name)) throw AnalysisError("input is missing a value for parameter '" + p.name + "'");
  for (const auto& [name, v] : input) {
    bool known = false;
    for (const auto& p : params) known = known || p.name == name;
    if (!known) throw AnalysisError("input names unknown parameter '" + name + "'");
  }
}

namespace detail {

class AstInterpreter {
public:
  AstInterpreter(Width w, int loop_cap) : width_(w), loop_cap_(loop_cap) {}

  RunResult run(const Program& p, const InputVector& input) {
    check_inputs(p.params, input);
    for (const auto& [name, v] : input) {
      if (!width_.fits(v)) overflow_ = true;
      result_.env[name] = width_.wrap(v);
    }
    if (!block(p.body)) {
      result_.verdict = Verdict::truncated;
    } else if (overflow_) {
      result_.verdict = Verdict::overflow;
    }
    return result_;
  }

private:
  std::int64_t value(const Term& t) {
    auto r = eval(t, valuation_of(result_.env), width_);
    overflow_ = overflow_ || r.overflow;
    return r.value;
  }

  // Returns false when a loop exceeded the cap.
  bool block(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      ++result_.steps;
      switch (s.kind) {
        case StmtKind::assign: result_.env[s.var] = value(s.expr); break;
        case StmtKind::branch:
          if (!block(value(s.expr) ? s.then_body : s.else_body)) return false;
          break;
        case StmtKind::loop: {
          int trips = 0;
          while (value(s.expr)) {
            if (trips == loop_cap_) return false;
            ++trips;
            if (!block(s.then_body)) return false;
          }
          result_.max_trip_count = std::max(result_.max_trip_count, trips);
          break;
        }
        case StmtKind::check: result_.verdict = value(s.expr) ? Verdict::passed : Verdict::violated; break;
        case StmtKind::truncate:
          if (value(s.expr)) return false;
          break;
      }
    }
    return true;
  }

  Width width_;
  int loop_cap_;
  bool overflow_ = false;
  RunResult result_;
};

}  // namespace detail

/// Runs `p` on `input`. A loop running more than `loop_cap` iterations yields
/// Verdict::truncated; any arithmetic overflow yields Verdict::overflow.
inline RunResult interpret(const Program& p, const InputVector& input, Width w, int loop_cap = 10000) {
  return detail::AstInterpreter(w, loop_cap).run(p, input);
}

}  // namespace fbd
