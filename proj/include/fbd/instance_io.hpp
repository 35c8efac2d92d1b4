#pragma once

// Text form of MAX-SAT instances: a width line, one clause per line in the
// formula dump format, then an optional [weights] section.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fbd/encoder.hpp"
#include "fbd/error.hpp"
#include "fbd/sexpr.hpp"
#include "fbd/solver.hpp"

namespace fbd {

inline void write_instance(std::ostream& os, const MaxSatInstance& inst) {
  os << "width " << inst.width.bits << '\n';
  auto unweighted = [](Clause c) {
    c.weight.reset();
    return c;
  };
  for (const auto& c : inst.hard) os << clause_line(unweighted(c)) << '\n';
  for (const auto& c : inst.soft) os << clause_line(unweighted(c)) << '\n';
  bool any = false;
  for (const auto& c : inst.soft) any = any || c.weight.has_value();
  if (!any) return;
  os << "[weights]\n";
  for (const auto& c : inst.soft)
    if (c.weight) os << c.id << ' ' << weight_str(*c.weight) << '\n';
}

inline std::string dump_instance(const MaxSatInstance& inst) {
  std::ostringstream os;
  write_instance(os, inst);
  return os.str();
}

inline Weight parse_weight(const std::string& s) {
  try {
    const auto slash = s.find('/');
    std::size_t used = 0;
    const auto n = std::stoll(s.substr(0, slash), &used);
    if (used != s.substr(0, slash).size()) throw std::invalid_argument(s);
    std::int64_t d = 1;
    if (slash != std::string::npos) {
      d = std::stoll(s.substr(slash + 1), &used);
      if (used != s.size() - slash - 1) throw std::invalid_argument(s);
    }
    if (d <= 0 || n <= 0) throw std::invalid_argument(s);
    return Weight(n, d);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::syntax, "bad weight '" + s + "'");
  }
}

inline MaxSatInstance read_instance(std::istream& is) {
  MaxSatInstance inst;
  std::string line;
  int lineno = 0;
  bool weights = false;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::syntax, "instance line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "width") {
      int w = 0;
      if (!(ls >> w)) fail("expected 'width <bits>'");
      inst.width = Width::of(w);
      continue;
    }
    if (head == "[weights]") {
      weights = true;
      continue;
    }
    if (weights) {
      std::string w;
      if (!(ls >> w)) fail("expected '<clause id> <weight>'");
      bool found = false;
      for (auto& c : inst.soft) {
        if (c.id == head) {
          c.weight = parse_weight(w);
          found = true;
        }
      }
      if (!found) fail("no soft clause '" + head + "'");
      continue;
    }
    Clause c;
    c.id = head;
    std::string hardness, weight, kind;
    if (!(ls >> hardness >> weight >> kind >> c.origin >> c.line)) fail("expected '<id> <hard|soft> <weight> <kind> <origin> <line> <constraint>'");
    if (hardness != "hard" && hardness != "soft") fail("hardness must be hard or soft");
    c.hardness = hardness == "hard" ? Hardness::hard : Hardness::soft;
    c.kind = clause_kind_from(kind);
    if (weight != "-") c.weight = parse_weight(weight);
    std::string rest;
    std::getline(ls, rest);
    const auto comment = rest.find(';');
    std::string path;
    if (comment != std::string::npos) {
      c.concretized = rest.find("concretized", comment) != std::string::npos;
      if (const auto w = rest.find("when ", comment); w != std::string::npos) path = rest.substr(w + 5);
      rest = rest.substr(0, comment);
    }
    try {
      c.constraint = parse_sexpr(rest);
      if (!path.empty()) c.path = parse_sexpr(path);
    } catch (const Error& e) {
      fail(e.what());
    }
    (c.soft() ? inst.soft : inst.hard).push_back(std::move(c));
  }
  return inst;
}

inline MaxSatInstance parse_instance(const std::string& text) {
  std::istringstream is(text);
  return read_instance(is);
}

}  // namespace fbd
