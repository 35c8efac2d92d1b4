// fbdebug: formula-based fault localization for MiniImp programs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbd/compare.hpp"
#include "fbd/driver.hpp"
#include "fbd/instance_io.hpp"
#include "fbd/oracle.hpp"
#include "fbd/parser.hpp"
#include "fbd/report.hpp"
#include "fbd/suite.hpp"

namespace fs = std::filesystem;
using namespace fbd;

namespace {

struct Settings {
  int width = 32;
  int unroll = 8;
  int max_comss_size = 5;
  int max_iters = 64;
  double timeout = 0.0;
  std::size_t blow_up_cap = default_blow_up_cap;
  std::string report = "text";
  std::string concretize = "none";
  bool no_timing = false;
  std::string out;

  Options options() const {
    Options o;
    o.width = Width::of(width);
    o.unroll = unroll;
    o.max_comss_size = max_comss_size;
    o.max_iters = max_iters;
    if (timeout > 0) o.limits.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout * 1000));
    o.blow_up_cap = blow_up_cap;
    if (concretize == "none") o.concretize = ConcretizePolicy::none;
    else if (concretize == "nonlinear") o.concretize = ConcretizePolicy::nonlinear;
    else if (concretize == "nonlinear-both") o.concretize = ConcretizePolicy::nonlinear_both;
    else if (concretize == "all") o.concretize = ConcretizePolicy::all;
    return o;
  }
};

void emit(const Settings& s, const std::string& text) {
  if (s.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(s.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::file, "cannot write '" + s.out + "'");
  f << text;
}

InputVector parse_input(const std::string& text) {
  InputVector in;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    auto trim = [](std::string x) {
      x.erase(0, x.find_first_not_of(" \t"));
      x.erase(x.find_last_not_of(" \t") + 1);
      return x;
    };
    if (eq == std::string::npos) throw Error(ErrorKind::usage, "input item '" + item + "' is not name=value");
    try {
      std::size_t used = 0;
      const auto value = trim(item.substr(eq + 1));
      in[trim(item.substr(0, eq))] = std::stoll(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::usage, "input item '" + item + "' has no integer value");
    }
  }
  return in;
}

Branch parse_branch(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 2 != text.size() || (text.back() != 'T' && text.back() != 'F'))
    throw Error(ErrorKind::usage, "branch '" + text + "' must look like <statement>:T or <statement>:F");
  return Branch{text.substr(0, colon), text.back() == 'T'};
}

std::string render(const Settings& s, const FaultReport& r) {
  if (s.report == "json") return to_json(r, !s.no_timing).dump(2) + "\n";
  return to_text(r, !s.no_timing);
}

int report_status(const FaultReport& r) { return r.complete ? 0 : static_cast<int>(ErrorKind::timeout); }

struct DebugArgs {
  std::string program;
  std::string tests;
  std::string mode = "ofc";
  std::string input;
  std::string assertion;
  std::string golden;
  std::string coverage;
  bool all_failing = false;
};

int cmd_debug(const Settings& s, const DebugArgs& a) {
  const auto mode = Mode::parse(a.mode);
  const auto o = s.options();
  std::vector<DebugSession> sessions;
  if (!a.tests.empty()) {
    std::optional<fs::path> golden;
    if (!a.golden.empty()) golden = a.golden;
    const auto subject = load_subject(a.program, a.tests, golden, o.width);
    const auto prep = prepare(subject, o);
    auto susp = prep.susp;
    if (!a.coverage.empty()) {
      std::istringstream is(read_file(a.coverage));
      susp = ochiai(read_coverage(is));
    }
    for (const auto* t : prep.failing) {
      sessions.push_back(DebugSession::make(t->program, t->test.input, mode, o, susp));
      if (!a.all_failing) break;
    }
  } else {
    if (a.input.empty()) throw Error(ErrorKind::usage, "debug needs a test suite or --input");
    auto p = parse_without_assert(read_file(a.program));
    if (!a.assertion.empty()) p = with_assertion(p, parse_predicate(a.assertion));
    else if (!p.has_assert()) throw Error(ErrorKind::usage, "the program has no assert; pass --assert or a test suite");
    SuspiciousnessMap susp;
    if (mode.weighted) {
      if (a.coverage.empty()) throw Error(ErrorKind::usage, "weighted modes need a test suite or --coverage");
      std::istringstream is(read_file(a.coverage));
      susp = ochiai(read_coverage(is));
    }
    sessions.push_back(DebugSession::make(p, parse_input(a.input), mode, o, susp));
  }
  std::vector<FaultReport> reports;
  for (const auto& session : sessions) reports.push_back(run_session(session));
  const auto merged = merge_reports(reports);
  emit(s, render(s, merged));
  for (const auto& r : reports)
    if (!r.complete) return report_status(r);
  return 0;
}

int cmd_compare(const Settings& s, const std::string& corpus) {
  const auto o = s.options();
  std::vector<CompareRow> rows;
  for (const auto& [prog, suite] : corpus_entries(corpus)) {
    try {
      const auto subject = load_subject(prog, suite, std::nullopt, o.width);
      for (auto& r : compare_modes(subject, o)) rows.push_back(std::move(r));
    } catch (const Error& e) {
      CompareRow r;
      r.program = prog.stem().string();
      r.mode = "-";
      r.status = std::string("error: ") + e.what();
      rows.push_back(r);
    }
  }
  if (s.report == "json") emit(s, compare_json(rows, !s.no_timing).dump(2) + "\n");
  else emit(s, compare_table(rows, !s.no_timing));
  return 0;
}

struct DumpArgs {
  std::string what;
  std::string program;
  std::string input;
  std::string assertion;
  std::string flip;
  std::string tests;
  bool looped = false;
};

int cmd_dump(const Settings& s, const DumpArgs& a) {
  const auto o = s.options();
  if (a.what == "coverage") {
    if (a.tests.empty()) throw Error(ErrorKind::usage, "dump coverage needs --tests");
    const auto subject = load_subject(a.program, a.tests, std::nullopt, o.width);
    std::ostringstream os;
    write_coverage(os, collect_coverage(classify(subject.faulty, subject.suite, o.width), o.width, o.unroll));
    emit(s, os.str());
    return 0;
  }
  auto p = parse_without_assert(read_file(a.program));
  if (!a.assertion.empty()) p = with_assertion(p, parse_predicate(a.assertion));
  else if (!p.has_assert()) p = with_assertion(p, bool_const(true));
  const auto cfg = build_cfg(p);
  if (a.what == "cfg") {
    std::ostringstream os;
    for (const auto& e : cfg.edges()) {
      const char* tag = e.kind == EdgeKind::true_branch ? " [T]" : e.kind == EdgeKind::false_branch ? " [F]"
                        : e.kind == EdgeKind::back                                                  ? " [back]"
                                                                                                    : "";
      os << e.from << " -> " << e.to << tag << '\n';
    }
    emit(s, os.str());
    return 0;
  }
  if (a.what == "ssa") {
    emit(s, dump_ssa(a.looped ? to_ssa(cfg) : unroll_loops(to_ssa(cfg), o.unroll)));
    return 0;
  }
  const auto ssa = unroll_loops(to_ssa(cfg), o.unroll);
  std::optional<Trace> trace;
  if (!a.input.empty()) {
    trace = execute(ssa, parse_input(a.input), o.width);
    if (!a.flip.empty()) trace = execute_hijacked(ssa, parse_input(a.input), *trace, parse_branch(a.flip), o.width);
  }
  if (a.what == "trace") {
    if (!trace) throw Error(ErrorKind::usage, "dump trace needs --input");
    emit(s, dump_trace(*trace));
    return 0;
  }
  TraceFormula tf;
  if (trace) formula_generator(*trace, tf, ssa, o.concretize);
  else tf = encode_all_paths(ssa, o.blow_up_cap);
  if (a.what == "formula") {
    emit(s, dump_formula(tf));
    return 0;
  }
  if (a.what == "instance") {
    if (a.input.empty()) throw Error(ErrorKind::usage, "dump instance needs --input");
    emit(s, dump_instance(build_instance(ssa, tf, parse_input(a.input), o.width)));
    return 0;
  }
  throw Error(ErrorKind::usage, "unknown dump kind '" + a.what + "'");
}

int cmd_derive(const Settings& s, const std::string& golden, const std::string& tests) {
  auto suite = parse_suite(read_file(tests));
  suite = derive_assertions(parse_without_assert(read_file(golden)), suite, s.options().width);
  suite.golden.reset();
  emit(s, to_json(suite).dump(2) + "\n");
  return 0;
}

int cmd_check(const Settings& s, const std::string& file, bool weighted, bool oracle) {
  const auto inst = parse_instance(read_file(file));
  const auto mode = weighted ? ComssMode::weighted : ComssMode::plain;
  const auto r = enumerate_comss(inst, s.max_comss_size, mode, s.options().limits);
  std::ostringstream os;
  auto line = [&](const CoMss& c) {
    os << "{";
    for (std::size_t i = 0; i < c.clause_ids.size(); ++i) os << (i ? ", " : "") << c.clause_ids[i];
    os << "}  MSS weight " << weight_str(c.mss_weight) << '\n';
  };
  os << "solver:\n";
  for (const auto& c : r.items) line(c);
  if (!r.complete) os << "(incomplete)\n";
  int status = r.complete ? 0 : static_cast<int>(ErrorKind::timeout);
  if (oracle) {
    const auto o = brute_force_comss(inst, s.max_comss_size, mode);
    os << "oracle:\n";
    for (const auto& c : o) line(c);
    const bool same = o == r.items;
    os << (same ? "agree\n" : "DISAGREE\n");
    if (!same) status = static_cast<int>(ErrorKind::analysis);
  }
  emit(s, os.str());
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formula-based fault localization for MiniImp programs"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings s;
  const char* env_config = std::getenv("FBDEBUG_CONFIG");
  app.set_config("--config", env_config ? env_config : "", "Configuration file (TOML or INI)");
  app.add_option("--width", s.width, "Integer bit width (2..32)")->capture_default_str()->check(CLI::Range(2, 32));
  app.add_option("--unroll", s.unroll, "Loop unroll bound")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-comss-size", s.max_comss_size, "Largest CoMSS reported")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iters", s.max_iters, "OFC iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--timeout", s.timeout, "Solver time budget per run in seconds (0: none)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--blow-up-cap", s.blow_up_cap, "Largest all-paths formula, in clauses")->capture_default_str();
  app.add_option("--report", s.report, "Output format")->capture_default_str()->check(CLI::IsMember({"text", "json"}));
  app.add_option("--concretize", s.concretize, "Concretization policy for trace formulas")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "nonlinear", "nonlinear-both", "all"}));
  app.add_flag("--no-timing", s.no_timing, "Omit timing fields from the output");
  app.add_option("-o,--out", s.out, "Write output to this file");

  DebugArgs da;
  auto* debug = app.add_subcommand("debug", "Localize the fault for the failing test(s)");
  debug->add_option("program", da.program, "MiniImp program")->required();
  debug->add_option("tests", da.tests, "Test suite (JSON)");
  debug->add_option("--mode", da.mode, "ba, ba+cw, ofc or ofc+cw")
      ->capture_default_str()
      ->check(CLI::IsMember({"ba", "ba+cw", "ofc", "ofc+cw"}));
  debug->add_option("--input", da.input, "Failing input, e.g. x=0,y=0 (without a test suite)");
  debug->add_option("--assert", da.assertion, "Assertion replacing the program's own");
  debug->add_option("--golden", da.golden, "Golden program used to derive expected outputs");
  debug->add_option("--coverage", da.coverage, "Coverage matrix file for weighted modes");
  debug->add_flag("--all-failing", da.all_failing, "Debug every failing test and merge the reports");

  std::string corpus;
  auto* compare = app.add_subcommand("compare", "Run all modes over a corpus and tabulate the results");
  compare->add_option("--corpus", corpus, "Directory of X.mimp programs with X.json suites")->required();

  DumpArgs dd;
  auto* dump = app.add_subcommand("dump", "Print an intermediate representation");
  dump->add_option("what", dd.what, "cfg, ssa, trace, formula, instance or coverage")
      ->required()
      ->check(CLI::IsMember({"cfg", "ssa", "trace", "formula", "instance", "coverage"}));
  dump->add_option("program", dd.program, "MiniImp program")->required();
  dump->add_option("--input", dd.input, "Input vector, e.g. x=0,y=0");
  dump->add_option("--assert", dd.assertion, "Assertion replacing the program's own");
  dump->add_option("--flip", dd.flip, "Branch to force on the traced run, e.g. 5:F");
  dump->add_option("--tests", dd.tests, "Test suite (for coverage)");
  dump->add_flag("--looped", dd.looped, "Print SSA with loops kept");

  std::string golden, tests;
  auto* derive = app.add_subcommand("derive", "Materialize expected outputs from a golden program");
  derive->add_option("golden", golden, "Golden MiniImp program")->required();
  derive->add_option("tests", tests, "Test suite (JSON)")->required();

  std::string instance_file;
  bool weighted = false, with_oracle = false;
  auto* check = app.add_subcommand("check", "Enumerate the CoMSSs of an instance file");
  check->add_option("instance", instance_file, "Instance file")->required();
  check->add_flag("--weighted", weighted, "Use the instance weights");
  check->add_flag("--oracle", with_oracle, "Cross-check against exhaustive enumeration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
  }

  try {
    if (*debug) return cmd_debug(s, da);
    if (*compare) return cmd_compare(s, corpus);
    if (*dump) return cmd_dump(s, dd);
    if (*derive) return cmd_derive(s, golden, tests);
    if (*check) return cmd_check(s, instance_file, weighted, with_oracle);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::analysis);
  }
  return 0;
}
