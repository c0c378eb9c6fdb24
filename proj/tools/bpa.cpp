// bpa -- command line front end: parsing and checking systems, deciding
// branching/weak bisimilarity, redundant sets and branching norms,
// regularity with witnesses, the two reduction generators, the game
// oracles, end-to-end verification, and the interactive game.
//
// Exit codes: 0 positive verdict (equivalent / regular / verified /
// player 0 / true), 1 negative, 2 undecided (cap), 64 usage error,
// 65 input parse error, 70 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bpa/game.hpp"
#include "bpa/oracles.hpp"
#include "bpa/reductions.hpp"
#include "bpa/regularity.hpp"
#include "bpa/strategy.hpp"
#include "bpa/text.hpp"

namespace {

constexpr int kExitPositive = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

int defaultCap() {
  if (const char* env = std::getenv("BPA_DEFAULT_CAP")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return bpa::kDefaultCap;
}

struct DataError {
  int exitCode;
  std::string message;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw DataError{kExitData, "cannot open '" + path + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bpa::BpaSystem loadSystem(const std::string& path) {
  auto r = bpa::parse_system(slurp(path));
  if (!r.ok())
    throw DataError{kExitData, path + ": " + r.error().str()};
  return r.take();
}

bpa::Process loadProcess(const bpa::BpaSystem& sys, const std::string& text) {
  auto r = bpa::parse_process(sys, text);
  if (!r.ok())
    throw DataError{kExitData, "process '" + text + "': " + r.error().str()};
  return r.take();
}

bpa::HorGame loadHor(const std::string& path) {
  auto r = bpa::parse_hor(slurp(path));
  if (!r.ok())
    throw DataError{kExitData, path + ": " + r.error().str()};
  return r.take();
}

bpa::QsatFormula loadQsat(const std::string& path) {
  auto r = bpa::parse_qsat(slurp(path));
  if (!r.ok())
    throw DataError{kExitData, path + ": " + r.error().str()};
  return r.take();
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out)
    throw DataError{kExitData, "cannot write '" + path + "'"};
  out << content;
}

bpa::Mode parseMode(const std::string& m) {
  if (m == "branching") return bpa::Mode::Branching;
  if (m == "weak") return bpa::Mode::Weak;
  throw DataError{kExitUsage, "bad mode '" + m + "'"};
}

int runCheck(const std::string& file) {
  auto sys = loadSystem(file);
  auto size = bpa::system_size(sys);
  auto norms = bpa::compute_norms(sys);
  std::cout << "vars: " << size.numVars << "\n";
  std::cout << "acts: " << size.numLabels << "\n";
  std::cout << "rules-size: " << size.rulesSize << "\n";
  std::cout << "size: " << size.total << "\n";
  if (norms.allNormed()) {
    std::cout << "normed: yes\n";
  } else {
    std::cout << "normed: no (";
    bool first = true;
    for (bpa::VarId v = 0; v < static_cast<bpa::VarId>(sys.numVars()); ++v)
      if (!norms.normed(v)) {
        if (!first) std::cout << " ";
        std::cout << sys.varName(v);
        first = false;
      }
    std::cout << ")\n";
  }
  std::cout << "v0:";
  for (bpa::VarId v : bpa::silent_erasable_list(sys))
    std::cout << " " << sys.varName(v);
  std::cout << "\n";
  return kExitPositive;
}

int runBisim(const std::string& file, const std::string& left,
             const std::string& right, const std::string& mode, int cap,
             bool wantStrategy, const std::string& dotFile) {
  auto sys = loadSystem(file);
  auto p = loadProcess(sys, left);
  auto q = loadProcess(sys, right);
  bpa::Mode m = parseMode(mode);
  auto v = bpa::decide(sys, p, q, m, cap);
  std::cout << "mode: " << bpa::mode_name(m) << "\n";
  std::cout << "verdict: " << v.name() << "\n";
  if (v.isUndecided()) {
    std::cout << "reason: state cap exceeded (cap=" << v.capReport().cap
              << ", explored=" << v.capReport().statesExplored << ")\n";
    return kExitUndecided;
  }
  if (!dotFile.empty()) {
    auto closure = bpa::build_closure(sys, {p, q}, cap);
    writeFile(dotFile, bpa::lts_to_dot(std::get<bpa::Lts>(closure)));
  }
  if (v.isEquivalent()) return kExitPositive;
  std::cout << "reason: processes are not " << bpa::mode_name(m)
            << " bisimilar\n";
  if (wantStrategy) {
    auto st = bpa::attacker_strategy(v);
    std::cout << "strategy:\n"
              << bpa::render_strategy(std::get<bpa::StrategyTree>(st));
  }
  return kExitNegative;
}

int runRd(const std::string& file, const std::string& procText, bool tree,
          int suffixCap) {
  auto sys = loadSystem(file);
  bpa::RdEngine eng(sys, suffixCap);
  if (tree) {
    auto dump = eng.dumpTree();
    if (dump == "undecided\n") {
      std::cout << "reason: state cap exceeded during membership tests\n";
      return kExitUndecided;
    }
    std::cout << dump;
    return kExitPositive;
  }
  auto p = loadProcess(sys, procText);
  auto r = eng.redundantSet(p);
  if (!r.ok()) {
    std::cout << "reason: state cap exceeded during membership tests\n";
    return kExitUndecided;
  }
  std::cout << "process: " << bpa::print_process(sys, p) << "\n";
  std::cout << "rd: " << r.value.str(sys) << "\n";
  return kExitPositive;
}

int runBnorm(const std::string& file, const std::string& procText,
             const std::string& suffixProc, const std::string& suffixSet,
             int suffixCap, bool audit) {
  auto sys = loadSystem(file);
  bpa::RdEngine eng(sys, suffixCap);
  auto p = loadProcess(sys, procText);
  bpa::RdResult<long long> r;
  std::vector<bpa::RdEngine::NormStep> steps;
  auto* stepsPtr = audit ? &steps : nullptr;
  std::string suffixShown;
  bpa::Process suffix;
  if (!suffixSet.empty()) {
    std::vector<bpa::VarId> vars;
    std::istringstream ss(suffixSet);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto v = sys.findVar(name);
      if (!v) throw DataError{kExitData, "unknown variable '" + name + "'"};
      vars.push_back(*v);
    }
    auto set = bpa::RedundantSet::of(std::move(vars));
    suffixShown = set.str(sys);
    auto rep = eng.representative(set);
    if (rep.status == bpa::RdStatus::UnrealizableSet) {
      std::cout << "reason: no process carries the redundant set "
                << suffixShown << "\n";
      return kExitData;
    }
    if (!rep.ok()) {
      std::cout << "reason: state cap exceeded\n";
      return kExitUndecided;
    }
    suffix = rep.value;
    r = eng.branchingNorm(p, suffix, stepsPtr);
  } else if (!suffixProc.empty()) {
    suffix = loadProcess(sys, suffixProc);
    suffixShown = bpa::print_process(sys, suffix);
    r = eng.branchingNorm(p, suffix, stepsPtr);
  } else {
    suffixShown = "eps";
    r = eng.branchingNorm(p, bpa::Process::nil(), stepsPtr);
  }
  if (!r.ok()) {
    std::cout << "reason: state cap exceeded\n";
    return kExitUndecided;
  }
  std::cout << "process: " << bpa::print_process(sys, p) << "\n";
  std::cout << "suffix: " << suffixShown << "\n";
  std::cout << "bnorm: " << r.value << "\n";
  if (audit) {
    for (const auto& s : steps)
      std::cout << (s.counted ? "step" : "skip") << " -"
                << sys.actName(s.act) << "-> "
                << bpa::print_process(sys, s.process) << "\n";
  }
  return kExitPositive;
}

int runRegular(const std::string& file, const std::string& procText, int cap,
               const std::string& dotFile) {
  auto sys = loadSystem(file);
  if (!bpa::compute_norms(sys).allNormed())
    throw DataError{kExitData, "system is not normed"};
  bpa::RegularityEngine eng(sys, cap);
  auto p = loadProcess(sys, procText);
  auto res = eng.decideRegular(p);
  if (!dotFile.empty() && eng.graph().ok())
    writeFile(dotFile, eng.graphDot());
  switch (res.status) {
    case bpa::RegStatus::Regular:
      std::cout << "verdict: Regular\n";
      return kExitPositive;
    case bpa::RegStatus::NotRegular:
      std::cout << "verdict: NotRegular\n";
      std::cout << "reason: growing node reachable from position "
                << res.witness->position << "\n";
      std::cout << "witness:\n" << eng.renderWitness(*res.witness);
      return kExitNegative;
    case bpa::RegStatus::Undecided:
      std::cout << "verdict: Undecided\n";
      std::cout << "reason: state cap exceeded\n";
      return kExitUndecided;
  }
  return kExitInternal;
}

int runRdGraph(const std::string& file, int cap, const std::string& dotFile) {
  auto sys = loadSystem(file);
  if (!bpa::compute_norms(sys).allNormed())
    throw DataError{kExitData, "system is not normed"};
  bpa::RegularityEngine eng(sys, cap);
  auto g = eng.graph();
  if (!g.ok()) {
    std::cout << "reason: state cap exceeded\n";
    return kExitUndecided;
  }
  auto growing = eng.growingNodes();
  std::cout << "nodes: " << g.value->nodeCount() << "\n";
  std::cout << "edges: " << g.value->edges.size() << "\n";
  std::cout << "growing: " << growing.value.size() << "\n";
  for (int v : growing.value)
    std::cout << g.value->nodeName(v) << "\n";
  if (!dotFile.empty()) writeFile(dotFile, eng.graphDot());
  return kExitPositive;
}

int runReduce(const std::string& kind, const std::string& file,
              const std::string& outFile) {
  bpa::ReductionOutput red;
  if (kind == "hor") {
    red = bpa::reduce_hor(loadHor(file));
  } else if (kind == "qsat") {
    red = bpa::reduce_qsat(loadQsat(file));
  } else {
    throw DataError{kExitUsage, "reduce expects 'hor' or 'qsat'"};
  }
  std::string text = bpa::print_reduction(red);
  if (outFile.empty())
    std::cout << text;
  else
    writeFile(outFile, text);
  return kExitPositive;
}

int runSolve(const std::string& kind, const std::string& file) {
  if (kind == "hor") {
    auto w = bpa::solve_hor(loadHor(file));
    std::cout << "winner: "
              << (w == bpa::HorWinner::Player0 ? "Player0" : "Player1")
              << "\n";
    if (w == bpa::HorWinner::Player0) return kExitPositive;
    std::cout << "reason: player 1 forces a wrong final configuration\n";
    return kExitNegative;
  }
  if (kind == "qsat") {
    bool v = bpa::eval_qsat(loadQsat(file));
    std::cout << "value: " << (v ? "true" : "false") << "\n";
    if (v) return kExitPositive;
    std::cout << "reason: some universal choice defeats every reply\n";
    return kExitNegative;
  }
  throw DataError{kExitUsage, "solve expects 'hor' or 'qsat'"};
}

int runVerifyHor(const std::string& file, int cap) {
  auto game = loadHor(file);
  auto winner = bpa::solve_hor(game);
  auto red = bpa::reduce_hor(game);
  auto vb = bpa::decide(red.sys, red.left, red.right, bpa::Mode::Branching,
                        cap);
  auto vw = bpa::decide(red.sys, red.left, red.right, bpa::Mode::Weak, cap);
  std::cout << "oracle: "
            << (winner == bpa::HorWinner::Player0 ? "Player0" : "Player1")
            << "\n";
  std::cout << "branching: " << vb.name() << "\n";
  std::cout << "weak: " << vw.name() << "\n";
  if (vb.isUndecided() || vw.isUndecided()) {
    std::cout << "verified: undecided\nreason: state cap exceeded\n";
    return kExitUndecided;
  }
  bool expectEq = winner == bpa::HorWinner::Player0;
  bool ok = vb.isEquivalent() == expectEq && vw.isEquivalent() == expectEq;
  std::cout << "verified: " << (ok ? "yes" : "no") << "\n";
  if (!ok) {
    std::cout << "reason: oracle and equivalence verdicts disagree\n";
    return kExitNegative;
  }
  return kExitPositive;
}

int runVerifyQsat(const std::string& file, int cap) {
  auto f = loadQsat(file);
  bool truth = bpa::eval_qsat(f);
  auto red = bpa::reduce_qsat(f);
  auto vb = bpa::decide(red.sys, red.left, red.right, bpa::Mode::Branching,
                        cap);
  auto vw = bpa::decide(red.sys, red.left, red.right, bpa::Mode::Weak, cap);
  std::cout << "oracle: " << (truth ? "true" : "false") << "\n";
  std::cout << "branching: " << vb.name() << "\n";
  std::cout << "weak: " << vw.name() << "\n";
  bpa::RegularityEngine eng(red.sys, cap);
  auto rl = eng.decideRegular(red.left);
  auto rr = eng.decideRegular(red.right);
  auto regName = [](bpa::RegStatus s) {
    switch (s) {
      case bpa::RegStatus::Regular: return "Regular";
      case bpa::RegStatus::NotRegular: return "NotRegular";
      default: return "Undecided";
    }
  };
  std::cout << "regular-left: " << regName(rl.status) << "\n";
  std::cout << "regular-right: " << regName(rr.status) << "\n";
  if (vb.isUndecided() || vw.isUndecided() ||
      rl.status == bpa::RegStatus::Undecided ||
      rr.status == bpa::RegStatus::Undecided) {
    std::cout << "verified: undecided\nreason: state cap exceeded\n";
    return kExitUndecided;
  }
  bool ok = vb.isEquivalent() == truth && vw.isEquivalent() == truth &&
            rl.status == bpa::RegStatus::Regular &&
            rr.status == bpa::RegStatus::Regular;
  std::cout << "verified: " << (ok ? "yes" : "no") << "\n";
  if (!ok) {
    std::cout << "reason: oracle and reduction verdicts disagree\n";
    return kExitNegative;
  }
  return kExitPositive;
}

int runGame(const std::string& file, const std::string& left,
            const std::string& right, const std::string& mode,
            const std::string& role, const std::string& scriptFile, int cap,
            int maxRounds) {
  auto sys = loadSystem(file);
  auto p = loadProcess(sys, left);
  auto q = loadProcess(sys, right);
  bpa::Mode m = parseMode(mode);
  bpa::Role r;
  if (role == "attacker")
    r = bpa::Role::Attacker;
  else if (role == "defender")
    r = bpa::Role::Defender;
  else if (role == "observer")
    r = bpa::Role::Observer;
  else
    throw DataError{kExitUsage, "bad role '" + role + "'"};
  std::ifstream script;
  bpa::GameIo io;
  if (!scriptFile.empty()) {
    script.open(scriptFile);
    if (!script)
      throw DataError{kExitData, "cannot open '" + scriptFile + "'"};
    io.in = &script;
    io.ui = nullptr;
  } else if (r != bpa::Role::Observer) {
    io.in = &std::cin;
    io.ui = &std::cerr;
  }
  auto res = bpa::interactive_game(sys, p, q, m, r, io, cap, maxRounds);
  if (res.outcome == bpa::GameOutcome::Undecided) {
    std::cout << "reason: state cap exceeded (cap=" << res.capReport.cap
              << ")\n";
    return kExitUndecided;
  }
  std::cout << res.transcript;
  return kExitPositive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for normed BPA: bisimilarity, redundancy, "
               "regularity, reductions"};
  app.require_subcommand(1);
  const int cap0 = defaultCap();

  // check
  auto* check = app.add_subcommand("check", "parse and validate a system");
  std::string checkFile;
  check->add_option("file", checkFile, ".bpa file")->required();

  // bisim
  auto* bisim = app.add_subcommand("bisim", "decide bisimilarity");
  std::string bisimFile, bisimLeft, bisimRight, bisimMode = "branching";
  std::string bisimDot;
  int bisimCap = cap0;
  bool bisimStrategy = false;
  bisim->add_option("file", bisimFile, ".bpa file")->required();
  bisim->add_option("left", bisimLeft, "left process")->required();
  bisim->add_option("right", bisimRight, "right process")->required();
  bisim->add_option("--mode", bisimMode, "branching|weak");
  bisim->add_option("--cap", bisimCap, "closure state cap");
  bisim->add_flag("--strategy", bisimStrategy,
                  "print an attacker strategy when inequivalent");
  bisim->add_option("--dot", bisimDot, "write the closure as DOT");

  // rd
  auto* rd = app.add_subcommand("rd", "redundant set of a process");
  std::string rdFile, rdProc;
  bool rdTree = false;
  int rdCap = cap0;
  rd->add_option("file", rdFile, ".bpa file")->required();
  rd->add_option("process", rdProc, "process (omit with --tree)");
  rd->add_flag("--tree", rdTree, "dump the representative tree");
  rd->add_option("--suffix-cap", rdCap, "membership test state cap");

  // bnorm
  auto* bnorm = app.add_subcommand("bnorm", "branching norm of a process");
  std::string bnFile, bnProc, bnSuffix, bnSuffixSet;
  int bnCap = cap0;
  bool bnAudit = false;
  bnorm->add_option("file", bnFile, ".bpa file")->required();
  bnorm->add_option("process", bnProc, "process")->required();
  bnorm->add_option("--suffix", bnSuffix, "relative to a suffix process");
  bnorm->add_option("--suffix-set", bnSuffixSet,
                    "relative to a redundant set (comma separated)");
  bnorm->add_option("--suffix-cap", bnCap, "membership test state cap");
  bnorm->add_flag("--audit", bnAudit, "print a witnessing step sequence");

  // regular
  auto* regular = app.add_subcommand("regular", "decide regularity");
  std::string regFile, regProc, regDot;
  int regCap = cap0;
  regular->add_option("file", regFile, ".bpa file")->required();
  regular->add_option("process", regProc, "process")->required();
  regular->add_option("--cap", regCap, "membership test state cap");
  regular->add_option("--dot", regDot, "write the redundancy graph as DOT");

  // rdgraph
  auto* rdgraph = app.add_subcommand("rdgraph", "redundancy graph summary");
  std::string rgFile, rgDot;
  int rgCap = cap0;
  rdgraph->add_option("file", rgFile, ".bpa file")->required();
  rdgraph->add_option("--cap", rgCap, "membership test state cap");
  rdgraph->add_option("--dot", rgDot, "write the graph as DOT");

  // reduce
  auto* reduce = app.add_subcommand("reduce", "run a reduction generator");
  std::string redKind, redFile, redOut;
  reduce->add_option("kind", redKind, "hor|qsat")->required();
  reduce->add_option("file", redFile, "input file")->required();
  reduce->add_option("-o,--output", redOut, "output .bpa file");

  // solve
  auto* solve = app.add_subcommand("solve", "run a game oracle");
  std::string solKind, solFile;
  solve->add_option("kind", solKind, "hor|qsat")->required();
  solve->add_option("file", solFile, "input file")->required();

  // verify
  auto* verify = app.add_subcommand(
      "verify", "oracle vs reduction, end to end");
  std::string verKind, verFile;
  int verCap = cap0;
  verify->add_option("kind", verKind, "hor|qsat")->required();
  verify->add_option("file", verFile, "input file")->required();
  verify->add_option("--cap", verCap, "closure state cap");

  // game
  auto* game = app.add_subcommand("game", "play the bisimulation game");
  std::string gFile, gLeft, gRight, gMode = "branching", gRole = "attacker";
  std::string gScript;
  int gCap = cap0, gMaxRounds = 1000;
  game->add_option("file", gFile, ".bpa file")->required();
  game->add_option("left", gLeft, "left process")->required();
  game->add_option("right", gRight, "right process")->required();
  game->add_option("--mode", gMode, "branching|weak");
  game->add_option("--role", gRole, "attacker|defender|observer");
  game->add_option("--script", gScript, "read choices from a file");
  game->add_option("--cap", gCap, "closure state cap");
  game->add_option("--max-rounds", gMaxRounds, "round limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*check) return runCheck(checkFile);
    if (*bisim)
      return runBisim(bisimFile, bisimLeft, bisimRight, bisimMode, bisimCap,
                      bisimStrategy, bisimDot);
    if (*rd) {
      if (!rdTree && rdProc.empty())
        throw DataError{kExitUsage, "rd needs a process or --tree"};
      return runRd(rdFile, rdProc, rdTree, rdCap);
    }
    if (*bnorm)
      return runBnorm(bnFile, bnProc, bnSuffix, bnSuffixSet, bnCap, bnAudit);
    if (*regular) return runRegular(regFile, regProc, regCap, regDot);
    if (*rdgraph) return runRdGraph(rgFile, rgCap, rgDot);
    if (*reduce) return runReduce(redKind, redFile, redOut);
    if (*solve) return runSolve(solKind, solFile);
    if (*verify) {
      if (verKind == "hor") return runVerifyHor(verFile, verCap);
      if (verKind == "qsat") return runVerifyQsat(verFile, verCap);
      throw DataError{kExitUsage, "verify expects 'hor' or 'qsat'"};
    }
    if (*game)
      return runGame(gFile, gLeft, gRight, gMode, gRole, gScript, gCap,
                     gMaxRounds);
  } catch (const DataError& e) {
    std::cout << "reason: " << e.message << "\n";
    return e.exitCode;
  } catch (const std::exception& e) {
    std::cout << "reason: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
