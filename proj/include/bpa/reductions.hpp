// reductions.hpp -- the two polynomial-time reductions and their input
// formats: Hit-or-Run games into (Delta1, gamma, gamma') and QSAT
// formulas into (Delta2, X1, X1').
//
// Flat naming for the decorated symbols: X_<s>, Xp_<s>, Y_<s>, Yp_<s>;
// A_<l>_<t>, Ap_<l>_<t>; E_<s>, E_<s>__<l>_<t>, F_<s>, F_<s>__<l>_<t>;
// actions a__<l>_<t> plus c, e, f, fp, g. Addition gadgets are tagged by
// their (l, t) pair. The QSAT control variables are X<i>, Xp<i>, Y<i>,
// Yp<i>, Y<i>__1, Y<i>__2, Y<i>__3 with actions c0, c1, e.
#pragma once

#include <array>
#include <map>
#include <set>

#include "bpa/counter.hpp"
#include "bpa/text.hpp"

namespace bpa {

// ------------------------------------------------------------ Hit-or-Run

struct HorTransition {
  int from;
  long long label;  // 0 or a power of two
  int to;           // state index, or kHorFinal
};

inline constexpr int kHorFinal = -1;

struct HorGame {
  std::vector<std::string> stateNames;
  std::vector<bool> ownedByPlayer1;  // per state
  std::vector<HorTransition> transitions;
  int init = 0;
  long long finalValue = 0;

  const std::string& stateName(int s) const { return stateNames[s]; }
  std::string targetName(int t) const {
    return t == kHorFinal ? "final" : stateNames[t];
  }
};

inline bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

inline Parsed<HorGame> parse_hor(const std::string& text) {
  using detail::Token;
  HorGame g;
  std::map<std::string, int> stateIndex;
  bool sawInit = false, sawFinalValue = false;
  std::string initName;
  int initLine = 0;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto declareStates = [&](const std::vector<Token>& toks, bool player1,
                           int ln) -> std::optional<ParseError> {
    for (std::size_t i = 1; i < toks.size(); ++i) {
      const Token& t = toks[i];
      if (!detail::isIdentifier(t.text))
        return ParseError{ParseError::Kind::SyntaxError, ln, t.col,
                          "bad state name '" + t.text + "'"};
      if (t.text == "final")
        return ParseError{ParseError::Kind::SyntaxError, ln, t.col,
                          "'final' is reserved for the final state"};
      if (stateIndex.count(t.text))
        return ParseError{ParseError::Kind::DuplicateDeclaration, ln, t.col,
                          "state '" + t.text + "'"};
      stateIndex[t.text] = static_cast<int>(g.stateNames.size());
      g.stateNames.push_back(t.text);
      g.ownedByPlayer1.push_back(player1);
    }
    return std::nullopt;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    const Token& head = toks[0];
    if (head.text == "states0:" || head.text == "states1:") {
      if (auto err = declareStates(toks, head.text == "states1:", lineno))
        return *err;
      continue;
    }
    if (head.text == "init:") {
      if (toks.size() != 2)
        return ParseError{ParseError::Kind::SyntaxError, lineno, head.col,
                          "expected exactly one initial state"};
      sawInit = true;
      initName = toks[1].text;
      initLine = lineno;
      continue;
    }
    if (head.text == "final-value:") {
      if (toks.size() != 2)
        return ParseError{ParseError::Kind::SyntaxError, lineno, head.col,
                          "expected one number"};
      try {
        std::size_t pos = 0;
        g.finalValue = std::stoll(toks[1].text, &pos);
        if (pos != toks[1].text.size() || g.finalValue < 0) throw 0;
      } catch (...) {
        return ParseError{ParseError::Kind::SyntaxError, lineno, toks[1].col,
                          "bad final value '" + toks[1].text + "'"};
      }
      sawFinalValue = true;
      continue;
    }
    // transition: FROM -label-> TO
    if (toks.size() != 3)
      return ParseError{ParseError::Kind::SyntaxError, lineno, head.col,
                        "expected 's -l-> t'"};
    auto fromIt = stateIndex.find(head.text);
    if (fromIt == stateIndex.end())
      return ParseError{ParseError::Kind::UnknownState, lineno, head.col,
                        "'" + head.text + "'"};
    std::string labelText;
    if (!detail::splitArrow(toks[1].text, &labelText)) {
      // arrows here carry numbers, so re-split by hand
      const std::string& a = toks[1].text;
      if (a.size() < 4 || a.front() != '-' ||
          a.substr(a.size() - 2) != "->")
        return ParseError{ParseError::Kind::SyntaxError, lineno, toks[1].col,
                          "expected '-number->', got '" + a + "'"};
      labelText = a.substr(1, a.size() - 3);
    }
    long long label = 0;
    try {
      std::size_t pos = 0;
      label = std::stoll(labelText, &pos);
      if (pos != labelText.size() || label < 0) throw 0;
    } catch (...) {
      return ParseError{ParseError::Kind::SyntaxError, lineno, toks[1].col,
                        "bad label '" + labelText + "'"};
    }
    if (label != 0 && !is_power_of_two(label))
      return ParseError{ParseError::Kind::NotPowerOfTwo, lineno, toks[1].col,
                        "label " + std::to_string(label)};
    int to;
    if (toks[2].text == "final") {
      to = kHorFinal;
    } else {
      auto toIt = stateIndex.find(toks[2].text);
      if (toIt == stateIndex.end())
        return ParseError{ParseError::Kind::UnknownState, lineno, toks[2].col,
                          "'" + toks[2].text + "'"};
      to = toIt->second;
    }
    g.transitions.push_back(HorTransition{fromIt->second, label, to});
  }
  if (!sawInit)
    return ParseError{ParseError::Kind::SyntaxError, lineno, 0,
                      "missing 'init:'"};
  if (!sawFinalValue)
    return ParseError{ParseError::Kind::SyntaxError, lineno, 0,
                      "missing 'final-value:'"};
  auto initIt = stateIndex.find(initName);
  if (initIt == stateIndex.end())
    return ParseError{ParseError::Kind::UnknownState, initLine, 0,
                      "'" + initName + "'"};
  g.init = initIt->second;
  std::vector<bool> hasOut(g.stateNames.size(), false);
  for (auto& t : g.transitions) hasOut[t.from] = true;
  for (std::size_t s = 0; s < g.stateNames.size(); ++s)
    if (!hasOut[s])
      return ParseError{ParseError::Kind::MissingOutgoingRule, 0, 0,
                        "state '" + g.stateNames[s] + "'"};
  return g;
}

struct ReductionOutput {
  BpaSystem sys;
  Process left, right;
  int n = 0;  // counter width
  std::vector<std::pair<std::string, std::string>> names;  // flat -> meaning
};

inline int counter_width(long long finalValue) {
  int n = 1;
  while ((1ll << n) <= finalValue) ++n;  // n = floor(log2 k)+1 for k >= 1
  return n;
}

inline ReductionOutput reduce_hor(const HorGame& g) {
  ReductionOutput out;
  const int n = counter_width(g.finalValue);
  out.n = n;
  BpaSystem& sys = out.sys;
  CounterView cv = add_counter(sys, n);

  const int numStates = static_cast<int>(g.stateNames.size());
  auto tName = [&](int t) { return g.targetName(t); };

  // control variables X/X'/Y/Y' for every state and the final state
  std::vector<VarId> X(numStates + 1), Xp(numStates + 1), Y(numStates + 1),
      Yp(numStates + 1);
  auto slot = [&](int t) { return t == kHorFinal ? numStates : t; };
  for (int t = 0; t <= numStates; ++t) {
    std::string nm = t == numStates ? "final" : g.stateNames[t];
    X[t] = sys.addVar("X_" + nm);
    Xp[t] = sys.addVar("Xp_" + nm);
    Y[t] = sys.addVar("Y_" + nm);
    Yp[t] = sys.addVar("Yp_" + nm);
    out.names.emplace_back("X_" + nm, "X(" + nm + ")");
    out.names.emplace_back("Xp_" + nm, "X'(" + nm + ")");
    out.names.emplace_back("Y_" + nm, "Y(" + nm + ")");
    out.names.emplace_back("Yp_" + nm, "Y'(" + nm + ")");
  }

  // the global set of (label, target) pairs, ordered
  std::set<std::pair<long long, int>> opSet;
  for (auto& t : g.transitions) opSet.emplace(t.label, slot(t.to));
  std::vector<std::pair<long long, int>> op(opSet.begin(), opSet.end());
  auto opTag = [&](const std::pair<long long, int>& lt) {
    return std::to_string(lt.first) + "_" +
           (lt.second == numStates ? "final" : g.stateNames[lt.second]);
  };

  std::map<std::pair<long long, int>, VarId> A, Ap;
  std::map<std::pair<long long, int>, ActId> aAct;
  for (auto& lt : op) {
    A[lt] = sys.addVar("A_" + opTag(lt));
    Ap[lt] = sys.addVar("Ap_" + opTag(lt));
    aAct[lt] = sys.ensureAct("a__" + opTag(lt));
    out.names.emplace_back("A_" + opTag(lt),
                           "A(" + std::to_string(lt.first) + "," +
                               tName(lt.second == numStates ? kHorFinal
                                                            : lt.second) +
                               ")");
  }
  ActId c = sys.ensureAct("c");
  sys.ensureAct("e");
  ActId f = sys.ensureAct("f");
  ActId fp = sys.ensureAct("fp");
  ActId gAct = sys.ensureAct("g");

  // per-state choice sets, in op order
  std::vector<std::vector<std::pair<long long, int>>> opOf(numStates);
  for (auto& lt : op)
    for (auto& t : g.transitions)
      if (t.label == lt.first && slot(t.to) == lt.second) {
        auto& v = opOf[t.from];
        if (std::find(v.begin(), v.end(), lt) == v.end()) v.push_back(lt);
      }
  for (auto& v : opOf) std::sort(v.begin(), v.end());

  // forcing variables for Player 0 states
  std::map<int, VarId> Es, Fs;
  std::map<std::pair<int, std::pair<long long, int>>, VarId> Eslt, Fslt;
  for (int s = 0; s < numStates; ++s) {
    if (g.ownedByPlayer1[s]) continue;
    Es[s] = sys.addVar("E_" + g.stateNames[s]);
    Fs[s] = sys.addVar("F_" + g.stateNames[s]);
    for (auto& lt : opOf[s]) {
      Eslt[{s, lt}] = sys.addVar("E_" + g.stateNames[s] + "__" + opTag(lt));
      Fslt[{s, lt}] = sys.addVar("F_" + g.stateNames[s] + "__" + opTag(lt));
    }
  }

  // addition gadgets, one per distinct (l, t) with 0 < l < 2^n
  std::map<std::pair<long long, int>, AddGadget> gadget;
  for (auto& lt : op) {
    long long l = lt.first;
    if (l <= 0 || l >= (1ll << n)) continue;
    int k = 0;
    while ((1ll << (k + 1)) <= l) ++k;
    AddTuple tuple{k, Process::single(X[lt.second]),
                   Process::single(Xp[lt.second]),
                   Process::single(Y[lt.second]),
                   Process::single(Yp[lt.second])};
    gadget.emplace(lt, gen_add(sys, cv, opTag(lt), tuple));
  }

  // (a1)-(a4): Player 0 states force through E/F pairs
  for (int s = 0; s < numStates; ++s) {
    if (g.ownedByPlayer1[s]) continue;
    sys.addRule(X[s], c, Process::single(Es[s]));
    for (auto& lt : opOf[s]) {
      sys.addRule(X[s], c, Process::single(Eslt[{s, lt}]));
      sys.addRule(Xp[s], c, Process::single(Eslt[{s, lt}]));
    }
    for (auto& lt : opOf[s])
      sys.addRule(Es[s], aAct[lt], Process::single(A[lt]));
    for (auto& lt : opOf[s]) {
      sys.addRule(Eslt[{s, lt}], aAct[lt], Process::single(Ap[lt]));
      for (auto& lt2 : opOf[s])
        if (lt2 != lt)
          sys.addRule(Eslt[{s, lt}], aAct[lt2], Process::single(A[lt2]));
    }
    sys.addRule(Y[s], c, Process::single(Fs[s]));
    for (auto& lt : opOf[s]) {
      sys.addRule(Y[s], c, Process::single(Fslt[{s, lt}]));
      sys.addRule(Yp[s], c, Process::single(Fslt[{s, lt}]));
    }
    for (auto& lt : opOf[s])
      sys.addRule(Fs[s], aAct[lt], Process::single(Y[lt.second]));
    for (auto& lt : opOf[s]) {
      sys.addRule(Fslt[{s, lt}], aAct[lt], Process::single(Yp[lt.second]));
      for (auto& lt2 : opOf[s])
        if (lt2 != lt)
          sys.addRule(Fslt[{s, lt}], aAct[lt2],
                      Process::single(Y[lt2.second]));
    }
  }
  // (b1)-(b2): Player 1 states move openly
  for (int s = 0; s < numStates; ++s) {
    if (!g.ownedByPlayer1[s]) continue;
    for (auto& lt : opOf[s]) {
      sys.addRule(X[s], aAct[lt], Process::single(A[lt]));
      sys.addRule(Xp[s], aAct[lt], Process::single(Ap[lt]));
    }
    for (auto& lt : opOf[s]) {
      sys.addRule(Y[s], aAct[lt], Process::single(Y[lt.second]));
      sys.addRule(Yp[s], aAct[lt], Process::single(Yp[lt.second]));
    }
  }
  // (c): the final bit test; (d): the overflow tell-tale
  BitWord bin = BitWord::ofValue(g.finalValue, n);
  Process zWord;
  for (int i = n; i >= 1; --i) zWord.word.push_back(cv.z(i, bin.bit(i)));
  sys.addRule(X[numStates], f, zWord);
  sys.addRule(Xp[numStates], f, Process::nil());
  sys.addRule(Y[numStates], f, Process::nil());
  sys.addRule(Yp[numStates], fp, Process::nil());

  // update dispatch per (l, t)
  for (auto& lt : op) {
    long long l = lt.first;
    if (l == 0) {
      sys.addRule(A[lt], gAct, Process::single(X[lt.second]));
      sys.addRule(Ap[lt], gAct, Process::single(Xp[lt.second]));
    } else if (l >= (1ll << n)) {
      sys.addRule(A[lt], gAct, Process::single(Y[lt.second]));
      sys.addRule(Ap[lt], gAct, Process::single(Yp[lt.second]));
    } else {
      sys.addRule(A[lt], gAct, Process::single(gadget.at(lt).A));
      sys.addRule(Ap[lt], gAct, Process::single(gadget.at(lt).Ap));
    }
  }

  out.left = concat(Process::single(X[g.init]), cv.zeroStack());
  out.right = concat(Process::single(Xp[g.init]), cv.zeroStack());
  return out;
}

// ------------------------------------------------------------------ QSAT

struct QsatLiteral {
  bool isY = false;
  int index = 0;  // 1-based round
  bool negated = false;

  bool operator==(const QsatLiteral& o) const {
    return isY == o.isY && index == o.index && negated == o.negated;
  }
};

// forall x1 exists y1 ... forall x_m exists y_m . C1 and ... and Cn
struct QsatFormula {
  int m = 0;
  std::vector<std::vector<QsatLiteral>> clauses;

  int n() const { return static_cast<int>(clauses.size()); }
};

inline Parsed<QsatFormula> parse_qsat(const std::string& text) {
  using detail::Token;
  QsatFormula f;
  bool sawM = false, inClauses = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    const Token& head = toks[0];
    if (head.text == "m:") {
      if (toks.size() != 2)
        return ParseError{ParseError::Kind::SyntaxError, lineno, head.col,
                          "expected one number"};
      try {
        std::size_t pos = 0;
        f.m = std::stoi(toks[1].text, &pos);
        if (pos != toks[1].text.size() || f.m < 1) throw 0;
      } catch (...) {
        return ParseError{ParseError::Kind::SyntaxError, lineno, toks[1].col,
                          "bad round count '" + toks[1].text + "'"};
      }
      sawM = true;
      continue;
    }
    if (head.text == "clauses:") {
      if (!sawM)
        return ParseError{ParseError::Kind::SyntaxError, lineno, head.col,
                          "'m:' must come first"};
      inClauses = true;
      continue;
    }
    if (!inClauses)
      return ParseError{ParseError::Kind::SyntaxError, lineno, head.col,
                        "expected 'm:' or 'clauses:'"};
    std::vector<QsatLiteral> clause;
    for (const Token& t : toks) {
      QsatLiteral lit;
      std::string s = t.text;
      if (!s.empty() && s[0] == '-') {
        lit.negated = true;
        s = s.substr(1);
      }
      if (s.size() < 2 || (s[0] != 'x' && s[0] != 'y'))
        return ParseError{ParseError::Kind::SyntaxError, lineno, t.col,
                          "bad literal '" + t.text + "'"};
      lit.isY = s[0] == 'y';
      try {
        std::size_t pos = 0;
        lit.index = std::stoi(s.substr(1), &pos);
        if (pos != s.size() - 1 || lit.index < 1) throw 0;
      } catch (...) {
        return ParseError{ParseError::Kind::SyntaxError, lineno, t.col,
                          "bad literal '" + t.text + "'"};
      }
      if (lit.index > f.m)
        return ParseError{ParseError::Kind::IndexOutOfRange, lineno, t.col,
                          "literal '" + t.text + "' exceeds m=" +
                              std::to_string(f.m)};
      clause.push_back(lit);
    }
    f.clauses.push_back(std::move(clause));
  }
  if (!sawM)
    return ParseError{ParseError::Kind::SyntaxError, lineno, 0,
                      "missing 'm:'"};
  if (f.clauses.empty())
    return ParseError{ParseError::Kind::EmptyClauseList, lineno, 0,
                      "at least one clause required"};
  return f;
}

// The word of clause indices carrying the designated literal, ascending.
enum class LiteralKind { X, Y };

inline Process clause_vector(const QsatFormula& f, const CounterView& cv,
                             int i, int value, LiteralKind kind) {
  Process p;
  for (int ci = 1; ci <= f.n(); ++ci)
    for (const QsatLiteral& lit : f.clauses[ci - 1]) {
      bool kindMatch = (kind == LiteralKind::Y) == lit.isY;
      // value 1 selects positive occurrences, value 0 negated ones
      if (kindMatch && lit.index == i && lit.negated == (value == 0)) {
        p.word.push_back(cv.b(ci, 1));
        break;
      }
    }
  return p;
}

struct Assignment {
  std::vector<int> x, y;  // 1-based via index-1, values 0/1
};

inline Process assignment_process(const QsatFormula& f, const CounterView& cv,
                                  const Assignment& a) {
  Process p;
  for (int i = f.m; i >= 1; --i) {
    p = concat(p, clause_vector(f, cv, i, a.y[i - 1], LiteralKind::Y));
    p = concat(p, clause_vector(f, cv, i, a.x[i - 1], LiteralKind::X));
  }
  return p;
}

inline ReductionOutput reduce_qsat(const QsatFormula& f) {
  ReductionOutput out;
  const int n = f.n();
  out.n = n;
  BpaSystem& sys = out.sys;
  CounterView cv = add_counter(sys, n);

  const int m = f.m;
  std::vector<VarId> X(m + 2), Xp(m + 2), Y(m + 1), Yp(m + 1);
  std::vector<std::array<VarId, 3>> Yk(m + 1);
  for (int i = 1; i <= m + 1; ++i) {
    X[i] = sys.addVar("X" + std::to_string(i));
    Xp[i] = sys.addVar("Xp" + std::to_string(i));
    out.names.emplace_back("X" + std::to_string(i),
                           "X_" + std::to_string(i));
    out.names.emplace_back("Xp" + std::to_string(i),
                           "X'_" + std::to_string(i));
  }
  for (int i = 1; i <= m; ++i) {
    Y[i] = sys.addVar("Y" + std::to_string(i));
    Yp[i] = sys.addVar("Yp" + std::to_string(i));
    for (int k = 0; k < 3; ++k)
      Yk[i][k] =
          sys.addVar("Y" + std::to_string(i) + "__" + std::to_string(k + 1));
  }
  ActId c0 = sys.ensureAct("c0");
  ActId c1 = sys.ensureAct("c1");
  ActId e = sys.ensureAct("e");

  for (int i = 1; i <= m; ++i) {
    auto alpha0 = clause_vector(f, cv, i, 0, LiteralKind::X);
    auto alpha1 = clause_vector(f, cv, i, 1, LiteralKind::X);
    auto beta0 = clause_vector(f, cv, i, 0, LiteralKind::Y);
    auto beta1 = clause_vector(f, cv, i, 1, LiteralKind::Y);
    sys.addRule(X[i], c0, concat(Process::single(Y[i]), alpha0));    // 1
    sys.addRule(X[i], c1, concat(Process::single(Y[i]), alpha1));
    sys.addRule(Xp[i], c0, concat(Process::single(Yp[i]), alpha0));  // 2
    sys.addRule(Xp[i], c1, concat(Process::single(Yp[i]), alpha1));
    for (int k = 0; k < 3; ++k)                                      // 3
      sys.addRule(Y[i], e, Process::single(Yk[i][k]));
    sys.addRule(Yp[i], e, Process::single(Yk[i][1]));                // 4
    sys.addRule(Yp[i], e, Process::single(Yk[i][2]));
    sys.addRule(Yk[i][0], c0, concat(Process::single(X[i + 1]), beta0));  // 5
    sys.addRule(Yk[i][0], c1, concat(Process::single(X[i + 1]), beta1));
    sys.addRule(Yk[i][1], c0, concat(Process::single(Xp[i + 1]), beta0));  // 6
    sys.addRule(Yk[i][1], c1, concat(Process::single(X[i + 1]), beta1));
    sys.addRule(Yk[i][2], c0, concat(Process::single(X[i + 1]), beta0));  // 7
    sys.addRule(Yk[i][2], c1, concat(Process::single(Xp[i + 1]), beta1));
  }
  Process allOnes;                                                   // 8
  for (int i = 1; i <= n; ++i) allOnes.word.push_back(cv.z(i, 1));
  sys.addRule(X[m + 1], e, allOnes);
  sys.addRule(Xp[m + 1], e, Process::nil());

  out.left = Process::single(X[1]);
  out.right = Process::single(Xp[1]);
  return out;
}

// Reduction output as a .bpa file with the designated pair, the counter
// width and the naming table in a leading comment block.
inline std::string print_reduction(const ReductionOutput& out) {
  std::ostringstream os;
  os << "# left: " << print_process(out.sys, out.left) << "\n";
  os << "# right: " << print_process(out.sys, out.right) << "\n";
  os << "# n: " << out.n << "\n";
  for (auto& [flat, meaning] : out.names)
    os << "# name: " << flat << " = " << meaning << "\n";
  os << print_system(out.sys);
  return os.str();
}

}  // namespace bpa
