// oracles.hpp -- independent ground truth: the Hit-or-Run winner by
// attractor computation on the finite saturated arena, QSAT truth by
// quantifier recursion, and a one-sided regularity check from finite
// closures.
#pragma once

#include <deque>

#include "bpa/lts.hpp"
#include "bpa/reductions.hpp"

namespace bpa {

enum class HorWinner { Player0, Player1 };

// The arena saturates the counter at 2^n (one overflow bucket): past that
// point only reaching or avoiding the final state matters. Player 1 wins
// exactly by attracting the play into a wrong final configuration, so
// Player 0 wins from every node outside that attractor, including all
// infinite plays.
inline HorWinner solve_hor(const HorGame& g) {
  const int n = counter_width(g.finalValue);
  const long long width = (1ll << n) + 1;  // values 0..2^n-1 plus overflow
  const long long overflow = width - 1;
  const int numStates = static_cast<int>(g.stateNames.size());
  const long long numNodes = (numStates + 1) * width;
  auto nodeOf = [&](int state, long long value) {
    int slot = state == kHorFinal ? numStates : state;
    return slot * width + value;
  };
  auto saturate = [&](long long v) { return v >= overflow ? overflow : v; };

  std::vector<std::vector<long long>> pred(numNodes);
  std::vector<int> outdeg(numNodes, 0);
  for (int s = 0; s < numStates; ++s)
    for (long long v = 0; v < width; ++v) {
      long long from = nodeOf(s, v);
      for (const auto& t : g.transitions) {
        if (t.from != s) continue;
        long long to = nodeOf(t.to, saturate(v + t.label));
        pred[to].push_back(from);
        ++outdeg[from];
      }
    }

  std::vector<char> attr(numNodes, 0);
  std::deque<long long> queue;
  for (long long v = 0; v < width; ++v)
    if (v != g.finalValue) {
      long long node = nodeOf(kHorFinal, v);
      attr[node] = 1;
      queue.push_back(node);
    }
  std::vector<int> remaining = outdeg;
  while (!queue.empty()) {
    long long node = queue.front();
    queue.pop_front();
    for (long long p : pred[node]) {
      if (attr[p]) continue;
      int state = static_cast<int>(p / width);
      bool player1 = state < numStates && g.ownedByPlayer1[state];
      if (player1) {
        attr[p] = 1;
        queue.push_back(p);
      } else if (--remaining[p] == 0) {
        attr[p] = 1;
        queue.push_back(p);
      }
    }
  }
  return attr[nodeOf(g.init, 0)] ? HorWinner::Player1 : HorWinner::Player0;
}

namespace detail {

inline bool clause_satisfied(const std::vector<QsatLiteral>& clause,
                             const Assignment& a) {
  for (const QsatLiteral& lit : clause) {
    int v = lit.isY ? a.y[lit.index - 1] : a.x[lit.index - 1];
    if ((v == 1) != lit.negated) return true;
  }
  return false;
}

inline bool matrix_satisfied(const QsatFormula& f, const Assignment& a) {
  for (const auto& clause : f.clauses)
    if (!clause_satisfied(clause, a)) return false;
  return true;
}

inline bool eval_qsat_from(const QsatFormula& f, int i, Assignment& a) {
  if (i > f.m) return matrix_satisfied(f, a);
  for (int bx = 0; bx < 2; ++bx) {
    a.x[i - 1] = bx;
    bool existsGood = false;
    for (int by = 0; by < 2 && !existsGood; ++by) {
      a.y[i - 1] = by;
      if (eval_qsat_from(f, i + 1, a)) existsGood = true;
    }
    if (!existsGood) return false;
  }
  return true;
}

}  // namespace detail

// forall x_i exists y_i alternation over the clause matrix.
inline bool eval_qsat(const QsatFormula& f) {
  Assignment a;
  a.x.assign(f.m, 0);
  a.y.assign(f.m, 0);
  return detail::eval_qsat_from(f, 1, a);
}

enum class ClosureRegularity { Regular, Unknown };

// A finite reachable set makes the process trivially regular; a blown cap
// proves nothing.
inline ClosureRegularity finite_closure_regular(const BpaSystem& sys,
                                                const Process& a,
                                                int cap = kDefaultCap) {
  auto r = build_closure(sys, {a}, cap);
  return std::holds_alternative<Lts>(r) ? ClosureRegularity::Regular
                                        : ClosureRegularity::Unknown;
}

}  // namespace bpa
