// lts.hpp -- finite restriction of the rewriting semantics: breadth-first
// closure of a seed set under successors, with a state cap.
#pragma once

#include <deque>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bpa/system.hpp"
#include "bpa/text.hpp"

namespace bpa {

using StateId = std::int32_t;

inline constexpr int kDefaultCap = 200000;

struct CapExceeded {
  int cap = 0;
  int statesExplored = 0;
};

// A transition-closed fragment: every contained state has all its
// successors contained.
struct Lts {
  const BpaSystem* sys = nullptr;
  std::vector<Process> states;                              // by discovery
  std::vector<std::vector<std::pair<ActId, StateId>>> out;  // rule order
  std::vector<StateId> seeds;
  std::unordered_map<Process, StateId, ProcessHash> index;

  StateId stateOf(const Process& p) const {
    auto it = index.find(p);
    return it == index.end() ? StateId{-1} : it->second;
  }
  std::size_t size() const { return states.size(); }
};

inline std::variant<Lts, CapExceeded> build_closure(
    const BpaSystem& sys, const std::vector<Process>& seedProcs,
    int cap = kDefaultCap) {
  Lts lts;
  lts.sys = &sys;
  std::deque<StateId> frontier;
  auto intern = [&](const Process& p) -> StateId {
    auto it = lts.index.find(p);
    if (it != lts.index.end()) return it->second;
    StateId id = static_cast<StateId>(lts.states.size());
    lts.states.push_back(p);
    lts.index.emplace(p, id);
    frontier.push_back(id);
    return id;
  };
  for (const Process& s : seedProcs) {
    if (static_cast<int>(lts.states.size()) >= cap && !lts.index.count(s))
      return CapExceeded{cap, static_cast<int>(lts.states.size())};
    StateId id = intern(s);
    if (std::find(lts.seeds.begin(), lts.seeds.end(), id) == lts.seeds.end())
      lts.seeds.push_back(id);
  }
  while (!frontier.empty()) {
    StateId s = frontier.front();
    frontier.pop_front();
    const Process p = lts.states[s];  // copy: states vector may reallocate
    auto succ = successors(sys, p);
    if (lts.out.size() <= static_cast<std::size_t>(s))
      lts.out.resize(s + 1);
    for (auto& [act, q] : succ) {
      auto it = lts.index.find(q);
      StateId t;
      if (it != lts.index.end()) {
        t = it->second;
      } else {
        if (static_cast<int>(lts.states.size()) >= cap)
          return CapExceeded{cap, static_cast<int>(lts.states.size())};
        t = intern(q);
      }
      lts.out[s].emplace_back(act, t);
    }
  }
  lts.out.resize(lts.states.size());
  return lts;
}

inline std::string lts_to_dot(const Lts& lts) {
  std::ostringstream os;
  os << "digraph lts {\n  rankdir=LR;\n";
  for (StateId s = 0; s < static_cast<StateId>(lts.size()); ++s) {
    os << "  n" << s << " [label=\"" << print_process(*lts.sys, lts.states[s])
       << "\"";
    if (std::find(lts.seeds.begin(), lts.seeds.end(), s) != lts.seeds.end())
      os << ", shape=box";
    os << "];\n";
  }
  for (StateId s = 0; s < static_cast<StateId>(lts.size()); ++s)
    for (auto& [act, t] : lts.out[s])
      os << "  n" << s << " -> n" << t << " [label=\""
         << lts.sys->actName(act) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace bpa
