// bisim.hpp -- branching / weak bisimilarity on a finite closure.
//
// Branching mode refines the one-block partition by signatures with
// within-block silent stuttering; weak mode saturates silent steps into
// derived =l=> moves and then refines strongly. Both reach the coarsest
// stable partition, so verdicts do not depend on iteration order.
#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <variant>
#include <vector>

#include "bpa/lts.hpp"

namespace bpa {

enum class Mode { Branching, Weak };

inline const char* mode_name(Mode m) {
  return m == Mode::Branching ? "branching" : "weak";
}

struct Partition {
  std::vector<int> blockOf;
  int numBlocks = 0;

  bool sameBlock(StateId a, StateId b) const {
    return blockOf[a] == blockOf[b];
  }
};

// Per-state silent-reachability (reflexive-transitive, discovery order).
inline std::vector<std::vector<StateId>> tau_closure(const Lts& lts) {
  const StateId n = static_cast<StateId>(lts.size());
  std::vector<std::vector<StateId>> reach(n);
  std::vector<int> seen(n, -1);
  for (StateId s = 0; s < n; ++s) {
    std::deque<StateId> q{s};
    seen[s] = s;
    while (!q.empty()) {
      StateId u = q.front();
      q.pop_front();
      reach[s].push_back(u);
      for (auto& [act, v] : lts.out[u])
        if (lts.sys->silent(act) && seen[v] != s) {
          seen[v] = s;
          q.push_back(v);
        }
    }
  }
  return reach;
}

namespace detail {

using Sig = std::set<std::pair<ActId, int>>;

inline Partition group_by_signature(const Lts& lts,
                                    const std::vector<int>& oldBlk,
                                    const std::vector<Sig>& sigs) {
  Partition p;
  p.blockOf.assign(lts.size(), -1);
  std::map<std::pair<int, std::vector<std::pair<ActId, int>>>, int> key2blk;
  for (StateId s = 0; s < static_cast<StateId>(lts.size()); ++s) {
    std::vector<std::pair<ActId, int>> flat(sigs[s].begin(), sigs[s].end());
    auto key = std::make_pair(oldBlk[s], std::move(flat));
    auto it = key2blk.find(key);
    if (it == key2blk.end())
      it = key2blk.emplace(std::move(key), p.numBlocks++).first;
    p.blockOf[s] = it->second;
  }
  return p;
}

}  // namespace detail

inline Partition refine_branching(const Lts& lts) {
  const StateId n = static_cast<StateId>(lts.size());
  Partition cur;
  cur.blockOf.assign(n, 0);
  cur.numBlocks = n > 0 ? 1 : 0;
  for (;;) {
    std::vector<detail::Sig> sigs(n);
    for (StateId s = 0; s < n; ++s)
      for (auto& [act, t] : lts.out[s])
        if (!(lts.sys->silent(act) && cur.blockOf[t] == cur.blockOf[s]))
          sigs[s].insert({act, cur.blockOf[t]});
    // Propagate signatures backwards along within-block silent steps.
    std::vector<std::vector<StateId>> tauPred(n);
    for (StateId s = 0; s < n; ++s)
      for (auto& [act, t] : lts.out[s])
        if (lts.sys->silent(act) && cur.blockOf[t] == cur.blockOf[s] && t != s)
          tauPred[t].push_back(s);
    std::deque<StateId> work;
    std::vector<bool> inq(n, true);
    for (StateId s = 0; s < n; ++s) work.push_back(s);
    while (!work.empty()) {
      StateId t = work.front();
      work.pop_front();
      inq[t] = false;
      for (StateId s : tauPred[t]) {
        std::size_t before = sigs[s].size();
        sigs[s].insert(sigs[t].begin(), sigs[t].end());
        if (sigs[s].size() != before && !inq[s]) {
          inq[s] = true;
          work.push_back(s);
        }
      }
    }
    Partition next = detail::group_by_signature(lts, cur.blockOf, sigs);
    if (next.numBlocks == cur.numBlocks) return cur;
    cur = std::move(next);
  }
}

inline Partition refine_weak(const Lts& lts) {
  const StateId n = static_cast<StateId>(lts.size());
  auto reach = tau_closure(lts);
  // Saturated moves: s =a=> t for visible a, and s =tau=> t for s ==> t.
  std::vector<std::set<std::pair<ActId, StateId>>> sat(n);
  const ActId tau = lts.sys->tau();
  for (StateId s = 0; s < n; ++s) {
    for (StateId t : reach[s]) sat[s].insert({tau, t});
    for (StateId u : reach[s])
      for (auto& [act, v] : lts.out[u]) {
        if (lts.sys->silent(act)) continue;
        for (StateId t : reach[v]) sat[s].insert({act, t});
      }
  }
  Partition cur;
  cur.blockOf.assign(n, 0);
  cur.numBlocks = n > 0 ? 1 : 0;
  for (;;) {
    std::vector<detail::Sig> sigs(n);
    for (StateId s = 0; s < n; ++s)
      for (auto& [act, t] : sat[s]) sigs[s].insert({act, cur.blockOf[t]});
    Partition next = detail::group_by_signature(lts, cur.blockOf, sigs);
    if (next.numBlocks == cur.numBlocks) return cur;
    cur = std::move(next);
  }
}

inline Partition partition_refine(const Lts& lts, Mode mode) {
  return mode == Mode::Branching ? refine_branching(lts) : refine_weak(lts);
}

struct CapReport {
  int cap = 0;
  int statesExplored = 0;
};

// Decision outcome. Inequivalent carries the closure and stable partition
// it was decided on; an attacker strategy tree is materialized from these
// on demand (strategy.hpp).
class Verdict {
 public:
  enum class Kind { Equivalent, Inequivalent, Undecided };

  static Verdict equivalent() { return Verdict(Kind::Equivalent); }
  static Verdict undecided(CapReport r) {
    Verdict v(Kind::Undecided);
    v.cap_ = r;
    return v;
  }
  static Verdict inequivalent(std::shared_ptr<const Lts> lts, Partition part,
                              StateId left, StateId right, Mode mode) {
    Verdict v(Kind::Inequivalent);
    v.lts_ = std::move(lts);
    v.partition_ = std::move(part);
    v.left_ = left;
    v.right_ = right;
    v.mode_ = mode;
    return v;
  }

  Kind kind() const { return kind_; }
  bool isEquivalent() const { return kind_ == Kind::Equivalent; }
  bool isInequivalent() const { return kind_ == Kind::Inequivalent; }
  bool isUndecided() const { return kind_ == Kind::Undecided; }

  const CapReport& capReport() const { return cap_; }
  const Lts& lts() const { return *lts_; }
  std::shared_ptr<const Lts> ltsPtr() const { return lts_; }
  const Partition& partition() const { return partition_; }
  StateId left() const { return left_; }
  StateId right() const { return right_; }
  Mode mode() const { return mode_; }

  const char* name() const {
    switch (kind_) {
      case Kind::Equivalent: return "Equivalent";
      case Kind::Inequivalent: return "Inequivalent";
      case Kind::Undecided: return "Undecided";
    }
    return "?";
  }

 private:
  explicit Verdict(Kind k) : kind_(k) {}
  Kind kind_;
  CapReport cap_{};
  std::shared_ptr<const Lts> lts_;
  Partition partition_{};
  StateId left_ = -1, right_ = -1;
  Mode mode_ = Mode::Branching;
};

inline Verdict decide(const BpaSystem& sys, const Process& p,
                      const Process& q, Mode mode, int cap = kDefaultCap) {
  auto closure = build_closure(sys, {p, q}, cap);
  if (std::holds_alternative<CapExceeded>(closure)) {
    auto& ce = std::get<CapExceeded>(closure);
    return Verdict::undecided(CapReport{ce.cap, ce.statesExplored});
  }
  auto lts = std::make_shared<Lts>(std::move(std::get<Lts>(closure)));
  Partition part = partition_refine(*lts, mode);
  StateId sp = lts->stateOf(p), sq = lts->stateOf(q);
  if (part.sameBlock(sp, sq)) return Verdict::equivalent();
  return Verdict::inequivalent(std::move(lts), std::move(part), sp, sq, mode);
}

}  // namespace bpa
