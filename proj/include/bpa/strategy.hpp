// strategy.hpp -- attacker strategies for inequivalent pairs.
//
// Ranks come from the synchronous refinement of the all-pairs relation:
// round k+1 removes the pairs whose transfer condition fails against the
// round-k relation. A pair separated at round r admits an attacker move
// whose every defender reply lands at rank < r, which bounds strategy
// depth and guarantees finiteness.
#pragma once

#include <cstdint>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "bpa/bisim.hpp"

namespace bpa {

class RankTable {
 public:
  static constexpr std::size_t kStateLimit = 5000;

  RankTable(const Lts& lts, Mode mode) : lts_(&lts), mode_(mode) {
    n_ = lts.size();
    if (n_ > kStateLimit)
      throw std::length_error(
          "rank table limited to " + std::to_string(kStateLimit) +
          " states; closure has " + std::to_string(n_));
    rank_.assign(n_ * n_, 0);
    buildResponses();
    iterate();
  }

  // Round at which the pair was separated; 0 means never (equivalent).
  int rank(StateId s, StateId t) const { return rank_[s * n_ + t]; }
  bool relatedAt(StateId s, StateId t, int round) const {
    int r = rank(s, t);
    return r == 0 || r > round;
  }
  bool related(StateId s, StateId t) const { return rank(s, t) == 0; }
  int rounds() const { return rounds_; }
  Mode mode() const { return mode_; }
  const Lts& lts() const { return *lts_; }

  // Defender replies to a move with label `act` from state t, before the
  // act fires: branching replies expose the silent-prefix endpoint.
  struct BranchingReply {
    StateId mid;
    StateId post;
  };
  const std::vector<BranchingReply>& branchingReplies(StateId t,
                                                      ActId act) const {
    return brepl_[t * numActs() + act];
  }
  // Weak replies: the final state of some t ==> . -act-> . ==> t' run.
  const std::vector<StateId>& weakReplies(StateId t, ActId act) const {
    return wrepl_[t * numActs() + act];
  }

  // True when the single move (act, target s') from s is matched by t
  // under the relation of the given round.
  bool moveMatched(StateId s, ActId act, StateId sp, StateId t,
                   int round) const {
    if (lts_->sys->silent(act) && relatedAt(sp, t, round)) return true;
    if (mode_ == Mode::Branching) {
      for (const auto& r : branchingReplies(t, act))
        if (relatedAt(s, r.mid, round) && relatedAt(sp, r.post, round))
          return true;
    } else {
      for (StateId tp : weakReplies(t, act))
        if (relatedAt(sp, tp, round)) return true;
    }
    return false;
  }

 private:
  std::size_t numActs() const { return lts_->sys->numActs(); }

  void buildResponses() {
    auto reach = tau_closure(*lts_);
    const std::size_t na = numActs();
    if (mode_ == Mode::Branching) {
      brepl_.assign(n_ * na, {});
      for (StateId t = 0; t < static_cast<StateId>(n_); ++t)
        for (StateId mid : reach[t])
          for (auto& [act, post] : lts_->out[mid])
            brepl_[t * na + act].push_back(BranchingReply{mid, post});
    } else {
      wrepl_.assign(n_ * na, {});
      std::vector<char> seen(n_, 0);
      for (StateId t = 0; t < static_cast<StateId>(n_); ++t) {
        for (std::size_t a = 0; a < na; ++a) {
          std::fill(seen.begin(), seen.end(), 0);
          auto& dst = wrepl_[t * na + a];
          for (StateId u : reach[t])
            for (auto& [act, v] : lts_->out[u]) {
              if (static_cast<std::size_t>(act) != a) continue;
              for (StateId w : reach[v])
                if (!seen[w]) {
                  seen[w] = 1;
                  dst.push_back(w);
                }
            }
        }
      }
    }
  }

  bool pairSurvives(StateId s, StateId t, int round) const {
    for (auto& [act, sp] : lts_->out[s])
      if (!moveMatched(s, act, sp, t, round)) return false;
    for (auto& [act, tp] : lts_->out[t])
      if (!moveMatched(t, act, tp, s, round)) return false;
    return true;
  }

  void iterate() {
    int round = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      ++round;
      std::vector<std::pair<StateId, StateId>> removed;
      for (StateId s = 0; s < static_cast<StateId>(n_); ++s)
        for (StateId t = s; t < static_cast<StateId>(n_); ++t) {
          if (rank_[s * n_ + t] != 0) continue;
          if (!pairSurvives(s, t, round - 1)) removed.emplace_back(s, t);
        }
      for (auto& [s, t] : removed) {
        rank_[s * n_ + t] = static_cast<std::uint16_t>(round);
        rank_[t * n_ + s] = static_cast<std::uint16_t>(round);
        changed = true;
      }
    }
    rounds_ = round - 1;
  }

  const Lts* lts_;
  Mode mode_;
  std::size_t n_ = 0;
  int rounds_ = 0;
  std::vector<std::uint16_t> rank_;
  std::vector<std::vector<BranchingReply>> brepl_;
  std::vector<std::vector<StateId>> wrepl_;
};

// One attacker round: the chosen move, and per defender reply the chosen
// next configuration (with the follow-up subtree).
struct StrategyNode {
  StateId left, right;
  int rank;
  int side;     // 0: move played on left process, 1: on right
  ActId act;
  StateId moveTarget;

  enum class Reply { Empty, Response };
  enum class Choice { PostPair, MidPair };  // branching step-3 choice
  struct Edge {
    Reply reply;
    StateId mid = -1;   // branching only
    StateId post = -1;  // reply target
    Choice choice = Choice::PostPair;
    std::unique_ptr<StrategyNode> next;
  };
  std::vector<Edge> edges;  // empty means the defender is stuck

  bool defenderStuck() const { return edges.empty(); }
};

struct StrategyTree {
  std::shared_ptr<const Lts> lts;
  Mode mode;
  std::unique_ptr<StrategyNode> root;

  int depth() const { return depthOf(root.get()); }
  std::size_t nodeCount() const { return countOf(root.get()); }

 private:
  static int depthOf(const StrategyNode* n) {
    int d = 0;
    for (auto& e : n->edges)
      if (e.next) d = std::max(d, depthOf(e.next.get()));
    return d + 1;
  }
  static std::size_t countOf(const StrategyNode* n) {
    std::size_t c = 1;
    for (auto& e : n->edges)
      if (e.next) c += countOf(e.next.get());
    return c;
  }
};

struct NotDistinguishable {};

namespace detail {

inline std::unique_ptr<StrategyNode> build_strategy_node(const RankTable& rt,
                                                         StateId s,
                                                         StateId t) {
  const Lts& lts = rt.lts();
  auto node = std::make_unique<StrategyNode>();
  node->left = s;
  node->right = t;
  node->rank = rt.rank(s, t);
  const int r = node->rank;
  if (r <= 0) throw std::logic_error("strategy requested for related pair");

  // Lowest-index failing move: left side first, then right, moves in rule
  // order; the failure is against the relation one round earlier.
  int side = -1;
  ActId act = -1;
  StateId target = -1;
  for (int sd = 0; sd < 2 && side < 0; ++sd) {
    StateId from = sd == 0 ? s : t;
    StateId other = sd == 0 ? t : s;
    for (auto& [a, nxt] : lts.out[from])
      if (!rt.moveMatched(from, a, nxt, other, r - 1)) {
        side = sd;
        act = a;
        target = nxt;
        break;
      }
  }
  if (side < 0) throw std::logic_error("separated pair has no failing move");
  node->side = side;
  node->act = act;
  node->moveTarget = target;

  const StateId defender = side == 0 ? t : s;
  const StateId attackerStays = side == 0 ? s : t;
  auto addEdge = [&](StrategyNode::Edge e, StateId nl, StateId nr) {
    for (auto& prev : node->edges)
      if (prev.next && prev.next->left == nl && prev.next->right == nr)
        return;  // same next configuration already covered
    const int childRank = rt.rank(nl, nr);
    if (childRank <= 0 || childRank >= r)
      throw std::logic_error("strategy step does not decrease rank");
    e.next = build_strategy_node(rt, nl, nr);
    node->edges.push_back(std::move(e));
  };
  if (lts.sys->silent(act)) {
    // Empty response: the next configuration is forced.
    StrategyNode::Edge e;
    e.reply = StrategyNode::Reply::Empty;
    addEdge(std::move(e), side == 0 ? target : attackerStays,
            side == 0 ? defender : target);
  }
  if (rt.mode() == Mode::Branching) {
    for (const auto& br : rt.branchingReplies(defender, act)) {
      StrategyNode::Edge e;
      e.reply = StrategyNode::Reply::Response;
      e.mid = br.mid;
      e.post = br.post;
      if (!rt.relatedAt(target, br.post, r - 1)) {
        e.choice = StrategyNode::Choice::PostPair;
        addEdge(std::move(e), side == 0 ? target : br.post,
                side == 0 ? br.post : target);
      } else {
        e.choice = StrategyNode::Choice::MidPair;
        addEdge(std::move(e), side == 0 ? attackerStays : br.mid,
                side == 0 ? br.mid : attackerStays);
      }
    }
  } else {
    for (StateId post : rt.weakReplies(defender, act)) {
      StrategyNode::Edge e;
      e.reply = StrategyNode::Reply::Response;
      e.post = post;
      addEdge(std::move(e), side == 0 ? target : post,
              side == 0 ? post : target);
    }
  }
  return node;
}

inline void render_strategy(const Lts& lts, const StrategyNode* n, int indent,
                            std::ostringstream& os) {
  auto pad = [&](int k) {
    for (int i = 0; i < k; ++i) os << "  ";
  };
  auto proc = [&](StateId s) { return print_process(*lts.sys, lts.states[s]); };
  pad(indent);
  os << "config (" << proc(n->left) << ", " << proc(n->right) << ") rank "
     << n->rank << "\n";
  pad(indent);
  os << "attack " << (n->side == 0 ? "left" : "right") << " "
     << lts.sys->actName(n->act) << " -> " << proc(n->moveTarget) << "\n";
  if (n->defenderStuck()) {
    pad(indent);
    os << "defender stuck\n";
    return;
  }
  for (auto& e : n->edges) {
    pad(indent);
    if (e.reply == StrategyNode::Reply::Empty) {
      os << "reply empty\n";
    } else if (e.mid >= 0) {
      os << "reply via " << proc(e.mid) << " to " << proc(e.post) << ", take "
         << (e.choice == StrategyNode::Choice::PostPair ? "post" : "mid")
         << " pair\n";
    } else {
      os << "reply to " << proc(e.post) << "\n";
    }
    render_strategy(lts, e.next.get(), indent + 1, os);
  }
}

}  // namespace detail

inline std::variant<StrategyTree, NotDistinguishable>
extract_attacker_strategy(std::shared_ptr<const Lts> lts,
                          const Partition& partition, const Process& p,
                          const Process& q, Mode mode) {
  StateId sp = lts->stateOf(p), sq = lts->stateOf(q);
  if (sp < 0 || sq < 0)
    throw std::invalid_argument("process not contained in the closure");
  if (partition.sameBlock(sp, sq)) return NotDistinguishable{};
  RankTable rt(*lts, mode);
  if (rt.rank(sp, sq) == 0)
    throw std::logic_error("rank table disagrees with partition refinement");
  StrategyTree tree;
  tree.lts = std::move(lts);
  tree.mode = mode;
  tree.root = detail::build_strategy_node(rt, sp, sq);
  return tree;
}

inline std::variant<StrategyTree, NotDistinguishable>
attacker_strategy(const Verdict& v) {
  if (!v.isInequivalent()) return NotDistinguishable{};
  return extract_attacker_strategy(v.ltsPtr(), v.partition(),
                                   v.lts().states[v.left()],
                                   v.lts().states[v.right()], v.mode());
}

inline std::string render_strategy(const StrategyTree& tree) {
  std::ostringstream os;
  detail::render_strategy(*tree.lts, tree.root.get(), 0, os);
  return os.str();
}

}  // namespace bpa
