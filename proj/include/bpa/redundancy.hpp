// redundancy.hpp -- redundant sets Rd(a) = {X in V0 | X.a ~ a}, the
// one-step table rd_step(X, Rd(a)) = Rd(X.a), the representative tree,
// and (relative) branching norms.
//
// All results are memoized per engine; membership tests dominate the
// runtime, so one joint closure decides all candidates of a word at once.
// Representatives are shortest-first: the tree grows breadth first and
// the first process discovered with a given set stays its representative.
#pragma once

#include <cstdint>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "bpa/bisim.hpp"

namespace bpa {

// A redundant set, kept sorted by variable id.
struct RedundantSet {
  std::vector<VarId> vars;

  static RedundantSet of(std::vector<VarId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return RedundantSet{std::move(v)};
  }
  bool contains(VarId v) const {
    return std::binary_search(vars.begin(), vars.end(), v);
  }
  bool containsAll(const Process& p) const {
    for (VarId v : p.word)
      if (!contains(v)) return false;
    return true;
  }
  std::size_t size() const { return vars.size(); }
  bool empty() const { return vars.empty(); }
  bool operator==(const RedundantSet& o) const { return vars == o.vars; }
  bool operator!=(const RedundantSet& o) const { return vars != o.vars; }
  bool operator<(const RedundantSet& o) const { return vars < o.vars; }

  std::string str(const BpaSystem& sys) const {
    std::string s = "{";
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) s += ", ";
      s += sys.varName(vars[i]);
    }
    return s + "}";
  }
};

enum class RdStatus { Ok, Undecided, UnrealizableSet };

template <class T>
struct RdResult {
  RdStatus status = RdStatus::Ok;
  T value{};

  bool ok() const { return status == RdStatus::Ok; }
  bool undecided() const { return status == RdStatus::Undecided; }
  static RdResult okOf(T v) { return RdResult{RdStatus::Ok, std::move(v)}; }
  static RdResult undecidedOf() { return RdResult{RdStatus::Undecided, T{}}; }
  static RdResult unrealizable() {
    return RdResult{RdStatus::UnrealizableSet, T{}};
  }
};

struct RdTreeNode {
  Process process;
  RedundantSet set;
  int parent = -1;   // tree edge: process = via . parent process
  VarId via = -1;
  bool leaf = false;  // not expanded: the set already had a processed node
};

struct RdTree {
  std::vector<RdTreeNode> nodes;  // discovery order; root first
};

class RdEngine {
 public:
  explicit RdEngine(const BpaSystem& sys, int cap = kDefaultCap,
                    int treeNodeCap = 100000)
      : sys_(&sys), cap_(cap), treeNodeCap_(treeNodeCap) {
    v0_ = silent_erasable_list(sys);
    if (v0_.size() > 63)
      throw std::length_error("more than 63 silently erasable variables");
    for (std::size_t i = 0; i < v0_.size(); ++i) v0Index_[v0_[i]] = i;
    tauFree_ = true;
    for (const Rule& r : sys.rules())
      if (sys.silent(r.act)) tauFree_ = false;
    if (tauFree_) {
      norms_ = std::make_unique<NormTable>(compute_norms(sys));
      // the collapse of branching norm to plain norm needs normedness
      if (!norms_->allNormed()) tauFree_ = false;
    }
  }

  const BpaSystem& sys() const { return *sys_; }
  const std::vector<VarId>& v0() const { return v0_; }
  int cap() const { return cap_; }

  // Rd(a); Undecided when a membership closure hits the cap.
  RdResult<RedundantSet> redundantSet(const Process& a) {
    auto it = rdMemo_.find(a);
    if (it != rdMemo_.end()) return it->second;
    auto res = computeRd(a);
    rdMemo_.emplace(a, res);
    return res;
  }

  // Rd(X.a) for any a with Rd(a) = r, via the representative.
  RdResult<RedundantSet> rdStep(VarId x, const RedundantSet& r) {
    std::uint64_t key = (static_cast<std::uint64_t>(x) << 48) ^ maskOf(r);
    auto it = stepMemo_.find(key);
    if (it != stepMemo_.end()) return it->second;
    auto rep = representative(r);
    RdResult<RedundantSet> res;
    if (rep.status != RdStatus::Ok) {
      res.status = rep.status;
    } else {
      res = redundantSet(concat(Process::single(x), rep.value));
    }
    stepMemo_.emplace(key, res);
    return res;
  }

  // Folds rd_step over a word, rightmost variable first:
  // Rd(word . gamma_R) for any gamma_R with Rd(gamma_R) = r.
  RdResult<RedundantSet> rdFold(const Process& word, RedundantSet r) {
    for (auto it = word.word.rbegin(); it != word.word.rend(); ++it) {
      auto step = rdStep(*it, r);
      if (!step.ok()) return step;
      r = std::move(step.value);
    }
    return RdResult<RedundantSet>::okOf(std::move(r));
  }

  // The representative tree; cached after the first build.
  RdResult<const RdTree*> tree() {
    if (tree_) return RdResult<const RdTree*>::okOf(tree_.get());
    if (treeUndecided_) return RdResult<const RdTree*>::undecidedOf();
    auto built = buildTree();
    if (!built.ok()) {
      treeUndecided_ = true;
      return RdResult<const RdTree*>::undecidedOf();
    }
    return RdResult<const RdTree*>::okOf(tree_.get());
  }

  // First-discovered process carrying the set, per the tree order.
  RdResult<Process> representative(const RedundantSet& r) {
    auto t = tree();
    if (!t.ok()) return RdResult<Process>::undecidedOf();
    auto it = repOf_.find(maskOf(r));
    if (it == repOf_.end()) return RdResult<Process>::unrealizable();
    return RdResult<Process>::okOf(tree_->nodes[it->second].process);
  }

  bool realizable(const RedundantSet& r) {
    auto t = tree();
    return t.ok() && repOf_.count(maskOf(r)) > 0;
  }

  std::vector<RedundantSet> realizableSets() {
    auto t = tree();
    std::vector<RedundantSet> out;
    if (!t.ok()) return out;
    for (auto& [mask, idx] : repOf_) out.push_back(tree_->nodes[idx].set);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Branching norm of `a` relative to a suffix with redundant set `r`.
  RdResult<long long> branchingNorm(const Process& a, const RedundantSet& r) {
    auto rep = representative(r);
    if (rep.status != RdStatus::Ok)
      return RdResult<long long>{rep.status, 0};
    return branchingNorm(a, rep.value);
  }

  // One step of the witnessing reduction sequence: the process reached
  // and whether the step changed the equivalence class (those cost 1).
  struct NormStep {
    Process process;
    ActId act;
    bool counted;
  };

  // Branching norm of `a` relative to a concrete suffix process: the 0/1
  // weighted distance from a.suffix to the class of the suffix, where
  // silent class-preserving steps cost 0 and every other step costs 1.
  // `audit`, when given, receives a witnessing step sequence.
  RdResult<long long> branchingNorm(const Process& a, const Process& suffix,
                                    std::vector<NormStep>* audit = nullptr) {
    // With no silent rules every step costs 1, classes collapse to plain
    // equality of norms, and the distance is the word norm itself.
    if (tauFree_ && !audit) {
      long long n = norms_->wordNorm(a);
      if (n == kUnnormed) return RdResult<long long>::undecidedOf();
      return RdResult<long long>::okOf(n);
    }
    Process whole = concat(a, suffix);
    auto closure = build_closure(*sys_, {whole, suffix}, cap_);
    if (std::holds_alternative<CapExceeded>(closure))
      return RdResult<long long>::undecidedOf();
    const Lts lts = std::get<Lts>(std::move(closure));
    Partition part = refine_branching(lts);
    StateId src = lts.stateOf(whole);
    const int targetBlock = part.blockOf[lts.stateOf(suffix)];
    // 0/1 Dijkstra to the first state in the target class.
    std::deque<StateId> dq{src};
    std::vector<long long> dist(lts.size(), -1);
    std::vector<std::pair<StateId, ActId>> parent(lts.size(), {-1, -1});
    dist[src] = 0;
    while (!dq.empty()) {
      StateId u = dq.front();
      dq.pop_front();
      if (part.blockOf[u] == targetBlock) {
        if (audit) {
          audit->clear();
          for (StateId s = u; s != src; s = parent[s].first)
            audit->push_back(NormStep{
                lts.states[s], parent[s].second,
                !(sys_->silent(parent[s].second) &&
                  part.blockOf[s] == part.blockOf[parent[s].first])});
          std::reverse(audit->begin(), audit->end());
        }
        return RdResult<long long>::okOf(dist[u]);
      }
      for (auto& [act, v] : lts.out[u]) {
        long long w =
            (sys_->silent(act) && part.blockOf[v] == part.blockOf[u]) ? 0 : 1;
        if (dist[v] < 0 || dist[u] + w < dist[v]) {
          dist[v] = dist[u] + w;
          parent[v] = {u, act};
          if (w == 0)
            dq.push_front(v);
          else
            dq.push_back(v);
        }
      }
    }
    return RdResult<long long>::undecidedOf();  // no erasing path
  }

  // Branching norm of `a` itself (suffix nil).
  RdResult<long long> branchingNorm(const Process& a) {
    return branchingNorm(a, Process::nil());
  }

  std::string dumpTree() {
    auto t = tree();
    if (!t.ok()) return "undecided\n";
    std::ostringstream os;
    for (const auto& n : tree_->nodes)
      os << print_process(*sys_, n.process) << " | " << n.set.str(*sys_)
         << " | " << (n.leaf ? "leaf" : "processed") << "\n";
    return os.str();
  }

  // Bit mask of a set over the V0 index order; the canonical set order.
  std::uint64_t maskOf(const RedundantSet& r) const {
    std::uint64_t m = 0;
    for (VarId v : r.vars) {
      auto it = v0Index_.find(v);
      if (it == v0Index_.end())
        throw std::invalid_argument(
            "redundant set contains a variable outside V0");
      m |= 1ull << it->second;
    }
    return m;
  }

 private:

  RdResult<RedundantSet> computeRd(const Process& a) {
    std::vector<VarId> candidates;
    for (VarId x : v0_) {
      if (!a.empty() && quickReject(x, a.head())) continue;
      candidates.push_back(x);
    }
    if (candidates.empty())
      return RdResult<RedundantSet>::okOf(RedundantSet{});
    std::vector<Process> seeds{a};
    for (VarId x : candidates)
      seeds.push_back(concat(Process::single(x), a));
    auto closure = build_closure(*sys_, seeds, cap_);
    if (std::holds_alternative<CapExceeded>(closure))
      return RdResult<RedundantSet>::undecidedOf();
    const Lts lts = std::get<Lts>(std::move(closure));
    Partition part = refine_branching(lts);
    const int base = part.blockOf[lts.stateOf(a)];
    std::vector<VarId> in;
    for (VarId x : candidates)
      if (part.blockOf[lts.stateOf(concat(Process::single(x), a))] == base)
        in.push_back(x);
    return RdResult<RedundantSet>::okOf(RedundantSet::of(std::move(in)));
  }

  // Sound rejection without a closure: if the word's head has no silent
  // rule and the candidate has a visible action the head lacks, the
  // attacker pops the candidate with it and the defender is stuck.
  bool quickReject(VarId cand, VarId head) const {
    for (int ri : sys_->rulesOf(head))
      if (sys_->silent(sys_->rule(ri).act)) return false;
    for (int ri : sys_->rulesOf(cand)) {
      ActId act = sys_->rule(ri).act;
      if (sys_->silent(act)) continue;
      bool headHas = false;
      for (int hi : sys_->rulesOf(head))
        if (sys_->rule(hi).act == act) {
          headHas = true;
          break;
        }
      if (!headHas) return true;
    }
    return false;
  }

  RdResult<bool> buildTree() {
    auto root = redundantSet(Process::nil());
    if (!root.ok()) return RdResult<bool>::undecidedOf();
    tree_ = std::make_unique<RdTree>();
    repOf_.clear();
    std::unordered_map<std::uint64_t, bool> processedSet;
    tree_->nodes.push_back(
        RdTreeNode{Process::nil(), root.value, -1, -1, false});
    repOf_.emplace(maskOf(root.value), 0);
    std::deque<int> queue{0};
    while (!queue.empty()) {
      int ni = queue.front();
      queue.pop_front();
      std::uint64_t mask = maskOf(tree_->nodes[ni].set);
      // a set expanded once already makes later nodes with it leaves
      if (processedSet.count(mask)) {
        tree_->nodes[ni].leaf = true;
        continue;
      }
      processedSet.emplace(mask, true);
      const Process base = tree_->nodes[ni].process;
      for (VarId x = 0; x < static_cast<VarId>(sys_->numVars()); ++x) {
        auto childSet = rdStepForTree(x, base);
        if (!childSet.ok()) {
          tree_.reset();
          return RdResult<bool>::undecidedOf();
        }
        if (static_cast<int>(tree_->nodes.size()) >= treeNodeCap_) {
          tree_.reset();
          return RdResult<bool>::undecidedOf();
        }
        Process cp = concat(Process::single(x), base);
        std::uint64_t cm = maskOf(childSet.value);
        bool leafNow = processedSet.count(cm) > 0;
        tree_->nodes.push_back(
            RdTreeNode{std::move(cp), std::move(childSet.value), ni, x,
                       leafNow});
        int idx = static_cast<int>(tree_->nodes.size()) - 1;
        repOf_.try_emplace(cm, idx);
        if (!leafNow) queue.push_back(idx);
      }
    }
    return RdResult<bool>::okOf(true);
  }

  // During the build the step memo cannot rely on representative() (the
  // tree is incomplete), so children are computed from the node process
  // directly and recorded in the step memo afterwards.
  RdResult<RedundantSet> rdStepForTree(VarId x, const Process& base) {
    auto baseSet = redundantSet(base);
    if (!baseSet.ok()) return baseSet;
    std::uint64_t key =
        (static_cast<std::uint64_t>(x) << 48) ^ maskOf(baseSet.value);
    auto it = stepMemo_.find(key);
    if (it != stepMemo_.end()) return it->second;
    auto res = redundantSet(concat(Process::single(x), base));
    stepMemo_.emplace(key, res);
    return res;
  }

  const BpaSystem* sys_;
  int cap_;
  int treeNodeCap_;
  std::vector<VarId> v0_;
  std::unordered_map<VarId, std::size_t> v0Index_;
  bool tauFree_ = false;
  std::unique_ptr<NormTable> norms_;
  std::unordered_map<Process, RdResult<RedundantSet>, ProcessHash> rdMemo_;
  std::unordered_map<std::uint64_t, RdResult<RedundantSet>> stepMemo_;
  std::unique_ptr<RdTree> tree_;
  bool treeUndecided_ = false;
  std::unordered_map<std::uint64_t, int> repOf_;
};

}  // namespace bpa
