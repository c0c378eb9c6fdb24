// regularity.hpp -- regularity checking through the weighted graph over
// (variable, redundant set) nodes.
//
// An edge (X,R) -> (Y,R') exists for every occurrence split body = s.Y.d
// of a rule of X, targeting R' = Rd(d . carrier of R); it costs 1 when d
// is not fully absorbed by R (then the pushed suffix keeps a positive
// relative branching norm) and 0 otherwise. A node on a positive-weight
// closed walk is growing; a process is not regular exactly when some
// (X_i, Rd of the suffix right of X_i) reaches a growing node, and the
// path plus one loop is a pumpable witness.
#pragma once

#include <array>
#include <map>
#include <sstream>

#include "bpa/redundancy.hpp"

namespace bpa {

struct RdGraph {
  struct Edge {
    int from, to;
    int weight;   // parallel edges merged by maximum
    int ruleIdx;  // witness occurrence for replay
    int occIdx;
  };
  const BpaSystem* sys = nullptr;
  std::vector<VarId> nodeVar;
  std::vector<RedundantSet> nodeSet;
  std::vector<Edge> edges;               // sorted by (from, to)
  std::vector<std::vector<int>> outOf;   // edge indices per node

  int nodeCount() const { return static_cast<int>(nodeVar.size()); }
  std::string nodeName(int v) const {
    return "(" + sys->varName(nodeVar[v]) + "," + nodeSet[v].str(*sys) + ")";
  }
};

struct WitnessPath {
  std::vector<int> nodes;      // visited nodes; nodes[repeatIndex] == nodes.back()
  std::vector<int> edges;      // edge indices into the graph, one per step
  int repeatIndex = 0;         // start of the pumped loop
  int position = 0;            // 1-based position in the checked word

  long long loopWeight(const RdGraph& g) const {
    long long w = 0;
    for (std::size_t i = repeatIndex; i < edges.size(); ++i)
      w += g.edges[edges[i]].weight;
    return w;
  }
};

enum class RegStatus { Regular, NotRegular, Undecided };

struct RegularityResult {
  RegStatus status = RegStatus::Undecided;
  std::optional<WitnessPath> witness;  // present for NotRegular
};

class RegularityEngine {
 public:
  explicit RegularityEngine(const BpaSystem& sys, int cap = kDefaultCap)
      : sys_(&sys), rd_(sys, cap) {
    auto norms = compute_norms(sys);
    if (!norms.allNormed())
      throw std::invalid_argument("regularity checking needs a normed system");
  }

  RdEngine& rd() { return rd_; }

  RdResult<const RdGraph*> graph() {
    if (graph_) return RdResult<const RdGraph*>::okOf(graph_.get());
    if (undecided_) return RdResult<const RdGraph*>::undecidedOf();
    if (!build()) {
      undecided_ = true;
      return RdResult<const RdGraph*>::undecidedOf();
    }
    return RdResult<const RdGraph*>::okOf(graph_.get());
  }

  // Growing nodes by the zero-weight basin procedure: B_v holds the nodes
  // reachable from v over weight-0 edges only; v grows iff v is reachable
  // again from the head of some weight-1 edge leaving B_v.
  RdResult<std::vector<int>> growingNodes() {
    auto g = graph();
    if (!g.ok()) return RdResult<std::vector<int>>::undecidedOf();
    ensureReach();
    const RdGraph& gr = *graph_;
    std::vector<int> out;
    for (int v = 0; v < gr.nodeCount(); ++v) {
      std::vector<char> inB(gr.nodeCount(), 0);
      std::deque<int> q{v};
      inB[v] = 1;
      bool grows = false;
      while (!q.empty() && !grows) {
        int u = q.front();
        q.pop_front();
        for (int ei : gr.outOf[u]) {
          const auto& e = gr.edges[ei];
          if (e.weight == 1) {
            if (reaches(e.to, v)) {
              grows = true;
              break;
            }
          } else if (!inB[e.to]) {
            inB[e.to] = 1;
            q.push_back(e.to);
          }
        }
      }
      if (grows) out.push_back(v);
    }
    return RdResult<std::vector<int>>::okOf(std::move(out));
  }

  // Growing nodes by the direct characterization: some weight-1 edge
  // (u,w) with v ->* u and w ->* v.
  RdResult<std::vector<int>> growingNodesByCycleEdge() {
    auto g = graph();
    if (!g.ok()) return RdResult<std::vector<int>>::undecidedOf();
    ensureReach();
    const RdGraph& gr = *graph_;
    std::vector<int> out;
    for (int v = 0; v < gr.nodeCount(); ++v) {
      bool grows = false;
      for (const auto& e : gr.edges) {
        if (e.weight != 1) continue;
        if (reaches(v, e.from) && reaches(e.to, v)) {
          grows = true;
          break;
        }
      }
      if (grows) out.push_back(v);
    }
    return RdResult<std::vector<int>>::okOf(std::move(out));
  }

  RegularityResult decideRegular(const Process& a) {
    RegularityResult res;
    if (a.empty()) {
      res.status = RegStatus::Regular;
      return res;
    }
    auto g = graph();
    if (!g.ok()) return res;  // undecided
    auto growing = growingNodes();
    auto growingAlt = growingNodesByCycleEdge();
    if (!growing.ok() || !growingAlt.ok()) return res;
    if (growing.value != growingAlt.value)
      throw std::logic_error("growing-node methods disagree");
    std::vector<char> isGrowing(graph_->nodeCount(), 0);
    for (int v : growing.value) isGrowing[v] = 1;

    // suffix sets right to left: position i carries Rd of the strict
    // suffix to its right
    const int k = static_cast<int>(a.size());
    auto rdNil = rd_.redundantSet(Process::nil());
    if (!rdNil.ok()) return res;
    std::vector<RedundantSet> suffix(k + 1);
    suffix[k] = rdNil.value;  // right of the last variable
    for (int i = k - 1; i >= 1; --i) {
      auto step = rd_.rdStep(a.word[i], suffix[i + 1]);
      if (!step.ok()) return res;
      suffix[i] = std::move(step.value);
    }
    for (int i = 1; i <= k; ++i) {
      int node = nodeIndex(a.word[i - 1], suffix[i]);
      bool hits = false;
      for (int v : growing.value)
        if (reaches(node, v)) {
          hits = true;
          break;
        }
      if (!hits) continue;
      res.status = RegStatus::NotRegular;
      res.witness = extractWitness(node, isGrowing);
      res.witness->position = i;
      return res;
    }
    res.status = RegStatus::Regular;
    return res;
  }

  // Replays the witness (path once, loop m times) into a concrete process
  // reachable from the word suffix the witness was issued for.
  Process replayWitness(const Process& word, const WitnessPath& w, int m) {
    Process cur{std::vector<VarId>(word.word.begin() + (w.position - 1),
                                   word.word.end())};
    auto apply = [&](int ei) {
      const auto& e = graph_->edges[ei];
      const Rule& r = sys_->rule(e.ruleIdx);
      if (cur.empty() || cur.head() != r.head)
        throw std::logic_error("witness replay mismatch");
      Process next;
      // sigma before the occurrence erases silently-or-not via norm
      // paths; only the reached process matters here
      next.word.insert(next.word.end(), r.body.word.begin() + e.occIdx,
                       r.body.word.end());
      next.word.insert(next.word.end(), cur.word.begin() + 1,
                       cur.word.end());
      cur = std::move(next);
    };
    for (int i = 0; i < w.repeatIndex; ++i) apply(w.edges[i]);
    for (int rep = 0; rep < m; ++rep)
      for (std::size_t i = w.repeatIndex; i < w.edges.size(); ++i)
        apply(w.edges[i]);
    return cur;
  }

  std::string renderWitness(const WitnessPath& w) const {
    std::ostringstream os;
    for (std::size_t i = 0; i < w.edges.size(); ++i) {
      const auto& e = graph_->edges[w.edges[i]];
      os << graph_->nodeName(e.from) << " -" << e.weight << "-> "
         << graph_->nodeName(e.to) << "\n";
    }
    os << "loop: " << w.repeatIndex << " -> " << w.edges.size() << "\n";
    return os.str();
  }

  std::string graphDot() {
    auto g = graph();
    if (!g.ok()) return "";
    std::ostringstream os;
    os << "digraph rdgraph {\n";
    for (int v = 0; v < graph_->nodeCount(); ++v)
      os << "  n" << v << " [label=\"" << graph_->nodeName(v) << "\"];\n";
    for (const auto& e : graph_->edges) {
      os << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.weight
         << "\"";
      if (e.weight == 1) os << ", color=red, penwidth=2";
      os << "];\n";
    }
    os << "}\n";
    return os.str();
  }

 private:
  int nodeIndex(VarId x, const RedundantSet& r) const {
    auto it = nodeIndex_.find(keyOf(x, r));
    if (it == nodeIndex_.end())
      throw std::logic_error("node missing from the redundancy graph");
    return it->second;
  }

  std::string keyOf(VarId x, const RedundantSet& r) const {
    std::string k = std::to_string(x) + "|";
    for (VarId v : r.vars) k += std::to_string(v) + ",";
    return k;
  }

  bool build() {
    auto tree = rd_.tree();
    if (!tree.ok()) return false;
    auto sets = rd_.realizableSets();
    // node order: variable order, then set bit mask
    std::sort(sets.begin(), sets.end(),
              [&](const RedundantSet& a, const RedundantSet& b) {
                return rd_.maskOf(a) < rd_.maskOf(b);
              });
    graph_ = std::make_unique<RdGraph>();
    RdGraph& g = *graph_;
    g.sys = sys_;
    for (VarId x = 0; x < static_cast<VarId>(sys_->numVars()); ++x)
      for (const auto& r : sets) {
        nodeIndex_[keyOf(x, r)] = g.nodeCount();
        g.nodeVar.push_back(x);
        g.nodeSet.push_back(r);
      }
    // one edge candidate per occurrence split of every rule body
    std::map<std::pair<int, int>, RdGraph::Edge> merged;
    for (int v = 0; v < g.nodeCount(); ++v) {
      VarId x = g.nodeVar[v];
      const RedundantSet& r = g.nodeSet[v];
      for (int ri : sys_->rulesOf(x)) {
        const Rule& rule = sys_->rule(ri);
        for (std::size_t occ = 0; occ < rule.body.size(); ++occ) {
          VarId y = rule.body.word[occ];
          Process delta{std::vector<VarId>(rule.body.word.begin() + occ + 1,
                                           rule.body.word.end())};
          int weight;
          RedundantSet target;
          if (r.containsAll(delta)) {
            weight = 0;
            target = r;
          } else {
            weight = 1;
            auto fold = rd_.rdFold(delta, r);
            if (!fold.ok()) return false;
            target = std::move(fold.value);
          }
          int to = nodeIndex(y, target);
          auto key = std::make_pair(v, to);
          auto it = merged.find(key);
          if (it == merged.end()) {
            merged.emplace(key, RdGraph::Edge{v, to, weight, ri,
                                              static_cast<int>(occ)});
          } else if (weight > it->second.weight) {
            it->second =
                RdGraph::Edge{v, to, weight, ri, static_cast<int>(occ)};
          }
        }
      }
    }
    g.outOf.assign(g.nodeCount(), {});
    for (auto& [key, e] : merged) {
      g.outOf[e.from].push_back(static_cast<int>(g.edges.size()));
      g.edges.push_back(e);
    }
    return true;
  }

  void ensureReach() {
    if (!reach_.empty()) return;
    const RdGraph& g = *graph_;
    const int n = g.nodeCount();
    words_ = (n + 63) / 64;
    reach_.assign(static_cast<std::size_t>(n) * words_, 0);
    for (int s = 0; s < n; ++s) {
      std::deque<int> q{s};
      setReach(s, s);
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int ei : g.outOf[u]) {
          int w = g.edges[ei].to;
          if (!reaches(s, w)) {
            setReach(s, w);
            q.push_back(w);
          }
        }
      }
    }
  }
  void setReach(int s, int t) {
    reach_[static_cast<std::size_t>(s) * words_ + t / 64] |= 1ull
                                                             << (t % 64);
  }
  bool reaches(int s, int t) const {
    return (reach_[static_cast<std::size_t>(s) * words_ + t / 64] >>
            (t % 64)) &
           1ull;
  }

  WitnessPath extractWitness(int start, const std::vector<char>& isGrowing) {
    const RdGraph& g = *graph_;
    const int n = g.nodeCount();
    // distance to the nearest growing node, over reversed edges
    std::vector<int> dist(n, -1);
    std::deque<int> q;
    std::vector<std::vector<std::pair<int, int>>> rev(n);  // (from, edge)
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei)
      rev[g.edges[ei].to].emplace_back(g.edges[ei].from,
                                       static_cast<int>(ei));
    for (int v = 0; v < n; ++v)
      if (isGrowing[v]) {
        dist[v] = 0;
        q.push_back(v);
      }
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (auto& [p, ei] : rev[u])
        if (dist[p] < 0) {
          dist[p] = dist[u] + 1;
          q.push_back(p);
        }
    }
    WitnessPath w;
    w.nodes.push_back(start);
    int cur = start;
    while (!isGrowing[cur]) {
      int bestEdge = -1;
      for (int ei : g.outOf[cur]) {
        int to = g.edges[ei].to;
        if (dist[to] == dist[cur] - 1 &&
            (bestEdge < 0 || to < g.edges[bestEdge].to))
          bestEdge = ei;
      }
      w.edges.push_back(bestEdge);
      cur = g.edges[bestEdge].to;
      w.nodes.push_back(cur);
    }
    w.repeatIndex = static_cast<int>(w.edges.size());
    // shortest positive cycle at cur, on the (node, saw-weight-1) product:
    // backward BFS from (gNode, 1) gives remaining distances, a greedy
    // forward walk from (gNode, 0) picks the least next node each step
    const int gNode = cur;
    std::vector<std::array<int, 2>> rem(n, {-1, -1});
    std::vector<std::vector<int>> inEdges(n);
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei)
      inEdges[g.edges[ei].to].push_back(static_cast<int>(ei));
    std::deque<std::pair<int, int>> cq;
    rem[gNode][1] = 0;
    cq.emplace_back(gNode, 1);
    while (!cq.empty()) {
      auto [v, flag] = cq.front();
      cq.pop_front();
      for (int ei : inEdges[v]) {
        const auto& e = g.edges[ei];
        // product edge (u, f) -> (v, f | weight); enumerate matching f
        for (int f : {0, 1}) {
          int fAfter = (f == 1 || e.weight == 1) ? 1 : 0;
          if (fAfter != flag || rem[e.from][f] >= 0) continue;
          rem[e.from][f] = rem[v][flag] + 1;
          cq.emplace_back(e.from, f);
        }
      }
    }
    int v = gNode, flag = 0;
    if (rem[v][flag] < 0)
      throw std::logic_error("growing node has no positive cycle");
    while (!(v == gNode && flag == 1)) {
      int bestEdge = -1, bestTo = -1, bestFlag = -1;
      for (int ei : g.outOf[v]) {
        const auto& e = g.edges[ei];
        int fAfter = (flag == 1 || e.weight == 1) ? 1 : 0;
        if (rem[e.to][fAfter] == rem[v][flag] - 1 &&
            (bestEdge < 0 || e.to < bestTo)) {
          bestEdge = ei;
          bestTo = e.to;
          bestFlag = fAfter;
        }
      }
      if (bestEdge < 0)
        throw std::logic_error("cycle reconstruction lost the distance");
      w.edges.push_back(bestEdge);
      v = g.edges[bestEdge].to;
      flag = bestFlag;
      w.nodes.push_back(v);
    }
    return w;
  }

  const BpaSystem* sys_;
  RdEngine rd_;
  std::unique_ptr<RdGraph> graph_;
  std::unordered_map<std::string, int> nodeIndex_;
  bool undecided_ = false;
  std::vector<std::uint64_t> reach_;
  int words_ = 0;
};

inline RegularityResult decide_regular(const BpaSystem& sys, const Process& a,
                                       int cap = kDefaultCap) {
  RegularityEngine eng(sys, cap);
  return eng.decideRegular(a);
}

}  // namespace bpa
