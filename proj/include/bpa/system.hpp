// system.hpp -- BPA systems: variables, actions, rewrite rules, operational
// semantics, norms, and the silently-erasable variable set.
#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bpa {

using VarId = std::int32_t;
using ActId = std::int32_t;

// A process is a finite word of variables; the leftmost variable is the
// active one. The empty word is the nil process.
struct Process {
  std::vector<VarId> word;

  Process() = default;
  explicit Process(std::vector<VarId> w) : word(std::move(w)) {}

  static Process nil() { return Process{}; }
  static Process single(VarId v) { return Process{{v}}; }

  bool empty() const { return word.empty(); }
  std::size_t size() const { return word.size(); }
  VarId head() const { return word.front(); }

  Process tail() const {
    return Process{std::vector<VarId>(word.begin() + 1, word.end())};
  }

  friend Process concat(const Process& a, const Process& b) {
    Process r;
    r.word.reserve(a.word.size() + b.word.size());
    r.word.insert(r.word.end(), a.word.begin(), a.word.end());
    r.word.insert(r.word.end(), b.word.begin(), b.word.end());
    return r;
  }

  bool operator==(const Process& o) const { return word == o.word; }
  bool operator!=(const Process& o) const { return word != o.word; }
  bool operator<(const Process& o) const { return word < o.word; }
};

struct ProcessHash {
  std::size_t operator()(const Process& p) const {
    std::size_t h = 1469598103934665603ull;
    for (VarId v : p.word) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct LabelInfo {
  std::string name;
  bool silent = false;
};

struct Rule {
  VarId head;
  ActId act;
  Process body;
};

// The canonical name of the one silent action.
inline constexpr const char* kTauName = "tau";

// A BPA system. Variables and actions keep their declaration order; the
// silent action is always present.
class BpaSystem {
 public:
  BpaSystem() { tau_ = addActInternal(kTauName, true); }

  VarId addVar(const std::string& name) {
    if (varIndex_.find(name) != varIndex_.end())
      throw std::invalid_argument("duplicate variable '" + name + "'");
    VarId id = static_cast<VarId>(vars_.size());
    vars_.push_back(name);
    varIndex_.emplace(name, id);
    rulesOf_.emplace_back();
    return id;
  }

  // Adding "tau" again is a no-op returning the existing id.
  ActId addAct(const std::string& name) {
    auto it = actIndex_.find(name);
    if (it != actIndex_.end()) {
      if (name != kTauName)
        throw std::invalid_argument("duplicate action '" + name + "'");
      return it->second;
    }
    return addActInternal(name, name == kTauName);
  }

  // Declares the action unless it already exists (for shared actions).
  ActId ensureAct(const std::string& name) {
    auto it = actIndex_.find(name);
    if (it != actIndex_.end()) return it->second;
    return addActInternal(name, name == kTauName);
  }

  void addRule(VarId head, ActId act, Process body) {
    assert(head >= 0 && head < static_cast<VarId>(vars_.size()));
    assert(act >= 0 && act < static_cast<ActId>(acts_.size()));
    rulesOf_[head].push_back(static_cast<int>(rules_.size()));
    rules_.push_back(Rule{head, act, std::move(body)});
  }

  std::optional<VarId> findVar(const std::string& name) const {
    auto it = varIndex_.find(name);
    if (it == varIndex_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<ActId> findAct(const std::string& name) const {
    auto it = actIndex_.find(name);
    if (it == actIndex_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t numVars() const { return vars_.size(); }
  std::size_t numActs() const { return acts_.size(); }
  const std::string& varName(VarId v) const { return vars_[v]; }
  const LabelInfo& label(ActId a) const { return acts_[a]; }
  const std::string& actName(ActId a) const { return acts_[a].name; }
  bool silent(ActId a) const { return acts_[a].silent; }
  ActId tau() const { return tau_; }

  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<int>& rulesOf(VarId v) const { return rulesOf_[v]; }
  const Rule& rule(int i) const { return rules_[i]; }

  bool wellFormed(const Process& p) const {
    for (VarId v : p.word)
      if (v < 0 || v >= static_cast<VarId>(vars_.size())) return false;
    return true;
  }

  // Structural equality on the canonical form: declaration sets plus the
  // rule sequence, compared by name.
  bool operator==(const BpaSystem& o) const {
    auto sorted = [](std::vector<std::string> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    std::vector<std::string> an, bn;
    for (const auto& l : acts_) an.push_back(l.name);
    for (const auto& l : o.acts_) bn.push_back(l.name);
    if (sorted(vars_) != sorted(o.vars_) || sorted(an) != sorted(bn))
      return false;
    if (rules_.size() != o.rules_.size()) return false;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const Rule& r = rules_[i];
      const Rule& s = o.rules_[i];
      if (varName(r.head) != o.varName(s.head)) return false;
      if (actName(r.act) != o.actName(s.act)) return false;
      if (r.body.size() != s.body.size()) return false;
      for (std::size_t j = 0; j < r.body.size(); ++j)
        if (varName(r.body.word[j]) != o.varName(s.body.word[j]))
          return false;
    }
    return true;
  }
  bool operator!=(const BpaSystem& o) const { return !(*this == o); }

 private:
  ActId addActInternal(const std::string& name, bool silent) {
    ActId id = static_cast<ActId>(acts_.size());
    acts_.push_back(LabelInfo{name, silent});
    actIndex_.emplace(name, id);
    return id;
  }

  std::vector<std::string> vars_;
  std::vector<LabelInfo> acts_;
  std::vector<Rule> rules_;
  std::vector<std::vector<int>> rulesOf_;
  std::unordered_map<std::string, VarId> varIndex_;
  std::unordered_map<std::string, ActId> actIndex_;
  ActId tau_;
};

// One-step successors under prefix rewriting: p = X.rest rewrites by every
// rule of X; nil has none.
inline std::vector<std::pair<ActId, Process>> successors(
    const BpaSystem& sys, const Process& p) {
  std::vector<std::pair<ActId, Process>> out;
  if (p.empty()) return out;
  const Process rest = p.tail();
  for (int ri : sys.rulesOf(p.head())) {
    const Rule& r = sys.rule(ri);
    out.emplace_back(r.act, concat(r.body, rest));
  }
  return out;
}

inline constexpr long long kUnnormed = -1;

// Norms: least fixpoint of ||X|| = 1 + min over rules X -l-> a of the body
// norm sum. A variable with no finite value is unnormed.
class NormTable {
 public:
  explicit NormTable(std::vector<long long> norms, std::vector<int> bestRule)
      : norms_(std::move(norms)), bestRule_(std::move(bestRule)) {}

  bool normed(VarId v) const { return norms_[v] != kUnnormed; }
  long long norm(VarId v) const { return norms_[v]; }
  bool allNormed() const {
    return std::all_of(norms_.begin(), norms_.end(),
                       [](long long n) { return n != kUnnormed; });
  }
  // Norm of a word: sum of member norms, or unnormed if any member is.
  long long wordNorm(const Process& p) const {
    long long sum = 0;
    for (VarId v : p.word) {
      if (!normed(v)) return kUnnormed;
      sum += norms_[v];
    }
    return sum;
  }
  // Index of a norm-realizing rule for v, or -1.
  int bestRule(VarId v) const { return bestRule_[v]; }

 private:
  std::vector<long long> norms_;
  std::vector<int> bestRule_;
};

inline NormTable compute_norms(const BpaSystem& sys) {
  const std::size_t n = sys.numVars();
  std::vector<long long> norm(n, kUnnormed);
  std::vector<int> best(n, -1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t ri = 0; ri < sys.rules().size(); ++ri) {
      const Rule& r = sys.rule(static_cast<int>(ri));
      long long sum = 1;
      bool ok = true;
      for (VarId v : r.body.word) {
        if (norm[v] == kUnnormed) {
          ok = false;
          break;
        }
        sum += norm[v];
      }
      if (!ok) continue;
      if (norm[r.head] == kUnnormed || sum < norm[r.head]) {
        norm[r.head] = sum;
        best[r.head] = static_cast<int>(ri);
        changed = true;
      }
    }
  }
  return NormTable(std::move(norm), std::move(best));
}

// The set of variables that can reach nil via internal actions alone:
// least fixpoint of X in V0 iff some rule X -tau-> a with Var(a) in V0.
inline std::vector<bool> silent_erasable(const BpaSystem& sys) {
  std::vector<bool> in(sys.numVars(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : sys.rules()) {
      if (!sys.silent(r.act) || in[r.head]) continue;
      bool ok = true;
      for (VarId v : r.body.word)
        if (!in[v]) {
          ok = false;
          break;
        }
      if (ok) {
        in[r.head] = true;
        changed = true;
      }
    }
  }
  return in;
}

inline std::vector<VarId> silent_erasable_list(const BpaSystem& sys) {
  std::vector<VarId> out;
  auto mask = silent_erasable(sys);
  for (VarId v = 0; v < static_cast<VarId>(sys.numVars()); ++v)
    if (mask[v]) out.push_back(v);
  return out;
}

struct SystemSize {
  std::size_t numVars;
  std::size_t numLabels;
  std::size_t rulesSize;  // sum of |body| + 2 over rules
  std::size_t total;
};

inline SystemSize system_size(const BpaSystem& sys) {
  SystemSize s{sys.numVars(), sys.numActs(), 0, 0};
  for (const Rule& r : sys.rules()) s.rulesSize += r.body.size() + 2;
  s.total = s.numVars + s.numLabels + s.rulesSize;
  return s;
}

// A shortest erasing trace for a normed word: exactly wordNorm(p) steps,
// each a (rule index, resulting process) pair.
inline std::vector<std::pair<int, Process>> erase_trace(
    const BpaSystem& sys, const NormTable& norms, const Process& p) {
  std::vector<std::pair<int, Process>> trace;
  Process cur = p;
  while (!cur.empty()) {
    int ri = norms.bestRule(cur.head());
    assert(ri >= 0 && "erase_trace requires a normed word");
    const Rule& r = sys.rule(ri);
    cur = concat(r.body, cur.tail());
    trace.emplace_back(ri, cur);
  }
  return trace;
}

}  // namespace bpa
