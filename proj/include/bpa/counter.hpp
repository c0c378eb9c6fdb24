// counter.hpp -- the n-bit binary counter fragment, valid encodings, the
// flip words gamma(k,i)/delta(k,i), and the Add gadget.
//
// Variable names: B<i>_<b>, Z<i>_<b>, and B<i>_<b>__<j>_<b'> for the
// switch family; actions a<i>_<b> and d. Gadget names carry a caller
// chosen tag: ADD<tag>_A, ADD<tag>_Ap, ADD<tag>_D, ADD<tag>_D<i>,
// ADD<tag>_C<i>, ADD<tag>_Cp<i>, with shared actions c and e.
#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bpa/system.hpp"

namespace bpa {

// Bits b_n..b_1 of an n-bit number; bit i contributes b_i * 2^(i-1).
struct BitWord {
  int n = 0;
  std::vector<int> bits;  // bits[i-1] = b_i

  static BitWord ofValue(long long value, int n) {
    if (value < 0 || (n < 63 && value >= (1ll << n)))
      throw std::out_of_range("value does not fit in the bit width");
    BitWord w;
    w.n = n;
    w.bits.assign(n, 0);
    for (int i = 1; i <= n; ++i) w.bits[i - 1] = (value >> (i - 1)) & 1;
    return w;
  }
  int bit(int i) const { return bits[i - 1]; }
  long long value() const {
    long long v = 0;
    for (int i = 1; i <= n; ++i)
      v += static_cast<long long>(bit(i)) << (i - 1);
    return v;
  }
  std::string str() const {  // printed high bit first
    std::string s;
    for (int i = n; i >= 1; --i) s += static_cast<char>('0' + bit(i));
    return s;
  }
  bool operator==(const BitWord& o) const { return n == o.n && bits == o.bits; }
};

namespace counter_names {
inline std::string b(int i, int bit) {
  return "B" + std::to_string(i) + "_" + std::to_string(bit);
}
inline std::string z(int i, int bit) {
  return "Z" + std::to_string(i) + "_" + std::to_string(bit);
}
inline std::string sw(int i, int bit, int j, int bit2) {
  return b(i, bit) + "__" + std::to_string(j) + "_" + std::to_string(bit2);
}
inline std::string a(int i, int bit) {
  return "a" + std::to_string(i) + "_" + std::to_string(bit);
}
}  // namespace counter_names

// Resolved ids of a counter fragment embedded in a system.
class CounterView {
 public:
  CounterView(const BpaSystem& sys, int n) : sys_(&sys), n_(n) {
    namespace cn = counter_names;
    b_.assign(2 * n, -1);
    z_.assign(2 * n, -1);
    a_.assign(2 * n, -1);
    for (int i = 1; i <= n; ++i)
      for (int bit = 0; bit < 2; ++bit) {
        b_[idx(i, bit)] = require(sys.findVar(cn::b(i, bit)), cn::b(i, bit));
        z_[idx(i, bit)] = require(sys.findVar(cn::z(i, bit)), cn::z(i, bit));
        a_[idx(i, bit)] =
            require(sys.findAct(cn::a(i, bit)), cn::a(i, bit));
      }
    d_ = require(sys.findAct("d"), "d");
  }

  const BpaSystem& sys() const { return *sys_; }
  int n() const { return n_; }
  VarId b(int i, int bit) const { return b_[idx(i, bit)]; }
  VarId z(int i, int bit) const { return z_[idx(i, bit)]; }
  VarId sw(int i, int bit, int j, int bit2) const {
    auto v = sys_->findVar(counter_names::sw(i, bit, j, bit2));
    return v ? *v : -1;
  }
  ActId a(int i, int bit) const { return a_[idx(i, bit)]; }
  ActId d() const { return d_; }

  // Bit position and value of a B-family variable, if it is one.
  std::optional<std::pair<int, int>> bitOf(VarId v) const {
    for (int i = 1; i <= n_; ++i)
      for (int bit = 0; bit < 2; ++bit)
        if (b_[idx(i, bit)] == v) return std::make_pair(i, bit);
    return std::nullopt;
  }
  std::optional<std::pair<int, int>> zBitOf(VarId v) const {
    for (int i = 1; i <= n_; ++i)
      for (int bit = 0; bit < 2; ++bit)
        if (z_[idx(i, bit)] == v) return std::make_pair(i, bit);
    return std::nullopt;
  }

  // The all-zero canonical stack B_n^0 ... B_1^0.
  Process zeroStack() const {
    Process p;
    for (int i = n_; i >= 1; --i) p.word.push_back(b(i, 0));
    return p;
  }
  // Canonical encoding B_n^{b_n} ... B_1^{b_1} of a bit word.
  Process canonicalEncoding(const BitWord& w) const {
    Process p;
    for (int i = n_; i >= 1; --i) p.word.push_back(b(i, w.bit(i)));
    return p;
  }

 private:
  static int require(std::optional<std::int32_t> v, const std::string& name) {
    if (!v) throw std::invalid_argument("missing counter item " + name);
    return *v;
  }
  int idx(int i, int bit) const { return (i - 1) * 2 + bit; }
  const BpaSystem* sys_;
  int n_;
  std::vector<VarId> b_, z_, a_;
  ActId d_;
};

// Declares the counter variables, actions and rules in `sys`. Rule order:
// Z rules, B rules, switch rules, indices ascending.
inline CounterView add_counter(BpaSystem& sys, int n) {
  namespace cn = counter_names;
  if (n < 1) throw std::out_of_range("counter width must be positive");
  for (int i = 1; i <= n; ++i)
    for (int bit = 0; bit < 2; ++bit) sys.addVar(cn::b(i, bit));
  for (int i = 1; i <= n; ++i)
    for (int bit = 0; bit < 2; ++bit) sys.addVar(cn::z(i, bit));
  for (int i = 1; i <= n; ++i)
    for (int bit = 0; bit < 2; ++bit)
      for (int j = 1; j <= n; ++j) {
        if (j == i) continue;
        for (int bit2 = 0; bit2 < 2; ++bit2)
          sys.addVar(cn::sw(i, bit, j, bit2));
      }
  sys.ensureAct("d");
  for (int i = 1; i <= n; ++i)
    for (int bit = 0; bit < 2; ++bit) sys.ensureAct(cn::a(i, bit));
  CounterView cv(sys, n);

  for (int i = 1; i <= n; ++i)
    for (int bit = 0; bit < 2; ++bit) {
      sys.addRule(cv.z(i, bit), cv.a(i, bit), Process::nil());
      sys.addRule(cv.z(i, bit), sys.tau(), Process::nil());
    }
  for (int i = 1; i <= n; ++i)
    for (int bit = 0; bit < 2; ++bit) {
      VarId B = cv.b(i, bit);
      sys.addRule(B, cv.a(i, bit), Process::single(B));
      sys.addRule(B, cv.d(), Process::nil());
      for (int j = 1; j <= n; ++j) {
        if (j == i) continue;
        for (int bit2 = 0; bit2 < 2; ++bit2)
          sys.addRule(B, cv.a(j, bit2),
                      Process::single(cv.sw(i, bit, j, bit2)));
      }
    }
  for (int i = 1; i <= n; ++i)
    for (int bit = 0; bit < 2; ++bit)
      for (int j = 1; j <= n; ++j) {
        if (j == i) continue;
        for (int bit2 = 0; bit2 < 2; ++bit2) {
          VarId S = cv.sw(i, bit, j, bit2);
          sys.addRule(S, cv.a(i, bit), Process::single(S));
          sys.addRule(S, cv.d(), Process::single(cv.z(j, bit2)));
          for (int j2 = 1; j2 <= n; ++j2) {
            if (j2 == i) continue;
            for (int bit3 = 0; bit3 < 2; ++bit3)
              sys.addRule(S, cv.a(j2, bit3),
                          Process::single(cv.sw(i, bit, j2, bit3)));
          }
        }
      }
  return cv;
}

struct Counter {
  BpaSystem sys;
  int n;
  CounterView view() const { return CounterView(sys, n); }
};

inline Counter gen_counter(int n) {
  Counter c;
  c.n = n;
  add_counter(c.sys, n);
  return c;
}

// A word is a valid encoding of w iff over the B family the first
// occurrence at each index i exists and carries bit b_i.
inline bool validate_encoding(const CounterView& cv, const Process& p,
                              const BitWord& w) {
  std::vector<int> firstBit(cv.n() + 1, -1);
  for (VarId v : p.word) {
    auto ib = cv.bitOf(v);
    if (!ib) return false;  // variables outside the B family
    if (firstBit[ib->first] < 0) firstBit[ib->first] = ib->second;
  }
  for (int i = 1; i <= cv.n(); ++i)
    if (firstBit[i] != w.bit(i)) return false;
  return true;
}

struct NotAnEncoding {
  std::vector<int> missingIndices;
};

inline std::variant<std::pair<BitWord, long long>, NotAnEncoding>
encoding_value(const CounterView& cv, const Process& p) {
  std::vector<int> firstBit(cv.n() + 1, -1);
  for (VarId v : p.word) {
    auto ib = cv.bitOf(v);
    if (!ib) return NotAnEncoding{};  // stray variable: not an encoding
    if (firstBit[ib->first] < 0) firstBit[ib->first] = ib->second;
  }
  NotAnEncoding missing;
  for (int i = 1; i <= cv.n(); ++i)
    if (firstBit[i] < 0) missing.missingIndices.push_back(i);
  if (!missing.missingIndices.empty()) return missing;
  BitWord w;
  w.n = cv.n();
  w.bits.assign(cv.n(), 0);
  for (int i = 1; i <= cv.n(); ++i) w.bits[i - 1] = firstBit[i];
  return std::make_pair(w, w.value());
}

// gamma(k,i): the bits tested when adding 2^k to a counter in class i;
// delta(k,i): the matching flip word. 0 <= k < n, 0 <= i <= n-k.
inline Process gamma_word(const CounterView& cv, int k, int i) {
  const int n = cv.n();
  if (k < 0 || k >= n || i < 0 || i > n - k)
    throw std::out_of_range("gamma(k,i) index out of range");
  Process p;
  if (i < n - k) {
    p.word.push_back(cv.z(k + i + 1, 0));
    for (int j = k + i; j >= k + 1; --j) p.word.push_back(cv.z(j, 1));
  } else {
    for (int j = n; j >= k + 1; --j) p.word.push_back(cv.z(j, 1));
  }
  return p;
}

inline Process delta_word(const CounterView& cv, int k, int i) {
  const int n = cv.n();
  if (k < 0 || k >= n || i < 0 || i > n - k)
    throw std::out_of_range("delta(k,i) index out of range");
  Process p;
  if (i < n - k) {
    p.word.push_back(cv.b(k + i + 1, 1));
    for (int j = k + i; j >= k + 1; --j) p.word.push_back(cv.b(j, 0));
  } else {
    for (int j = n; j >= k + 1; --j) p.word.push_back(cv.b(j, 0));
  }
  return p;
}

// Length of the run of 1-bits starting at position k+1.
inline int i_star(int k, const BitWord& w) {
  if (k < 0 || k >= w.n) throw std::out_of_range("i_star: bad k");
  int run = 0;
  for (int pos = k + 1; pos <= w.n; ++pos) {
    if (!w.bit(pos)) break;
    ++run;
  }
  return run;
}

// Continuations of one addition gadget; none of them may have an
// immediate silent action (checked by the reductions that build them).
struct AddTuple {
  int k = 0;
  Process N, Np, O, Op;
};

struct AddGadget {
  VarId A, Ap, D;
  std::vector<VarId> Di, Ci, Cpi;  // index 0 .. n-k
  ActId c, e;
};

inline AddGadget gen_add(BpaSystem& sys, const CounterView& cv,
                         const std::string& tag, const AddTuple& p) {
  const int n = cv.n();
  const int k = p.k;
  if (k < 0 || k >= n) throw std::out_of_range("add gadget: bad k");
  const int m = n - k;
  const std::string prefix = "ADD" + tag + "_";
  AddGadget g;
  g.A = sys.addVar(prefix + "A");
  g.Ap = sys.addVar(prefix + "Ap");
  g.D = sys.addVar(prefix + "D");
  for (int i = 0; i <= m; ++i)
    g.Di.push_back(sys.addVar(prefix + "D" + std::to_string(i)));
  for (int i = 0; i <= m; ++i)
    g.Ci.push_back(sys.addVar(prefix + "C" + std::to_string(i)));
  for (int i = 0; i <= m; ++i)
    g.Cpi.push_back(sys.addVar(prefix + "Cp" + std::to_string(i)));
  g.c = sys.ensureAct("c");
  g.e = sys.ensureAct("e");

  sys.addRule(g.A, g.c, Process::single(g.D));                    // A1
  for (int i = 0; i <= m; ++i)
    sys.addRule(g.A, g.c, Process::single(g.Di[i]));
  for (int i = 0; i <= m; ++i)                                    // A2
    sys.addRule(g.Ap, g.c, Process::single(g.Di[i]));
  for (int i = 0; i <= m; ++i)                                    // A3
    sys.addRule(g.D, g.c, Process::single(g.Ci[i]));
  for (int i = 0; i <= m; ++i) {                                  // A4
    sys.addRule(g.Di[i], g.c, Process::single(g.Cpi[i]));
    for (int j = 0; j <= m; ++j)
      if (j != i) sys.addRule(g.Di[i], g.c, Process::single(g.Ci[j]));
  }
  for (int i = 0; i <= m; ++i) {                                  // A5
    sys.addRule(g.Ci[i], g.c, gamma_word(cv, k, i));
    sys.addRule(g.Cpi[i], g.c, Process::nil());
  }
  for (int i = 0; i <= m - 1; ++i) {                              // A6
    sys.addRule(g.Ci[i], g.e, concat(p.N, delta_word(cv, k, i)));
    sys.addRule(g.Cpi[i], g.e, concat(p.Np, delta_word(cv, k, i)));
  }
  sys.addRule(g.Ci[m], g.e, p.O);                                 // A7
  sys.addRule(g.Cpi[m], g.e, p.Op);
  return g;
}

}  // namespace bpa
