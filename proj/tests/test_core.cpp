#include <doctest.h>

#include <random>
#include <set>

#include "bpa/counter.hpp"
#include "bpa/system.hpp"
#include "bpa/text.hpp"

using namespace bpa;

namespace {

BpaSystem mustParse(const std::string& text) {
  auto r = parse_system(text);
  if (!r.ok()) FAIL(r.error().str());
  return r.take();
}

}  // namespace

TEST_CASE("parse minimal system") {
  auto sys = mustParse("vars: X\nacts: a\nX -a->\n");
  CHECK(sys.numVars() == 1);
  CHECK(sys.numActs() == 2);  // a plus the implicit tau
  REQUIRE(sys.rules().size() == 1);
  CHECK(sys.rules()[0].body.empty());
  CHECK(sys.actName(sys.rules()[0].act) == "a");
}

TEST_CASE("parse rejects undeclared variable with position") {
  auto r = parse_system("vars: X\nacts: a\nX -a-> Y\n");
  REQUIRE(!r.ok());
  CHECK(r.error().kind == ParseError::Kind::UndeclaredVariable);
  CHECK(r.error().line == 3);
  CHECK(r.error().col == 8);
}

TEST_CASE("parse rejects undeclared label and duplicates") {
  auto r = parse_system("vars: X\nacts: a\nX -b-> X\n");
  REQUIRE(!r.ok());
  CHECK(r.error().kind == ParseError::Kind::UndeclaredLabel);

  auto d = parse_system("vars: X X\nacts: a\n");
  REQUIRE(!d.ok());
  CHECK(d.error().kind == ParseError::Kind::DuplicateDeclaration);

  auto t = parse_system("vars: X\nacts: a tau tau\n");
  REQUIRE(!t.ok());
  CHECK(t.error().kind == ParseError::Kind::DuplicateDeclaration);
}

TEST_CASE("comments, blank lines, declared tau") {
  auto sys = mustParse(
      "# counter-ish\n\nvars: X Y\nacts: a tau\nX -tau-> Y  # silent\n"
      "Y -a->\n");
  CHECK(sys.numActs() == 2);
  CHECK(sys.silent(sys.rules()[0].act));
}

TEST_CASE("print then parse is identity on generated systems") {
  auto c = gen_counter(2);
  std::string text = print_system(c.sys);
  auto back = mustParse(text);
  CHECK(back == c.sys);
  CHECK(print_system(back) == text);
}

TEST_CASE("successors") {
  auto c = gen_counter(2);
  auto cv = c.view();

  SUBCASE("nil has none") {
    CHECK(successors(c.sys, Process::nil()).empty());
  }
  SUBCASE("B1_1 has self loop, pop, and two switches") {
    auto succ = successors(c.sys, Process::single(cv.b(1, 1)));
    REQUIRE(succ.size() == 4);
    std::set<std::pair<std::string, std::string>> got;
    for (auto& [act, p] : succ)
      got.insert({c.sys.actName(act), print_process(c.sys, p)});
    std::set<std::pair<std::string, std::string>> want = {
        {"a1_1", "B1_1"},
        {"d", "eps"},
        {"a2_0", "B1_1__2_0"},
        {"a2_1", "B1_1__2_1"}};
    CHECK(got == want);
  }
  SUBCASE("prefix rewriting keeps the tail") {
    auto sys = mustParse("vars: X Y\nacts: a b\nX -a->\nY -b->\n");
    Process xy{{*sys.findVar("X"), *sys.findVar("Y")}};
    auto succ = successors(sys, xy);
    REQUIRE(succ.size() == 1);
    CHECK(sys.actName(succ[0].first) == "a");
    CHECK(print_process(sys, succ[0].second) == "Y");
  }
}

TEST_CASE("prefix rewriting law on sampled words") {
  auto c = gen_counter(2);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> var(0, static_cast<int>(c.sys.numVars()) - 1);
  std::uniform_int_distribution<int> len(0, 3);
  auto randWord = [&] {
    Process p;
    int l = len(rng);
    for (int i = 0; i < l; ++i) p.word.push_back(var(rng));
    return p;
  };
  for (int trial = 0; trial < 40; ++trial) {
    Process a = randWord(), b = randWord();
    if (a.empty()) continue;
    auto lhs = successors(c.sys, concat(a, b));
    auto rhs = successors(c.sys, a);
    REQUIRE(lhs.size() == rhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      CHECK(lhs[i].first == rhs[i].first);
      CHECK(lhs[i].second == concat(rhs[i].second, b));
    }
  }
}

TEST_CASE("norms") {
  SUBCASE("counter norms") {
    auto c = gen_counter(2);
    auto cv = c.view();
    auto norms = compute_norms(c.sys);
    CHECK(norms.allNormed());
    for (int i = 1; i <= 2; ++i)
      for (int b = 0; b < 2; ++b) {
        CHECK(norms.norm(cv.z(i, b)) == 1);
        CHECK(norms.norm(cv.b(i, b)) == 1);
      }
    CHECK(norms.norm(cv.sw(1, 0, 2, 1)) == 2);
    CHECK(norms.norm(cv.sw(2, 1, 1, 0)) == 2);
  }
  SUBCASE("self loop only is unnormed") {
    auto sys = mustParse("vars: X\nacts: a\nX -a-> X\n");
    auto norms = compute_norms(sys);
    CHECK(!norms.normed(*sys.findVar("X")));
    CHECK(!norms.allNormed());
  }
  SUBCASE("word norm is additive") {
    auto c = gen_counter(2);
    auto cv = c.view();
    auto norms = compute_norms(c.sys);
    Process w{{cv.b(1, 0), cv.sw(2, 1, 1, 1), cv.z(2, 0)}};
    CHECK(norms.wordNorm(w) == 1 + 2 + 1);
  }
  SUBCASE("norm recursion: bound met by every rule, tight for some") {
    auto c = gen_counter(3);
    auto norms = compute_norms(c.sys);
    for (VarId v = 0; v < static_cast<VarId>(c.sys.numVars()); ++v) {
      bool tight = false;
      for (int ri : c.sys.rulesOf(v)) {
        long long sum = 1 + norms.wordNorm(c.sys.rule(ri).body);
        CHECK(norms.norm(v) <= sum);
        if (norms.norm(v) == sum) tight = true;
      }
      CHECK(tight);
    }
  }
}

TEST_CASE("erasing trace replays at exactly norm length") {
  auto c = gen_counter(2);
  auto norms = compute_norms(c.sys);
  for (VarId v = 0; v < static_cast<VarId>(c.sys.numVars()); ++v) {
    Process p = Process::single(v);
    auto trace = erase_trace(c.sys, norms, p);
    CHECK(static_cast<long long>(trace.size()) == norms.norm(v));
    // Each step must be a real transition of the previous process.
    Process cur = p;
    for (auto& [ri, next] : trace) {
      bool found = false;
      for (auto& [act, q] : successors(c.sys, cur))
        if (q == next && act == c.sys.rule(ri).act) found = true;
      CHECK(found);
      cur = next;
    }
    CHECK(cur.empty());
  }
}

TEST_CASE("silent erasable set") {
  SUBCASE("counter: exactly the Z family") {
    auto c = gen_counter(2);
    auto cv = c.view();
    auto mask = silent_erasable(c.sys);
    int count = 0;
    for (VarId v = 0; v < static_cast<VarId>(c.sys.numVars()); ++v)
      if (mask[v]) ++count;
    CHECK(count == 4);
    for (int i = 1; i <= 2; ++i)
      for (int b = 0; b < 2; ++b) CHECK(mask[cv.z(i, b)]);
  }
  SUBCASE("no tau rules means empty") {
    auto sys = mustParse("vars: X\nacts: a\nX -a->\n");
    auto mask = silent_erasable(sys);
    CHECK(!mask[0]);
  }
  SUBCASE("two step fixpoint") {
    auto sys = mustParse("vars: X Y\nacts: a tau\nX -tau-> Y\nY -tau->\n");
    auto mask = silent_erasable(sys);
    CHECK(mask[*sys.findVar("X")]);
    CHECK(mask[*sys.findVar("Y")]);
  }
}

TEST_CASE("system size") {
  SUBCASE("one rule") {
    auto sys = mustParse("vars: X\nacts: a\nX -a->\n");
    auto s = system_size(sys);
    CHECK(s.numVars == 1);
    CHECK(s.numLabels == 2);
    CHECK(s.rulesSize == 2);
    CHECK(s.total == 5);
  }
  SUBCASE("empty rule set") {
    auto sys = mustParse("vars: X\nacts: a\n");
    CHECK(system_size(sys).rulesSize == 0);
  }
  SUBCASE("counter variable count") {
    auto c = gen_counter(2);
    CHECK(system_size(c.sys).numVars == 16);
  }
}
