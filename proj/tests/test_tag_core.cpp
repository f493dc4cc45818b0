#include <algorithm>
#include <string>

#include "doctest.h"
#include "oracle_tag.hpp"
#include "tmbench/errors.hpp"
#include "tmbench/rng.hpp"
#include "tmbench/tag_engine.hpp"
#include "tmbench/tag_system.hpp"

using namespace tmbench;

namespace {

TagSystem make_system(int m, std::vector<Symbol> alpha,
                      std::vector<std::vector<Symbol>> prods) {
  TagSystem sys;
  sys.m = m;
  sys.alphabet = std::move(alpha);
  for (std::size_t i = 0; i < sys.alphabet.size(); ++i) sys.rules[sys.alphabet[i]] = prods[i];
  return sys;
}

Queue q_of(const std::string& spaced) {
  Queue q;
  std::size_t i = 0;
  while (i < spaced.size()) {
    while (i < spaced.size() && spaced[i] == ' ') ++i;
    std::size_t b = i;
    while (i < spaced.size() && spaced[i] != ' ') ++i;
    if (i > b) q.push_back(spaced.substr(b, i - b));
  }
  return q;
}

TagSystem roman_table1() {
  return make_system(2, {"A", "B", "C", "D", "E"},
                     {q_of("E D A B C"), q_of("D"), q_of("E E E D D"), q_of("B C"), q_of("D")});
}

TagSystem numeral_table1() {
  return make_system(2, {"1", "2", "3", "4", "5"},
                     {q_of("5 5 2"), q_of("4 2 5 1 3"), q_of("4 3 1"), q_of("3 4"), q_of("3")});
}

TagSystem special_table1() {
  return make_system(2, {"@", "#", "$", "%", "&"},
                     {q_of("% $ # $"), q_of("&"), q_of("&"), q_of("# # % %"), q_of("% # & $")});
}

// Random system/init sampler for the oracle fuzz; independent of the
// generator module on purpose.
struct Fuzzed {
  TagSystem sys;
  Queue init;
};

Fuzzed fuzz_case(SplitMix64& rng) {
  static const std::vector<Symbol> pool = {"A", "B",  "C",   "D",    "sym4",
                                           "e", "ff", "g_7", "hhhh", "i"};
  Fuzzed f;
  f.sys.m = static_cast<int>(rng.range(1, 4));
  std::size_t n = rng.range(1, 8);
  for (std::size_t i = 0; i < n; ++i) f.sys.alphabet.push_back(pool[i]);
  for (const Symbol& s : f.sys.alphabet) {
    std::vector<Symbol> prod;
    std::size_t len = rng.below(7);
    for (std::size_t j = 0; j < len; ++j)
      prod.push_back(f.sys.alphabet[rng.below(n)]);
    f.sys.rules[s] = std::move(prod);
  }
  std::size_t ilen = rng.below(13);
  for (std::size_t j = 0; j < ilen; ++j) f.init.push_back(f.sys.alphabet[rng.below(n)]);
  return f;
}

}  // namespace

TEST_CASE("queue rendering") {
  CHECK(queue_to_string(q_of("B A E E C")) == "[B A E E C]");
  CHECK(queue_to_string({}) == "[]");
  CHECK(queue_to_string({"x"}) == "[x]");
}

TEST_CASE("symbol text validity") {
  CHECK(valid_symbol_text("A"));
  CHECK(valid_symbol_text("alpha_Q0~"));
  CHECK(valid_symbol_text("@"));
  CHECK_FALSE(valid_symbol_text(""));
  CHECK_FALSE(valid_symbol_text("a b"));
  CHECK_FALSE(valid_symbol_text("x["));
  CHECK_FALSE(valid_symbol_text("]"));
  CHECK_FALSE(valid_symbol_text("a,b"));
  CHECK_FALSE(valid_symbol_text("a\tb"));
  CHECK_FALSE(valid_symbol_text("a\n"));
}

TEST_CASE("validate_system reports violations as data") {
  TagSystem ok = roman_table1();
  CHECK(validate_system(ok).ok());

  TagSystem bad = ok;
  bad.m = 0;
  CHECK_FALSE(validate_system(bad).ok());

  bad = ok;
  bad.alphabet.push_back("A");  // duplicate
  bad.rules["A"] = {"A"};
  CHECK_FALSE(validate_system(bad).ok());

  bad = ok;
  bad.rules.erase("C");  // not total
  CHECK_FALSE(validate_system(bad).ok());

  bad = ok;
  bad.rules["B"] = {"Z"};  // production leaves the alphabet
  CHECK_FALSE(validate_system(bad).ok());

  bad = ok;
  bad.rules["Z"] = {"A"};  // rule for a symbol outside the alphabet
  CHECK_FALSE(validate_system(bad).ok());

  bad = ok;
  bad.alphabet.push_back("a b");
  bad.rules["a b"] = {};
  CHECK_FALSE(validate_system(bad).ok());
}

TEST_CASE("single step semantics") {
  TagSystem sys = roman_table1();
  StepOutcome out = step(sys, q_of("B A E E C"));
  CHECK_FALSE(out.halted);
  CHECK(out.queue == q_of("E E C D"));

  // Halt signalled as data when the queue is short, queue unchanged.
  out = step(sys, {"B"});
  CHECK(out.halted);
  CHECK(out.queue == Queue{"B"});
  out = step(sys, {});
  CHECK(out.halted);

  CHECK_THROWS_AS(step(sys, q_of("Z A")), MalformedInput);
}

TEST_CASE("table 1 roman trace checkpoints") {
  Trace t = run(roman_table1(), q_of("B A E E C"), 30);
  REQUIRE(t.steps.size() == 19);
  CHECK(queue_to_string(t.steps[1]) == "[E E C D]");
  CHECK(queue_to_string(t.steps[2]) == "[C D D]");
  CHECK(queue_to_string(t.steps[3]) == "[D E E E D D]");
  CHECK(queue_to_string(t.steps[16]) == "[D D]");
  CHECK(queue_to_string(t.steps[17]) == "[B C]");
  CHECK(queue_to_string(t.steps[18]) == "[D]");
  REQUIRE(t.halt_step.has_value());
  CHECK(*t.halt_step == 18);
  CHECK_FALSE(t.truncated);
}

TEST_CASE("table 1 numeral trace checkpoints") {
  Trace t = run(numeral_table1(), q_of("5 2 3 2"), 30);
  REQUIRE(t.steps.size() == 31);
  CHECK(queue_to_string(t.steps[1]) == "[3 2 3]");
  CHECK(queue_to_string(t.steps[30]) == "[4 5 5 2 4 3 1 3 4 5 5 2 3 4 3 4 3 1 3 4]");
  CHECK_FALSE(t.halt_step.has_value());
  CHECK(t.truncated);
}

TEST_CASE("table 1 special trace checkpoints") {
  Trace t = run(special_table1(), q_of("$ @ @ #"), 30);
  REQUIRE(t.steps.size() == 31);
  CHECK(queue_to_string(t.steps[1]) == "[@ # &]");
  CHECK(queue_to_string(t.steps[30]) == "[$ & & &]");
  CHECK(t.truncated);
}

TEST_CASE("halt at init and zero budget") {
  TagSystem sys = roman_table1();
  Trace t = run(sys, {"B"}, 30);
  REQUIRE(t.steps.size() == 1);
  CHECK(t.halt_step == 0);
  CHECK_FALSE(t.truncated);

  t = run(sys, {}, 30);
  CHECK(t.steps.size() == 1);
  CHECK(t.halt_step == 0);

  // Budget 0 on a live queue: init only, truncated.
  t = run(sys, q_of("B A E E C"), 0);
  CHECK(t.steps.size() == 1);
  CHECK_FALSE(t.halt_step.has_value());
  CHECK(t.truncated);
}

TEST_CASE("halt exactly at the budget edge") {
  TagSystem sys = make_system(2, {"A"}, {{}});
  Trace t = run(sys, q_of("A A A A"), 2);
  REQUIRE(t.steps.size() == 3);
  CHECK(t.steps[2].empty());
  CHECK(t.halt_step == 2);
  CHECK_FALSE(t.truncated);

  t = run(sys, q_of("A A A A"), 1);
  REQUIRE(t.steps.size() == 2);
  CHECK(t.steps[1] == Queue{"A", "A"});
  CHECK_FALSE(t.halt_step.has_value());
  CHECK(t.truncated);
}

TEST_CASE("empty productions and m=1") {
  TagSystem sys = make_system(1, {"a", "b"}, {q_of("b b"), {}});
  Trace t = run(sys, {"a"}, 5);
  // a -> b b -> b -> (empty) halts
  REQUIRE(t.steps.size() == 4);
  CHECK(t.steps[1] == q_of("b b"));
  CHECK(t.steps[2] == q_of("b"));
  CHECK(t.steps[3].empty());
  CHECK(t.halt_step == 3);
}

TEST_CASE("run against the naive oracle, with laws") {
  SplitMix64 rng(stream(2024, 0, 1));
  for (int iter = 0; iter < 10000; ++iter) {
    Fuzzed f = fuzz_case(rng);
    int budget = static_cast<int>(rng.range(0, 60));
    Trace t = run(f.sys, f.init, budget);
    oracle::NaiveRun o = oracle::naive_run(f.sys, f.init, budget);

    REQUIRE(t.steps.size() == o.states.size());
    for (std::size_t k = 0; k < t.steps.size(); ++k) REQUIRE(t.steps[k] == o.states[k]);
    REQUIRE(t.halt_step == o.halt_step);
    REQUIRE(t.truncated == !o.halt_step.has_value());

    // Length law: |q'| = |q| - m + |P(head)|.
    for (std::size_t k = 0; k + 1 < t.steps.size(); ++k) {
      const Queue& q = t.steps[k];
      REQUIRE(t.steps[k + 1].size() ==
              q.size() - static_cast<std::size_t>(f.sys.m) + f.sys.rules.at(q[0]).size());
    }
  }
}

TEST_CASE("prefix stability and determinism") {
  SplitMix64 rng(stream(2024, 1, 1));
  for (int iter = 0; iter < 500; ++iter) {
    Fuzzed f = fuzz_case(rng);
    Trace big = run(f.sys, f.init, 50);
    Trace small = run(f.sys, f.init, 13);
    REQUIRE(big.steps.size() >= small.steps.size());
    for (std::size_t k = 0; k < small.steps.size(); ++k)
      REQUIRE(small.steps[k] == big.steps[k]);
    Trace again = run(f.sys, f.init, 50);
    REQUIRE(big.steps == again.steps);
    REQUIRE(big.halt_step == again.halt_step);
  }
}

TEST_CASE("interned engine matches string-level run") {
  SplitMix64 rng(stream(2024, 2, 1));
  for (int iter = 0; iter < 1000; ++iter) {
    Fuzzed f = fuzz_case(rng);
    TagEngine eng(f.sys);
    oracle::NaiveRun o = oracle::naive_run(f.sys, f.init, 40);

    IdRun<int32_t> run32(eng);
    run32.reset(eng.intern(f.init));
    for (std::size_t k = 1; k < o.states.size(); ++k) {
      REQUIRE(run32.step());
      REQUIRE(eng.externalize(run32.snapshot()) == o.states[k]);
    }
    if (o.halt_step) REQUIRE_FALSE(run32.step());

    // Batched stepping lands on the same final state with the same count.
    IdRun<uint8_t> run8(eng);
    run8.reset(eng.intern(f.init));
    std::size_t want = o.states.size() - 1;
    while (run8.steps_taken() < want) {
      std::size_t k = run8.step_run(want - run8.steps_taken());
      if (k == 0) break;
    }
    REQUIRE(run8.steps_taken() == want);
    REQUIRE(eng.externalize(run8.snapshot()) == o.states.back());
  }
}

TEST_CASE("batched stepping honors the limit and the compaction keeps content") {
  TagSystem sys = make_system(2, {"A", "B"}, {q_of("A A"), q_of("A")});
  TagEngine eng(sys);
  IdRun<int32_t> r(eng);
  Queue init(64, "A");
  r.reset(eng.intern(init));
  CHECK(r.step_run(5) == 5);
  CHECK(r.steps_taken() == 5);

  // Long self-sustaining run to push the head past the compaction threshold.
  std::size_t total = 5;
  while (total < 20000) total += r.step_run(1 << 12);
  CHECK(r.steps_taken() == total);
  oracle::NaiveRun o = oracle::naive_run(sys, init, static_cast<int>(total));
  CHECK(eng.externalize(r.snapshot()) == o.states.back());
}

TEST_CASE("engine rejects foreign symbols and bad systems") {
  TagSystem sys = roman_table1();
  TagEngine eng(sys);
  CHECK_THROWS_AS(eng.id_of("Z"), MalformedInput);
  CHECK_THROWS_AS(eng.intern(q_of("A Z")), MalformedInput);

  TagSystem missing = sys;
  missing.rules.erase("D");
  CHECK_THROWS_AS(TagEngine{missing}, MalformedInput);
}
