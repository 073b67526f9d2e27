// Copyright 2026 The lct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <functional>

using namespace lct;

namespace {

// All words over the alphabet up to the given length.
std::vector<Word> words_up_to(const std::vector<Symbol>& sigma, std::size_t n) {
  std::vector<Word> out{{}};
  for (std::size_t len = 1, begin = 0; len <= n; ++len) {
    const std::size_t end = out.size();
    for (std::size_t k = begin; k < end; ++k)
      for (const auto& s : sigma) {
        Word w = out[k];
        w.push_back(s);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

}  // namespace

TEST_CASE("parse_dot reads the two-state example", "[automata]") {
  const auto m = parse_dot(testing::fixture("example.dot"));
  CHECK(m.num_states() == 2);
  CHECK(m.state_name(m.initial()) == "q1");
  CHECK(m.inputs() == std::vector<Symbol>{"sigma1"});
  CHECK(m.run({"sigma1", "sigma1", "sigma1"}) == Word{"omega1", "omega2", "omega1"});
}

TEST_CASE("parse_dot accepts a minimal self-loop machine", "[automata]") {
  const auto m = parse_dot("digraph { a [initial=true]; a -> a [label=\"a/a\"]; }");
  CHECK(m.num_states() == 1);
  CHECK(m.inputs() == std::vector<Symbol>{"a"});
  CHECK(m.outputs() == std::vector<Symbol>{"a"});
}

TEST_CASE("parse_dot rejects nondeterminism with the offending pair", "[automata]") {
  const char* text = R"(digraph { __start -> q1; q1 -> q2 [label="sigma1 / o"]; q1 -> q1 [label="sigma1 / o"]; q2 -> q2 [label="sigma1 / o"]; })";
  try {
    parse_dot(text);
    FAIL("expected NondeterminismError");
  } catch (const NondeterminismError& e) {
    CHECK(e.state() == "q1");
    CHECK(e.input() == "sigma1");
  }
}

TEST_CASE("parse_dot errors", "[automata]") {
  CHECK_THROWS_AS(parse_dot("digraph { q1 -> q1 [label=\"a / b\"]; }"), ModelError);  // no initial state
  CHECK_THROWS_AS(parse_dot("digraph { __start -> q1; q1 -> q1 [label=\"a b\"]; }"), ParseError);
  CHECK_THROWS_AS(parse_dot("digraph { __start -> q1; q1 -> q2 [label=\"a / b\"]; q2 -> q1 [label=\"c / b\"]; }"),
                  IncompleteMachineError);
  try {
    parse_dot("digraph {\n  __start -> q1;\n  q1 -> [label=\"a / b\"];\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("incomplete machines can be completed with no_response self-loops", "[automata]") {
  DotOptions opt;
  opt.complete_with_self_loops = true;
  const auto m = parse_dot("digraph { __start -> q1; q1 -> q2 [label=\"a / b\"]; q2 -> q1 [label=\"c / b\"]; }", opt);
  CHECK(m.is_complete());
  CHECK(m.run({"c"}) == Word{kNoResponse});
}

TEST_CASE("emit_dot round-trips up to isomorphism", "[automata]") {
  const auto m = fixtures::example_machine();
  CHECK(isomorphic(parse_dot(emit_dot(m)), m));

  MealyMachine odd;
  odd.add_state("s 0");
  odd.add_transition("s 0", "a/b", "s\"1", "10_01 / x");
  odd.add_transition("s\"1", "a/b", "s 0", "\\");
  odd.set_initial(0);
  CHECK(isomorphic(parse_dot(emit_dot(odd)), odd));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto r = testing::random_machine(rng);
    CHECK(isomorphic(parse_dot(emit_dot(r)), r));
  }
}

TEST_CASE("emit_dot of an empty-alphabet machine", "[automata]") {
  MealyMachine m;
  m.add_state("only");
  m.set_initial(0);
  const auto text = emit_dot(m);
  std::size_t arrows = 0;
  for (auto pos = text.find("->"); pos != std::string::npos; pos = text.find("->", pos + 1)) ++arrows;
  CHECK(arrows == 1);  // only the start marker
  const auto back = parse_dot(text);
  CHECK(back.num_states() == 1);
  CHECK(back.inputs().empty());
}

TEST_CASE("bisimilar: reflexive, witness and unrolled duplicate", "[automata]") {
  const auto m = fixtures::example_machine();
  CHECK(bisimilar(m, m).equivalent);

  const auto changed = parse_dot(R"(digraph { __start -> q1; q1 -> q2 [label="sigma1 / omega1"]; q2 -> q1 [label="sigma1 / omega1"]; })");
  const auto eq = bisimilar(m, changed);
  REQUIRE_FALSE(eq.equivalent);
  CHECK(eq.witness == Word{"sigma1", "sigma1"});
  // Brute force: no shorter word distinguishes them.
  for (const auto& w : words_up_to(m.inputs(), 1)) CHECK(m.run(w) == changed.run(w));

  const auto unrolled = parse_dot(R"(digraph { __start -> a; a -> b [label="sigma1 / omega1"]; b -> c [label="sigma1 / omega2"];
    c -> d [label="sigma1 / omega1"]; d -> a [label="sigma1 / omega2"]; })");
  CHECK(bisimilar(m, unrolled).equivalent);
  for (const auto& w : words_up_to(m.inputs(), 8)) CHECK(m.run(w) == unrolled.run(w));
}

TEST_CASE("bisimilar is an equivalence and its witnesses are executable", "[automata]") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 60; ++i) {
    const auto a = testing::random_machine(rng, 4, 2);
    const auto b = testing::random_machine(rng, 4, 2);
    const auto c = testing::random_machine(rng, 4, 2);
    if (a.inputs() != b.inputs() || b.inputs() != c.inputs()) continue;
    const auto ab = bisimilar(a, b);
    CHECK(ab.equivalent == bisimilar(b, a).equivalent);
    if (!ab.equivalent) CHECK(a.run(ab.witness) != b.run(ab.witness));
    if (ab.equivalent && bisimilar(b, c).equivalent) CHECK(bisimilar(a, c).equivalent);
    // Brute-force agreement on short words.
    bool differs = false;
    for (const auto& w : words_up_to(a.inputs(), 4)) differs = differs || a.run(w) != b.run(w);
    if (differs) CHECK_FALSE(ab.equivalent);
  }
}

TEST_CASE("bisimilar reports alphabet mismatches unless restricted", "[automata]") {
  const auto m = fixtures::example_machine();
  const auto other = parse_dot(R"(digraph { __start -> q1; q1 -> q1 [label="x / y"]; })");
  CHECK_THROWS_AS(bisimilar(m, other), AlphabetMismatchError);
  auto bigger = m;
  bigger.add_input("extra");
  bigger.set_transition(0, 1, 0, bigger.add_output("z"));
  bigger.set_transition(1, 1, 1, bigger.add_output("z"));
  const auto eq = bisimilar(m, bigger, true);
  CHECK(eq.equivalent);
  CHECK(eq.dropped_inputs == std::vector<Symbol>{"extra"});
}

TEST_CASE("reachable drops unreachable states", "[automata]") {
  const auto m = parse_dot(R"(digraph { __start -> a; a -> a [label="x / 1"]; b -> c [label="x / 2"]; c -> c [label="x / 3"]; })");
  const auto r = reachable(m);
  CHECK(r.num_states() == 1);
  CHECK(r.state_name(r.initial()) == "a");
  CHECK(isomorphic(reachable(r), r));
  CHECK(bisimilar(r, m).equivalent);

  const auto full = fixtures::example_machine();
  CHECK(reachable(full).num_states() == 2);
  CHECK(isomorphic(reachable(full), full));
}
