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

using namespace lct;

namespace {

bool contains(const std::string& text, const std::string& fragment) { return text.find(fragment) != std::string::npos; }

ActorModelIR emrtd_ir() {
  const auto cpm = fixtures::emrtd_cpm();
  return build_ir(annotate(fixtures::emrtd_machine(), cpm), cpm);
}

}  // namespace

TEST_CASE("IR of the two-state example", "[actorgen]") {
  const auto cpm = fixtures::example_cpm();
  const auto ir = build_ir(annotate(fixtures::example_machine(), cpm), cpm);
  CHECK(ir.states == std::vector<std::string>{"q1", "q2"});
  CHECK(ir.state_props == std::vector<std::string>{"p"});
  CHECK(ir.temp_props == std::vector<std::string>{"omega2set"});
  CHECK(ir.labels == std::vector<std::vector<bool>>{{false}, {true}});
  REQUIRE(ir.handlers.size() == 1);
  CHECK(ir.handlers[0][0].next == 1);
  CHECK(ir.handlers[0][0].effects.size() == 1);
  CHECK(ir.handlers[0][0].effects[0].value);
  CHECK(ir.handlers[0][1].next == 0);
  CHECK_FALSE(ir.handlers[0][1].effects[0].value);
  CHECK_FALSE(ir.mutated());
}

TEST_CASE("the example renders to the reference Rebeca text", "[actorgen]") {
  const auto cpm = fixtures::example_cpm();
  const auto a = annotate(fixtures::example_machine(), cpm);
  const auto golden = testing::fixture("example.rebeca");
  CHECK(emit_rebeca(build_ir(a, cpm)) == golden);
  // The expanded form is merged back first.
  CHECK(emit_rebeca(build_ir(expand_tau(a, cpm), cpm)) == golden);
}

TEST_CASE("a machine without propositions still renders", "[actorgen]") {
  const auto ir = build_ir(unannotated(fixtures::example_machine()), Cpm{});
  CHECK(ir.state_props.empty());
  CHECK(ir.temp_props.empty());
  const auto text = emit_rebeca(ir);
  CHECK(contains(text, "int state;"));
  CHECK(contains(text, "msgsrv sigma1(){"));
  CHECK(contains(text, "environment.omega2();"));
}

TEST_CASE("eMRTD rendering", "[actorgen]") {
  const auto text = emit_rebeca(emrtd_ir());
  // Mutual authentication from the data-group-selected state.
  CHECK(contains(text, "      if(state==1) {\n         state=2;\n         auth=true;\n         environment.req_9000(5);\n"));
  // The success reply sets temporaries according to the request that caused it.
  CHECK(contains(text, "msgsrv req_9000(int data){"));
  CHECK(contains(text, "case 4: readok=true;ureadok=true;break;"));
  CHECK(contains(text, "case 8: readok=true;sreadok=true;break;"));
  // Temporaries are cleared on every request.
  CHECK(contains(text, "   msgsrv req() {\n      accessok=false;"));
  CHECK(contains(text, "ureadok=false;"));
  CHECK(contains(text, "int data = ?(0,1,2,3,4,5,6,7,8,9,10,11,12);"));
  CHECK(contains(text, "case 5: system.pp_bac(); break;"));
  CHECK(contains(text, "msgsrv req_6982(){\n      self.req();"));
}

TEST_CASE("identifiers avoid reserved words and clashes", "[actorgen]") {
  MealyMachine m;
  m.add_state("s");
  for (const auto* in : {"state", "A-b", "a_b", "9x"}) m.add_input(in);
  for (std::size_t i = 0; i < 4; ++i) m.set_transition(0, i, 0, m.add_output(i % 2 ? "OK" : "ok"));
  m.set_initial(0);
  const auto ir = build_ir(unannotated(m), Cpm{});
  CHECK(ir.input_methods == std::vector<std::string>{"state_2", "pp_a_b", "a_b", "pp_9x"});
  CHECK(ir.output_methods == std::vector<std::string>{"ok", "req_ok"});
}

TEST_CASE("incomplete machines are rejected", "[actorgen]") {
  MealyMachine m;
  m.add_state("a");
  m.add_state("b");
  m.add_input("x");
  m.set_transition(0, 0, 1, m.add_output("y"));
  m.set_initial(0);
  CHECK_THROWS_AS(build_ir(unannotated(m), Cpm{}), IncompleteMachineError);
}

TEST_CASE("timeout mutation", "[actorgen]") {
  const auto cpm = fixtures::example_cpm();
  const auto base = build_ir(annotate(fixtures::example_machine(), cpm), cpm);
  SECTION("disabled mutation is the identity") {
    const auto same = apply_timeout_mutation(base, MutationConfig{false, 0.5});
    CHECK(emit_rebeca(same) == emit_rebeca(base));
  }
  SECTION("enabled mutation adds the timeout path") {
    const auto ir = apply_timeout_mutation(base, MutationConfig{true, 0.25});
    CHECK(ir.mutated());
    CHECK(ir.temp_props.back() == kTimeoutProp);
    CHECK(ir.timeout_var == "timedout");
    const auto text = emit_rebeca(ir);
    CHECK(contains(text, "int fault = ?(0,1);"));
    CHECK(contains(text, "msgsrv timeout(){\n      timedout=true;\n      self.req();"));
    CHECK(contains(text, "      timedout=false;\n"));
    CHECK_THROWS_AS(apply_timeout_mutation(ir, MutationConfig{true, 0.25}), ContractError);
  }
  SECTION("probability must be a proper fraction") {
    CHECK_THROWS_AS(apply_timeout_mutation(base, MutationConfig{true, 0.0}), ContractError);
    CHECK_THROWS_AS(apply_timeout_mutation(base, MutationConfig{true, 1.0}), ContractError);
  }
  SECTION("the proposition name must be free") {
    const auto clash = parse_cpm("[TAUS]\nTIMEOUT | * | omega2\n");
    const auto ir = build_ir(annotate(fixtures::example_machine(), clash), clash);
    CHECK_THROWS_AS(apply_timeout_mutation(ir, MutationConfig{true, 0.1}), ModelError);
  }
  SECTION("a proposition called timedout does not clash with the generated variable") {
    const auto taken = parse_cpm("[TAUS]\ntimedout | * | omega2\n");
    const auto ir = apply_timeout_mutation(build_ir(annotate(fixtures::example_machine(), taken), taken),
                                           MutationConfig{true, 0.1});
    CHECK(ir.timeout_var == "timedout");
    CHECK(ir.temp_vars.front() == "timedout_2");
  }
}

TEST_CASE("simulation follows the annotated machine", "[actorgen]") {
  std::mt19937_64 rng(41);
  for (int n = 0; n < 100; ++n) {
    const auto m = testing::random_machine(rng);
    const auto cpm = testing::random_cpm(rng, m);
    const auto a = annotate(m, cpm);
    const auto ir = build_ir(a, cpm);
    Word w;
    for (std::size_t s = testing::uniform(rng, 1, 20); s-- > 0;) w.push_back(m.inputs()[testing::uniform(rng, 0, m.inputs().size() - 1)]);
    const auto steps = simulate(ir, w);
    StateId q = m.initial();
    for (std::size_t p = 0; p < w.size(); ++p) {
      const auto [next, out] = *m.step(q, w[p]);
      CHECK(steps[p].output == out);
      CHECK(steps[p].temps == tau_props(cpm, w[p], out));
      q = next;
      CHECK(steps[p].state == q);
      PropSet props;
      for (std::size_t v = 0; v < ir.state_props.size(); ++v)
        if (steps[p].props[v]) props.insert(ir.state_props[v]);
      CHECK(props == a.labels[q]);
    }
  }
}

TEST_CASE("simulated timeouts reset to the initial state", "[actorgen]") {
  const auto cpm = fixtures::example_cpm();
  const auto ir = apply_timeout_mutation(build_ir(annotate(fixtures::example_machine(), cpm), cpm), {true, 0.5});
  std::mt19937_64 rng(3);
  const auto steps = simulate(ir, Word(200, "sigma1"), &rng);
  std::size_t timeouts = 0;
  for (const auto& s : steps)
    if (s.timed_out) {
      ++timeouts;
      CHECK(s.state == ir.initial);
      CHECK(s.output == kTimeoutOutput);
      CHECK(s.temps == PropSet{kTimeoutProp});
    }
  CHECK(timeouts > 50);
  CHECK(timeouts < 150);
  for (const auto& s : simulate(ir, Word(50, "sigma1"))) CHECK_FALSE(s.timed_out);
  CHECK_THROWS_AS(simulate(ir, Word{"nope"}), ContractError);
}
