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

struct UdsWitness {
  Cpm cpm = fixtures::uds_cpm();
  AnnotatedMachine expanded = expand_tau(annotate(fixtures::uds_machine(), cpm), cpm);
  KripkeStructure k = kripke_from_annotated(expanded);
  Lasso lasso = *check(k, instantiate(generic_properties(), cpm)[3].formula).lasso;
};

Lasso lasso_of(const KripkeStructure& k, const std::vector<std::string>& stem, const std::vector<std::string>& loop) {
  auto id = [&](const std::string& n) {
    return static_cast<std::size_t>(std::find(k.names.begin(), k.names.end(), n) - k.names.begin());
  };
  Lasso l;
  for (const auto& n : stem) l.stem.push_back(id(n));
  for (const auto& n : loop) l.loop.push_back(id(n));
  return l;
}

}  // namespace

TEST_CASE("concretizing the key-handling witness", "[testkit]") {
  const UdsWitness w;
  const auto t = concretize(w.lasso, w.k, w.expanded, 1, "P4");
  CHECK(t.property == "P4");
  CHECK(t.inputs == Word{"Extended", "SA", "SAwKey", "SAwWrongKey"});
  CHECK(t.expected == Word{"5003", "67", "67", "67"});
  CHECK(t.stem == std::vector<std::string>{"D0", "E", "Es", "A", "tau_A_SAwWrongKey"});
  CHECK(t.loop == std::vector<std::string>{"A"});
  CHECK(t.unroll == 1);
}

TEST_CASE("unrolling repeats the loop", "[testkit]") {
  const UdsWitness w;
  const auto l = lasso_of(w.k, {"D0", "E", "Es"}, {"A", "tau_A_SAwWrongKey"});
  REQUIRE(is_valid_lasso(w.k, l));
  const auto once = concretize(l, w.k, w.expanded, 1);
  const auto twice = concretize(l, w.k, w.expanded, 2);
  CHECK(once.inputs == Word{"Extended", "SA", "SAwKey", "SAwWrongKey"});
  CHECK(twice.inputs == Word{"Extended", "SA", "SAwKey", "SAwWrongKey", "SAwWrongKey"});
  CHECK(twice.expected.size() == twice.inputs.size());
  CHECK_THROWS_AS(concretize(l, w.k, w.expanded, 0), ContractError);
}

TEST_CASE("a lasso without stem", "[testkit]") {
  const auto cpm = fixtures::example_cpm();
  const auto e = expand_tau(annotate(fixtures::example_machine(), cpm), cpm);
  const auto k = kripke_from_annotated(e);
  const auto l = lasso_of(k, {}, {"q1", "q2", "tau_q2_sigma1"});
  const auto t = concretize(l, k, e);
  CHECK(t.inputs == Word{"sigma1", "sigma1"});
  CHECK(t.expected == Word{"omega1", "omega2"});
  CHECK(concretize(l, k, e, 3).inputs.size() == 6);
}

TEST_CASE("concretize rejects foreign lassos", "[testkit]") {
  const UdsWitness w;
  CHECK_THROWS_AS(concretize(lasso_of(w.k, {"E"}, {"A"}), w.k, w.expanded), ContractError);
  const auto other = kripke_from_annotated(unannotated(fixtures::example_machine()));
  CHECK_THROWS_AS(concretize(Lasso{{}, {0, 1}}, other, w.expanded), ContractError);
}

TEST_CASE("replay confirms on the original and diverges on the patched system", "[testkit]") {
  const UdsWitness w;
  const auto t = concretize(w.lasso, w.k, w.expanded, 1, "P4");
  auto original = build_uds_sul();
  const auto ok = replay(t, original);
  CHECK(ok.verdict == ReplayVerdict::Confirmed);
  CHECK(ok.observed == t.expected);
  CHECK_FALSE(ok.divergence);
  CHECK_THROWS_AS(feedback(ok), ContractError);

  auto patched = build_uds_sul(true);
  const auto bad = replay(t, patched);
  CHECK(bad.verdict == ReplayVerdict::Diverged);
  CHECK(bad.divergence == 3u);
  CHECK(bad.observed.size() == t.inputs.size());
  CHECK(feedback(bad) == t.inputs);
}

TEST_CASE("replay edge cases", "[testkit]") {
  auto sul = build_uds_sul();
  TestCase empty;
  const auto r = replay(empty, sul);
  CHECK(r.verdict == ReplayVerdict::Confirmed);
  CHECK(r.observed.empty());

  TestCase first{"X", {"SA"}, {"nope"}, {}, {}, 1, std::nullopt};
  const auto d = replay(first, sul);
  CHECK(d.divergence == 0u);
  CHECK(feedback(d) == Word{"SA"});

  TestCase broken{"X", {"SA", "Bogus"}, {"7f", "7f"}, {}, {}, 1, std::nullopt};
  try {
    replay(broken, sul);
    FAIL("expected a SUL failure");
  } catch (const SulFailure& e) {
    CHECK(e.position() == 1);
  }
  TestCase uneven{"X", {"SA"}, {}, {}, {}, 1, std::nullopt};
  CHECK_THROWS_AS(replay(uneven, sul), ContractError);
}

TEST_CASE("closing the loop repairs the learned model", "[testkit]") {
  auto original = build_uds_sul();
  LStar learner(original);
  auto r = learner.learn(make_random_walk_oracle(original, RandomWalkConfig{}));
  REQUIRE(r.status == LearnStatus::Converged);

  const auto cpm = fixtures::uds_cpm();
  auto model_check = [&](const MealyMachine& m) {
    const auto e = expand_tau(annotate(m, cpm), cpm);
    const auto k = kripke_from_annotated(e);
    const auto res = check(k, instantiate(generic_properties(), cpm)[3].formula);
    return std::make_tuple(e, k, res);
  };
  auto [e, k, res] = model_check(r.hypothesis);
  REQUIRE(res.verdict == Verdict::Violated);
  const auto t = concretize(*res.lasso, k, e, 1, "P4");
  CHECK(replay(t, original).verdict == ReplayVerdict::Confirmed);

  auto patched = build_uds_sul(true);
  const auto rep = replay(t, patched);
  REQUIRE(rep.verdict == ReplayVerdict::Diverged);
  learner.rebind(patched);
  learner.refine(feedback(rep));
  const auto repaired = learner.learn(make_exact_oracle(patched.machine()));
  CHECK(bisimilar(repaired.hypothesis, patched.machine()).equivalent);
  CHECK(std::get<2>(model_check(repaired.hypothesis)).verdict == Verdict::Holds);
}

TEST_CASE("test cases round-trip through JSON lines", "[testkit]") {
  const UdsWitness w;
  auto t = concretize(w.lasso, w.k, w.expanded, 2, "P4");
  Mapper mapper;
  mapper.abstract_inputs = fixtures::uds_machine().inputs();
  for (const auto& a : mapper.abstract_inputs) mapper.concrete_input[a] = "10 " + a;
  attach_concrete(t, mapper);
  REQUIRE(t.concrete_inputs);
  CHECK(t.concrete_inputs->front() == "10 Extended");
  const auto text = emit_tests_jsonl({t, t});
  const auto back = parse_tests_jsonl(text);
  REQUIRE(back.size() == 2);
  CHECK(back[1].inputs == t.inputs);
  CHECK(back[1].expected == t.expected);
  CHECK(back[1].stem == t.stem);
  CHECK(back[1].loop == t.loop);
  CHECK(back[1].unroll == 2);
  CHECK(back[1].concrete_inputs == t.concrete_inputs);
  CHECK(emit_tests_jsonl(back) == text);

  auto line_of = [](const std::string& text) {
    try {
      parse_tests_jsonl(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  const std::string good = to_json(t).dump() + "\n";
  CHECK(line_of(good + "\n{not json\n") == 3);
  CHECK(line_of(good + R"({"property":"X","inputs":["a"],"expected":[]})" + "\n") == 2);
  CHECK(line_of(R"({"inputs":["a"]})") == 1);

  auto sul = build_uds_sul();
  const auto j = to_json(replay(t, sul), t);
  CHECK(j["verdict"] == "CONFIRMED");
  CHECK_FALSE(j.contains("divergence"));
}
