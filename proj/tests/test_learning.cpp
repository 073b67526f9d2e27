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

TEST_CASE("a one-state system is learned in one round", "[learning]") {
  const auto m = parse_dot(R"(digraph { __start -> s; s -> s [label="a / x"]; s -> s [label="b / y"]; })");
  MealySul sul(m);
  const auto r = lstar_learn(sul, sul.alphabet(), make_exact_oracle(m));
  CHECK(r.status == LearnStatus::Converged);
  CHECK(r.stats.rounds == 1);
  CHECK(r.hypothesis.num_states() == 1);
  CHECK(r.stats.table_sizes == std::vector<std::pair<std::size_t, std::size_t>>{{1, 2}});
  CHECK(r.counterexamples.empty());
}

TEST_CASE("exact oracle recovers the simulated systems", "[learning]") {
  for (const auto& [name, m] : {std::pair{"emrtd", fixtures::emrtd_machine()}, std::pair{"uds", fixtures::uds_machine()},
                                std::pair{"uds-patched", fixtures::uds_machine(true)}}) {
    INFO(name);
    MealySul sul(m);
    CountingSul counting(sul);
    const auto r = lstar_learn(counting, sul.alphabet(), make_exact_oracle(m));
    CHECK(r.status == LearnStatus::Converged);
    CHECK(bisimilar(r.hypothesis, m).equivalent);
    CHECK(r.hypothesis.num_states() == reachable(m).num_states());
    // The cache answers every repeated cell, so each membership query is one reset.
    CHECK(counting.resets() == r.stats.membership_queries);
    CHECK(r.stats.cache_hits > 0);
  }
}

TEST_CASE("exact oracle on random machines", "[learning]") {
  std::mt19937_64 rng(47);
  for (int n = 0; n < 60; ++n) {
    const auto m = testing::random_machine(rng, 7, 3);
    MealySul sul(m);
    LStar learner(sul);
    const auto r = learner.learn(make_exact_oracle(m));
    REQUIRE(r.status == LearnStatus::Converged);
    CHECK(bisimilar(r.hypothesis, m).equivalent);
    CHECK(r.hypothesis.num_states() <= reachable(m).num_states());
    for (std::size_t k = 1; k < r.stats.table_sizes.size(); ++k) {
      const auto [s0, e0] = r.stats.table_sizes[k - 1];
      const auto [s1, e1] = r.stats.table_sizes[k];
      CHECK(s0 <= s1);
      CHECK(e0 <= e1);
      CHECK(s0 + e0 < s1 + e1);
    }
    CHECK(r.counterexamples.size() + 1 == r.stats.rounds);
  }
}

TEST_CASE("random walk converges on both systems for ten seeds", "[learning]") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    for (bool uds : {false, true}) {
      auto sul = uds ? build_uds_sul() : build_emrtd_sul();
      RandomWalkConfig cfg;
      cfg.seed = seed;
      std::size_t queries = 0;
      const auto r = lstar_learn(sul, sul.alphabet(), make_random_walk_oracle(sul, cfg, &queries));
      CHECK(r.status == LearnStatus::Converged);
      CHECK(bisimilar(r.hypothesis, sul.machine()).equivalent);
      CHECK(queries >= cfg.num_tests);
    }
}

TEST_CASE("random walk catches a hypothesis that rejects the wrong key", "[learning]") {
  auto sul = build_uds_sul();
  const auto hyp = fixtures::uds_machine(true);
  std::size_t found = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto ce = random_walk_oracle(sul, hyp, 20, 50, 50, seed);
    if (!ce) continue;
    ++found;
    const auto observed = sul.query(*ce);
    const auto predicted = hyp.run(*ce);
    CHECK(observed.back() != predicted.back());
    CHECK(Word(observed.begin(), observed.end() - 1) == Word(predicted.begin(), predicted.end() - 1));
  }
  CHECK(found >= 1);
}

TEST_CASE("random walk edge cases", "[learning]") {
  auto sul = build_uds_sul();
  const auto wrong = fixtures::uds_machine(true);
  CHECK_FALSE(random_walk_oracle(sul, wrong, 20, 50, 0, 1));
  CHECK_THROWS_AS(random_walk_oracle(sul, wrong, 0, 5, 10, 1), ContractError);
  CHECK_THROWS_AS(random_walk_oracle(sul, wrong, 6, 5, 10, 1), ContractError);
  // Same seed, same verdict.
  CHECK(random_walk_oracle(sul, wrong, 20, 50, 50, 3) == random_walk_oracle(sul, wrong, 20, 50, 50, 3));
}

TEST_CASE("round budget leaves the result unproven", "[learning]") {
  std::mt19937_64 rng(53);
  for (int n = 0; n < 20; ++n) {
    const auto m = testing::random_machine(rng, 8, 3);
    MealySul sul(m);
    LStarOptions opt;
    opt.max_rounds = 1;
    const auto r = lstar_learn(sul, sul.alphabet(), make_exact_oracle(m), opt);
    CHECK(r.stats.rounds == 1);
    if (r.status == LearnStatus::Unproven) {
      CHECK_FALSE(bisimilar(r.hypothesis, m).equivalent);
      CHECK(r.counterexamples.size() == 1);
    } else {
      CHECK(bisimilar(r.hypothesis, m).equivalent);
    }
  }
}

TEST_CASE("learner contracts", "[learning]") {
  auto sul = build_uds_sul();
  CHECK_THROWS_AS(LStar(sul, std::vector<Symbol>{}), ContractError);
  LStar learner(sul);
  learner.hypothesis();
  // A word that is already in S cannot refine the table.
  CHECK_THROWS_AS(learner.refine(Word{}), ContractError);
  // An oracle that lies is caught.
  const auto liar = [](const MealyMachine& h) -> std::optional<Word> { return Word{h.inputs()[0]}; };
  CHECK_THROWS_AS(learner.learn(liar), ContractError);
  CHECK_THROWS_AS(sul.step("NotAnInput"), AlphabetMismatchError);
}

TEST_CASE("cached answers stay sound on re-query", "[learning]") {
  auto sul = build_emrtd_sul();
  LStar learner(sul);
  learner.learn(make_exact_oracle(sul.machine()));
  const auto& cache = learner.cache();
  REQUIRE(cache.size() > 100);
  std::mt19937_64 rng(59);
  std::size_t checked = 0;
  for (const auto& [w, out] : cache)
    if (testing::coin(rng, 0.01) || checked == 0) {
      CHECK(sul.query(w) == out);
      ++checked;
    }
  CHECK(checked >= 1);
}

TEST_CASE("nonce mapper makes the toy card deterministic", "[learning]") {
  NonceSul raw(99);
  MappedSul sul(raw, canonicalize_nonce_mapper());
  CHECK(sul.step("GET_CHALLENGE") == "NONCE");
  const auto m = parse_dot(R"(digraph { __start -> s;
    s -> s [label="SELECT / 9000"]; s -> s [label="GET_CHALLENGE / NONCE"]; s -> s [label="READ / 9000"]; })");
  const auto r = lstar_learn(sul, sul.alphabet(), make_random_walk_oracle(sul, RandomWalkConfig{}));
  CHECK(r.status == LearnStatus::Converged);
  CHECK(r.hypothesis.num_states() == 1);
  CHECK(bisimilar(r.hypothesis, m).equivalent);
}

TEST_CASE("an undeclared nondeterministic output is diagnosed", "[learning]") {
  NonceSul raw(99, true);
  MappedSul sul(raw, canonicalize_nonce_mapper());
  CHECK_THROWS_AS(lstar_learn(sul, sul.alphabet(), make_random_walk_oracle(sul, RandomWalkConfig{})),
                  NondeterministicOutputError);
  try {
    sul.query({"READ"});
    sul.query({"READ"});
    FAIL("expected a diagnostic");
  } catch (const NondeterministicOutputError& e) {
    CHECK(e.query() == Word{"READ"});
    CHECK(e.first() != e.second());
  }
  // Without the mapper the raw nonces already break determinism.
  NonceSul plain(5);
  Mapper identity;
  identity.abstract_inputs = plain.alphabet();
  for (const auto& a : identity.abstract_inputs) identity.concrete_input[a] = a;
  MappedSul unmapped(plain, identity);
  unmapped.query({"GET_CHALLENGE"});
  CHECK_THROWS_AS(unmapped.query({"GET_CHALLENGE"}), NondeterministicOutputError);
}

TEST_CASE("mapper contracts", "[learning]") {
  Mapper m = canonicalize_nonce_mapper();
  CHECK(m.concretize("READ") == "READ");
  CHECK_THROWS_AS(m.concretize("WRITE"), AlphabetMismatchError);
  CHECK(m.abstract_output("CHAL_00ff") == "NONCE");
  CHECK(m.abstract_output("9000") == "9000");
  CHECK(m.declared_nondeterministic("CHAL_1234"));
  CHECK_FALSE(m.declared_nondeterministic("9000"));
  m.abstract_inputs.push_back("WRITE");
  NonceSul raw(1);
  CHECK_THROWS_AS(MappedSul(raw, m), ContractError);
}
