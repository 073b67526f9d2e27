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
#pragma once

// Seeded generators shared by the unit and acceptance tests.

#include <lct/lct.hpp>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lct::testing {

inline std::string fixture(const std::string& name) {
  std::ifstream in(std::string(LCT_FIXTURE_DIR) + "/" + name, std::ios::binary);
  if (!in) throw Error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// Complete machine with 1..max_states states, 1..max_inputs inputs i<k> and
/// outputs drawn from o0..o3.
inline MealyMachine random_machine(std::mt19937_64& rng, std::size_t max_states = 8, std::size_t max_inputs = 5) {
  MealyMachine m;
  const std::size_t n = uniform(rng, 1, max_states), k = uniform(rng, 1, max_inputs);
  for (std::size_t q = 0; q < n; ++q) m.add_state("s" + std::to_string(q));
  for (std::size_t i = 0; i < k; ++i) m.add_input("i" + std::to_string(i));
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t i = 0; i < k; ++i)
      m.set_transition(q, i, uniform(rng, 0, n - 1), m.add_output("o" + std::to_string(uniform(rng, 0, 3))));
  m.set_initial(0);
  return m;
}

/// CPM over at most `max_props` propositions (state ones a, b and the
/// temporary t) whose conditions mention symbols of m or wildcards.
inline Cpm random_cpm(std::mt19937_64& rng, const MealyMachine& m, std::size_t max_props = 3) {
  const std::vector<std::string> pool = {"a", "b", "t"};
  const std::size_t used = uniform(rng, 1, max_props);
  std::vector<std::string> state_props, temp_props;
  for (std::size_t p = 0; p < used; ++p) (pool[p] == "t" ? temp_props : state_props).push_back(pool[p]);
  auto pick_in = [&] { return coin(rng, 0.2) ? std::string("*") : m.inputs()[uniform(rng, 0, m.inputs().size() - 1)]; };
  auto pick_out = [&] { return coin(rng, 0.3) ? std::string("*") : m.outputs()[uniform(rng, 0, m.outputs().size() - 1)]; };
  std::ostringstream text;
  text << "[GAINS]\n";
  for (const auto& p : state_props)
    for (std::size_t c = uniform(rng, 1, 2); c-- > 0;) text << p << " | " << pick_in() << " | " << pick_out() << "\n";
  text << "[LOSES]\n";
  for (const auto& p : state_props)
    for (std::size_t c = uniform(rng, 0, 2); c-- > 0;) text << p << " | " << pick_in() << " | " << pick_out() << "\n";
  text << "[TAUS]\n";
  for (const auto& p : temp_props) text << p << " | " << pick_in() << " | " << pick_out() << "\n";
  return parse_cpm(text.str());
}

/// Kripke structure with 1..max_states states, each with 1..3 successors.
inline KripkeStructure random_kripke(std::mt19937_64& rng, std::size_t max_states = 6,
                                     const std::vector<std::string>& props = {"p", "q", "r"}) {
  KripkeStructure k;
  const std::size_t n = uniform(rng, 1, max_states);
  for (std::size_t s = 0; s < n; ++s) {
    PropSet label;
    for (const auto& p : props)
      if (coin(rng)) label.insert(p);
    k.add_state("k" + std::to_string(s), label);
  }
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t e = uniform(rng, 1, 3); e-- > 0;) k.add_edge(s, uniform(rng, 0, n - 1));
  k.initial = {0};
  return k;
}

namespace detail {

inline FormulaPtr random_formula(std::mt19937_64& rng, const std::vector<std::string>& props, std::size_t depth,
                                 std::size_t& temporal) {
  if (depth == 0 || coin(rng, 0.25)) {
    const std::size_t r = uniform(rng, 0, props.size() + 1);
    if (r == props.size()) return ltl::top();
    if (r == props.size() + 1) return ltl::bottom();
    return ltl::prop(props[r]);
  }
  const bool can_temporal = temporal > 0;
  std::size_t choice = uniform(rng, 0, can_temporal ? 10 : 3);
  auto sub = [&] { return random_formula(rng, props, depth - 1, temporal); };
  switch (choice) {
    case 0: return ltl::neg(sub());
    case 1: { auto a = sub(); return ltl::conj(a, sub()); }
    case 2: { auto a = sub(); return ltl::disj(a, sub()); }
    case 3: { auto a = sub(); return ltl::implies(a, sub()); }
    default: break;
  }
  --temporal;
  switch (choice) {
    case 4: return ltl::next(sub());
    case 5:
    case 6: return ltl::globally(sub());
    case 7:
    case 8: return ltl::finally(sub());
    case 9: { auto a = sub(); return ltl::until(a, sub()); }
    default: { auto a = sub(); return ltl::release(a, sub()); }
  }
}

}  // namespace detail

/// Formula over `props` with at most `max_temporal` temporal operators.
inline FormulaPtr random_formula(std::mt19937_64& rng, const std::vector<std::string>& props = {"p", "q", "r"},
                                 std::size_t max_temporal = 4, std::size_t depth = 4) {
  std::size_t budget = max_temporal;
  return detail::random_formula(rng, props, depth, budget);
}

}  // namespace lct::testing
