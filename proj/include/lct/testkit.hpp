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

// Counterexample lassos as replayable test cases, replay against a SUL and
// conversion of divergences into learner counterexamples.

#include <lct/buchi.hpp>
#include <lct/cpm.hpp>
#include <lct/learning.hpp>
#include <lct/ltl.hpp>

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lct {

struct TestCase {
  std::string property;
  Word inputs;
  Word expected;
  std::vector<std::string> stem;  // Kripke state names of the witness
  std::vector<std::string> loop;
  std::size_t unroll = 1;
  std::optional<std::vector<std::string>> concrete_inputs;
};

/// Drives the annotated machine along stem followed by `unroll` copies of the
/// loop. Entering a tau-state contributes its input, leaving it contributes
/// the output; a path ending in a tau-state is completed by its epsilon edge.
inline TestCase concretize(const Lasso& lasso, const KripkeStructure& k, const AnnotatedMachine& a,
                           std::size_t unroll = 1, std::string property = {}) {
  if (unroll == 0) throw ContractError("unroll must be positive");
  if (!is_valid_lasso(k, lasso)) throw ContractError("lasso is not a path of the Kripke structure");
  const MealyMachine& m = a.machine;
  auto machine_state = [&](std::size_t s) {
    auto q = m.find_state(k.names.at(s));
    if (!q) throw ContractError("Kripke state '" + k.names[s] + "' does not belong to the annotated machine");
    return *q;
  };
  std::vector<StateId> path;
  for (auto s : lasso.stem) path.push_back(machine_state(s));
  for (std::size_t r = 0; r < unroll; ++r)
    for (auto s : lasso.loop) path.push_back(machine_state(s));

  TestCase t;
  t.property = std::move(property);
  t.unroll = unroll;
  for (auto s : lasso.stem) t.stem.push_back(k.names[s]);
  for (auto s : lasso.loop) t.loop.push_back(k.names[s]);
  if (path.front() != m.initial()) throw ContractError("lasso does not start in the initial state");

  auto edge = [&](StateId u, StateId v) -> std::size_t {
    for (std::size_t i = 0; i < m.inputs().size(); ++i)
      if (const auto& tr = m.transition(u, i); tr && tr->target == v) return i;
    throw ContractError("no transition " + m.state_name(u) + " -> " + m.state_name(v) + " in the annotated machine");
  };
  auto output = [&](StateId u, std::size_t i) { return m.outputs()[m.transition(u, i)->output]; };
  for (std::size_t p = 0; p + 1 < path.size(); ++p) {
    const StateId u = path[p], v = path[p + 1];
    const std::size_t i = edge(u, v);
    if (a.is_tau(u)) {
      t.expected.push_back(output(u, i));
    } else {
      t.inputs.push_back(m.inputs()[i]);
      if (!a.is_tau(v)) t.expected.push_back(output(u, i));
    }
  }
  if (a.is_tau(path.back())) {
    const StateId u = path.back();
    const auto i = m.input_index(kEpsilon);
    if (!i || !m.transition(u, *i)) throw ContractError("tau-state " + m.state_name(u) + " has no epsilon edge");
    t.expected.push_back(output(u, *i));
  }
  if (t.inputs.size() != t.expected.size()) throw ContractError("witness path is not reproducible on the machine");
  return t;
}

/// Applies a mapper's input abstraction to every input of the test.
inline void attach_concrete(TestCase& t, const Mapper& mapper) {
  std::vector<std::string> c;
  for (const auto& s : t.inputs) c.push_back(mapper.concretize(s));
  t.concrete_inputs = std::move(c);
}

// ---------------------------------------------------------------------------
// Replay

enum class ReplayVerdict { Confirmed, Diverged };

inline const char* to_string(ReplayVerdict v) { return v == ReplayVerdict::Confirmed ? "CONFIRMED" : "DIVERGED"; }

struct ReplayResult {
  ReplayVerdict verdict = ReplayVerdict::Confirmed;
  Word observed;
  std::optional<std::size_t> divergence;  // first differing position
  Word inputs;
};

/// The SUL raised an error part way through a test.
class SulFailure : public Error {
 public:
  SulFailure(const std::string& what, std::size_t position)
      : Error("SUL failed at position " + std::to_string(position) + ": " + what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Runs the whole word; the full observed word is kept even after a
/// divergence.
inline ReplayResult replay(const TestCase& t, SulInterface& sul) {
  if (t.inputs.size() != t.expected.size()) throw ContractError("test case has mismatched input and output lengths");
  ReplayResult r;
  r.inputs = t.inputs;
  sul.reset();
  for (std::size_t p = 0; p < t.inputs.size(); ++p) {
    try {
      r.observed.push_back(sul.step(t.inputs[p]));
    } catch (const Error& e) {
      throw SulFailure(e.what(), p);
    }
    if (!r.divergence && r.observed.back() != t.expected[p]) r.divergence = p;
  }
  r.verdict = r.divergence ? ReplayVerdict::Diverged : ReplayVerdict::Confirmed;
  return r;
}

/// The diverging prefix, usable as an equivalence counterexample.
inline Word feedback(const ReplayResult& r) {
  if (r.verdict != ReplayVerdict::Diverged || !r.divergence) throw ContractError("feedback needs a DIVERGED replay");
  return Word(r.inputs.begin(), r.inputs.begin() + static_cast<std::ptrdiff_t>(*r.divergence) + 1);
}

// ---------------------------------------------------------------------------
// JSON lines

inline nlohmann::json to_json(const TestCase& t) {
  nlohmann::json j;
  j["property"] = t.property;
  j["inputs"] = t.inputs;
  j["expected"] = t.expected;
  j["witness"] = {{"stem", t.stem}, {"loop", t.loop}, {"unroll", t.unroll}};
  if (t.concrete_inputs) j["concrete_inputs"] = *t.concrete_inputs;
  return j;
}

inline TestCase test_from_json(const nlohmann::json& j) {
  TestCase t;
  try {
    t.property = j.at("property").get<std::string>();
    t.inputs = j.at("inputs").get<Word>();
    t.expected = j.at("expected").get<Word>();
    if (j.contains("witness")) {
      const auto& p = j.at("witness");
      t.stem = p.value("stem", std::vector<std::string>{});
      t.loop = p.value("loop", std::vector<std::string>{});
      t.unroll = p.value("unroll", std::size_t{1});
    }
    if (j.contains("concrete_inputs")) t.concrete_inputs = j.at("concrete_inputs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed test case: ") + e.what(), 1);
  }
  if (t.inputs.size() != t.expected.size()) throw ParseError("test case has mismatched input and output lengths", 1);
  return t;
}

inline std::string emit_tests_jsonl(const std::vector<TestCase>& tests) {
  std::string out;
  for (const auto& t : tests) out += to_json(t).dump() + "\n";
  return out;
}

inline std::vector<TestCase> parse_tests_jsonl(std::string_view text) {
  std::vector<TestCase> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(test_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), n);
    } catch (const ParseError& e) {
      throw ParseError(e.message(), n);
    }
  }
  return out;
}

inline nlohmann::json to_json(const ReplayResult& r, const TestCase& t) {
  nlohmann::json j;
  j["property"] = t.property;
  j["verdict"] = to_string(r.verdict);
  j["inputs"] = r.inputs;
  j["expected"] = t.expected;
  j["observed"] = r.observed;
  if (r.divergence) j["divergence"] = *r.divergence;
  return j;
}

}  // namespace lct
