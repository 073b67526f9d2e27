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

#include <lct/dot.hpp>
#include <lct/error.hpp>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lct {

using Symbol = std::string;
using Word = std::vector<Symbol>;
using StateId = std::size_t;

/// Reserved input driving the second half of a split (tau) transition.
inline const Symbol kEpsilon = "__eps";
/// Reserved output on the first half of a split transition.
inline const Symbol kTauOutput = "__tau";
inline const Symbol kNoResponse = "no_response";

inline std::string to_string(const Word& w) {
  std::string out = "<";
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? ", " : "") + w[i];
  return out + ">";
}

struct Transition {
  StateId target = 0;
  std::size_t output = 0;  // index into outputs()

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Deterministic finite-state transducer. States, inputs and outputs keep
/// insertion order; that order drives every serialization.
///
/// The transition table may be partial while a machine is being built (and
/// for tau-expanded machines, where split states only define kEpsilon);
/// validate() enforces input-completeness where it is required.
class MealyMachine {
 public:
  StateId add_state(std::string name) {
    if (state_index_.count(name)) throw ModelError("duplicate state '" + name + "'");
    state_index_.emplace(name, states_.size());
    states_.push_back(std::move(name));
    delta_.emplace_back(inputs_.size());
    return states_.size() - 1;
  }

  StateId ensure_state(const std::string& name) {
    auto it = state_index_.find(name);
    return it != state_index_.end() ? it->second : add_state(name);
  }

  std::size_t add_input(const Symbol& s) {
    if (auto i = input_index(s)) return *i;
    if (s.empty()) throw ModelError("empty input symbol");
    input_index_.emplace(s, inputs_.size());
    inputs_.push_back(s);
    for (auto& row : delta_) row.emplace_back();
    return inputs_.size() - 1;
  }

  std::size_t add_output(const Symbol& s) {
    if (auto i = output_index(s)) return *i;
    if (s.empty()) throw ModelError("empty output symbol");
    output_index_.emplace(s, outputs_.size());
    outputs_.push_back(s);
    return outputs_.size() - 1;
  }

  void set_initial(StateId q) {
    check_state(q);
    initial_ = q;
  }

  /// Defines delta/lambda at (from, input). Redefining with a different
  /// target or output is a determinism violation.
  void set_transition(StateId from, std::size_t input, StateId to, std::size_t output) {
    check_state(from);
    check_state(to);
    if (input >= inputs_.size() || output >= outputs_.size()) throw ModelError("symbol index out of range");
    auto& slot = delta_[from][input];
    const Transition t{to, output};
    if (slot && *slot != t) throw NondeterminismError(states_[from], inputs_[input]);
    slot = t;
  }

  void add_transition(const std::string& from, const Symbol& input, const std::string& to, const Symbol& output) {
    const StateId f = ensure_state(from);
    const StateId t = ensure_state(to);
    set_transition(f, add_input(input), t, add_output(output));
  }

  std::size_t num_states() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<Symbol>& inputs() const { return inputs_; }
  const std::vector<Symbol>& outputs() const { return outputs_; }
  const std::string& state_name(StateId q) const { return states_.at(q); }
  bool has_initial() const { return initial_.has_value(); }

  StateId initial() const {
    if (!initial_) throw ModelError("machine has no initial state");
    return *initial_;
  }

  std::optional<StateId> find_state(std::string_view name) const {
    auto it = state_index_.find(std::string(name));
    return it == state_index_.end() ? std::nullopt : std::optional<StateId>(it->second);
  }

  std::optional<std::size_t> input_index(std::string_view s) const {
    auto it = input_index_.find(std::string(s));
    return it == input_index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }

  std::optional<std::size_t> output_index(std::string_view s) const {
    auto it = output_index_.find(std::string(s));
    return it == output_index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }

  const std::optional<Transition>& transition(StateId q, std::size_t input) const { return delta_.at(q).at(input); }

  /// One step; nullopt if the symbol is unknown or undefined in q.
  std::optional<std::pair<StateId, Symbol>> step(StateId q, std::string_view input) const {
    const auto i = input_index(input);
    if (!i) return std::nullopt;
    const auto& t = delta_.at(q)[*i];
    if (!t) return std::nullopt;
    return std::make_pair(t->target, outputs_[t->output]);
  }

  std::optional<Word> try_run(const Word& word) const {
    Word out;
    StateId q = initial();
    for (const auto& s : word) {
      auto r = step(q, s);
      if (!r) return std::nullopt;
      q = r->first;
      out.push_back(std::move(r->second));
    }
    return out;
  }

  Word run(const Word& word) const {
    auto out = try_run(word);
    if (!out) throw ModelError("word " + to_string(word) + " leaves the defined transitions");
    return *out;
  }

  std::vector<std::pair<StateId, std::size_t>> missing_transitions() const {
    std::vector<std::pair<StateId, std::size_t>> out;
    for (StateId q = 0; q < states_.size(); ++q)
      for (std::size_t i = 0; i < inputs_.size(); ++i)
        if (!delta_[q][i]) out.emplace_back(q, i);
    return out;
  }

  bool is_complete() const { return missing_transitions().empty(); }

  /// Throws unless the machine has an initial state and is input-complete.
  void validate() const {
    initial();
    const auto missing = missing_transitions();
    if (!missing.empty()) {
      std::string msg = "machine is not input-complete; missing";
      for (std::size_t k = 0; k < missing.size() && k < 8; ++k)
        msg += " (" + states_[missing[k].first] + ", " + inputs_[missing[k].second] + ")";
      if (missing.size() > 8) msg += " ...";
      throw IncompleteMachineError(msg);
    }
  }

  /// Copy with every undefined (state, input) turned into a self-loop
  /// producing `filler`.
  MealyMachine completed(const Symbol& filler = kNoResponse) const {
    MealyMachine m = *this;
    const auto missing = missing_transitions();
    if (missing.empty()) return m;
    const std::size_t o = m.add_output(filler);
    for (auto [q, i] : missing) m.set_transition(q, i, q, o);
    return m;
  }

 private:
  void check_state(StateId q) const {
    if (q >= states_.size()) throw ModelError("state index out of range");
  }

  std::vector<std::string> states_;
  std::vector<Symbol> inputs_;
  std::vector<Symbol> outputs_;
  std::map<std::string, StateId> state_index_;
  std::map<Symbol, std::size_t> input_index_;
  std::map<Symbol, std::size_t> output_index_;
  std::vector<std::vector<std::optional<Transition>>> delta_;
  std::optional<StateId> initial_;
};

// ---------------------------------------------------------------------------
// DOT serialization

namespace detail {

inline bool needs_escape(char c) {
  return c == '/' || c == '\\' || std::isspace(static_cast<unsigned char>(c));
}

inline std::string escape_symbol(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (needs_escape(c)) out += '\\';
    out += c;
  }
  return out;
}

inline bool is_start_node(std::string_view id) { return id.rfind("__start", 0) == 0; }

}  // namespace detail

/// Splits an edge label `input / output`. Backslash escapes a literal '/',
/// backslash or whitespace inside a symbol.
inline std::pair<Symbol, Symbol> parse_edge_label(std::string_view label, std::size_t line) {
  Symbol parts[2];
  int part = 0;
  bool pending_space = false;
  for (std::size_t i = 0; i < label.size(); ++i) {
    char c = label[i];
    if (c == '\\') {
      if (i + 1 >= label.size()) throw ParseError("dangling escape in label '" + std::string(label) + "'", line);
      if (pending_space && !parts[part].empty()) throw ParseError("unescaped whitespace inside symbol", line);
      pending_space = false;
      parts[part] += label[++i];
      continue;
    }
    if (c == '/') {
      if (part == 1) throw ParseError("label '" + std::string(label) + "' has more than one '/'", line);
      part = 1;
      pending_space = false;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space && !parts[part].empty()) throw ParseError("unescaped whitespace inside symbol", line);
    pending_space = false;
    parts[part] += c;
  }
  if (part != 1) throw ParseError("label '" + std::string(label) + "' is not of the form 'input / output'", line);
  if (parts[0].empty() || parts[1].empty()) throw ParseError("empty symbol in label '" + std::string(label) + "'", line);
  return {parts[0], parts[1]};
}

inline std::string format_edge_label(std::string_view input, std::string_view output) {
  return detail::escape_symbol(input) + " / " + detail::escape_symbol(output);
}

struct DotOptions {
  /// Add `no_response` self-loops instead of rejecting incomplete machines.
  bool complete_with_self_loops = false;
  /// Permit the reserved kEpsilon/kTauOutput symbols (tau-expanded models).
  bool allow_reserved = false;
  /// Skip the input-completeness check entirely.
  bool allow_partial = false;
};

/// Builds a machine from an already-read DOT graph; shared by the plain and
/// annotated readers.
inline MealyMachine machine_from_graph(const dot::Graph& g, const DotOptions& opt = {}) {
  MealyMachine m;
  std::optional<std::string> initial;
  auto set_initial = [&](const std::string& id, std::size_t line) {
    if (initial && *initial != id)
      throw ParseError("more than one initial state ('" + *initial + "', '" + id + "')", line);
    initial = id;
  };
  for (const auto& n : g.nodes) {
    if (detail::is_start_node(n.id)) continue;
    m.ensure_state(n.id);
    auto it = n.attrs.find("initial");
    if (it != n.attrs.end() && it->second == "true") set_initial(n.id, n.line);
  }
  for (const auto& e : g.edges) {
    if (detail::is_start_node(e.from)) {
      set_initial(e.to, e.line);
      continue;
    }
    auto it = e.attrs.find("label");
    if (it == e.attrs.end()) throw ParseError("edge " + e.from + " -> " + e.to + " has no label", e.line);
    auto [in, out] = parse_edge_label(it->second, e.line);
    if (!opt.allow_reserved && (in == kEpsilon || out == kTauOutput))
      throw ParseError("reserved symbol in label '" + it->second + "'", e.line);
    const StateId from = m.ensure_state(e.from);
    const StateId to = m.ensure_state(e.to);
    const std::size_t i = m.add_input(in);
    const std::size_t o = m.add_output(out);
    const auto& existing = m.transition(from, i);
    if (existing && (existing->target != to || existing->output != o)) throw NondeterminismError(e.from, in);
    m.set_transition(from, i, to, o);
  }
  if (!initial) throw ModelError("missing initial state");
  m.set_initial(*m.find_state(*initial));
  if (opt.allow_partial) return m;
  if (opt.complete_with_self_loops) return m.completed();
  m.validate();
  return m;
}

inline MealyMachine parse_dot(std::string_view text, const DotOptions& opt = {}) {
  return machine_from_graph(dot::read(text), opt);
}

inline std::string emit_dot(const MealyMachine& m) {
  std::ostringstream os;
  os << "digraph mealy {\n";
  os << "  __start [shape=point];\n";
  for (const auto& q : m.states()) os << "  " << dot::quote(q) << ";\n";
  if (m.has_initial()) os << "  __start -> " << dot::quote(m.state_name(m.initial())) << ";\n";
  for (StateId q = 0; q < m.num_states(); ++q)
    for (std::size_t i = 0; i < m.inputs().size(); ++i)
      if (const auto& t = m.transition(q, i))
        os << "  " << dot::quote(m.state_name(q)) << " -> " << dot::quote(m.state_name(t->target))
           << " [label=" << dot::quote(format_edge_label(m.inputs()[i], m.outputs()[t->output])) << "];\n";
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Structural operations

/// Restriction to the states reachable from the initial state.
inline MealyMachine reachable(const MealyMachine& m) {
  std::vector<bool> seen(m.num_states(), false);
  std::deque<StateId> queue{m.initial()};
  seen[m.initial()] = true;
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i < m.inputs().size(); ++i)
      if (const auto& t = m.transition(q, i); t && !seen[t->target]) {
        seen[t->target] = true;
        queue.push_back(t->target);
      }
  }
  MealyMachine r;
  for (const auto& s : m.inputs()) r.add_input(s);
  for (const auto& s : m.outputs()) r.add_output(s);
  for (StateId q = 0; q < m.num_states(); ++q)
    if (seen[q]) r.add_state(m.state_name(q));
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (!seen[q]) continue;
    for (std::size_t i = 0; i < m.inputs().size(); ++i)
      if (const auto& t = m.transition(q, i))
        r.set_transition(*r.find_state(m.state_name(q)), i, *r.find_state(m.state_name(t->target)), t->output);
  }
  r.set_initial(*r.find_state(m.state_name(m.initial())));
  return r;
}

struct Equivalence {
  bool equivalent = false;
  /// Shortest input word on which the output words differ (or on which
  /// exactly one machine is undefined). Empty when equivalent.
  Word witness;
  /// Product states visited; for equivalent machines this is the
  /// bisimulation relation restricted to reachable pairs.
  std::vector<std::pair<StateId, StateId>> relation;
  /// Inputs ignored because they occur in only one alphabet.
  std::vector<Symbol> dropped_inputs;
};

/// Bisimilarity of deterministic Mealy machines, decided by breadth-first
/// search over the reachable part of the product. Partial machines are
/// supported: a (state, input) defined on one side only is a difference.
inline Equivalence bisimilar(const MealyMachine& a, const MealyMachine& b, bool restrict_to_shared = false) {
  Equivalence result;
  std::vector<Symbol> shared;
  for (const auto& s : a.inputs()) {
    if (b.input_index(s)) shared.push_back(s);
    else result.dropped_inputs.push_back(s);
  }
  for (const auto& s : b.inputs())
    if (!a.input_index(s)) result.dropped_inputs.push_back(s);
  if (!result.dropped_inputs.empty() && !restrict_to_shared) {
    std::string msg = "input alphabets differ:";
    for (const auto& s : result.dropped_inputs) msg += " " + s;
    throw AlphabetMismatchError(msg);
  }

  struct Visit {
    std::size_t parent;
    std::size_t input;  // index into shared
  };
  std::map<std::pair<StateId, StateId>, std::size_t> index;
  std::vector<std::pair<StateId, StateId>> order;
  std::vector<Visit> visits;
  const auto start = std::make_pair(a.initial(), b.initial());
  index.emplace(start, 0);
  order.push_back(start);
  visits.push_back({0, 0});

  auto witness_to = [&](std::size_t node, std::size_t last_input) {
    Word w{shared[last_input]};
    while (node != 0) {
      w.push_back(shared[visits[node].input]);
      node = visits[node].parent;
    }
    std::reverse(w.begin(), w.end());
    return w;
  };

  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto [p, q] = order[k];
    for (std::size_t i = 0; i < shared.size(); ++i) {
      const auto ra = a.step(p, shared[i]);
      const auto rb = b.step(q, shared[i]);
      if (!ra && !rb) continue;
      if (!ra || !rb || ra->second != rb->second) {
        result.witness = witness_to(k, i);
        result.relation = order;
        return result;
      }
      const auto next = std::make_pair(ra->first, rb->first);
      if (index.emplace(next, order.size()).second) {
        order.push_back(next);
        visits.push_back({k, i});
      }
    }
  }
  result.equivalent = true;
  result.relation = std::move(order);
  return result;
}

/// Label-preserving graph isomorphism of the reachable parts (initial state
/// mapped to initial state). Alphabets are compared as sets.
inline bool isomorphic(const MealyMachine& a, const MealyMachine& b) {
  const auto ra = reachable(a);
  const auto rb = reachable(b);
  if (ra.num_states() != rb.num_states()) return false;
  if (std::set<Symbol>(ra.inputs().begin(), ra.inputs().end()) !=
      std::set<Symbol>(rb.inputs().begin(), rb.inputs().end()))
    return false;
  std::vector<std::optional<StateId>> map(ra.num_states());
  std::vector<bool> used(rb.num_states(), false);
  std::deque<StateId> queue{ra.initial()};
  map[ra.initial()] = rb.initial();
  used[rb.initial()] = true;
  while (!queue.empty()) {
    const StateId p = queue.front();
    queue.pop_front();
    for (const auto& s : ra.inputs()) {
      const auto x = ra.step(p, s);
      const auto y = rb.step(*map[p], s);
      if (!x && !y) continue;
      if (!x || !y || x->second != y->second) return false;
      if (map[x->first]) {
        if (*map[x->first] != y->first) return false;
      } else {
        if (used[y->first]) return false;
        map[x->first] = y->first;
        used[y->first] = true;
        queue.push_back(x->first);
      }
    }
  }
  return true;
}

}  // namespace lct
