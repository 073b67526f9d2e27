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

// Interpreter for the two-actor model: exhaustive exploration into a labelled
// transition system, collapse of that LTS back into a (possibly
// nondeterministic) annotated Mealy model, and the round-trip check.

#include <lct/actorgen.hpp>
#include <lct/automata.hpp>
#include <lct/cpm.hpp>
#include <lct/dot.hpp>
#include <lct/ltl.hpp>

#include <deque>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace lct {

/// Output symbol given to the timeout alternative when collapsing.
inline const Symbol kTimeoutOutput = "__timeout";

/// Message waiting to be processed in a node.
enum class MsgKind { Req, Input, Output, Timeout };

inline const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::Req: return "req";
    case MsgKind::Input: return "in";
    case MsgKind::Output: return "out";
    case MsgKind::Timeout: return "timeout";
  }
  return "?";
}

struct LtsNode {
  std::string state;
  PropSet props;
  PropSet temps;
  MsgKind pending = MsgKind::Req;
  std::string message;               // input or output symbol for In/Out
  std::optional<std::size_t> data;   // request case carried by an output call
};

struct LtsEdge {
  std::size_t from;
  std::size_t to;
  std::string label;  // name of the processed message
};

struct Lts {
  std::vector<LtsNode> nodes;
  std::vector<LtsEdge> edges;
  std::size_t initial = 0;

  std::vector<std::vector<std::size_t>> out_edges() const {
    std::vector<std::vector<std::size_t>> out(nodes.size());
    for (std::size_t e = 0; e < edges.size(); ++e) out[edges[e].from].push_back(e);
    return out;
  }
};

struct ExploreOptions {
  std::size_t ceiling = 1'000'000;
};

/// |Q| * (2^T + 2|Sigma| + 2): request nodes per temp valuation, input and
/// output nodes per (state, input), and the timeout nodes.
inline std::size_t lts_node_bound(const ActorModelIR& ir) {
  const std::size_t t = ir.temp_props.size();
  const std::size_t pow = t >= 63 ? std::numeric_limits<std::size_t>::max() / 4 : (std::size_t{1} << t);
  return ir.states.size() * (pow + 2 * ir.inputs.size() + 2);
}

/// Breadth-first exploration. One cycle is req (reset temporaries, pick an
/// input) -> input handler (update state and propositions, call an output or,
/// when mutated, timeout) -> output handler (set temporaries, call req).
inline Lts explore(const ActorModelIR& ir, const ExploreOptions& opt = {}) {
  using Key = std::tuple<StateId, std::vector<bool>, std::vector<bool>, MsgKind, std::size_t, std::size_t>;
  std::map<Key, std::size_t> index;
  std::vector<Key> keys;
  Lts lts;
  auto node = [&](Key k) {
    auto [it, fresh] = index.emplace(k, keys.size());
    if (fresh) {
      if (keys.size() >= opt.ceiling) throw CeilingExceeded("state space exceeds " + std::to_string(opt.ceiling) + " nodes");
      keys.push_back(std::move(k));
    }
    return it->second;
  };
  const std::size_t nt = ir.temp_props.size();
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  const std::vector<bool> no_temps(nt, false);
  lts.initial = node(Key{ir.initial, ir.labels[ir.initial], no_temps, MsgKind::Req, none, none});
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const auto [q, props, temps, kind, sym, data] = keys[k];
    switch (kind) {
      case MsgKind::Req:
        for (std::size_t i = 0; i < ir.inputs.size(); ++i)
          lts.edges.push_back({k, node(Key{q, props, no_temps, MsgKind::Input, i, none}), "req"});
        break;
      case MsgKind::Input: {
        const Branch& b = ir.handlers[sym][q];
        auto next = props;
        for (const auto& e : b.effects) next[e.var] = e.value;
        lts.edges.push_back({k, node(Key{b.next, next, temps, MsgKind::Output, b.output, sym}), ir.inputs[sym]});
        if (ir.mutated())
          lts.edges.push_back({k, node(Key{ir.initial, ir.labels[ir.initial], temps, MsgKind::Timeout, none, none}),
                               ir.inputs[sym]});
        break;
      }
      case MsgKind::Output: {
        auto next = temps;
        const OutputHandler& h = ir.output_handlers[sym];
        for (const auto& [i, vars] : h.cases)
          if (!h.takes_case || i == data)
            for (auto v : vars) next[v] = true;
        lts.edges.push_back({k, node(Key{q, props, next, MsgKind::Req, none, none}), ir.outputs[sym]});
        break;
      }
      case MsgKind::Timeout: {
        auto next = temps;
        next[ir.temp_index(kTimeoutProp)] = true;
        lts.edges.push_back({k, node(Key{q, props, next, MsgKind::Req, none, none}), "timeout"});
        break;
      }
    }
  }
  for (const auto& [q, props, temps, kind, sym, data] : keys) {
    LtsNode n;
    n.state = ir.states[q];
    for (std::size_t v = 0; v < props.size(); ++v)
      if (props[v]) n.props.insert(ir.state_props[v]);
    for (std::size_t v = 0; v < temps.size(); ++v)
      if (temps[v]) n.temps.insert(ir.temp_props[v]);
    n.pending = kind;
    if (kind == MsgKind::Input) n.message = ir.inputs[sym];
    if (kind == MsgKind::Output) {
      n.message = ir.outputs[sym];
      if (ir.output_handlers[sym].takes_case) n.data = data;
    }
    lts.nodes.push_back(std::move(n));
  }
  return lts;
}

// ---------------------------------------------------------------------------
// Collapse

struct CollapsedTransition {
  StateId from;
  Symbol input;
  StateId to;
  Symbol output;
  PropSet temps;

  auto tie() const { return std::tie(from, input, to, output, temps); }
  bool operator<(const CollapsedTransition& o) const { return tie() < o.tie(); }
  bool operator==(const CollapsedTransition& o) const { return tie() == o.tie(); }
};

/// Mealy-styled model recovered from an LTS; nondeterministic when the model
/// was mutated.
struct CollapsedModel {
  std::vector<std::string> states;
  std::vector<PropSet> labels;
  std::vector<Symbol> inputs;
  StateId initial = 0;
  std::vector<CollapsedTransition> transitions;

  bool deterministic() const {
    std::set<std::pair<StateId, Symbol>> seen;
    for (const auto& t : transitions)
      if (!seen.emplace(t.from, t.input).second) return false;
    return true;
  }

  /// Transitions per (state, input).
  std::size_t max_branching() const {
    std::map<std::pair<StateId, Symbol>, std::size_t> count;
    std::size_t best = 0;
    for (const auto& t : transitions) best = std::max(best, ++count[{t.from, t.input}]);
    return best;
  }

  AnnotatedMachine to_annotated() const {
    AnnotatedMachine a;
    for (const auto& s : states) a.machine.add_state(s);
    for (const auto& s : inputs) a.machine.add_input(s);
    for (const auto& t : transitions) {
      const auto i = a.machine.input_index(t.input);
      if (a.machine.transition(t.from, *i)) throw NondeterminismError(states[t.from], t.input);
      a.machine.set_transition(t.from, *i, t.to, a.machine.add_output(t.output));
    }
    a.machine.set_initial(initial);
    a.labels = labels;
    a.temp_labels.assign(states.size(), {});
    a.tau.assign(states.size(), false);
    return a;
  }

  /// Kripke structure with one extra state per transition carrying
  /// temporaries, named like the states expand_tau creates.
  KripkeStructure kripke() const {
    KripkeStructure k;
    for (std::size_t q = 0; q < states.size(); ++q) k.add_state(states[q], labels[q]);
    std::set<std::string> names(states.begin(), states.end());
    for (const auto& t : transitions) {
      if (t.temps.empty()) {
        k.add_edge(t.from, t.to);
        continue;
      }
      std::string name = "tau_" + states[t.from] + "_" + t.input;
      while (!names.insert(name).second) name += "'";
      PropSet label = labels[t.from];
      label.insert(t.temps.begin(), t.temps.end());
      const auto tau = k.add_state(name, std::move(label));
      k.add_edge(t.from, tau);
      k.add_edge(tau, t.to);
    }
    k.initial = {initial};
    k.make_total();
    return k;
  }
};

/// Collapsed model as DOT; edges carry their temporaries in a `temps`
/// attribute.
inline std::string emit_collapsed_dot(const CollapsedModel& c) {
  std::string out = "digraph collapsed {\n  __start [shape=point];\n";
  auto braces = [](const PropSet& s) {
    std::string r = "{";
    for (const auto& p : s) r += (r.size() > 1 ? "," : "") + p;
    return r + "}";
  };
  for (std::size_t q = 0; q < c.states.size(); ++q)
    out += "  " + dot::quote(c.states[q]) + " [label=" + dot::quote(c.states[q] + " " + braces(c.labels[q])) + "];\n";
  out += "  __start -> " + dot::quote(c.states[c.initial]) + ";\n";
  for (const auto& t : c.transitions) {
    out += "  " + dot::quote(c.states[t.from]) + " -> " + dot::quote(c.states[t.to]) +
           " [label=" + dot::quote(format_edge_label(t.input, t.output)) + "";
    if (!t.temps.empty()) out += ", temps=" + dot::quote(braces(t.temps));
    out += "];\n";
  }
  return out + "}\n";
}

inline CollapsedModel collapse(const Lts& lts) {
  if (lts.nodes.empty()) throw ModelError("empty state space");
  const auto out = lts.out_edges();
  CollapsedModel c;
  std::map<std::pair<std::string, PropSet>, StateId> index;
  std::map<std::string, std::size_t> name_uses;
  auto macro = [&](std::size_t n) {
    const LtsNode& node = lts.nodes[n];
    if (node.pending != MsgKind::Req)
      throw ModelError("ill-formed state space: node " + std::to_string(n) + " is not a request node");
    auto [it, fresh] = index.emplace(std::make_pair(node.state, node.props), c.states.size());
    if (fresh) {
      const std::size_t uses = name_uses[node.state]++;
      c.states.push_back(uses ? node.state + "#" + std::to_string(uses + 1) : node.state);
      c.labels.push_back(node.props);
    }
    return it->second;
  };
  c.initial = macro(lts.initial);
  std::set<CollapsedTransition> seen;
  std::set<Symbol> input_seen;
  auto expect = [&](std::size_t n, std::initializer_list<MsgKind> kinds) {
    for (auto k : kinds)
      if (lts.nodes[n].pending == k) return;
    throw ModelError("ill-formed state space: unexpected " + std::string(to_string(lts.nodes[n].pending)) +
                     " node " + std::to_string(n));
  };
  std::deque<std::size_t> queue{lts.initial};
  std::vector<bool> visited(lts.nodes.size());
  visited[lts.initial] = true;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    const StateId from = macro(x);
    for (auto e1 : out[x]) {
      const std::size_t y = lts.edges[e1].to;
      expect(y, {MsgKind::Input});
      const Symbol& input = lts.nodes[y].message;
      if (input_seen.insert(input).second) c.inputs.push_back(input);
      for (auto e2 : out[y]) {
        const std::size_t z = lts.edges[e2].to;
        expect(z, {MsgKind::Output, MsgKind::Timeout});
        const Symbol output = lts.nodes[z].pending == MsgKind::Output ? lts.nodes[z].message : kTimeoutOutput;
        for (auto e3 : out[z]) {
          const std::size_t w = lts.edges[e3].to;
          expect(w, {MsgKind::Req});
          CollapsedTransition t{from, input, macro(w), output, lts.nodes[w].temps};
          if (seen.insert(t).second) c.transitions.push_back(t);
          if (!visited[w]) {
            visited[w] = true;
            queue.push_back(w);
          }
        }
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// LTS DOT format

namespace detail {

inline std::string join(const PropSet& s) {
  std::string out;
  for (const auto& p : s) out += (out.empty() ? "" : ",") + p;
  return out;
}

inline PropSet split_set(const std::string& s) {
  PropSet out;
  for (auto& p : split(s, ','))
    if (!p.empty()) out.insert(p);
  return out;
}

inline MsgKind parse_kind(const std::string& s, std::size_t line) {
  if (s == "req") return MsgKind::Req;
  if (s == "in") return MsgKind::Input;
  if (s == "out") return MsgKind::Output;
  if (s == "timeout") return MsgKind::Timeout;
  throw ParseError("unknown pending message kind '" + s + "'", line);
}

}  // namespace detail

inline std::string emit_lts_dot(const Lts& lts) {
  std::ostringstream os;
  os << "digraph lts {\n";
  os << "  __start [shape=point];\n";
  for (std::size_t n = 0; n < lts.nodes.size(); ++n) {
    const LtsNode& v = lts.nodes[n];
    std::string label = "q=" + v.state + "; props=" + detail::join(v.props) + "; temps=" + detail::join(v.temps) +
                        "; pending=" + to_string(v.pending);
    if (!v.message.empty()) label += " " + v.message;
    if (v.data) label += "(" + std::to_string(*v.data) + ")";
    os << "  n" << n << " [label=" << dot::quote(label) << ", q=" << dot::quote(v.state)
       << ", props=" << dot::quote(detail::join(v.props)) << ", temps=" << dot::quote(detail::join(v.temps))
       << ", pending=" << to_string(v.pending);
    if (!v.message.empty()) os << ", msg=" << dot::quote(v.message);
    if (v.data) os << ", data=" << *v.data;
    os << "];\n";
  }
  os << "  __start -> n" << lts.initial << ";\n";
  for (const auto& e : lts.edges)
    os << "  n" << e.from << " -> n" << e.to << " [label=" << dot::quote(e.label) << "];\n";
  os << "}\n";
  return os.str();
}

inline Lts parse_lts_dot(std::string_view text) {
  const dot::Graph g = dot::read(text);
  Lts lts;
  std::map<std::string, std::size_t> index;
  std::optional<std::size_t> initial;
  for (const auto& n : g.nodes) {
    if (detail::is_start_node(n.id)) continue;
    auto attr = [&](const char* key) -> const std::string* {
      auto it = n.attrs.find(key);
      return it == n.attrs.end() ? nullptr : &it->second;
    };
    if (!attr("q") || !attr("pending")) throw ParseError("node " + n.id + " lacks q/pending attributes", n.line);
    LtsNode v;
    v.state = *attr("q");
    if (auto p = attr("props")) v.props = detail::split_set(*p);
    if (auto t = attr("temps")) v.temps = detail::split_set(*t);
    v.pending = detail::parse_kind(*attr("pending"), n.line);
    if (auto m = attr("msg")) v.message = *m;
    if (auto d = attr("data")) v.data = std::stoul(*d);
    if ((v.pending == MsgKind::Input || v.pending == MsgKind::Output) && v.message.empty())
      throw ParseError("node " + n.id + " lacks its message symbol", n.line);
    index[n.id] = lts.nodes.size();
    lts.nodes.push_back(std::move(v));
  }
  for (const auto& e : g.edges) {
    if (detail::is_start_node(e.from)) {
      if (initial) throw ParseError("more than one initial node", e.line);
      initial = index.at(e.to);
      continue;
    }
    auto f = index.find(e.from), t = index.find(e.to);
    if (f == index.end() || t == index.end()) throw ParseError("edge between unknown nodes", e.line);
    auto label = e.attrs.find("label");
    lts.edges.push_back({f->second, t->second, label == e.attrs.end() ? "" : label->second});
  }
  if (!initial) throw ModelError("missing initial state");
  lts.initial = *initial;
  return lts;
}

// ---------------------------------------------------------------------------
// Round trip

struct RoundtripReport {
  bool pass = false;
  std::string message;
  Word witness;  // input word reaching the first difference
  std::size_t lts_nodes = 0;
  std::size_t lts_bound = 0;
};

/// Explores and collapses `ir`, then compares against `base` (an unexpanded
/// annotated machine): bisimilarity, state labels along the bisimulation,
/// and temporaries per transition.
inline RoundtripReport verify_roundtrip(const AnnotatedMachine& base, const Cpm& cpm, const ActorModelIR& ir,
                                        const ExploreOptions& opt = {}) {
  RoundtripReport r;
  const Lts lts = explore(ir, opt);
  r.lts_nodes = lts.nodes.size();
  r.lts_bound = lts_node_bound(ir);
  const CollapsedModel c = collapse(lts);
  if (!c.deterministic()) {
    r.message = "collapsed model is nondeterministic";
    return r;
  }
  const AnnotatedMachine back = c.to_annotated();
  const MealyMachine& m = base.machine;
  const MealyMachine& n = back.machine;
  std::map<std::pair<StateId, StateId>, std::size_t> index;
  std::vector<std::pair<StateId, StateId>> order{{m.initial(), n.initial()}};
  std::vector<Word> words{{}};
  index.emplace(order[0], 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto [p, q] = order[k];
    if (base.labels[p] != back.labels[q]) {
      r.witness = words[k];
      r.message = "labels differ at " + m.state_name(p) + ": {" + detail::join(base.labels[p]) + "} vs {" +
                  detail::join(back.labels[q]) + "}";
      return r;
    }
    for (std::size_t i = 0; i < m.inputs().size(); ++i) {
      const Symbol& s = m.inputs()[i];
      const auto& t = m.transition(p, i);
      const auto u = n.step(q, s);
      Word w = words[k];
      w.push_back(s);
      if (!t || !u || m.outputs()[t->output] != u->second) {
        r.witness = w;
        r.message = "outputs differ on " + to_string(w);
        return r;
      }
      PropSet temps;
      for (const auto& tr : c.transitions)
        if (tr.from == q && tr.input == s) temps = tr.temps;
      if (temps != tau_props(cpm, s, u->second)) {
        r.witness = w;
        r.message = "temporaries differ on " + to_string(w);
        return r;
      }
      if (index.emplace(std::make_pair(t->target, u->first), order.size()).second) {
        order.emplace_back(t->target, u->first);
        words.push_back(std::move(w));
      }
    }
  }
  r.pass = true;
  r.message = "PASS";
  return r;
}

inline RoundtripReport verify_roundtrip(const AnnotatedMachine& a, const Cpm& cpm, const ExploreOptions& opt = {}) {
  const AnnotatedMachine base = a.expanded() ? merge_tau(a) : a;
  return verify_roundtrip(base, cpm, build_ir(base, cpm), opt);
}

// ---------------------------------------------------------------------------
// Simulation

struct SimStep {
  StateId state;
  std::vector<bool> props;
  Symbol output;
  PropSet temps;
  bool timed_out = false;
};

/// Runs an input word through the model. With an rng, timeouts of a mutated
/// model fire with the configured probability; without one they never fire.
inline std::vector<SimStep> simulate(const ActorModelIR& ir, const Word& word, std::mt19937_64* rng = nullptr) {
  std::vector<SimStep> out;
  StateId q = ir.initial;
  std::vector<bool> props = ir.labels[ir.initial];
  std::bernoulli_distribution fault(ir.mutated() ? ir.mutation.timeout_probability : 0.0);
  for (const auto& s : word) {
    auto it = std::find(ir.inputs.begin(), ir.inputs.end(), s);
    if (it == ir.inputs.end()) throw ContractError("input " + s + " is not in the model's alphabet");
    const std::size_t i = static_cast<std::size_t>(it - ir.inputs.begin());
    SimStep step;
    if (ir.mutated() && rng && fault(*rng)) {
      q = ir.initial;
      props = ir.labels[ir.initial];
      step.output = kTimeoutOutput;
      step.temps = {kTimeoutProp};
      step.timed_out = true;
    } else {
      const Branch& b = ir.handlers[i][q];
      for (const auto& e : b.effects) props[e.var] = e.value;
      q = b.next;
      step.output = ir.outputs[b.output];
      const OutputHandler& h = ir.output_handlers[b.output];
      for (const auto& [c, vars] : h.cases)
        if (!h.takes_case || c == i)
          for (auto v : vars) step.temps.insert(ir.temp_props[v]);
    }
    step.state = q;
    step.props = props;
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace lct
