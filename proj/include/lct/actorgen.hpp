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

// Two-actor system/environment model of an annotated Mealy machine, its
// Rebeca rendering, and the timeout mutation.

#include <lct/cpm.hpp>
#include <lct/error.hpp>

#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace lct {

inline const std::string kTimeoutProp = "TIMEOUT";

struct Assignment {
  std::size_t var;  // index into ActorModelIR::state_props
  bool value;
};

/// One `if(state==q)` arm of an input handler.
struct Branch {
  StateId next;
  std::vector<Assignment> effects;  // sets first, then clears
  std::size_t output;               // index into outputs
};

struct OutputHandler {
  bool takes_case = false;
  /// temps[i]: temporary variables set when the output answers input case i;
  /// only cases that can provoke this output are listed.
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> cases;
};

struct MutationConfig {
  bool timeout_enabled = false;
  double timeout_probability = 0.1;
};

struct ActorModelIR {
  std::vector<std::string> states;        // machine order
  StateId initial = 0;
  std::vector<std::string> inputs;        // request case i selects inputs[i]
  std::vector<std::string> outputs;
  std::vector<std::string> state_props;   // sorted
  std::vector<std::string> temp_props;    // sorted
  std::vector<std::vector<bool>> labels;  // labels[q][v]: value of state_props[v] in q
  std::vector<std::vector<Branch>> handlers;  // handlers[input][state]
  std::vector<OutputHandler> output_handlers;
  std::size_t queue_capacity = 3;
  MutationConfig mutation;

  // identifiers used by the Rebeca rendering
  std::vector<std::string> input_methods, output_methods, state_vars, temp_vars;
  std::string timeout_var;

  std::size_t temp_index(const std::string& p) const {
    return static_cast<std::size_t>(std::find(temp_props.begin(), temp_props.end(), p) - temp_props.begin());
  }
  bool mutated() const { return mutation.timeout_enabled; }
};

namespace detail {

inline const std::set<std::string>& rebeca_reserved() {
  static const std::set<std::string> words{
      "boolean", "break",   "case",      "data",      "else",         "environment", "false", "fault",
      "if",      "int",     "knownrebecs", "main",    "msgsrv",       "reactiveclass", "req", "self",
      "sender",  "state",   "statevars", "switch",    "system",       "timedout",    "timeout", "true"};
  return words;
}

inline bool is_lower_identifier(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

inline std::string normalize(std::string_view s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? char(std::tolower(static_cast<unsigned char>(c))) : '_';
  return out;
}

// Rebeca identifiers for one namespace: verbatim when already a lower-case
// identifier, otherwise normalized behind `prefix`; clashes get numbered.
inline std::vector<std::string> identifiers(const std::vector<std::string>& symbols, const std::string& prefix,
                                            std::set<std::string>& taken) {
  std::vector<std::string> out;
  for (const auto& s : symbols) {
    std::string id = is_lower_identifier(s) ? s : prefix + normalize(s);
    if (!std::isalpha(static_cast<unsigned char>(id[0]))) id = "v_" + id;
    std::string candidate = id;
    for (int n = 2; taken.count(candidate) || rebeca_reserved().count(candidate); ++n) candidate = id + "_" + std::to_string(n);
    taken.insert(candidate);
    out.push_back(candidate);
  }
  return out;
}

}  // namespace detail

/// Builds the two-actor model. A tau-expanded machine is merged back first;
/// temporary propositions come from the CPM's temporary conditions.
inline ActorModelIR build_ir(const AnnotatedMachine& annotated, const Cpm& cpm) {
  const AnnotatedMachine a = annotated.expanded() ? merge_tau(annotated) : annotated;
  const MealyMachine& m = a.machine;
  const auto missing = m.missing_transitions();
  if (!missing.empty())
    throw IncompleteMachineError("machine is not input-complete: state " + m.state_name(missing[0].first) +
                                 " lacks input " + m.inputs()[missing[0].second]);
  ActorModelIR ir;
  ir.states = m.states();
  ir.initial = m.initial();
  ir.inputs = m.inputs();
  ir.outputs = m.outputs();
  PropSet state_props = cpm.state_props();
  for (const auto& l : a.labels) state_props.insert(l.begin(), l.end());
  ir.state_props.assign(state_props.begin(), state_props.end());
  const PropSet temps = cpm.temp_props();
  ir.temp_props.assign(temps.begin(), temps.end());
  for (StateId q = 0; q < m.num_states(); ++q) {
    std::vector<bool> row;
    for (const auto& p : ir.state_props) row.push_back(a.labels[q].count(p) > 0);
    ir.labels.push_back(std::move(row));
  }
  ir.handlers.resize(m.inputs().size());
  std::vector<std::map<std::size_t, std::vector<std::size_t>>> cases(m.outputs().size());
  for (std::size_t i = 0; i < m.inputs().size(); ++i)
    for (StateId q = 0; q < m.num_states(); ++q) {
      const auto& t = *m.transition(q, i);
      Branch b{t.target, {}, t.output};
      for (std::size_t v = 0; v < ir.state_props.size(); ++v)
        if (!ir.labels[q][v] && ir.labels[t.target][v]) b.effects.push_back({v, true});
      for (std::size_t v = 0; v < ir.state_props.size(); ++v)
        if (ir.labels[q][v] && !ir.labels[t.target][v]) b.effects.push_back({v, false});
      ir.handlers[i].push_back(std::move(b));
      auto& c = cases[t.output][i];
      c.clear();
      for (const auto& p : tau_props(cpm, m.inputs()[i], m.outputs()[t.output])) c.push_back(ir.temp_index(p));
    }
  for (auto& per_output : cases) {
    OutputHandler h;
    for (auto& [i, vars] : per_output) h.cases.emplace_back(i, vars);
    for (const auto& c : h.cases)
      if (c.second != h.cases.front().second) h.takes_case = true;
    ir.output_handlers.push_back(std::move(h));
  }
  std::set<std::string> env_taken{"req", "timeout"}, sys_taken, vars_taken;
  ir.input_methods = detail::identifiers(ir.inputs, "pp_", sys_taken);
  ir.output_methods = detail::identifiers(ir.outputs, "req_", env_taken);
  std::vector<std::string> lowered;
  for (const auto& p : ir.state_props) lowered.push_back(detail::normalize(p));
  ir.state_vars = detail::identifiers(lowered, "", vars_taken);
  lowered.clear();
  for (const auto& p : ir.temp_props) lowered.push_back(detail::normalize(p));
  ir.temp_vars = detail::identifiers(lowered, "", vars_taken);
  return ir;
}

/// Adds a nondeterministic timeout alternative to every input handler: the
/// system returns to the initial state with the initial labels and calls the
/// environment's timeout handler, which sets the TIMEOUT temporary.
inline ActorModelIR apply_timeout_mutation(ActorModelIR ir, const MutationConfig& cfg) {
  if (!cfg.timeout_enabled) return ir;
  if (ir.mutated()) throw ContractError("model is already mutated");
  if (!(cfg.timeout_probability > 0.0 && cfg.timeout_probability < 1.0))
    throw ContractError("timeout probability must lie in (0,1)");
  const auto clash = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), kTimeoutProp) != v.end(); };
  if (clash(ir.state_props) || clash(ir.temp_props))
    throw ModelError("proposition name " + kTimeoutProp + " is already in use");
  ir.mutation = cfg;
  ir.temp_props.push_back(kTimeoutProp);
  std::set<std::string> taken(ir.state_vars.begin(), ir.state_vars.end());
  taken.insert(ir.temp_vars.begin(), ir.temp_vars.end());
  std::string var = "timedout";
  for (int n = 2; taken.count(var); ++n) var = "timedout_" + std::to_string(n);
  ir.timeout_var = var;
  ir.temp_vars.push_back(var);
  return ir;
}

// ---------------------------------------------------------------------------
// Rebeca text

inline std::string emit_rebeca(const ActorModelIR& ir) {
  std::ostringstream os;
  const std::string cap = std::to_string(ir.queue_capacity);
  const std::string i1 = "   ", i2 = "      ", i3 = "         ";
  std::vector<std::size_t> number(ir.states.size());
  {
    std::size_t n = 1;
    for (StateId q = 0; q < ir.states.size(); ++q) number[q] = q == ir.initial ? 0 : n++;
  }
  std::vector<StateId> by_number(ir.states.size());
  for (StateId q = 0; q < ir.states.size(); ++q) by_number[number[q]] = q;

  os << "reactiveclass Environment(" << cap << ") {\n";
  os << i1 << "statevars {\n";
  for (const auto& v : ir.temp_vars) os << i2 << "boolean " << v << ";\n";
  os << i1 << "}\n";
  os << i1 << "knownrebecs {\n" << i2 << "System system;\n" << i1 << "}\n";
  os << i1 << "Environment(){\n" << i2 << "self.req();\n" << i1 << "}\n";
  os << i1 << "msgsrv req() {\n";
  for (const auto& v : ir.temp_vars) os << i2 << v << "=false;\n";
  os << i2 << "int data = ?(";
  for (std::size_t i = 0; i < ir.inputs.size(); ++i) os << (i ? "," : "") << i;
  os << ");\n";
  os << i2 << "switch(data) {\n";
  for (std::size_t i = 0; i < ir.inputs.size(); ++i)
    os << i3 << "case " << i << ": system." << ir.input_methods[i] << "(); break;\n";
  os << i2 << "}\n";
  os << i1 << "}\n";
  for (std::size_t o = 0; o < ir.outputs.size(); ++o) {
    const OutputHandler& h = ir.output_handlers[o];
    os << i1 << "msgsrv " << ir.output_methods[o] << "(" << (h.takes_case ? "int data" : "") << "){\n";
    if (h.takes_case) {
      os << i2 << "switch(data) {\n";
      for (const auto& [i, vars] : h.cases) {
        os << i3 << "case " << i << ":";
        for (std::size_t k = 0; k < vars.size(); ++k) os << (k ? "" : " ") << ir.temp_vars[vars[k]] << "=true;";
        os << (vars.empty() ? " " : "") << "break;\n";
      }
      os << i2 << "}\n";
    } else if (!h.cases.empty()) {
      for (auto v : h.cases.front().second) os << i2 << ir.temp_vars[v] << "=true;\n";
    }
    os << i2 << "self.req();\n";
    os << i1 << "}\n";
  }
  if (ir.mutated()) {
    os << i1 << "msgsrv timeout(){\n";
    os << i2 << ir.timeout_var << "=true;\n";
    os << i2 << "self.req();\n";
    os << i1 << "}\n";
  }
  os << "}\n";

  os << "reactiveclass System(" << cap << ") {\n";
  os << i1 << "statevars {\n";
  os << i2 << "int state;\n";
  for (const auto& v : ir.state_vars) os << i2 << "boolean " << v << ";\n";
  os << i1 << "}\n";
  os << i1 << "knownrebecs {\n" << i2 << "Environment environment;\n" << i1 << "}\n";
  const auto& init = ir.labels[ir.initial];
  if (std::find(init.begin(), init.end(), true) != init.end()) {
    os << i1 << "System(){\n";
    for (std::size_t v = 0; v < ir.state_vars.size(); ++v)
      if (init[v]) os << i2 << ir.state_vars[v] << "=true;\n";
    os << i1 << "}\n";
  }
  for (std::size_t i = 0; i < ir.inputs.size(); ++i) {
    os << i1 << "msgsrv " << ir.input_methods[i] << "(){\n";
    if (ir.mutated()) {
      os << i2 << "// timeout probability " << ir.mutation.timeout_probability << "\n";
      os << i2 << "int fault = ?(0,1);\n";
      os << i2 << "if(fault==1) {\n";
      os << i3 << "state=0;\n";
      for (std::size_t v = 0; v < ir.state_vars.size(); ++v)
        os << i3 << ir.state_vars[v] << "=" << (init[v] ? "true" : "false") << ";\n";
      os << i3 << "environment.timeout();\n";
      os << i2 << "} else\n";
    }
    for (std::size_t n = 0; n < by_number.size(); ++n) {
      const StateId q = by_number[n];
      const Branch& b = ir.handlers[i][q];
      os << i2 << "if(state==" << n << ") {\n";
      os << i3 << "state=" << number[b.next] << ";\n";
      for (const auto& e : b.effects) os << i3 << ir.state_vars[e.var] << "=" << (e.value ? "true" : "false") << ";\n";
      os << i3 << "environment." << ir.output_methods[b.output] << "(";
      if (ir.output_handlers[b.output].takes_case) os << i;
      os << ");\n";
      os << i2 << "}" << (n + 1 < by_number.size() ? " else" : "") << "\n";
    }
    os << i1 << "}\n";
  }
  os << "}\n";
  os << "main {\n";
  os << i1 << "Environment environment(system):();\n";
  os << i1 << "System system(environment):();\n";
  os << "}\n";
  return os.str();
}

}  // namespace lct
