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

// Context-based proposition maps: gain/lose/temporary rules over
// (input, output) pairs, and the annotation of Mealy machines with the
// state propositions they induce.

#include <lct/automata.hpp>
#include <lct/error.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lct {

using PropSet = std::set<std::string>;

/// How input/output patterns are compared with symbols.
enum class MatchMode {
  /// The pattern must match some run of whole '_'-separated tokens of the
  /// symbol (the whole symbol is one such run). `DF*` matches `SEL_DF_LDS1`,
  /// `RD_BIN` does not match `SRD_BIN`.
  Token,
  /// The pattern must match the complete symbol.
  Full,
};

struct Condition {
  std::vector<std::string> props;
  std::vector<std::string> input_patterns;
  std::vector<std::string> output_patterns;
  std::size_t line = 0;
};

struct Cpm {
  std::vector<Condition> gains;
  std::vector<Condition> loses;
  std::vector<Condition> taus;
  MatchMode mode = MatchMode::Token;

  PropSet state_props() const {
    PropSet out;
    for (const auto* list : {&gains, &loses})
      for (const auto& c : *list) out.insert(c.props.begin(), c.props.end());
    return out;
  }

  PropSet temp_props() const {
    PropSet out;
    for (const auto& c : taus) out.insert(c.props.begin(), c.props.end());
    return out;
  }

  PropSet declared_props() const {
    PropSet out = state_props();
    const PropSet t = temp_props();
    out.insert(t.begin(), t.end());
    return out;
  }
};

/// `*` matches any (possibly empty) character run; everything else is literal.
inline bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (p < pattern.size() && pattern[p] == text[t]) {
      ++p;
      ++t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

inline bool matches(const std::vector<std::string>& patterns, std::string_view symbol,
                    MatchMode mode = MatchMode::Token) {
  for (const auto& pat : patterns) {
    if (glob_match(pat, symbol)) return true;
    if (mode != MatchMode::Token) continue;
    std::vector<std::size_t> starts{0}, ends;
    for (std::size_t i = 0; i < symbol.size(); ++i)
      if (symbol[i] == '_') {
        ends.push_back(i);
        starts.push_back(i + 1);
      }
    ends.push_back(symbol.size());
    for (auto s : starts)
      for (auto e : ends)
        if (e > s && glob_match(pat, symbol.substr(s, e - s))) return true;
  }
  return false;
}

inline bool condition_matches(const Condition& c, std::string_view input, std::string_view output, MatchMode mode) {
  return matches(c.input_patterns, input, mode) && matches(c.output_patterns, output, mode);
}

// ---------------------------------------------------------------------------
// CPM text format

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline std::vector<std::string> cell(const std::string& text, std::size_t line, const char* what) {
  std::vector<std::string> items;
  for (auto& item : split(text, ',')) {
    if (item.empty()) throw ParseError(std::string("empty entry in ") + what + " cell", line);
    if (std::find(items.begin(), items.end(), item) == items.end()) items.push_back(item);
  }
  return items;
}

}  // namespace detail

inline Cpm parse_cpm(std::string_view text) {
  Cpm cpm;
  std::vector<Condition>* section = nullptr;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '%') {
      const auto words = detail::split(line.substr(1), ' ');
      if (words.size() == 2 && words[0] == "match" && (words[1] == "token" || words[1] == "full")) {
        cpm.mode = words[1] == "full" ? MatchMode::Full : MatchMode::Token;
        continue;
      }
      throw ParseError("unknown directive '" + line + "'", line_no);
    }
    if (line.front() == '[') {
      if (line == "[GAINS]") section = &cpm.gains;
      else if (line == "[LOSES]") section = &cpm.loses;
      else if (line == "[TAUS]") section = &cpm.taus;
      else throw ParseError("unknown section '" + line + "'", line_no);
      continue;
    }
    if (!section) throw ParseError("row outside of a section", line_no);
    const auto cells = detail::split(line, '|');
    if (cells.size() != 3)
      throw ParseError("malformed row: expected 3 cells, found " + std::to_string(cells.size()), line_no);
    for (const auto& c : cells)
      if (c.empty()) throw ParseError("empty cell", line_no);
    Condition cond{detail::cell(cells[0], line_no, "proposition"), detail::cell(cells[1], line_no, "input"),
                   detail::cell(cells[2], line_no, "output"), line_no};
    for (const auto& p : cond.props)
      if (!detail::is_identifier(p)) throw ParseError("invalid proposition name '" + p + "'", line_no);
    section->push_back(std::move(cond));
  }
  const PropSet state = cpm.state_props();
  for (const auto& c : cpm.taus)
    for (const auto& p : c.props)
      if (state.count(p))
        throw ParseError("proposition '" + p + "' is used both as a state and a temporary proposition", c.line);
  return cpm;
}

inline std::string emit_cpm(const Cpm& cpm) {
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
  };
  std::ostringstream os;
  if (cpm.mode == MatchMode::Full) os << "%match full\n";
  const std::pair<const char*, const std::vector<Condition>*> sections[] = {
      {"[GAINS]", &cpm.gains}, {"[LOSES]", &cpm.loses}, {"[TAUS]", &cpm.taus}};
  for (const auto& [name, list] : sections) {
    os << name << "\n";
    for (const auto& c : *list)
      os << join(c.props) << " | " << join(c.input_patterns) << " | " << join(c.output_patterns) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Annotation

/// Mealy machine whose states carry proposition sets. After expand_tau,
/// split states are flagged in `tau` and carry their temporary propositions
/// in `temp_labels`.
struct AnnotatedMachine {
  MealyMachine machine;
  std::vector<PropSet> labels;
  std::vector<PropSet> temp_labels;
  std::vector<bool> tau;

  bool is_tau(StateId q) const { return tau.at(q); }
  bool expanded() const { return std::find(tau.begin(), tau.end(), true) != tau.end(); }

  PropSet kripke_label(StateId q) const {
    PropSet out = labels.at(q);
    out.insert(temp_labels.at(q).begin(), temp_labels.at(q).end());
    return out;
  }
};

struct AnnotationReport {
  std::vector<std::size_t> unused_gains;  // indices into Cpm::gains
  std::vector<std::size_t> unused_loses;
  /// (state, proposition) pairs where the state holds the proposition but
  /// some incoming transition neither grants nor propagates it.
  std::vector<std::pair<std::string, std::string>> disagreements;
  std::size_t iterations = 0;
};

inline AnnotatedMachine unannotated(const MealyMachine& m) {
  return AnnotatedMachine{m, std::vector<PropSet>(m.num_states()), std::vector<PropSet>(m.num_states()),
                          std::vector<bool>(m.num_states(), false)};
}

inline AnnotatedMachine annotate(const MealyMachine& m, const Cpm& cpm, AnnotationReport* report = nullptr) {
  AnnotatedMachine a = unannotated(m);
  const auto& ins = m.inputs();
  const auto& outs = m.outputs();
  AnnotationReport local;

  // seeds[q][i]: propositions granted by gain conditions on that transition.
  // blocks[q][i]: propositions a lose condition stops from being inherited.
  std::vector<std::vector<PropSet>> seeds(m.num_states(), std::vector<PropSet>(ins.size()));
  std::vector<std::vector<PropSet>> blocks = seeds;
  std::vector<bool> gain_used(cpm.gains.size()), lose_used(cpm.loses.size());
  for (StateId q = 0; q < m.num_states(); ++q)
    for (std::size_t i = 0; i < ins.size(); ++i) {
      const auto& t = m.transition(q, i);
      if (!t) continue;
      for (std::size_t k = 0; k < cpm.gains.size(); ++k)
        if (condition_matches(cpm.gains[k], ins[i], outs[t->output], cpm.mode)) {
          gain_used[k] = true;
          seeds[q][i].insert(cpm.gains[k].props.begin(), cpm.gains[k].props.end());
          a.labels[t->target].insert(cpm.gains[k].props.begin(), cpm.gains[k].props.end());
        }
      for (std::size_t k = 0; k < cpm.loses.size(); ++k)
        if (condition_matches(cpm.loses[k], ins[i], outs[t->output], cpm.mode)) {
          lose_used[k] = true;
          blocks[q][i].insert(cpm.loses[k].props.begin(), cpm.loses[k].props.end());
        }
    }

  bool changed = true;
  while (changed) {
    changed = false;
    ++local.iterations;
    for (StateId q = 0; q < m.num_states(); ++q)
      for (std::size_t i = 0; i < ins.size(); ++i) {
        const auto& t = m.transition(q, i);
        if (!t) continue;
        for (const auto& p : a.labels[q])
          if (!blocks[q][i].count(p) && a.labels[t->target].insert(p).second) changed = true;
      }
  }

  if (report) {
    for (std::size_t k = 0; k < gain_used.size(); ++k)
      if (!gain_used[k]) local.unused_gains.push_back(k);
    for (std::size_t k = 0; k < lose_used.size(); ++k)
      if (!lose_used[k]) local.unused_loses.push_back(k);
    std::set<std::pair<std::string, std::string>> seen;
    for (StateId q = 0; q < m.num_states(); ++q)
      for (std::size_t i = 0; i < ins.size(); ++i) {
        const auto& t = m.transition(q, i);
        if (!t) continue;
        for (const auto& p : a.labels[t->target]) {
          const bool carried = seeds[q][i].count(p) || (a.labels[q].count(p) && !blocks[q][i].count(p));
          if (!carried && seen.emplace(m.state_name(t->target), p).second)
            local.disagreements.emplace_back(m.state_name(t->target), p);
        }
      }
    *report = std::move(local);
  }
  return a;
}

/// Propositions of every temporary condition matching (input, output).
inline PropSet tau_props(const Cpm& cpm, std::string_view input, std::string_view output) {
  PropSet out;
  for (const auto& c : cpm.taus)
    if (condition_matches(c, input, output, cpm.mode)) out.insert(c.props.begin(), c.props.end());
  return out;
}

/// Splits every transition matched by a temporary condition into
/// `q --input/__tau--> t` and `t --__eps/output--> q'`, where the fresh state
/// t inherits the labels of q and carries the temporary propositions.
inline AnnotatedMachine expand_tau(const AnnotatedMachine& a, const Cpm& cpm) {
  if (a.expanded()) throw ContractError("machine is already tau-expanded");
  const MealyMachine& m = a.machine;
  AnnotatedMachine r;
  for (const auto& q : m.states()) r.machine.add_state(q);
  for (const auto& s : m.inputs()) r.machine.add_input(s);
  for (const auto& s : m.outputs()) r.machine.add_output(s);
  r.labels = a.labels;
  r.temp_labels.assign(m.num_states(), {});
  r.tau.assign(m.num_states(), false);
  for (StateId q = 0; q < m.num_states(); ++q)
    for (std::size_t i = 0; i < m.inputs().size(); ++i) {
      const auto& t = m.transition(q, i);
      if (!t) continue;
      PropSet temps = tau_props(cpm, m.inputs()[i], m.outputs()[t->output]);
      if (temps.empty()) {
        r.machine.set_transition(q, i, t->target, t->output);
        continue;
      }
      std::string name = "tau_" + m.state_name(q) + "_" + m.inputs()[i];
      while (r.machine.find_state(name)) name += "'";
      const StateId split = r.machine.add_state(name);
      r.labels.push_back(a.labels[q]);
      r.temp_labels.push_back(std::move(temps));
      r.tau.push_back(true);
      r.machine.set_transition(q, i, split, r.machine.add_output(kTauOutput));
      r.machine.set_transition(split, r.machine.add_input(kEpsilon), t->target, t->output);
    }
  r.machine.set_initial(m.initial());
  return r;
}

/// Inverse of expand_tau on the behaviour: every `input/__tau` + `__eps/out`
/// pair becomes `input/out` again and split states are dropped.
inline AnnotatedMachine merge_tau(const AnnotatedMachine& a) {
  const MealyMachine& m = a.machine;
  AnnotatedMachine r;
  std::vector<std::optional<StateId>> map(m.num_states());
  for (StateId q = 0; q < m.num_states(); ++q)
    if (!a.tau[q]) {
      map[q] = r.machine.add_state(m.state_name(q));
      r.labels.push_back(a.labels[q]);
      r.temp_labels.emplace_back();
      r.tau.push_back(false);
    }
  for (const auto& s : m.inputs())
    if (s != kEpsilon) r.machine.add_input(s);
  for (const auto& s : m.outputs())
    if (s != kTauOutput) r.machine.add_output(s);
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (a.tau[q]) continue;
    for (std::size_t i = 0; i < m.inputs().size(); ++i) {
      const auto& t = m.transition(q, i);
      if (!t) continue;
      StateId target = t->target;
      std::size_t out = t->output;
      if (a.tau[target]) {
        const auto eps = m.step(target, kEpsilon);
        if (!eps) throw ModelError("tau state '" + m.state_name(target) + "' has no epsilon transition");
        target = eps->first;
        out = *m.output_index(eps->second);
      }
      r.machine.set_transition(*map[q], *r.machine.input_index(m.inputs()[i]), *map[target],
                               *r.machine.output_index(m.outputs()[out]));
    }
  }
  r.machine.set_initial(*map[m.initial()]);
  return r;
}

/// Checks the structural invariants of annotated machines; returns a list of
/// violations (empty when well-formed).
inline std::vector<std::string> check_annotated(const AnnotatedMachine& a) {
  std::vector<std::string> issues;
  const MealyMachine& m = a.machine;
  std::vector<std::size_t> in_degree(m.num_states(), 0);
  for (StateId q = 0; q < m.num_states(); ++q)
    for (std::size_t i = 0; i < m.inputs().size(); ++i)
      if (const auto& t = m.transition(q, i)) ++in_degree[t->target];
  for (StateId q = 0; q < m.num_states(); ++q) {
    const std::string& name = m.state_name(q);
    std::size_t out_degree = 0;
    for (std::size_t i = 0; i < m.inputs().size(); ++i)
      if (m.transition(q, i)) ++out_degree;
    const auto eps = m.input_index(kEpsilon);
    if (a.tau[q]) {
      if (in_degree[q] != 1) issues.push_back("tau state " + name + " has in-degree " + std::to_string(in_degree[q]));
      if (out_degree != 1 || !eps || !m.transition(q, *eps))
        issues.push_back("tau state " + name + " must have exactly one epsilon transition");
    } else {
      if (!a.temp_labels[q].empty()) issues.push_back("non-tau state " + name + " carries temporary propositions");
      if (eps && m.transition(q, *eps)) issues.push_back("non-tau state " + name + " has an epsilon transition");
      for (std::size_t i = 0; i < m.inputs().size(); ++i)
        if (m.inputs()[i] != kEpsilon && !m.transition(q, i))
          issues.push_back("state " + name + " lacks input " + m.inputs()[i]);
    }
  }
  return issues;
}

// ---------------------------------------------------------------------------
// Annotated DOT

inline std::string format_state_label(const AnnotatedMachine& a, StateId q) {
  auto join = [](const PropSet& s) {
    std::string out;
    for (const auto& p : s) out += (out.empty() ? "" : ",") + p;
    return out;
  };
  std::string label = a.machine.state_name(q) + " {" + join(a.labels[q]);
  if (a.tau[q]) label += " | " + join(a.temp_labels[q]);
  return label + "}";
}

inline std::string emit_annotated_dot(const AnnotatedMachine& a) {
  const MealyMachine& m = a.machine;
  std::ostringstream os;
  os << "digraph annotated {\n";
  os << "  __start [shape=point];\n";
  for (StateId q = 0; q < m.num_states(); ++q) {
    os << "  " << dot::quote(m.state_name(q)) << " [";
    if (a.tau[q]) os << "shape=diamond, ";
    os << "label=" << dot::quote(format_state_label(a, q)) << "];\n";
  }
  os << "  __start -> " << dot::quote(m.state_name(m.initial())) << ";\n";
  for (StateId q = 0; q < m.num_states(); ++q)
    for (std::size_t i = 0; i < m.inputs().size(); ++i)
      if (const auto& t = m.transition(q, i))
        os << "  " << dot::quote(m.state_name(q)) << " -> " << dot::quote(m.state_name(t->target))
           << " [label=" << dot::quote(format_edge_label(m.inputs()[i], m.outputs()[t->output])) << "];\n";
  os << "}\n";
  return os.str();
}

inline AnnotatedMachine parse_annotated_dot(std::string_view text) {
  const dot::Graph g = dot::read(text);
  DotOptions opt;
  opt.allow_reserved = true;
  opt.allow_partial = true;
  AnnotatedMachine a = unannotated(machine_from_graph(g, opt));
  for (StateId q = 0; q < a.machine.num_states(); ++q) {
    const dot::Node* node = g.find(a.machine.state_name(q));
    if (!node) continue;
    auto shape = node->attrs.find("shape");
    a.tau[q] = shape != node->attrs.end() && shape->second == "diamond";
    auto it = node->attrs.find("label");
    if (it == node->attrs.end()) continue;
    const std::string& label = it->second;
    const auto open = label.rfind('{');
    const auto close = label.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw ParseError("state label '" + label + "' lacks a proposition set", node->line);
    const std::string body = label.substr(open + 1, close - open - 1);
    const auto bar = body.find('|');
    if (bar != std::string::npos) a.tau[q] = true;
    auto props = [&](std::string_view s) {
      PropSet out;
      for (auto& p : detail::split(s, ','))
        if (!p.empty()) {
          if (!detail::is_identifier(p)) throw ParseError("invalid proposition '" + p + "'", node->line);
          out.insert(p);
        }
      return out;
    };
    a.labels[q] = props(std::string_view(body).substr(0, bar));
    if (bar != std::string::npos) a.temp_labels[q] = props(std::string_view(body).substr(bar + 1));
  }
  return a;
}

}  // namespace lct
