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

// Generic security properties, property files, instantiation against a CPM,
// property sweeps with vacuity information, and JSON-lines verdict reports.

#include <lct/buchi.hpp>
#include <lct/cpm.hpp>
#include <lct/ltl.hpp>

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace lct {

struct Property {
  std::string name;
  std::string text;
  FormulaPtr formula;
};

inline Property make_property(std::string name, std::string text) {
  FormulaPtr f = parse_ltl(text);
  return Property{std::move(name), std::move(text), std::move(f)};
}

/// Authentication, confidentiality, privilege and key-handling requirements.
inline std::vector<Property> generic_properties() {
  return {
      make_property("P1", "G((!AUTH && PROT) -> !ACCESSOK)"),
      make_property("P2", "G(PROT -> !UREADOK)"),
      make_property("P3", "G((PRIV -> AUTH) && ((!PRIV && CRIT) -> !ACCESSOK))"),
      make_property("P4", "G(!INVKEYOK)"),
  };
}

/// Read-access requirements specific to travel documents. They presuppose
/// the DF/EF file-selection propositions.
inline std::vector<Property> emrtd_properties() {
  return {
      make_property("SecureRead", "G(!(SREADOK && !(DF && AUTH && EF)))"),
      make_property("PlainRead", "G(!(UREADOK && (!EF || DF)))"),
      make_property("SecureReadFollowsSecureSelect", "((!SREADOK) U SSELEFOK) || G(!SREADOK)"),
  };
}

/// The generic properties followed by the travel-document ones.
inline std::vector<Property> property_library() {
  auto all = generic_properties();
  for (auto& p : emrtd_properties()) all.push_back(std::move(p));
  return all;
}

/// `name: formula` per line, `#` comments.
inline std::vector<Property> parse_property_file(std::string_view text) {
  std::vector<Property> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'name: formula'", line_no);
    std::string name = detail::trim(std::string_view(line).substr(0, colon));
    std::string formula = detail::trim(std::string_view(line).substr(colon + 1));
    if (!detail::is_identifier(name)) throw ParseError("invalid property name '" + name + "'", line_no);
    for (const auto& p : out)
      if (p.name == name) throw ParseError("duplicate property '" + name + "'", line_no);
    try {
      out.push_back(make_property(name, formula));
    } catch (const ParseError& e) {
      throw ParseError("property " + name + ": " + e.message(), line_no, colon + 2 + e.column());
    }
  }
  return out;
}

inline std::string emit_property_file(const std::vector<Property>& props) {
  std::string out;
  for (const auto& p : props) out += p.name + ": " + p.text + "\n";
  return out;
}

struct Instantiation {
  Property property;
  FormulaPtr formula;                  // after substitution
  std::set<std::string> substituted;  // propositions replaced by false
};

/// Replaces every proposition the CPM never defines by false.
inline std::vector<Instantiation> instantiate(const std::vector<Property>& props, const PropSet& declared) {
  std::vector<Instantiation> out;
  for (const auto& p : props) {
    std::set<std::string> missing;
    for (const auto& name : props_of(p.formula))
      if (!declared.count(name)) missing.insert(name);
    out.push_back(Instantiation{p, substitute_false(p.formula, missing), std::move(missing)});
  }
  return out;
}

inline std::vector<Instantiation> instantiate(const std::vector<Property>& props, const Cpm& cpm) {
  return instantiate(props, cpm.declared_props());
}

// ---------------------------------------------------------------------------
// Vacuity

struct Vacuity {
  bool applicable = false;        // the property has the shape G(a -> b)
  bool antecedent_reachable = false;
  bool atoms_cooccur = false;     // some reachable state has an atom of a and one of b

  bool vacuous() const { return applicable && (!antecedent_reachable || !atoms_cooccur); }
};

inline std::vector<bool> reachable_states(const KripkeStructure& k) {
  std::vector<bool> seen(k.size());
  std::vector<std::size_t> stack(k.initial.begin(), k.initial.end());
  for (auto s : stack) seen[s] = true;
  while (!stack.empty()) {
    const auto s = stack.back();
    stack.pop_back();
    for (auto t : k.successors[s])
      if (!seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
  }
  return seen;
}

inline Vacuity vacuity(const KripkeStructure& k, const FormulaPtr& f) {
  Vacuity v;
  if (f->op != Op::Globally || f->lhs->op != Op::Implies) return v;
  const FormulaPtr& a = f->lhs->lhs;
  const FormulaPtr& b = f->lhs->rhs;
  if (temporal_depth_count(a) || temporal_depth_count(b)) return v;
  v.applicable = true;
  const auto atoms_a = props_of(a), atoms_b = props_of(b);
  const auto seen = reachable_states(k);
  for (std::size_t s = 0; s < k.size(); ++s) {
    if (!seen[s]) continue;
    if (holds_on_word(a, {}, {k.labels[s]})) v.antecedent_reachable = true;
    const auto& l = k.labels[s];
    const bool has_a = std::any_of(atoms_a.begin(), atoms_a.end(), [&](const auto& p) { return l.count(p) > 0; });
    const bool has_b = std::any_of(atoms_b.begin(), atoms_b.end(), [&](const auto& p) { return l.count(p) > 0; });
    if (has_a && has_b) v.atoms_cooccur = true;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Sweeps and reports

struct PropertyResult {
  Instantiation inst;
  CheckResult result;
  Vacuity vacuity;
};

/// Checks every property; a violation does not stop the sweep.
inline std::vector<PropertyResult> check_all(const KripkeStructure& k, const std::vector<Instantiation>& insts,
                                             const CheckOptions& opt = {}) {
  std::vector<PropertyResult> out;
  for (const auto& inst : insts) out.push_back(PropertyResult{inst, check(k, inst.formula, opt), vacuity(k, inst.formula)});
  return out;
}

inline std::string verdict_text(const PropertyResult& r) {
  std::string s = to_string(r.result.verdict);
  if (r.result.verdict != Verdict::Violated && r.vacuity.vacuous()) s += " (vacuously)";
  return s;
}

inline nlohmann::json to_json(const PropertyResult& r, const KripkeStructure& k) {
  nlohmann::json j;
  j["property"] = r.inst.property.name;
  j["formula"] = r.inst.property.text;
  j["instantiated"] = to_string(r.inst.formula);
  j["verdict"] = to_string(r.result.verdict);
  j["substituted_false"] = r.inst.substituted;
  if (r.vacuity.applicable)
    j["vacuity"] = {{"antecedent_reachable", r.vacuity.antecedent_reachable},
                    {"atoms_cooccur", r.vacuity.atoms_cooccur},
                    {"vacuous", r.vacuity.vacuous()}};
  if (r.result.lasso) {
    auto names = [&](const std::vector<std::size_t>& v) {
      std::vector<std::string> out;
      for (auto s : v) out.push_back(k.names[s]);
      return out;
    };
    j["lasso"] = {{"stem", names(r.result.lasso->stem)}, {"loop", names(r.result.lasso->loop)}};
  }
  return j;
}

inline std::string report_jsonl(const std::vector<PropertyResult>& results, const KripkeStructure& k) {
  std::string out;
  for (const auto& r : results) out += to_json(r, k).dump() + "\n";
  return out;
}

inline std::string report_text(const std::vector<PropertyResult>& results, const KripkeStructure& k) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << r.inst.property.name << ": " << verdict_text(r);
    if (!r.inst.substituted.empty()) {
      os << "  [false:";
      for (const auto& p : r.inst.substituted) os << " " << p;
      os << "]";
    }
    os << "\n";
    if (r.result.lasso) {
      os << "  stem:";
      for (auto s : r.result.lasso->stem) os << " " << k.names[s];
      os << "\n  loop:";
      for (auto s : r.result.lasso->loop) os << " " << k.names[s];
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace lct
