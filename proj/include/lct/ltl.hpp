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

// LTL formulas, their parser and negation normal form, Kripke structures,
// and direct evaluation of formulas on ultimately periodic paths.

#include <lct/cpm.hpp>
#include <lct/error.hpp>

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lct {

enum class Op { True, False, Prop, Not, And, Or, Implies, Next, Globally, Finally, Until, Release };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Op op;
  std::string prop;
  FormulaPtr lhs;
  FormulaPtr rhs;

  bool binary() const { return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until || op == Op::Release; }
  bool unary() const { return op == Op::Not || op == Op::Next || op == Op::Globally || op == Op::Finally; }
};

namespace ltl {

inline FormulaPtr make(Op op, FormulaPtr l = nullptr, FormulaPtr r = nullptr) {
  return std::make_shared<const Formula>(Formula{op, {}, std::move(l), std::move(r)});
}
inline FormulaPtr top() { return make(Op::True); }
inline FormulaPtr bottom() { return make(Op::False); }
inline FormulaPtr prop(std::string name) {
  return std::make_shared<const Formula>(Formula{Op::Prop, std::move(name), nullptr, nullptr});
}
inline FormulaPtr neg(FormulaPtr f) { return make(Op::Not, std::move(f)); }
inline FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return make(Op::And, std::move(a), std::move(b)); }
inline FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return make(Op::Or, std::move(a), std::move(b)); }
inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return make(Op::Implies, std::move(a), std::move(b)); }
inline FormulaPtr next(FormulaPtr f) { return make(Op::Next, std::move(f)); }
inline FormulaPtr globally(FormulaPtr f) { return make(Op::Globally, std::move(f)); }
inline FormulaPtr finally(FormulaPtr f) { return make(Op::Finally, std::move(f)); }
inline FormulaPtr until(FormulaPtr a, FormulaPtr b) { return make(Op::Until, std::move(a), std::move(b)); }
inline FormulaPtr release(FormulaPtr a, FormulaPtr b) { return make(Op::Release, std::move(a), std::move(b)); }

}  // namespace ltl

/// Fully parenthesized rendering that parse_ltl reads back.
inline std::string to_string(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Prop: return f->prop;
    case Op::Not: return "!" + to_string(f->lhs);
    case Op::Next: return "X " + to_string(f->lhs);
    case Op::Globally: return "G " + to_string(f->lhs);
    case Op::Finally: return "F " + to_string(f->lhs);
    case Op::And: return "(" + to_string(f->lhs) + " && " + to_string(f->rhs) + ")";
    case Op::Or: return "(" + to_string(f->lhs) + " || " + to_string(f->rhs) + ")";
    case Op::Implies: return "(" + to_string(f->lhs) + " -> " + to_string(f->rhs) + ")";
    case Op::Until: return "(" + to_string(f->lhs) + " U " + to_string(f->rhs) + ")";
    case Op::Release: return "(" + to_string(f->lhs) + " R " + to_string(f->rhs) + ")";
  }
  return {};
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) { return to_string(a) == to_string(b); }

inline void collect_props(const FormulaPtr& f, std::set<std::string>& out) {
  if (!f) return;
  if (f->op == Op::Prop) out.insert(f->prop);
  collect_props(f->lhs, out);
  collect_props(f->rhs, out);
}

inline std::set<std::string> props_of(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_props(f, out);
  return out;
}

inline std::size_t temporal_depth_count(const FormulaPtr& f) {
  if (!f) return 0;
  const bool temporal = f->op == Op::Next || f->op == Op::Globally || f->op == Op::Finally || f->op == Op::Until ||
                        f->op == Op::Release;
  return (temporal ? 1 : 0) + temporal_depth_count(f->lhs) + temporal_depth_count(f->rhs);
}

/// Replaces every proposition in `names` by `false`.
inline FormulaPtr substitute_false(const FormulaPtr& f, const std::set<std::string>& names) {
  if (f->op == Op::Prop) return names.count(f->prop) ? ltl::bottom() : f;
  if (!f->lhs) return f;
  auto l = substitute_false(f->lhs, names);
  auto r = f->rhs ? substitute_false(f->rhs, names) : nullptr;
  if (l == f->lhs && r == f->rhs) return f;
  return ltl::make(f->op, std::move(l), std::move(r));
}

// ---------------------------------------------------------------------------
// Parser. Precedence from loosest: ->, ||, &&, U/R, unary. Binary temporal
// operators and -> associate to the right.

namespace detail {

class LtlParser {
 public:
  explicit LtlParser(std::string_view text) : text_(text) { lex(); }

  FormulaPtr parse() {
    auto f = implication();
    if (tok_ != End) fail("unexpected '" + word_ + "'");
    return f;
  }

 private:
  enum Kind { End, Ident, Kw, Sym, LParen, RParen };

  FormulaPtr implication() {
    auto lhs = disjunction();
    if (is_sym("->")) {
      lex();
      return ltl::implies(lhs, implication());
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    auto f = conjunction();
    while (is_sym("||")) {
      lex();
      f = ltl::disj(f, conjunction());
    }
    return f;
  }

  FormulaPtr conjunction() {
    auto f = binary_temporal();
    while (is_sym("&&")) {
      lex();
      f = ltl::conj(f, binary_temporal());
    }
    return f;
  }

  FormulaPtr binary_temporal() {
    auto lhs = unary();
    if (tok_ == Kw && (word_ == "U" || word_ == "R")) {
      const bool is_until = word_ == "U";
      lex();
      auto rhs = binary_temporal();
      return is_until ? ltl::until(lhs, rhs) : ltl::release(lhs, rhs);
    }
    return lhs;
  }

  FormulaPtr unary() {
    if (is_sym("!")) {
      lex();
      return ltl::neg(unary());
    }
    if (tok_ == Kw && (word_ == "G" || word_ == "F" || word_ == "X")) {
      const char k = word_[0];
      lex();
      auto sub = unary();
      return k == 'G' ? ltl::globally(sub) : k == 'F' ? ltl::finally(sub) : ltl::next(sub);
    }
    return primary();
  }

  FormulaPtr primary() {
    if (tok_ == LParen) {
      lex();
      auto f = implication();
      if (tok_ != RParen) fail("expected ')'");
      lex();
      return f;
    }
    if (tok_ == Ident) {
      std::string name = word_;
      lex();
      if (name == "true") return ltl::top();
      if (name == "false") return ltl::bottom();
      return ltl::prop(std::move(name));
    }
    if (tok_ == End) fail("unexpected end of formula");
    fail("unexpected '" + word_ + "'");
  }

  bool is_sym(std::string_view s) const { return tok_ == Sym && word_ == s; }

  void lex() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    start_ = pos_;
    if (pos_ >= text_.size()) {
      tok_ = End;
      word_.clear();
      return;
    }
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      word_ = std::string(text_.substr(start_, pos_ - start_));
      tok_ = (word_ == "G" || word_ == "F" || word_ == "X" || word_ == "U" || word_ == "R") ? Kw : Ident;
      return;
    }
    for (std::string_view s : {"->", "&&", "||", "!"})
      if (text_.substr(pos_, s.size()) == s) {
        pos_ += s.size();
        tok_ = Sym;
        word_ = std::string(s);
        return;
      }
    ++pos_;
    word_ = std::string(1, c);
    if (c == '(') tok_ = LParen;
    else if (c == ')') tok_ = RParen;
    else fail("unexpected character '" + word_ + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, 1, start_ + 1); }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
  Kind tok_ = End;
  std::string word_;
};

}  // namespace detail

inline FormulaPtr parse_ltl(std::string_view text) { return detail::LtlParser(text).parse(); }

// ---------------------------------------------------------------------------
// Negation normal form over true, false, p, !p, &&, ||, X, U, R. G and F are
// expressed with R and U.

inline FormulaPtr to_nnf(const FormulaPtr& f, bool negated = false) {
  using namespace ltl;
  switch (f->op) {
    case Op::True: return negated ? bottom() : top();
    case Op::False: return negated ? top() : bottom();
    case Op::Prop: return negated ? neg(f) : f;
    case Op::Not: return to_nnf(f->lhs, !negated);
    case Op::And:
      return negated ? disj(to_nnf(f->lhs, true), to_nnf(f->rhs, true)) : conj(to_nnf(f->lhs), to_nnf(f->rhs));
    case Op::Or:
      return negated ? conj(to_nnf(f->lhs, true), to_nnf(f->rhs, true)) : disj(to_nnf(f->lhs), to_nnf(f->rhs));
    case Op::Implies:
      return negated ? conj(to_nnf(f->lhs), to_nnf(f->rhs, true)) : disj(to_nnf(f->lhs, true), to_nnf(f->rhs));
    case Op::Next: return next(to_nnf(f->lhs, negated));
    case Op::Globally:
      return negated ? until(top(), to_nnf(f->lhs, true)) : release(bottom(), to_nnf(f->lhs));
    case Op::Finally:
      return negated ? release(bottom(), to_nnf(f->lhs, true)) : until(top(), to_nnf(f->lhs));
    case Op::Until:
      return negated ? release(to_nnf(f->lhs, true), to_nnf(f->rhs, true)) : until(to_nnf(f->lhs), to_nnf(f->rhs));
    case Op::Release:
      return negated ? until(to_nnf(f->lhs, true), to_nnf(f->rhs, true)) : release(to_nnf(f->lhs), to_nnf(f->rhs));
  }
  return f;
}

inline bool is_nnf(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True:
    case Op::False:
    case Op::Prop: return true;
    case Op::Not: return f->lhs->op == Op::Prop;
    case Op::Implies:
    case Op::Globally:
    case Op::Finally: return false;
    default: return is_nnf(f->lhs) && (!f->rhs || is_nnf(f->rhs));
  }
}

// ---------------------------------------------------------------------------
// Kripke structures

struct KripkeStructure {
  std::vector<std::string> names;
  std::vector<PropSet> labels;
  std::vector<std::vector<std::size_t>> successors;
  std::vector<std::size_t> initial;

  std::size_t size() const { return labels.size(); }

  std::size_t add_state(std::string name, PropSet label) {
    names.push_back(std::move(name));
    labels.push_back(std::move(label));
    successors.emplace_back();
    return labels.size() - 1;
  }

  void add_edge(std::size_t from, std::size_t to) {
    auto& s = successors.at(from);
    if (std::find(s.begin(), s.end(), to) == s.end()) s.push_back(to);
  }

  bool has_edge(std::size_t from, std::size_t to) const {
    const auto& s = successors.at(from);
    return std::find(s.begin(), s.end(), to) != s.end();
  }

  /// Adds a self-loop to every deadlocked state; returns how many were fixed.
  std::size_t make_total() {
    std::size_t fixed = 0;
    for (std::size_t s = 0; s < size(); ++s)
      if (successors[s].empty()) {
        successors[s].push_back(s);
        ++fixed;
      }
    return fixed;
  }

  PropSet declared() const {
    PropSet out;
    for (const auto& l : labels) out.insert(l.begin(), l.end());
    return out;
  }
};

/// Kripke view of an annotated machine: one state per machine state, an edge
/// per transition (including epsilon edges of tau-states), labels joined with
/// temporary labels.
inline KripkeStructure kripke_from_annotated(const AnnotatedMachine& a) {
  KripkeStructure k;
  const MealyMachine& m = a.machine;
  for (StateId q = 0; q < m.num_states(); ++q) k.add_state(m.state_name(q), a.kripke_label(q));
  for (StateId q = 0; q < m.num_states(); ++q)
    for (std::size_t i = 0; i < m.inputs().size(); ++i)
      if (const auto& t = m.transition(q, i)) k.add_edge(q, t->target);
  k.initial = {m.initial()};
  k.make_total();
  return k;
}

// ---------------------------------------------------------------------------
// Lassos and direct semantics

struct Lasso {
  std::vector<std::size_t> stem;
  std::vector<std::size_t> loop;

  std::size_t length() const { return stem.size() + loop.size(); }
};

inline bool is_valid_lasso(const KripkeStructure& k, const Lasso& l) {
  if (l.loop.empty()) return false;
  std::vector<std::size_t> path = l.stem;
  path.insert(path.end(), l.loop.begin(), l.loop.end());
  for (auto s : path)
    if (s >= k.size()) return false;
  if (std::find(k.initial.begin(), k.initial.end(), path.front()) == k.initial.end()) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (!k.has_edge(path[i], path[i + 1])) return false;
  return k.has_edge(l.loop.back(), l.loop.front());
}

namespace detail {

// Truth vector of f over the positions of an ultimately periodic word whose
// position i has successor succ(i).
inline std::vector<bool> evaluate(const FormulaPtr& f, const std::vector<const PropSet*>& word, std::size_t loop_start) {
  const std::size_t n = word.size();
  auto succ = [&](std::size_t i) { return i + 1 < n ? i + 1 : loop_start; };
  std::vector<bool> v(n);
  auto fixpoint = [&](bool init, auto rule) {
    v.assign(n, init);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t j = n; j-- > 0;) {
        const bool x = rule(j);
        if (x != v[j]) {
          v[j] = x;
          changed = true;
        }
      }
    }
  };
  switch (f->op) {
    case Op::True: v.assign(n, true); break;
    case Op::False: v.assign(n, false); break;
    case Op::Prop:
      for (std::size_t i = 0; i < n; ++i) v[i] = word[i]->count(f->prop) > 0;
      break;
    case Op::Not: {
      auto a = evaluate(f->lhs, word, loop_start);
      for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
      break;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
      auto a = evaluate(f->lhs, word, loop_start);
      auto b = evaluate(f->rhs, word, loop_start);
      for (std::size_t i = 0; i < n; ++i)
        v[i] = f->op == Op::And ? (a[i] && b[i]) : f->op == Op::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
      break;
    }
    case Op::Next: {
      auto a = evaluate(f->lhs, word, loop_start);
      for (std::size_t i = 0; i < n; ++i) v[i] = a[succ(i)];
      break;
    }
    case Op::Globally: {
      auto a = evaluate(f->lhs, word, loop_start);
      fixpoint(true, [&](std::size_t i) { return a[i] && v[succ(i)]; });
      break;
    }
    case Op::Finally: {
      auto a = evaluate(f->lhs, word, loop_start);
      fixpoint(false, [&](std::size_t i) { return a[i] || v[succ(i)]; });
      break;
    }
    case Op::Until: {
      auto a = evaluate(f->lhs, word, loop_start);
      auto b = evaluate(f->rhs, word, loop_start);
      fixpoint(false, [&](std::size_t i) { return b[i] || (a[i] && v[succ(i)]); });
      break;
    }
    case Op::Release: {
      auto a = evaluate(f->lhs, word, loop_start);
      auto b = evaluate(f->rhs, word, loop_start);
      fixpoint(true, [&](std::size_t i) { return b[i] && (a[i] || v[succ(i)]); });
      break;
    }
  }
  return v;
}

}  // namespace detail

/// Evaluates f on the word stem·loop^ω of proposition sets.
inline bool holds_on_word(const FormulaPtr& f, const std::vector<PropSet>& stem, const std::vector<PropSet>& loop) {
  if (loop.empty()) throw ContractError("lasso loop must be non-empty");
  std::vector<const PropSet*> word;
  for (const auto& s : stem) word.push_back(&s);
  for (const auto& s : loop) word.push_back(&s);
  return detail::evaluate(f, word, stem.size())[0];
}

inline bool holds_on_lasso(const KripkeStructure& k, const FormulaPtr& f, const Lasso& l) {
  if (l.loop.empty()) throw ContractError("lasso loop must be non-empty");
  std::vector<const PropSet*> word;
  for (auto s : l.stem) word.push_back(&k.labels.at(s));
  for (auto s : l.loop) word.push_back(&k.labels.at(s));
  return detail::evaluate(f, word, l.stem.size())[0];
}

}  // namespace lct
