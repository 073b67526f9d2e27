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

// Tableau translation of LTL into Büchi automata, automata-theoretic model
// checking of Kripke structures with nested depth-first search, and a brute
// force lasso-enumerating oracle.

#include <lct/ltl.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace lct {

/// Conjunction of literals.
struct Guard {
  PropSet positive;
  PropSet negative;

  bool satisfied_by(const PropSet& letter) const {
    for (const auto& p : positive)
      if (!letter.count(p)) return false;
    for (const auto& p : negative)
      if (letter.count(p)) return false;
    return true;
  }

  bool operator<(const Guard& o) const { return std::tie(positive, negative) < std::tie(o.positive, o.negative); }
  bool operator==(const Guard& o) const { return positive == o.positive && negative == o.negative; }
};

struct BuchiEdge {
  Guard guard;
  std::size_t target;

  bool operator<(const BuchiEdge& o) const { return std::tie(guard, target) < std::tie(o.guard, o.target); }
  bool operator==(const BuchiEdge& o) const { return guard == o.guard && target == o.target; }
};

/// State-based Büchi automaton with a single acceptance set. A run reads
/// letter i on its i-th edge.
struct BuchiAutomaton {
  std::size_t initial = 0;
  std::vector<std::vector<BuchiEdge>> edges;
  std::vector<bool> accepting;

  std::size_t size() const { return edges.size(); }
};

struct GeneralizedBuchi {
  std::size_t initial = 0;
  std::vector<std::vector<BuchiEdge>> edges;
  std::vector<std::vector<bool>> acceptance;  // one vector per set
};

namespace detail {

using FormulaSet = std::map<std::string, FormulaPtr>;

struct TableauNode {
  std::set<std::size_t> incoming;
  FormulaSet pending;
  FormulaSet old;
  FormulaSet next;
};

class Tableau {
 public:
  static constexpr std::size_t kInit = 0;

  explicit Tableau(const FormulaPtr& f) {
    TableauNode start;
    start.incoming = {kInit};
    add(start.pending, f);
    expand(std::move(start));
  }

  std::vector<TableauNode> nodes;  // node i is automaton state i + 1

 private:
  static void add(FormulaSet& s, const FormulaPtr& f) { s.emplace(to_string(f), f); }

  static bool contradicts(const FormulaSet& old, const FormulaPtr& f) {
    if (f->op == Op::False) return true;
    if (f->op == Op::Prop) return old.count(to_string(ltl::neg(f))) > 0;
    if (f->op == Op::Not) return old.count(to_string(f->lhs)) > 0;
    return false;
  }

  void expand(TableauNode node) {
    if (node.pending.empty()) {
      for (auto& existing : nodes)
        if (keys_equal(existing.old, node.old) && keys_equal(existing.next, node.next)) {
          existing.incoming.insert(node.incoming.begin(), node.incoming.end());
          return;
        }
      nodes.push_back(node);
      const std::size_t id = nodes.size();  // automaton id
      TableauNode succ;
      succ.incoming = {id};
      succ.pending = node.next;
      expand(std::move(succ));
      return;
    }
    auto it = node.pending.begin();
    const FormulaPtr f = it->second;
    const std::string key = it->first;
    node.pending.erase(it);
    if (node.old.count(key)) {
      expand(std::move(node));
      return;
    }
    switch (f->op) {
      case Op::True:
      case Op::False:
      case Op::Prop:
      case Op::Not:
        if (contradicts(node.old, f)) return;
        node.old.emplace(key, f);
        expand(std::move(node));
        return;
      case Op::And:
        node.old.emplace(key, f);
        add_unless_old(node, f->lhs);
        add_unless_old(node, f->rhs);
        expand(std::move(node));
        return;
      case Op::Next:
        node.old.emplace(key, f);
        add(node.next, f->lhs);
        expand(std::move(node));
        return;
      case Op::Or:
      case Op::Until:
      case Op::Release: {
        node.old.emplace(key, f);
        TableauNode first = node, second = std::move(node);
        if (f->op == Op::Or) {
          add_unless_old(first, f->lhs);
          add_unless_old(second, f->rhs);
        } else if (f->op == Op::Until) {  // a U b = b || (a && X(a U b))
          add_unless_old(first, f->lhs);
          add(first.next, f);
          add_unless_old(second, f->rhs);
        } else {  // a R b = (a && b) || (b && X(a R b))
          add_unless_old(first, f->rhs);
          add(first.next, f);
          add_unless_old(second, f->lhs);
          add_unless_old(second, f->rhs);
        }
        expand(std::move(first));
        expand(std::move(second));
        return;
      }
      default: throw ContractError("tableau expects a formula in negation normal form");
    }
  }

  static void add_unless_old(TableauNode& n, const FormulaPtr& f) {
    const std::string key = to_string(f);
    if (!n.old.count(key)) n.pending.emplace(key, f);
  }

  static bool keys_equal(const FormulaSet& a, const FormulaSet& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; });
  }
};

inline void collect_untils(const FormulaPtr& f, FormulaSet& out) {
  if (!f) return;
  if (f->op == Op::Until) out.emplace(to_string(f), f);
  collect_untils(f->lhs, out);
  collect_untils(f->rhs, out);
}

}  // namespace detail

/// Generalized Büchi automaton of an NNF formula (expand-node tableau). State
/// 0 is the initial state; edges into a tableau node are guarded by its literals.
inline GeneralizedBuchi tableau_to_gba(const FormulaPtr& nnf) {
  if (!is_nnf(nnf)) throw ContractError("formula is not in negation normal form: " + to_string(nnf));
  detail::Tableau t(nnf);
  GeneralizedBuchi g;
  g.edges.resize(t.nodes.size() + 1);
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    Guard guard;
    for (const auto& [key, f] : t.nodes[i].old) {
      if (f->op == Op::Prop) guard.positive.insert(f->prop);
      if (f->op == Op::Not) guard.negative.insert(f->lhs->prop);
    }
    for (auto from : t.nodes[i].incoming) g.edges[from].push_back(BuchiEdge{guard, i + 1});
  }
  detail::FormulaSet untils;
  detail::collect_untils(nnf, untils);
  for (const auto& [key, u] : untils) {
    std::vector<bool> set(t.nodes.size() + 1, true);
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
      set[i + 1] = !t.nodes[i].old.count(key) || t.nodes[i].old.count(to_string(u->rhs));
    g.acceptance.push_back(std::move(set));
  }
  for (auto& e : g.edges) std::sort(e.begin(), e.end());
  return g;
}

/// Counter construction: (s, i) moves to index i+1 after leaving a state of
/// set i; (s, k-1) with s in set k-1 is accepting.
inline BuchiAutomaton degeneralize(const GeneralizedBuchi& g) {
  const std::size_t k = g.acceptance.size();
  BuchiAutomaton b;
  if (k == 0) {
    b.edges = g.edges;
    b.accepting.assign(g.edges.size(), true);
    b.initial = g.initial;
    return b;
  }
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  std::deque<std::pair<std::size_t, std::size_t>> queue;
  auto id = [&](std::size_t s, std::size_t i) {
    auto [it, fresh] = index.emplace(std::make_pair(s, i), b.edges.size());
    if (fresh) {
      b.edges.emplace_back();
      b.accepting.push_back(i == k - 1 && g.acceptance[k - 1][s]);
      queue.emplace_back(s, i);
    }
    return it->second;
  };
  b.initial = id(g.initial, 0);
  while (!queue.empty()) {
    const auto [s, i] = queue.front();
    queue.pop_front();
    const std::size_t from = index.at({s, i});
    const std::size_t j = g.acceptance[i][s] ? (i + 1) % k : i;
    for (const auto& e : g.edges[s]) {
      const std::size_t to = id(e.target, j);
      b.edges[from].push_back(BuchiEdge{e.guard, to});
    }
  }
  return b;
}

namespace detail {

// Reachable part, renumbered breadth-first from the initial state.
inline BuchiAutomaton compact(const BuchiAutomaton& b) {
  std::vector<std::size_t> order{b.initial};
  std::map<std::size_t, std::size_t> remap{{b.initial, 0}};
  for (std::size_t k = 0; k < order.size(); ++k)
    for (const auto& e : b.edges[order[k]])
      if (remap.emplace(e.target, order.size()).second) order.push_back(e.target);
  BuchiAutomaton r;
  for (auto s : order) {
    std::vector<BuchiEdge> out;
    for (const auto& e : b.edges[s]) out.push_back(BuchiEdge{e.guard, remap.at(e.target)});
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    r.edges.push_back(std::move(out));
    r.accepting.push_back(b.accepting[s]);
  }
  r.initial = 0;
  return r;
}

}  // namespace detail

/// Merges states with identical outgoing edges and acceptance until stable
/// and drops unreachable states.
inline BuchiAutomaton simplify(BuchiAutomaton b) {
  while (true) {
    b = detail::compact(b);
    std::map<std::pair<bool, std::vector<BuchiEdge>>, std::size_t> seen;
    std::vector<std::size_t> rep(b.size());
    bool merged = false;
    for (std::size_t s = 0; s < b.size(); ++s) {
      auto [it, fresh] = seen.emplace(std::make_pair(bool(b.accepting[s]), b.edges[s]), s);
      rep[s] = it->second;
      merged = merged || !fresh;
    }
    if (!merged) return b;
    for (auto& out : b.edges)
      for (auto& e : out) e.target = rep[e.target];
    b.initial = rep[b.initial];
  }
}

/// Büchi automaton accepting exactly the models of f.
inline BuchiAutomaton ltl_to_buchi(const FormulaPtr& f) {
  return simplify(degeneralize(tableau_to_gba(is_nnf(f) ? f : to_nnf(f))));
}

// ---------------------------------------------------------------------------
// Model checking

enum class Verdict { Holds, Violated, BoundedHolds };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::BoundedHolds: return "BOUNDED-HOLDS";
  }
  return "?";
}

struct CheckResult {
  Verdict verdict = Verdict::Holds;
  std::optional<Lasso> lasso;
  std::size_t automaton_states = 0;
  std::size_t product_states = 0;
};

struct CheckOptions {
  std::size_t ceiling = 1'000'000;
  /// Replace the nested-DFS witness by the shortest breadth-first lasso that
  /// still falsifies the formula.
  bool shortest_witness = true;
};

namespace detail {

class ProductSearch {
 public:
  ProductSearch(const KripkeStructure& k, const BuchiAutomaton& b, std::size_t ceiling)
      : k_(k), b_(b), ceiling_(ceiling) {}

  std::optional<Lasso> run() {
    for (auto s0 : k_.initial) {
      const std::size_t root = node(s0, b_.initial);
      if (blue_[root]) continue;
      if (outer(root)) return lasso_;
    }
    return std::nullopt;
  }

  std::size_t explored() const { return keys_.size(); }

 private:
  struct Key {
    std::size_t k, b;
    bool operator<(const Key& o) const { return std::tie(k, b) < std::tie(o.k, o.b); }
  };

  std::size_t node(std::size_t s, std::size_t q) {
    auto [it, fresh] = index_.emplace(Key{s, q}, keys_.size());
    if (fresh) {
      if (keys_.size() >= ceiling_) throw CeilingExceeded("product exceeds " + std::to_string(ceiling_) + " states");
      keys_.push_back(Key{s, q});
      blue_.push_back(false);
      red_.push_back(false);
      on_stack_.push_back(false);
    }
    return it->second;
  }

  std::vector<std::size_t> successors(std::size_t n) {
    const Key key = keys_[n];
    std::vector<std::size_t> out;
    const PropSet& letter = k_.labels[key.k];
    for (const auto& e : b_.edges[key.b]) {
      if (!e.guard.satisfied_by(letter)) continue;
      for (auto t : k_.successors[key.k]) out.push_back(node(t, e.target));
    }
    return out;
  }

  // Iterative outer DFS; the inner DFS runs in post-order from accepting nodes.
  bool outer(std::size_t root) {
    struct Frame {
      std::size_t n;
      std::vector<std::size_t> succ;
      std::size_t next = 0;
    };
    std::vector<Frame> stack;
    blue_[root] = true;
    on_stack_[root] = true;
    stack.push_back(Frame{root, successors(root)});
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next < top.succ.size()) {
        const std::size_t t = top.succ[top.next++];
        if (!blue_[t]) {
          blue_[t] = true;
          on_stack_[t] = true;
          stack.push_back(Frame{t, successors(t)});
        }
        continue;
      }
      const std::size_t n = top.n;
      if (b_.accepting[keys_[n].b]) {
        std::vector<std::size_t> cycle;
        if (inner(n, cycle)) {
          build(stack, n, cycle);
          return true;
        }
      }
      on_stack_[n] = false;
      stack.pop_back();
    }
    return false;
  }

  // Searches a path from seed back to the outer stack; on success `path`
  // holds seed .. the stack node reached.
  bool inner(std::size_t seed, std::vector<std::size_t>& path) {
    struct Frame {
      std::size_t n;
      std::vector<std::size_t> succ;
      std::size_t next = 0;
    };
    std::vector<Frame> stack;
    red_[seed] = true;
    stack.push_back(Frame{seed, successors(seed)});
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next < top.succ.size()) {
        const std::size_t t = top.succ[top.next++];
        if (on_stack_[t]) {
          for (const auto& f : stack) path.push_back(f.n);
          path.push_back(t);
          return true;
        }
        if (!red_[t]) {
          red_[t] = true;
          stack.push_back(Frame{t, successors(t)});
        }
        continue;
      }
      stack.pop_back();
    }
    return false;
  }

  template <class Stack>
  void build(const Stack& stack, std::size_t seed, const std::vector<std::size_t>& cycle) {
    // cycle = seed .. t where t is on the outer stack; the loop starts at t.
    const std::size_t t = cycle.back();
    std::vector<std::size_t> outer_path;
    for (const auto& f : stack) outer_path.push_back(f.n);
    auto pos = std::find(outer_path.begin(), outer_path.end(), t);
    lasso_.stem.clear();
    lasso_.loop.clear();
    for (auto it = outer_path.begin(); it != pos; ++it) lasso_.stem.push_back(keys_[*it].k);
    // loop: t .. seed along the outer stack, then seed .. (before t) along the cycle
    for (auto it = pos; it != outer_path.end(); ++it) lasso_.loop.push_back(keys_[*it].k);
    for (std::size_t i = 1; i + 1 < cycle.size(); ++i) lasso_.loop.push_back(keys_[cycle[i]].k);
    (void)seed;
  }

  const KripkeStructure& k_;
  const BuchiAutomaton& b_;
  std::size_t ceiling_;
  std::map<Key, std::size_t> index_;
  std::vector<Key> keys_;
  std::vector<bool> blue_, red_, on_stack_;
  Lasso lasso_;
};

inline std::vector<std::vector<std::size_t>> bfs_parents(const KripkeStructure& k, std::size_t from,
                                                         std::vector<std::size_t>& order) {
  // parent[s] = {predecessor}; empty for unreached, {from} marker for root
  const std::size_t none = k.size();
  std::vector<std::vector<std::size_t>> parent(k.size());
  std::vector<std::size_t> pred(k.size(), none);
  std::vector<bool> seen(k.size());
  order = {from};
  seen[from] = true;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto t : k.successors[order[i]])
      if (!seen[t]) {
        seen[t] = true;
        pred[t] = order[i];
        order.push_back(t);
      }
  for (std::size_t s = 0; s < k.size(); ++s)
    if (seen[s]) parent[s] = {pred[s]};
  return parent;
}

// Shortest path from `from` to `to` (both inclusive) using BFS predecessors.
inline std::vector<std::size_t> trace(const std::vector<std::vector<std::size_t>>& parent, std::size_t from,
                                      std::size_t to) {
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(parent[path.back()][0]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Shortest cycle through s as [s, ..., last] with last -> s.
inline std::optional<std::vector<std::size_t>> shortest_cycle(const KripkeStructure& k, std::size_t s) {
  if (k.has_edge(s, s)) return std::vector<std::size_t>{s};
  std::vector<std::size_t> order;
  auto parent = bfs_parents(k, s, order);
  std::optional<std::vector<std::size_t>> best;
  for (auto v : order)
    if (v != s && k.has_edge(v, s)) {
      best = trace(parent, s, v);
      break;
    }
  return best;
}

// Breadth-first search for a short falsifying lasso: a shortest path to some
// state s, then a shortest path on to some state c, then the shortest cycle
// through c. The first candidate in this order that falsifies f wins.
inline std::optional<Lasso> shortest_witness(const KripkeStructure& k, const FormulaPtr& f, std::size_t budget) {
  if (k.initial.empty()) return std::nullopt;
  const std::size_t root = k.initial.front();
  std::vector<std::size_t> order;
  auto parent = bfs_parents(k, root, order);
  std::vector<std::optional<std::vector<std::size_t>>> cycles(k.size());
  std::vector<bool> cycle_known(k.size());
  auto cycle = [&](std::size_t c) -> const std::optional<std::vector<std::size_t>>& {
    if (!cycle_known[c]) {
      cycles[c] = shortest_cycle(k, c);
      cycle_known[c] = true;
    }
    return cycles[c];
  };
  // Candidates: stem = path to s followed by a path from s to c, loop = a
  // shortest cycle at c. Tried by total length, then loop length.
  struct Candidate {
    std::size_t total, loop_len, rank;
    Lasso lasso;
  };
  std::vector<Candidate> cands;
  for (auto s : order) {
    const auto to_s = trace(parent, root, s);
    std::vector<std::size_t> from_s;
    auto sparent = bfs_parents(k, s, from_s);
    for (auto c : from_s) {
      const auto& loop = cycle(c);
      if (!loop) continue;
      Lasso l;
      l.stem = to_s;
      if (c == s) {
        l.stem.pop_back();
      } else {
        const auto tail = trace(sparent, s, c);
        l.stem.insert(l.stem.end(), tail.begin() + 1, tail.end() - 1);
      }
      l.loop = *loop;
      cands.push_back(Candidate{l.stem.size() + l.loop.size(), l.loop.size(), cands.size(), std::move(l)});
      if (cands.size() >= budget) break;
    }
    if (cands.size() >= budget) break;
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.total, x.loop_len, x.rank) < std::tie(y.total, y.loop_len, y.rank);
  });
  for (const auto& c : cands)
    if (!holds_on_lasso(k, f, c.lasso)) return c.lasso;
  return std::nullopt;
}

}  // namespace detail

/// Decides K |= f by checking emptiness of K x A(!f) with nested DFS.
inline CheckResult check(const KripkeStructure& k, const FormulaPtr& f, const CheckOptions& opt = {}) {
  CheckResult r;
  const BuchiAutomaton b = ltl_to_buchi(to_nnf(f, true));
  r.automaton_states = b.size();
  detail::ProductSearch search(k, b, opt.ceiling);
  auto lasso = search.run();
  r.product_states = search.explored();
  if (!lasso) return r;
  r.verdict = Verdict::Violated;
  if (opt.shortest_witness)
    if (auto better = detail::shortest_witness(k, f, 200'000)) lasso = better;
  if (!is_valid_lasso(k, *lasso) || holds_on_lasso(k, f, *lasso))
    throw ContractError("internal error: witness for " + to_string(f) + " does not falsify it");
  r.lasso = std::move(lasso);
  return r;
}

struct OracleOptions {
  std::size_t stem_max = 0;  // 0 = number of states
  std::size_t loop_max = 0;
  std::size_t lasso_limit = 20'000'000;
};

/// Enumerates every lasso with |stem| <= stem_max and 1 <= |loop| <= loop_max
/// and evaluates f on each by direct semantics.
inline CheckResult bounded_oracle(const KripkeStructure& k, const FormulaPtr& f, const OracleOptions& opt = {}) {
  const std::size_t stem_max = opt.stem_max ? opt.stem_max : k.size();
  const std::size_t loop_max = opt.loop_max ? opt.loop_max : k.size();
  CheckResult r;
  r.verdict = Verdict::BoundedHolds;
  std::size_t visited = 0;
  std::vector<std::size_t> path;
  // Depth-first over paths; every path prefix p[0..n) with n >= 1 is split as
  // stem p[0..a), loop p[a..n) whenever p[n-1] -> p[a] is an edge.
  auto dfs = [&](auto&& self) -> bool {
    const std::size_t n = path.size();
    for (std::size_t a = n > loop_max ? n - loop_max : 0; a < n && a <= stem_max; ++a) {
      if (!k.has_edge(path[n - 1], path[a])) continue;
      if (++visited > opt.lasso_limit) throw CeilingExceeded("bounded oracle exceeded its lasso limit");
      Lasso l{{path.begin(), path.begin() + a}, {path.begin() + a, path.end()}};
      if (!holds_on_lasso(k, f, l)) {
        r.verdict = Verdict::Violated;
        r.lasso = std::move(l);
        return true;
      }
    }
    if (n >= stem_max + loop_max) return false;
    for (auto t : k.successors[path[n - 1]]) {
      path.push_back(t);
      if (self(self)) return true;
      path.pop_back();
    }
    return false;
  };
  for (auto s0 : k.initial) {
    path = {s0};
    if (dfs(dfs)) break;
  }
  r.product_states = visited;
  return r;
}

}  // namespace lct
