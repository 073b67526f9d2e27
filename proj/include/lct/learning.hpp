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

// Active learning of Mealy machines: the system-under-learning interface,
// input/output mappers, simulated systems, L* and equivalence oracles.

#include <lct/automata.hpp>
#include <lct/cpm.hpp>
#include <lct/error.hpp>
#include <lct/fixtures.hpp>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lct {

// ---------------------------------------------------------------------------
// Systems under learning

class SulInterface {
 public:
  virtual ~SulInterface() = default;

  virtual void reset() = 0;
  virtual Symbol step(const Symbol& input) = 0;
  virtual const std::vector<Symbol>& alphabet() const = 0;

  /// Reset, then fold step over the word.
  Word query(const Word& word) {
    reset();
    Word out;
    out.reserve(word.size());
    for (const auto& s : word) out.push_back(step(s));
    return out;
  }
};

/// Simulates a complete Mealy machine.
class MealySul : public SulInterface {
 public:
  explicit MealySul(MealyMachine m) : machine_(std::move(m)) {
    machine_.validate();
    state_ = machine_.initial();
  }

  void reset() override { state_ = machine_.initial(); }

  Symbol step(const Symbol& input) override {
    auto r = machine_.step(state_, input);
    if (!r) throw AlphabetMismatchError("input '" + input + "' is not in the SUL alphabet");
    state_ = r->first;
    return r->second;
  }

  const std::vector<Symbol>& alphabet() const override { return machine_.inputs(); }
  const MealyMachine& machine() const { return machine_; }

 private:
  MealyMachine machine_;
  StateId state_;
};

/// Counts resets and steps of the wrapped SUL.
class CountingSul : public SulInterface {
 public:
  explicit CountingSul(SulInterface& inner) : inner_(inner) {}

  void reset() override {
    ++resets_;
    inner_.reset();
  }
  Symbol step(const Symbol& input) override {
    ++steps_;
    return inner_.step(input);
  }
  const std::vector<Symbol>& alphabet() const override { return inner_.alphabet(); }

  std::size_t resets() const { return resets_; }
  std::size_t steps() const { return steps_; }

 private:
  SulInterface& inner_;
  std::size_t resets_ = 0;
  std::size_t steps_ = 0;
};

/// Simulated travel document.
inline MealySul build_emrtd_sul() { return MealySul(fixtures::emrtd_machine()); }

/// Simulated diagnostic control unit; `patched` rejects a wrong key.
inline MealySul build_uds_sul(bool patched = false) { return MealySul(fixtures::uds_machine(patched)); }

// ---------------------------------------------------------------------------
// Mappers

/// Observed output varied for an identical abstract query although it is not
/// in a declared nondeterministic class.
class NondeterministicOutputError : public Error {
 public:
  NondeterministicOutputError(Word query, Symbol first, Symbol second)
      : Error("nondeterministic output after " + to_string(query) + ": '" + first + "' then '" + second +
              "' (undeclared; add a nondeterministic output class for it)"),
        query_(std::move(query)), first_(std::move(first)), second_(std::move(second)) {}

  const Word& query() const noexcept { return query_; }
  const Symbol& first() const noexcept { return first_; }
  const Symbol& second() const noexcept { return second_; }

 private:
  Word query_;
  Symbol first_;
  Symbol second_;
};

/// Abstraction between the learner's symbols and concrete ones. Inputs map
/// one-to-one; concrete outputs matching a declared class collapse to that
/// class's abstract symbol and all other outputs pass through.
struct Mapper {
  std::vector<Symbol> abstract_inputs;
  std::map<Symbol, std::string> concrete_input;
  std::vector<std::pair<std::string, Symbol>> output_classes;  // glob pattern, abstract symbol

  std::string concretize(const Symbol& input) const {
    auto it = concrete_input.find(input);
    if (it == concrete_input.end()) throw AlphabetMismatchError("mapper has no concrete form for '" + input + "'");
    return it->second;
  }

  Symbol abstract_output(const std::string& concrete) const {
    for (const auto& [pattern, symbol] : output_classes)
      if (glob_match(pattern, concrete)) return symbol;
    return concrete;
  }

  bool declared_nondeterministic(const std::string& concrete) const {
    for (const auto& entry : output_classes)
      if (glob_match(entry.first, concrete)) return true;
    return false;
  }

  void validate() const {
    for (const auto& a : abstract_inputs)
      if (!concrete_input.count(a)) throw ContractError("mapper input abstraction is not total: '" + a + "'");
  }
};

/// SUL over abstract symbols. Remembers every abstract query answered so far
/// and reports an undeclared output that changes between identical queries.
class MappedSul : public SulInterface {
 public:
  MappedSul(SulInterface& raw, Mapper mapper) : raw_(raw), mapper_(std::move(mapper)) { mapper_.validate(); }

  void reset() override {
    raw_.reset();
    prefix_.clear();
  }

  Symbol step(const Symbol& input) override {
    const std::string concrete = raw_.step(mapper_.concretize(input));
    const Symbol abstract = mapper_.abstract_output(concrete);
    prefix_.push_back(input);
    auto [it, fresh] = seen_.emplace(prefix_, abstract);
    if (!fresh && it->second != abstract) throw NondeterministicOutputError(prefix_, it->second, abstract);
    return abstract;
  }

  const std::vector<Symbol>& alphabet() const override { return mapper_.abstract_inputs; }
  const Mapper& mapper() const { return mapper_; }

 private:
  SulInterface& raw_;
  Mapper mapper_;
  Word prefix_;
  std::map<Word, Symbol> seen_;
};

/// Toy card answering GET_CHALLENGE with a fresh `CHAL_<hex>` nonce and
/// everything else with 9000. With `leak_counter`, READ answers with an
/// incrementing `CNT_<n>`, a nondeterministic output no mapper declares.
class NonceSul : public SulInterface {
 public:
  explicit NonceSul(std::uint64_t seed, bool leak_counter = false) : rng_(seed), leak_(leak_counter) {}

  void reset() override {}

  Symbol step(const Symbol& input) override {
    if (input == "GET_CHALLENGE") {
      char buf[24];
      std::snprintf(buf, sizeof buf, "CHAL_%04llx", static_cast<unsigned long long>(rng_() & 0xffff));
      return buf;
    }
    if (input == "READ" && leak_) return "CNT_" + std::to_string(counter_++);
    if (input == "READ" || input == "SELECT") return "9000";
    throw AlphabetMismatchError("input '" + input + "' is not in the SUL alphabet");
  }

  const std::vector<Symbol>& alphabet() const override { return alphabet_; }

 private:
  std::mt19937_64 rng_;
  bool leak_;
  std::uint64_t counter_ = 0;
  std::vector<Symbol> alphabet_{"SELECT", "GET_CHALLENGE", "READ"};
};

/// Identity input mapping for the toy card; `CHAL_*` outputs become NONCE.
inline Mapper canonicalize_nonce_mapper() {
  Mapper m;
  m.abstract_inputs = {"SELECT", "GET_CHALLENGE", "READ"};
  for (const auto& a : m.abstract_inputs) m.concrete_input[a] = a;
  m.output_classes = {{"CHAL_*", "NONCE"}};
  return m;
}

// ---------------------------------------------------------------------------
// Equivalence oracles

/// `num_tests` words of uniform length in [min_len, max_len] over the
/// hypothesis alphabet. Returns the shortest prefix of the first word on
/// which the SUL and the hypothesis disagree.
inline std::optional<Word> random_walk_oracle(SulInterface& sul, const MealyMachine& hypothesis, std::size_t min_len,
                                              std::size_t max_len, std::size_t num_tests, std::uint64_t seed,
                                              std::size_t* queries = nullptr) {
  if (min_len < 1 || min_len > max_len) throw ContractError("random walk needs 1 <= min_len <= max_len");
  const auto& sigma = hypothesis.inputs();
  if (sigma.empty()) return std::nullopt;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, sigma.size() - 1);
  for (std::size_t t = 0; t < num_tests; ++t) {
    Word w(len(rng));
    for (auto& s : w) s = sigma[pick(rng)];
    if (queries) ++*queries;
    const Word observed = sul.query(w);
    const Word predicted = hypothesis.run(w);
    for (std::size_t k = 0; k < w.size(); ++k)
      if (observed[k] != predicted[k]) return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k) + 1);
  }
  return std::nullopt;
}

/// Ground truth for simulated systems: a shortest distinguishing word.
inline std::optional<Word> exact_oracle(const MealyMachine& hidden, const MealyMachine& hypothesis) {
  auto eq = bisimilar(hidden, hypothesis);
  if (eq.equivalent) return std::nullopt;
  return eq.witness;
}

/// Returns a counterexample for the hypothesis, or nothing if none was found.
using EquivalenceOracle = std::function<std::optional<Word>(const MealyMachine&)>;

struct RandomWalkConfig {
  std::size_t min_len = 20;
  std::size_t max_len = 50;
  std::size_t num_tests = 50;
  std::uint64_t seed = 1;
};

/// Round r uses seed + r, so runs are reproducible.
inline EquivalenceOracle make_random_walk_oracle(SulInterface& sul, RandomWalkConfig cfg,
                                                 std::size_t* queries = nullptr) {
  auto round = std::make_shared<std::uint64_t>(0);
  return [&sul, cfg, round, queries](const MealyMachine& h) {
    return random_walk_oracle(sul, h, cfg.min_len, cfg.max_len, cfg.num_tests, cfg.seed + (*round)++, queries);
  };
}

inline EquivalenceOracle make_exact_oracle(MealyMachine hidden) {
  return [hidden = std::move(hidden)](const MealyMachine& h) { return exact_oracle(hidden, h); };
}

// ---------------------------------------------------------------------------
// L*

struct LearnStats {
  std::size_t membership_queries = 0;  // SUL queries issued for table cells
  std::size_t cache_hits = 0;
  std::size_t equivalence_queries = 0;
  std::size_t rounds = 0;  // hypotheses built
  std::vector<std::pair<std::size_t, std::size_t>> table_sizes;  // |S|, |E| per hypothesis
};

enum class LearnStatus { Converged, Unproven };

inline const char* to_string(LearnStatus s) { return s == LearnStatus::Converged ? "CONVERGED" : "UNPROVEN"; }

struct LearnResult {
  MealyMachine hypothesis;
  LearnStats stats;
  LearnStatus status = LearnStatus::Unproven;
  std::vector<Word> counterexamples;
};

struct LStarOptions {
  std::size_t max_rounds = 64;
  std::size_t max_membership_queries = 1'000'000;
};

/// Classic L* for Mealy machines. Cells hold the output word of the suffix;
/// E starts with every single input, counterexamples add all their prefixes
/// to S.
class LStar {
 public:
  explicit LStar(SulInterface& sul) : LStar(sul, sul.alphabet()) {}

  LStar(SulInterface& sul, std::vector<Symbol> alphabet) : sul_(&sul), sigma_(std::move(alphabet)) {
    if (sigma_.empty()) throw ContractError("empty input alphabet");
    short_.push_back({});
    for (const auto& a : sigma_) suffixes_.push_back({a});
  }

  /// Current hypothesis; closes the table first if needed.
  const MealyMachine& hypothesis() {
    if (!hypothesis_) build();
    return *hypothesis_;
  }

  /// Adds every prefix of `ce` to S and rebuilds the hypothesis.
  void refine(const Word& ce) {
    const auto before = std::make_pair(short_.size(), suffixes_.size());
    for (std::size_t k = 1; k <= ce.size(); ++k) {
      Word p(ce.begin(), ce.begin() + static_cast<std::ptrdiff_t>(k));
      if (std::find(short_.begin(), short_.end(), p) == short_.end()) short_.push_back(std::move(p));
    }
    hypothesis_.reset();
    build();
    if (!rebound_ && short_.size() <= before.first && suffixes_.size() <= before.second)
      throw ContractError("counterexample " + to_string(ce) + " did not refine the observation table");
    rebound_ = false;
  }

  /// Continues on another SUL (for instance a patched system); the cache is
  /// dropped, S and E are kept.
  void rebind(SulInterface& sul) {
    sul_ = &sul;
    cache_.clear();
    hypothesis_.reset();
    rebound_ = true;
  }

  /// Runs hypothesis/equivalence rounds until the oracle finds nothing or a
  /// budget runs out.
  LearnResult learn(const EquivalenceOracle& oracle, const LStarOptions& opt = {}) {
    LearnResult r;
    while (true) {
      const MealyMachine& h = hypothesis();
      ++stats_.equivalence_queries;
      auto ce = oracle(h);
      if (!ce) {
        r.status = LearnStatus::Converged;
        break;
      }
      if (membership(*ce) == h.run(*ce)) throw ContractError("oracle returned a word the hypothesis answers correctly");
      counterexamples_.push_back(*ce);
      if (stats_.rounds >= opt.max_rounds || stats_.membership_queries >= opt.max_membership_queries) {
        r.status = LearnStatus::Unproven;
        break;
      }
      refine(*ce);
    }
    r.hypothesis = *hypothesis_;
    r.stats = stats_;
    r.counterexamples = counterexamples_;
    return r;
  }

  const LearnStats& stats() const { return stats_; }
  const std::vector<Word>& short_prefixes() const { return short_; }
  const std::vector<Word>& suffixes() const { return suffixes_; }
  const std::vector<Symbol>& alphabet() const { return sigma_; }

  /// Every cached query with its answer.
  const std::map<Word, Word>& cache() const { return cache_; }

 private:
  using Row = std::vector<Word>;

  Word membership(const Word& w) {
    if (auto it = cache_.find(w); it != cache_.end()) {
      ++stats_.cache_hits;
      return it->second;
    }
    ++stats_.membership_queries;
    Word out = sul_->query(w);
    if (out.size() != w.size()) throw ContractError("SUL answered " + std::to_string(out.size()) + " outputs for " +
                                                    std::to_string(w.size()) + " inputs");
    for (std::size_t k = 0; k <= w.size(); ++k)
      cache_.emplace(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k)),
                     Word(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k)));
    return out;
  }

  Word cell(const Word& u, const Word& e) {
    Word w = u;
    w.insert(w.end(), e.begin(), e.end());
    const Word out = membership(w);
    return Word(out.end() - static_cast<std::ptrdiff_t>(e.size()), out.end());
  }

  Row row(const Word& u) {
    Row r;
    r.reserve(suffixes_.size());
    for (const auto& e : suffixes_) r.push_back(cell(u, e));
    return r;
  }

  static Word extend(const Word& u, const Symbol& a) {
    Word w = u;
    w.push_back(a);
    return w;
  }

  // Returns false after changing S or E.
  bool closed() {
    std::vector<Row> rows;
    for (const auto& s : short_) rows.push_back(row(s));
    for (std::size_t i = 0; i < short_.size(); ++i)
      for (const auto& a : sigma_) {
        Word ext = extend(short_[i], a);
        if (std::find(rows.begin(), rows.end(), row(ext)) == rows.end()) {
          short_.push_back(std::move(ext));
          return false;
        }
      }
    return true;
  }

  bool consistent() {
    std::vector<Row> rows;
    for (const auto& s : short_) rows.push_back(row(s));
    for (std::size_t i = 0; i < short_.size(); ++i)
      for (std::size_t j = i + 1; j < short_.size(); ++j) {
        if (rows[i] != rows[j]) continue;
        for (const auto& a : sigma_)
          for (const auto& e : suffixes_) {
            const Word ae = [&] {
              Word w{a};
              w.insert(w.end(), e.begin(), e.end());
              return w;
            }();
            if (cell(short_[i], ae) != cell(short_[j], ae)) {
              suffixes_.push_back(ae);
              return false;
            }
          }
      }
    return true;
  }

  void build() {
    while (!closed() || !consistent()) {
    }
    std::vector<Row> reps;
    std::vector<std::size_t> rep_prefix;
    for (std::size_t i = 0; i < short_.size(); ++i) {
      Row r = row(short_[i]);
      if (std::find(reps.begin(), reps.end(), r) == reps.end()) {
        reps.push_back(std::move(r));
        rep_prefix.push_back(i);
      }
    }
    MealyMachine h;
    for (std::size_t q = 0; q < reps.size(); ++q) h.add_state("q" + std::to_string(q));
    for (const auto& a : sigma_) h.add_input(a);
    for (std::size_t q = 0; q < reps.size(); ++q)
      for (std::size_t i = 0; i < sigma_.size(); ++i) {
        const Word& u = short_[rep_prefix[q]];
        const auto target = std::find(reps.begin(), reps.end(), row(extend(u, sigma_[i]))) - reps.begin();
        const Symbol out = cell(u, {sigma_[i]}).front();
        h.set_transition(q, i, static_cast<StateId>(target), h.add_output(out));
      }
    h.set_initial(0);
    hypothesis_ = std::move(h);
    ++stats_.rounds;
    stats_.table_sizes.emplace_back(short_.size(), suffixes_.size());
  }

  SulInterface* sul_;
  std::vector<Symbol> sigma_;
  std::vector<Word> short_;
  std::vector<Word> suffixes_;
  std::map<Word, Word> cache_;
  std::optional<MealyMachine> hypothesis_;
  std::vector<Word> counterexamples_;
  LearnStats stats_;
  bool rebound_ = false;
};

/// Learns from scratch with the given oracle.
inline LearnResult lstar_learn(SulInterface& sul, const std::vector<Symbol>& alphabet, const EquivalenceOracle& oracle,
                               const LStarOptions& opt = {}) {
  LStar learner(sul, alphabet);
  return learner.learn(oracle, opt);
}

}  // namespace lct
