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
// Command-line front end. Every stage reads and writes files so the
// intermediate artifacts can be inspected and diffed.
//
// Exit codes: 0 ok, 1 round-trip failure, 2 property violated, 3 replay
// divergence, 64 usage, 65 malformed input, 66 missing file.

#include <lct/lct.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kRoundtripFail = 1, kViolated = 2, kDiverged = 3, kUsage = 64, kData = 65, kNoInput = 66 };

class MissingFile : public lct::Error {
 public:
  using lct::Error::Error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MissingFile("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw lct::Error("cannot write '" + p.string() + "'");
  out << text;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

lct::Cpm load_cpm(const std::string& path) { return path.empty() ? lct::Cpm{} : lct::parse_cpm(read_file(path)); }

std::vector<lct::Property> load_properties(const std::string& path) {
  return path.empty() ? lct::property_library() : lct::parse_property_file(read_file(path));
}

/// Fixture name or path of a DOT model.
std::unique_ptr<lct::MealySul> make_sul(const std::string& spec) {
  if (spec == "emrtd") return std::make_unique<lct::MealySul>(lct::build_emrtd_sul());
  if (spec == "uds") return std::make_unique<lct::MealySul>(lct::build_uds_sul());
  if (spec == "uds-patched") return std::make_unique<lct::MealySul>(lct::build_uds_sul(true));
  if (spec == "example") return std::make_unique<lct::MealySul>(lct::fixtures::example_machine());
  return std::make_unique<lct::MealySul>(lct::parse_dot(read_file(spec)));
}

struct LearnArgs {
  std::string oracle = "random";
  std::size_t min_len = 20, max_len = 50, num_tests = 50;
  std::uint64_t seed = 1;
};

lct::LearnResult learn(lct::MealySul& sul, const LearnArgs& a) {
  lct::EquivalenceOracle oracle;
  if (a.oracle == "exact")
    oracle = lct::make_exact_oracle(sul.machine());
  else if (a.oracle == "random")
    oracle = lct::make_random_walk_oracle(sul, {a.min_len, a.max_len, a.num_tests, a.seed});
  else
    throw lct::ContractError("unknown oracle '" + a.oracle + "' (expected exact or random)");
  return lct::lstar_learn(sul, sul.alphabet(), oracle);
}

json stats_json(const lct::LearnResult& r, const LearnArgs& a) {
  return {{"status", lct::to_string(r.status)},
          {"states", r.hypothesis.num_states()},
          {"membership_queries", r.stats.membership_queries},
          {"cache_hits", r.stats.cache_hits},
          {"equivalence_queries", r.stats.equivalence_queries},
          {"rounds", r.stats.rounds},
          {"oracle", a.oracle},
          {"min_len", a.min_len},
          {"max_len", a.max_len},
          {"num_tests", a.num_tests},
          {"seed", a.seed}};
}

lct::AnnotatedMachine load_annotated(const std::string& path) { return lct::parse_annotated_dot(read_file(path)); }

lct::ActorModelIR make_ir(const lct::AnnotatedMachine& a, const lct::Cpm& cpm, double timeout_p) {
  auto ir = lct::build_ir(a, cpm);
  if (timeout_p > 0) ir = lct::apply_timeout_mutation(ir, {true, timeout_p});
  return ir;
}

std::size_t index_of(const lct::KripkeStructure& k, const std::string& name) {
  for (std::size_t s = 0; s < k.size(); ++s)
    if (k.names[s] == name) return s;
  throw lct::ContractError("report names unknown state '" + name + "'");
}

/// Test cases for every violation in a JSON-lines report.
std::vector<lct::TestCase> tests_from_report(const std::string& report, const lct::AnnotatedMachine& e,
                                             std::size_t unroll) {
  const auto k = lct::kripke_from_annotated(e);
  std::vector<lct::TestCase> out;
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (lct::detail::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& ex) {
      throw lct::ParseError(std::string("invalid report line: ") + ex.what(), 1);
    }
    if (!j.contains("lasso")) continue;
    lct::Lasso l;
    for (const auto& n : j["lasso"]["stem"]) l.stem.push_back(index_of(k, n.get<std::string>()));
    for (const auto& n : j["lasso"]["loop"]) l.loop.push_back(index_of(k, n.get<std::string>()));
    out.push_back(lct::concretize(l, k, e, unroll, j.value("property", std::string{})));
  }
  return out;
}

struct ReplaySummary {
  std::string jsonl;
  std::string text;
  bool diverged = false;
};

ReplaySummary replay_all(const std::vector<lct::TestCase>& tests, lct::SulInterface& sul) {
  ReplaySummary s;
  for (const auto& t : tests) {
    const auto r = lct::replay(t, sul);
    s.jsonl += lct::to_json(r, t).dump() + "\n";
    s.text += t.property + ": " + lct::to_string(r.verdict);
    if (r.divergence) {
      s.diverged = true;
      s.text += " at position " + std::to_string(*r.divergence) + ", observed " + lct::to_string(r.observed);
    }
    s.text += "\n";
  }
  return s;
}

bool any_violated(const std::vector<lct::PropertyResult>& results) {
  for (const auto& r : results)
    if (r.result.verdict == lct::Verdict::Violated) return true;
  return false;
}

// ---------------------------------------------------------------------------
// pipeline

int run_pipeline(const fs::path& config_path) {
  const std::string config_text = read_file(config_path);
  json cfg;
  try {
    cfg = json::parse(config_text);
  } catch (const json::exception& e) {
    throw lct::ParseError(std::string("invalid config: ") + e.what(), 1);
  }
  const fs::path base = config_path.parent_path();
  auto path = [&](const char* key) -> std::string {
    if (!cfg.contains(key)) return {};
    fs::path p = cfg[key].get<std::string>();
    return (p.is_absolute() ? p : base / p).string();
  };
  const fs::path out = path("out").empty() ? base / "out" : fs::path(path("out"));
  const std::string model_path = path("model");
  const std::string sul_name = cfg.value("sul", std::string{});
  if (model_path.empty() == sul_name.empty()) throw lct::ContractError("config needs exactly one of 'model' and 'sul'");

  LearnArgs la;
  if (cfg.contains("learner")) {
    const auto& l = cfg["learner"];
    la.oracle = l.value("oracle", la.oracle);
    la.min_len = l.value("min_len", la.min_len);
    la.max_len = l.value("max_len", la.max_len);
    la.num_tests = l.value("num_tests", la.num_tests);
    la.seed = l.value("seed", la.seed);
  }
  const double timeout_p = cfg.contains("mutation") ? cfg["mutation"].value("timeout_probability", 0.0) : 0.0;
  lct::ExploreOptions eo;
  eo.ceiling = cfg.value("ceiling", eo.ceiling);
  const std::size_t unroll = cfg.value("unroll", std::size_t{1});

  json manifest;
  manifest["tool"] = "lct";
  manifest["version"] = lct::kVersion;
  manifest["config_hash"] = "fnv1a64:" + hex(fnv1a(config_text));
  manifest["seeds"] = {{"learner", la.seed}};
  json stages = json::array();
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(out / name, text);
    manifest["files"][name] = "fnv1a64:" + hex(fnv1a(text));
  };

  std::unique_ptr<lct::MealySul> sul;
  lct::MealyMachine model;
  if (!sul_name.empty()) {
    sul = make_sul(sul_name);
    const auto r = learn(*sul, la);
    model = r.hypothesis;
    emit("model.dot", lct::emit_dot(model));
    emit("learn.json", stats_json(r, la).dump(2) + "\n");
    stages.push_back({{"stage", "learn"}, {"status", lct::to_string(r.status)}});
  } else {
    model = lct::parse_dot(read_file(model_path));
    stages.push_back({{"stage", "load"}, {"status", "ok"}});
  }

  const auto cpm = load_cpm(path("cpm"));
  const auto annotated = lct::annotate(model, cpm);
  emit("annotated.dot", lct::emit_annotated_dot(annotated));
  const auto expanded = lct::expand_tau(annotated, cpm);
  emit("expanded.dot", lct::emit_annotated_dot(expanded));
  stages.push_back({{"stage", "annotate"}, {"status", "ok"}});

  const auto ir = make_ir(annotated, cpm, timeout_p);
  emit("model.rebeca", lct::emit_rebeca(ir));
  const auto lts = lct::explore(ir, eo);
  emit("lts.dot", lct::emit_lts_dot(lts));
  emit("collapsed.dot", lct::emit_collapsed_dot(lct::collapse(lts)));
  stages.push_back({{"stage", "explore"}, {"status", "ok"}, {"lts_nodes", lts.nodes.size()}});

  const auto rt = lct::verify_roundtrip(annotated, cpm, eo);
  emit("roundtrip.txt", rt.message + "\n");
  stages.push_back({{"stage", "verify-roundtrip"}, {"status", rt.pass ? "PASS" : "FAIL"}});

  const auto k = lct::kripke_from_annotated(expanded);
  const auto results = lct::check_all(k, lct::instantiate(load_properties(path("properties")), cpm));
  emit("report.jsonl", lct::report_jsonl(results, k));
  emit("report.txt", lct::report_text(results, k));
  std::size_t violations = 0;
  for (const auto& r : results) violations += r.result.verdict == lct::Verdict::Violated;
  stages.push_back({{"stage", "check"}, {"status", "ok"}, {"violations", violations}});

  const auto tests = tests_from_report(lct::report_jsonl(results, k), expanded, unroll);
  emit("tests.jsonl", lct::emit_tests_jsonl(tests));
  bool diverged = false;
  if (sul) {
    const auto s = replay_all(tests, *sul);
    emit("replay.jsonl", s.jsonl);
    diverged = s.diverged;
    stages.push_back({{"stage", "replay"}, {"status", diverged ? "DIVERGED" : "CONFIRMED"}});
  }
  manifest["stages"] = stages;
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  std::cout << lct::report_text(results, k);
  std::cout << "round-trip: " << rt.message << "\n";
  if (!rt.pass) return kRoundtripFail;
  if (diverged) return kDiverged;
  return violations ? kViolated : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn, annotate, model-check and test Mealy machine models"};
  app.set_version_flag("--version", lct::kVersion);
  app.require_subcommand(1);
  int code = kOk;

  // learn
  auto* learn_cmd = app.add_subcommand("learn", "Learn a Mealy machine from a simulated system");
  std::string sul_spec, out_path, stats_path;
  LearnArgs la;
  learn_cmd->add_option("--sul", sul_spec, "emrtd, uds, uds-patched, example or a DOT file")->required();
  learn_cmd->add_option("--out", out_path, "learned model (DOT)")->required();
  learn_cmd->add_option("--stats", stats_path, "statistics (JSON)");
  learn_cmd->add_option("--oracle", la.oracle, "exact or random")->capture_default_str();
  learn_cmd->add_option("--min-len", la.min_len)->capture_default_str();
  learn_cmd->add_option("--max-len", la.max_len)->capture_default_str();
  learn_cmd->add_option("--num-tests", la.num_tests)->capture_default_str();
  learn_cmd->add_option("--seed", la.seed)->capture_default_str();
  learn_cmd->callback([&] {
    auto sul = make_sul(sul_spec);
    const auto r = learn(*sul, la);
    write_file(out_path, lct::emit_dot(r.hypothesis));
    const std::string stats = stats_json(r, la).dump(2) + "\n";
    if (!stats_path.empty()) write_file(stats_path, stats);
    std::cout << stats;
  });

  // annotate
  auto* annotate_cmd = app.add_subcommand("annotate", "Label the states of a model with CPM propositions");
  std::string model_path, cpm_path;
  annotate_cmd->add_option("--model", model_path)->required();
  annotate_cmd->add_option("--cpm", cpm_path)->required();
  annotate_cmd->add_option("--out", out_path)->required();
  annotate_cmd->callback([&] {
    lct::AnnotationReport report;
    const auto cpm = load_cpm(cpm_path);
    const auto a = lct::annotate(lct::parse_dot(read_file(model_path)), cpm, &report);
    for (auto i : report.unused_gains) std::cerr << "warning: gains condition on line " << cpm.gains[i].line << " never fires\n";
    for (auto i : report.unused_loses) std::cerr << "warning: loses condition on line " << cpm.loses[i].line << " never fires\n";
    write_file(out_path, lct::emit_annotated_dot(a));
  });

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "Insert tau-states carrying temporary propositions");
  std::string annotated_path;
  expand_cmd->add_option("--annotated", annotated_path)->required();
  expand_cmd->add_option("--cpm", cpm_path)->required();
  expand_cmd->add_option("--out", out_path)->required();
  expand_cmd->callback([&] {
    write_file(out_path, lct::emit_annotated_dot(lct::expand_tau(load_annotated(annotated_path), load_cpm(cpm_path))));
  });

  // gen-rebeca
  auto* rebeca_cmd = app.add_subcommand("gen-rebeca", "Emit the two-actor Rebeca model");
  double timeout_p = 0;
  rebeca_cmd->add_option("--annotated", annotated_path)->required();
  rebeca_cmd->add_option("--cpm", cpm_path)->required();
  rebeca_cmd->add_option("--out", out_path)->required();
  rebeca_cmd->add_option("--timeout-mutation", timeout_p, "timeout probability");
  rebeca_cmd->callback([&] {
    write_file(out_path, lct::emit_rebeca(make_ir(load_annotated(annotated_path), load_cpm(cpm_path), timeout_p)));
  });

  // explore
  auto* explore_cmd = app.add_subcommand("explore", "Generate the state space of the actor model");
  lct::ExploreOptions eo;
  explore_cmd->add_option("--annotated", annotated_path)->required();
  explore_cmd->add_option("--cpm", cpm_path)->required();
  explore_cmd->add_option("--out", out_path)->required();
  explore_cmd->add_option("--timeout-mutation", timeout_p, "timeout probability");
  explore_cmd->add_option("--ceiling", eo.ceiling, "maximum number of LTS nodes")->capture_default_str();
  explore_cmd->callback([&] {
    const auto lts = lct::explore(make_ir(load_annotated(annotated_path), load_cpm(cpm_path), timeout_p), eo);
    write_file(out_path, lct::emit_lts_dot(lts));
    std::cout << lts.nodes.size() << " nodes, " << lts.edges.size() << " edges\n";
  });

  // collapse
  auto* collapse_cmd = app.add_subcommand("collapse", "Recover a Mealy-style model from a state space");
  std::string lts_path;
  collapse_cmd->add_option("--lts", lts_path)->required();
  collapse_cmd->add_option("--out", out_path)->required();
  collapse_cmd->callback([&] {
    const auto c = lct::collapse(lct::parse_lts_dot(read_file(lts_path)));
    write_file(out_path, lct::emit_collapsed_dot(c));
    if (!c.deterministic()) std::cerr << "note: collapsed model is nondeterministic (mutated state space)\n";
  });

  // verify-roundtrip
  auto* rt_cmd = app.add_subcommand("verify-roundtrip", "Check that the state space collapses back to the model");
  rt_cmd->add_option("--model", model_path)->required();
  rt_cmd->add_option("--cpm", cpm_path)->required();
  rt_cmd->add_option("--ceiling", eo.ceiling)->capture_default_str();
  rt_cmd->callback([&] {
    const auto cpm = load_cpm(cpm_path);
    const auto r = lct::verify_roundtrip(lct::annotate(lct::parse_dot(read_file(model_path)), cpm), cpm, eo);
    std::cout << r.message << " (" << r.lts_nodes << " LTS nodes, bound " << r.lts_bound << ")\n";
    if (!r.pass) code = kRoundtripFail;
  });

  // check
  auto* check_cmd = app.add_subcommand("check", "Model-check LTL properties");
  std::string expanded_path, props_path, report_path;
  auto* expanded_opt = check_cmd->add_option("--expanded", expanded_path, "tau-expanded annotated model");
  auto* lts_opt = check_cmd->add_option("--lts", lts_path, "state space produced by explore");
  expanded_opt->excludes(lts_opt);
  check_cmd->add_option("--properties", props_path, "property file (default: built-in library)");
  check_cmd->add_option("--cpm", cpm_path)->required();
  check_cmd->add_option("--report", report_path, "JSON-lines report");
  check_cmd->callback([&] {
    if (expanded_path.empty() == lts_path.empty()) throw CLI::ValidationError("check", "give --expanded or --lts");
    const auto k = expanded_path.empty() ? lct::collapse(lct::parse_lts_dot(read_file(lts_path))).kripke()
                                         : lct::kripke_from_annotated(load_annotated(expanded_path));
    const auto cpm = load_cpm(cpm_path);
    const auto results = lct::check_all(k, lct::instantiate(load_properties(props_path), cpm));
    if (!report_path.empty()) write_file(report_path, lct::report_jsonl(results, k));
    std::cout << lct::report_text(results, k);
    if (any_violated(results)) code = kViolated;
  });

  // emit-test
  auto* emit_cmd = app.add_subcommand("emit-test", "Turn counterexamples of a report into test cases");
  std::size_t unroll = 1;
  emit_cmd->add_option("--report", report_path)->required();
  emit_cmd->add_option("--expanded", expanded_path, "model the report was produced from")->required();
  emit_cmd->add_option("--out", out_path)->required();
  emit_cmd->add_option("--unroll", unroll)->capture_default_str();
  emit_cmd->callback([&] {
    const auto tests = tests_from_report(read_file(report_path), load_annotated(expanded_path), unroll);
    write_file(out_path, lct::emit_tests_jsonl(tests));
    std::cout << tests.size() << " test case(s)\n";
  });

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Run test cases against a simulated system");
  std::string tests_path;
  replay_cmd->add_option("--tests", tests_path)->required();
  replay_cmd->add_option("--sul", sul_spec, "emrtd, uds, uds-patched, example or a DOT file")->required();
  replay_cmd->add_option("--report", report_path, "JSON-lines replay report");
  replay_cmd->callback([&] {
    auto sul = make_sul(sul_spec);
    const auto s = replay_all(lct::parse_tests_jsonl(read_file(tests_path)), *sul);
    if (!report_path.empty()) write_file(report_path, s.jsonl);
    std::cout << s.text;
    if (s.diverged) code = kDiverged;
  });

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage from a JSON configuration");
  std::string config_path;
  pipe_cmd->add_option("--config", config_path)->required();
  pipe_cmd->callback([&] { code = run_pipeline(config_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? kOk : kUsage;
  } catch (const MissingFile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoInput;
  } catch (const lct::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const lct::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return code;
}
