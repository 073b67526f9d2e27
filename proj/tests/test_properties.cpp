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

#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace lct;

namespace {

KripkeStructure expanded_kripke(const MealyMachine& m, const Cpm& cpm) {
  return kripke_from_annotated(expand_tau(annotate(m, cpm), cpm));
}

const PropertyResult& by_name(const std::vector<PropertyResult>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.inst.property.name == name) return r;
  throw Error("no result for " + name);
}

}  // namespace

TEST_CASE("property files parse, report errors and round-trip", "[properties]") {
  const auto props = parse_property_file("# comment\n\nA: G p  # trailing\nB: p U q\n");
  REQUIRE(props.size() == 2);
  CHECK(props[0].name == "A");
  CHECK(props[0].text == "G p");
  CHECK(to_string(props[1].formula) == "(p U q)");
  const auto again = parse_property_file(emit_property_file(props));
  REQUIRE(again.size() == 2);
  CHECK(equal(again[1].formula, props[1].formula));

  auto line_of = [](const char* text) {
    try {
      parse_property_file(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("A: p\nno colon here\n") == 2);
  CHECK(line_of("A: p\nA: q\n") == 2);
  CHECK(line_of("\n\nA: G(p &&\n") == 3);
  CHECK(line_of("9x: p\n") == 1);
}

TEST_CASE("fixture property files match the built-in library", "[properties]") {
  const auto generic = parse_property_file(testing::fixture("generic.props"));
  const auto emrtd = parse_property_file(testing::fixture("emrtd.props"));
  const auto lib = property_library();
  REQUIRE(generic.size() == generic_properties().size());
  REQUIRE(emrtd.size() == lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) {
    CHECK(emrtd[i].name == lib[i].name);
    CHECK(equal(emrtd[i].formula, lib[i].formula));
    if (i < generic.size()) CHECK(equal(generic[i].formula, lib[i].formula));
  }
}

TEST_CASE("instantiation keeps propositions the map declares", "[properties]") {
  const auto insts = instantiate(property_library(), fixtures::emrtd_cpm());
  for (const auto& i : insts) CHECK(i.substituted.empty());
  const auto uds = instantiate(generic_properties(), fixtures::uds_cpm());
  CHECK(uds[2].substituted.empty());
  CHECK(props_of(uds[2].formula).count("PRIV"));
}

TEST_CASE("eMRTD model satisfies the whole library", "[properties]") {
  const auto cpm = fixtures::emrtd_cpm();
  const auto k = expanded_kripke(fixtures::emrtd_machine(), cpm);
  const auto rs = check_all(k, instantiate(property_library(), cpm));
  REQUIRE(rs.size() == 7);
  for (const auto& r : rs) CHECK(r.result.verdict == Verdict::Holds);
  CHECK(verdict_text(by_name(rs, "P2")) == "HOLDS (vacuously)");
  CHECK(verdict_text(by_name(rs, "P1")) == "HOLDS");
}

TEST_CASE("UDS model violates only the key-handling property", "[properties]") {
  const auto cpm = fixtures::uds_cpm();
  const auto k = expanded_kripke(fixtures::uds_machine(), cpm);
  const auto rs = check_all(k, instantiate(generic_properties(), cpm));
  CHECK(verdict_text(by_name(rs, "P1")) == "HOLDS (vacuously)");
  CHECK(verdict_text(by_name(rs, "P2")) == "HOLDS (vacuously)");
  CHECK(verdict_text(by_name(rs, "P3")) == "HOLDS");
  CHECK(verdict_text(by_name(rs, "P4")) == "VIOLATED");

  const auto patched = expanded_kripke(fixtures::uds_machine(true), cpm);
  CHECK(check(patched, instantiate(generic_properties(), cpm)[3].formula).verdict == Verdict::Holds);
}

TEST_CASE("vacuity needs the implication shape", "[properties]") {
  KripkeStructure k;
  k.add_state("a", {"p"});
  k.add_state("b", {"q"});
  k.add_edge(0, 1);
  k.add_edge(1, 0);
  k.initial = {0};
  CHECK_FALSE(vacuity(k, parse_ltl("G p")).applicable);
  CHECK_FALSE(vacuity(k, parse_ltl("G(p -> F q)")).applicable);
  const auto never = vacuity(k, parse_ltl("G(r -> q)"));
  CHECK(never.applicable);
  CHECK_FALSE(never.antecedent_reachable);
  CHECK(never.vacuous());
  const auto apart = vacuity(k, parse_ltl("G(p -> !q)"));
  CHECK(apart.antecedent_reachable);
  CHECK_FALSE(apart.atoms_cooccur);
  CHECK(apart.vacuous());
  k.labels[1] = {"p", "q"};
  CHECK_FALSE(vacuity(k, parse_ltl("G(p -> q)")).vacuous());
}

TEST_CASE("JSON and text reports", "[properties]") {
  const auto cpm = fixtures::uds_cpm();
  const auto k = expanded_kripke(fixtures::uds_machine(), cpm);
  const auto rs = check_all(k, instantiate(generic_properties(), cpm));
  const auto jsonl = report_jsonl(rs, k);
  std::istringstream in(jsonl);
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  REQUIRE(rows.size() == 4);
  CHECK(rows[3]["property"] == "P4");
  CHECK(rows[3]["verdict"] == "VIOLATED");
  CHECK(rows[3]["lasso"]["loop"] == nlohmann::json::array({"A"}));
  CHECK(rows[0]["vacuity"]["vacuous"] == true);
  const auto text = report_text(rs, k);
  CHECK(text.find("P4") != std::string::npos);
  CHECK(text.find("VIOLATED") != std::string::npos);
}
