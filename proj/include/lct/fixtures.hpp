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

// Reference machines and proposition maps: a two-state example, a travel
// document (eMRTD) model and a diagnostic-session (UDS) control unit model.

#include <lct/automata.hpp>
#include <lct/cpm.hpp>

#include <string>
#include <vector>

namespace lct::fixtures {

// ---------------------------------------------------------------------------
// Two-state example

inline constexpr const char* kExampleDot = R"(digraph example {
  __start [shape=point];
  __start -> q1;
  q1 -> q2 [label="sigma1 / omega1"];
  q2 -> q1 [label="sigma1 / omega2"];
}
)";

inline constexpr const char* kExampleCpm = R"(# two-state example
[GAINS]
p | sigma1 | omega1
[LOSES]
p | sigma1 | omega2
[TAUS]
omega2set | * | omega2
)";

inline MealyMachine example_machine() { return parse_dot(kExampleDot); }
inline Cpm example_cpm() { return parse_cpm(kExampleCpm); }

// ---------------------------------------------------------------------------
// eMRTD

inline constexpr const char* kEmrtdCpm = R"(# eMRTD proposition map
[GAINS]
AUTH | BAC | 9000
DF, PROT | DF* | 9000
EF | EF* | 9000
CRIT | EF_DG2, EF_DG3 | 9000
PRIV | TA | 9000
[LOSES]
EF, AUTH, PRIV, CRIT | DF | 9000
AUTH, PRIV | EF*, *BIN, *REC | 6*
CRIT | EF* | 9000
[TAUS]
UACCESSOK, ACCESSOK | SEL_EF* | 9000
SSELEFOK, SACCESSOK, ACCESSOK | SSEL_EF* | 9000
UREADOK, READOK | RD_BIN | 9000
SREADOK, READOK | SRD_BIN | 9000
SSELEFOK | SSEL_EF* | 9000
INVKEYOK, WRONGKEYOK | WS* | 9000
INVKEYOK, OLDKEYOK | OS* | 9000
)";

inline Cpm emrtd_cpm() { return parse_cpm(kEmrtdCpm); }

namespace detail {

struct Row {
  const char* input;
  // (target, output) for states s0..s5
  std::vector<std::pair<int, const char*>> cells;
};

inline MealyMachine build(const std::vector<std::string>& states, const std::vector<Row>& rows) {
  MealyMachine m;
  for (const auto& s : states) m.add_state(s);
  for (const auto& r : rows) m.add_input(r.input);
  for (const auto& r : rows)
    for (std::size_t q = 0; q < r.cells.size(); ++q)
      m.add_transition(states[q], r.input, states[static_cast<std::size_t>(r.cells[q].first)], r.cells[q].second);
  m.set_initial(0);
  m.validate();
  return m;
}

}  // namespace detail

/// Six states: s0 initial, s1 LDS1 selected, s2 authenticated, s3 plain EF
/// selected, s4 authenticated with a secure EF selected, s5 secure EF
/// selected after losing authentication.
inline MealyMachine emrtd_machine() {
  using detail::Row;
  const std::vector<Row> rows = {
      {"SEL_EF_CA_CVCA", {{3, "9000"}, {1, "6982"}, {1, "6982"}, {3, "9000"}, {5, "6982"}, {5, "6982"}}},
      {"SEL_DF_LDS1", {{1, "9000"}, {1, "9000"}, {1, "9000"}, {1, "9000"}, {1, "9000"}, {1, "9000"}}},
      {"SEL_EF_DG1", {{0, "6A82"}, {1, "6982"}, {1, "6982"}, {3, "6A82"}, {5, "6982"}, {5, "6982"}}},
      {"SEL_EF_DG2", {{0, "6A82"}, {1, "6982"}, {1, "6982"}, {3, "6A82"}, {5, "6982"}, {5, "6982"}}},
      {"RD_BIN", {{0, "6986"}, {1, "6986"}, {1, "6986"}, {3, "9000"}, {5, "6982"}, {5, "6982"}}},
      {"BAC", {{0, "6985"}, {2, "9000"}, {2, "9000"}, {3, "6985"}, {4, "9000"}, {4, "9000"}}},
      {"SSEL_EF_DG1", {{0, "6988"}, {1, "6988"}, {4, "9000"}, {3, "6988"}, {4, "9000"}, {5, "6988"}}},
      {"SSEL_EF_DG2", {{0, "6988"}, {1, "6988"}, {1, "6982"}, {3, "6988"}, {5, "6982"}, {5, "6988"}}},
      // the s4 self-loop is the only secure read
      {"SRD_BIN", {{0, "6988"}, {1, "6988"}, {1, "6986"}, {3, "6988"}, {4, "9000"}, {5, "6988"}}},
      // keyed variants never succeed, so INVKEYOK is never raised
      {"WS_SSEL_EF_DG1", {{0, "6988"}, {1, "6988"}, {1, "6988"}, {3, "6988"}, {5, "6988"}, {5, "6988"}}},
      {"WS_SRD_BIN", {{0, "6988"}, {1, "6988"}, {1, "6988"}, {3, "6988"}, {5, "6988"}, {5, "6988"}}},
      {"OS_SSEL_EF_DG1", {{0, "6988"}, {1, "6988"}, {1, "6988"}, {3, "6988"}, {5, "6988"}, {5, "6988"}}},
      {"OS_SRD_BIN", {{0, "6988"}, {1, "6988"}, {1, "6988"}, {3, "6988"}, {5, "6988"}, {5, "6988"}}},
  };
  return detail::build({"s0", "s1", "s2", "s3", "s4", "s5"}, rows);
}

// ---------------------------------------------------------------------------
// UDS

inline constexpr const char* kUdsCpm = R"(# UDS proposition map (SA = SecurityAccess)
[GAINS]
AUTH | SAwKey | 67
EXT | Extended | 5003
PROG | Programming | 5002
PRIV | HLSAWithKey | 67
[LOSES]
EXT, PROG | Default | 5001
EXT | Programming | 5002
PROG | Extended | 5003
AUTH | SA, SAwKey, SAwWrongKey | 7f
AUTH | Session | 50
[TAUS]
INVKEYOK, WRONGKEYOK | SAwWrongKey | 67
PROT | CheckASWBit | 71
ACCESSOK | CheckASWBit | 71
UACCESSOK | CheckASWBit | 71
CRIT | RequestDownload | 74
UREADOK | Read* | 62
)";

inline Cpm uds_cpm() { return parse_cpm(kUdsCpm); }

/// Seven states: D0 default session, E extended session, Es seed requested,
/// A authenticated (extended), P programming session, Ps seed requested in
/// programming, PA authenticated (programming). With `patched`, the
/// authenticated states reject a wrong key with 7f instead of accepting it.
inline MealyMachine uds_machine(bool patched = false) {
  enum { D0, E, Es, A, P, Ps, PA };
  const char* wrong_key = patched ? "7f" : "67";
  using detail::Row;
  const std::vector<Row> rows = {
      // session changes drive EXT/PROG; authenticated states keep their
      // session on Default
      {"Default", {{D0, "5001"}, {D0, "5001"}, {D0, "5001"}, {A, "7f"}, {D0, "5001"}, {D0, "5001"}, {PA, "7f"}}},
      {"Programming", {{D0, "7f"}, {P, "5002"}, {P, "5002"}, {PA, "5002"}, {P, "5002"}, {P, "5002"}, {PA, "5002"}}},
      {"Extended", {{E, "5003"}, {E, "5003"}, {E, "5003"}, {A, "5003"}, {E, "5003"}, {E, "5003"}, {A, "5003"}}},
      // two-step SecurityAccess, seed then key
      {"SA", {{D0, "7f"}, {Es, "67"}, {Es, "67"}, {A, "67"}, {Ps, "67"}, {Ps, "67"}, {PA, "67"}}},
      {"SAwKey", {{D0, "7f"}, {E, "7f"}, {A, "67"}, {A, "67"}, {P, "7f"}, {PA, "67"}, {PA, "67"}}},
      // the planted flaw: a wrong key is acknowledged once authenticated
      {"SAwWrongKey", {{D0, "7f"}, {E, "7f"}, {E, "7f"}, {A, wrong_key}, {P, "7f"}, {P, "7f"}, {PA, wrong_key}}},
      {"TesterPresent", {{D0, "7e"}, {E, "7e"}, {Es, "7e"}, {A, "7e"}, {P, "7e"}, {Ps, "7e"}, {PA, "7e"}}},
      {"ReadDID_F100", {{D0, "62"}, {E, "62"}, {Es, "62"}, {A, "62"}, {P, "62"}, {Ps, "62"}, {PA, "62"}}},
      {"ReadMemoryByAddress", {{D0, "7f"}, {E, "63"}, {Es, "63"}, {A, "63"}, {P, "7f"}, {Ps, "7f"}, {PA, "7f"}}},
      // download only in authenticated programming session (P3 holds)
      {"RequestDownload", {{D0, "7f"}, {E, "7f"}, {Es, "7f"}, {A, "7f"}, {P, "7f"}, {Ps, "7f"}, {PA, "74"}}},
      // routine gated on authentication (P1 holds)
      {"CheckASWBit", {{D0, "7f"}, {E, "7f"}, {Es, "7f"}, {A, "71"}, {P, "7f"}, {Ps, "7f"}, {PA, "71"}}},
  };
  return detail::build({"D0", "E", "Es", "A", "P", "Ps", "PA"}, rows);
}

}  // namespace lct::fixtures
