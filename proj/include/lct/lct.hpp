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

#include <lct/actorgen.hpp>
#include <lct/automata.hpp>
#include <lct/buchi.hpp>
#include <lct/cpm.hpp>
#include <lct/dot.hpp>
#include <lct/error.hpp>
#include <lct/fixtures.hpp>
#include <lct/learning.hpp>
#include <lct/ltl.hpp>
#include <lct/properties.hpp>
#include <lct/statespace.hpp>
#include <lct/testkit.hpp>

namespace lct {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lct
