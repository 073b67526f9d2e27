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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lct {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (DOT, CPM, LTL, property or config files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : Error(format(what, line, column)), message_(what), line_(line), column_(column) {}

  /// The description without the position prefix.
  const std::string& message() const noexcept { return message_; }

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    std::string msg = "line " + std::to_string(line);
    if (column != 0) msg += ", column " + std::to_string(column);
    return msg + ": " + what;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A structurally valid input that violates a model invariant.
class ModelError : public Error {
 public:
  using Error::Error;
};

class NondeterminismError : public ModelError {
 public:
  NondeterminismError(std::string state, std::string input)
      : ModelError("nondeterministic transition at (" + state + ", " + input + ")"),
        state_(std::move(state)), input_(std::move(input)) {}

  const std::string& state() const noexcept { return state_; }
  const std::string& input() const noexcept { return input_; }

 private:
  std::string state_;
  std::string input_;
};

class IncompleteMachineError : public ModelError {
 public:
  using ModelError::ModelError;
};

class AlphabetMismatchError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Exploration or product construction exceeded its configured node ceiling.
class CeilingExceeded : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace lct
