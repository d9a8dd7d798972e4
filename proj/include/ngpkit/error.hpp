// Copyright 2026 The ngpkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ngpkit {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs that violate a documented data invariant (bad ids, duplicate
/// names, inconsistent sizes).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A formula mentions a variable the assignment or prediction does not cover.
class MissingAssignmentError : public Error {
 public:
  using Error::Error;
};

/// A request exceeds a hard size limit (enumeration caps and the like).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation precondition (empty IC list, k out of range).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Semantic-loss gradient requested where the formula has probability 0.
class SaturatedGradientError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 means the whole file.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ngpkit
