// Copyright 2026 The hardneg Authors
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

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace hardneg {

/// Base of every error raised by the library. The CLI maps subclasses to
/// process exit codes (see exit_code_for in cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. Carries the 1-based line number when the input is
/// line-oriented.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what), line_(line) {}
  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// A generation payload parsed as JSON but violated the output schema.
class SchemaError : public Error {
 public:
  SchemaError(std::string key, const std::string& what, std::string last_raw = {})
      : Error(what), key_(std::move(key)), last_raw_(std::move(last_raw)) {}
  const std::string& key() const { return key_; }
  const std::string& last_raw() const { return last_raw_; }

 private:
  std::string key_;
  std::string last_raw_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class MixError : public Error {
 public:
  using Error::Error;
};

/// A formula evaluated outside the region where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace hardneg
