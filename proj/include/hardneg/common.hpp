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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hardneg {

/// Lowercase and split on every non-alphanumeric byte. Shared by BM25 and the
/// hashed featurizer so both see the same terms.
std::vector<std::string> tokenize(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double value);

namespace log {

enum class Level { Debug, Info, Warn, Error };

using Field = std::pair<std::string, std::string>;
using Sink = std::function<void(Level, const std::string& line)>;

/// Emits one `level=... event=... key=value ...` line. Values containing
/// spaces or '=' are double-quoted.
void emit(Level level, std::string_view event, std::initializer_list<Field> fields = {});

inline void info(std::string_view event, std::initializer_list<Field> fields = {}) {
  emit(Level::Info, event, fields);
}
inline void warn(std::string_view event, std::initializer_list<Field> fields = {}) {
  emit(Level::Warn, event, fields);
}
inline void debug(std::string_view event, std::initializer_list<Field> fields = {}) {
  emit(Level::Debug, event, fields);
}

/// Replaces the stderr sink; returns the previous one. Tests use this to
/// capture warnings.
Sink set_sink(Sink sink);
void set_min_level(Level level);

/// Captures every line emitted while alive.
class Capture {
 public:
  Capture();
  ~Capture();
  Capture(const Capture&) = delete;
  Capture& operator=(const Capture&) = delete;

  const std::vector<std::string>& lines() const { return lines_; }
  bool contains(std::string_view needle) const;

 private:
  std::vector<std::string> lines_;
  Sink previous_;
};

}  // namespace log
}  // namespace hardneg
