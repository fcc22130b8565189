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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardneg/data.hpp"
#include "hardneg/llmgen.hpp"
#include "hardneg/mixer.hpp"
#include "hardneg/retriever.hpp"
#include "hardneg/theory.hpp"
#include "hardneg/trainer.hpp"

namespace hardneg::cli {

inline constexpr std::string_view kVersion = "0.1.0";

/// Run configuration as one flat object of dotted keys. Every key has a typed
/// default; a config file or flag may only set known keys, and only with a
/// value of the default's type.
class RunConfig {
 public:
  RunConfig();

  static const nlohmann::json& defaults();

  /// Merges a JSON document of dotted keys. Throws ParameterError naming the
  /// offending key.
  void merge(const nlohmann::json& flat);
  void merge_file(const std::filesystem::path& path);
  /// Sets one key from its textual form (flags, --set key=value).
  void set(const std::string& key, const std::string& value);

  /// Range checks, naming the key that fails.
  void validate() const;

  const nlohmann::json& values() const { return values_; }
  std::string str(const std::string& key) const;
  double real(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;

  std::uint64_t seed() const { return count("seed"); }
  data::SynthParams synth() const;
  retriever::Bm25Params bm25() const;
  llmgen::GenerateConfig generate(const std::filesystem::path& workdir) const;
  mixer::MixConfig mix() const;
  trainer::TrainConfig train() const;
  std::vector<std::size_t> ks() const;
  theory::SimulationConfig simulation() const;

 private:
  const nlohmann::json& at(const std::string& key) const;
  nlohmann::json values_;
};

/// Builds the network chat client used when generate.mock is false.
using ClientFactory = std::function<std::unique_ptr<llmgen::ChatClient>(const RunConfig&)>;

/// Reads the API key from the environment and talks to generate.endpoint.
std::unique_ptr<llmgen::ChatClient> default_http_client(const RunConfig& cfg);

struct Environment {
  std::ostream* out = nullptr;  // usage and summaries; stdout when null
  std::ostream* err = nullptr;  // log lines and errors; stderr when null
  ClientFactory http_client = default_http_client;
};

/// Parses argv and runs one subcommand. Returns the process exit status:
/// 0 ok, 1 usage or config, 2 data integrity, 3 generation, 4 numeric.
int run(int argc, const char* const* argv, const Environment& env = {});
int run(const std::vector<std::string>& args, const Environment& env = {});

int exit_code_for(const std::exception& e);

// Files inside a work directory.
namespace files {
inline constexpr std::string_view kCorpus = "corpus.jsonl";
inline constexpr std::string_view kQueries = "queries.jsonl";
inline constexpr std::string_view kQrelsTrain = "qrels/train.tsv";
inline constexpr std::string_view kQrelsTest = "qrels/test.tsv";
inline constexpr std::string_view kSynth = "synth.json";
inline constexpr std::string_view kRetrieved = "retrieved.jsonl";
inline constexpr std::string_view kGenerations = "generations.jsonl";
inline constexpr std::string_view kSimpleGenerations = "generations-simple.jsonl";
inline constexpr std::string_view kInstances = "instances.jsonl";
inline constexpr std::string_view kMixManifest = "mix-manifest.json";
inline constexpr std::string_view kModel = "model.bin";
inline constexpr std::string_view kStats = "training-stats.json";
inline constexpr std::string_view kMetrics = "metrics.json";
inline constexpr std::string_view kAudit = "audit.json";
inline constexpr std::string_view kTheory = "theory-report.json";
inline constexpr std::string_view kSweep = "sweep.csv";
inline constexpr std::string_view kCache = "cache";
inline constexpr std::string_view kManifests = "manifests";
}  // namespace files

}  // namespace hardneg::cli
