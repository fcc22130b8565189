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
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardneg/data.hpp"
#include "hardneg/llmgen.hpp"
#include "hardneg/retriever.hpp"

namespace hardneg::mixer {

enum class Strategy { Hybrid, Direct, PureSynthetic, PureRetrieved, Random };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct MixConfig {
  Strategy strategy = Strategy::Hybrid;
  std::size_t negatives_per_instance = 4;  // N
  double ratio = 0.7;                      // R: synthetic negatives per positive
  std::uint64_t seed = 0;
  std::size_t skip_top = 0;                // passed to the BM25 miner

  void validate() const;
};

/// Generation records keyed by (query id, positive id).
class GenerationLookup {
 public:
  GenerationLookup() = default;
  explicit GenerationLookup(const std::vector<llmgen::GenerationRecord>& records);
  const llmgen::GenerationRecord* find(const std::string& query_id, const std::string& positive_id) const;
  std::size_t size() const { return records_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, llmgen::GenerationRecord> records_;
};

struct MixContext {
  const retriever::Bm25Index& index;
  const data::Judgments& judgments;
  const GenerationLookup& generations;
};

/// Indices (ascending) of the round(R * n) pairs chosen uniformly by seed to
/// carry synthetic negatives.
std::vector<std::size_t> select_for_synthesis(std::size_t n, double ratio, std::uint64_t seed);

/// Instance-level mixing: a selected pair gets its record's first surviving
/// negative plus N-1 BM25 negatives; every other pair gets N BM25 negatives.
std::vector<data::TrainInstance> mix_hybrid(const std::vector<data::Pair>& pairs, const MixContext& ctx,
                                            const MixConfig& cfg);

/// Dataset-level mixing: every pair with N BM25 negatives, followed by one
/// extra all-synthetic instance per selected pair (topped up with flagged
/// BM25 padding when the record has fewer than N survivors).
std::vector<data::TrainInstance> mix_direct(const std::vector<data::Pair>& pairs, const MixContext& ctx,
                                            const MixConfig& cfg);

/// Single-source negatives. Synthetic instances cycle the record's survivors
/// (flagged as padding) when it has fewer than N.
std::vector<data::TrainInstance> mix_pure(const std::vector<data::Pair>& pairs, data::Provenance source,
                                          const MixContext& ctx, const MixConfig& cfg);

/// Dispatches on cfg.strategy.
std::vector<data::TrainInstance> mix(const std::vector<data::Pair>& pairs, const MixContext& ctx,
                                     const MixConfig& cfg);

/// Strategy, R, N, seed and provenance counts for a mixed set.
nlohmann::json mix_manifest(const std::vector<data::Pair>& pairs, const std::vector<data::TrainInstance>& instances,
                            const MixConfig& cfg);

}  // namespace hardneg::mixer
