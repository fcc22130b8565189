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

#include <memory>
#include <vector>

#include "hardneg/data.hpp"
#include "hardneg/llmgen.hpp"
#include "hardneg/mixer.hpp"
#include "hardneg/retriever.hpp"

namespace hardneg::testing {

/// A synthetic dataset with its first `num_pairs` training pairs, a BM25
/// index and mock-generated records for every pair.
struct MixFixture {
  data::SynthDataset ds;
  std::vector<data::Pair> pairs;
  std::unique_ptr<retriever::Bm25Index> index;
  std::vector<llmgen::GenerationRecord> records;
  std::unique_ptr<mixer::GenerationLookup> lookup;

  explicit MixFixture(std::size_t num_pairs, std::uint64_t seed = 0) : ds(data::synth_dataset(seed, {})) {
    pairs = data::make_pairs(ds.queries, ds.judgments, ds.corpus);
    pairs.resize(std::min(num_pairs, pairs.size()));
    index = std::make_unique<retriever::Bm25Index>(retriever::Bm25Index::build(ds.corpus));
    llmgen::MockChatClient client(seed, ds.vocabulary);
    llmgen::GenerateConfig cfg;
    cfg.cache_dir.reset();
    cfg.seed = seed;
    records = llmgen::generate_all(client, pairs, llmgen::pools_for("scifact"), cfg);
    lookup = std::make_unique<mixer::GenerationLookup>(records);
  }

  mixer::MixContext context() const { return {*index, ds.judgments, *lookup}; }
};

}  // namespace hardneg::testing
