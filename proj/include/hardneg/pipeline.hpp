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
#include <memory>
#include <string>
#include <vector>

#include "hardneg/data.hpp"
#include "hardneg/eval.hpp"
#include "hardneg/llmgen.hpp"
#include "hardneg/mixer.hpp"
#include "hardneg/retriever.hpp"
#include "hardneg/trainer.hpp"

namespace hardneg::pipeline {

/// The desk-scale strategy comparison: a synthetic dataset, BM25 mining,
/// mock-generated negatives, one training run per mixing strategy, and
/// held-out NDCG@10.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  data::SynthParams synth{};
  std::size_t train_queries = 40;
  std::string pools_id = "scifact";
  double dedup_threshold = 0.9;
  mixer::MixConfig mix{};
  trainer::TrainConfig train{};
  std::vector<std::size_t> ks{10};
  llmgen::GenerateConfig generate{};  // seed is overwritten with the experiment seed
};

/// Everything shared by the per-strategy runs. Not copyable: the index
/// points into the corpus.
struct Prepared {
  data::SynthDataset dataset;
  data::QuerySet train_queries;
  data::QuerySet test_queries;
  data::Judgments train_judgments;
  data::Judgments test_judgments;
  std::vector<data::Pair> train_pairs;
  std::unique_ptr<retriever::Bm25Index> index;
  std::vector<llmgen::GenerationRecord> generations;         // full template, deduplicated
  std::vector<llmgen::GenerationRecord> simple_generations;  // simple template, for the audit
  llmgen::CostCounters cost;

  Prepared() = default;
  Prepared(const Prepared&) = delete;
  Prepared& operator=(const Prepared&) = delete;
};

std::unique_ptr<Prepared> prepare(const ExperimentConfig& cfg);

struct StrategyRun {
  mixer::Strategy strategy = mixer::Strategy::Hybrid;
  std::vector<data::TrainInstance> instances;
  trainer::TrainResult trained;
  eval::Metrics metrics;
};

StrategyRun run_strategy(const Prepared& prep, const ExperimentConfig& cfg, mixer::Strategy strategy);

/// Query/doc pairs for the four audit categories, drawn from the training
/// pairs: positives, BM25 negatives, simple-template and full-template
/// synthetic negatives.
std::vector<eval::AuditSample> audit_samples(const Prepared& prep, const ExperimentConfig& cfg);
std::vector<eval::AuditSample> audit_samples(const std::vector<data::Pair>& pairs, const retriever::Bm25Index& index,
                                             const data::Judgments& judgments,
                                             const std::vector<llmgen::GenerationRecord>& full,
                                             const std::vector<llmgen::GenerationRecord>& simple,
                                             std::size_t retrieved_per_pair, std::size_t skip_top = 0);

struct ExperimentResult {
  std::map<mixer::Strategy, StrategyRun> runs;
  eval::SimilarityAudit audit;  // under the PureRetrieved-trained encoder
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<mixer::Strategy>& strategies);

}  // namespace hardneg::pipeline
