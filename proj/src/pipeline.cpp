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

#include "hardneg/pipeline.hpp"

#include <algorithm>

#include "hardneg/common.hpp"
#include "hardneg/prompt.hpp"

namespace hardneg::pipeline {

namespace {

data::QuerySet restrict(const data::QuerySet& all, const std::set<std::string>& ids) {
  data::QuerySet out;
  for (const auto& q : all) {
    if (ids.count(q.id)) out.add(q);
  }
  return out;
}

}  // namespace

std::unique_ptr<Prepared> prepare(const ExperimentConfig& cfg) {
  auto prep = std::make_unique<Prepared>();
  prep->dataset = data::synth_dataset(cfg.seed, cfg.synth);
  const auto [train_ids, test_ids] = data::split_queries(prep->dataset.judgments, cfg.train_queries, cfg.seed);
  prep->train_queries = restrict(prep->dataset.queries, train_ids);
  prep->test_queries = restrict(prep->dataset.queries, test_ids);
  prep->train_judgments = prep->dataset.judgments.subset(train_ids);
  prep->test_judgments = prep->dataset.judgments.subset(test_ids);
  prep->train_pairs = data::make_pairs(prep->train_queries, prep->train_judgments, prep->dataset.corpus);
  prep->index = std::make_unique<retriever::Bm25Index>(retriever::Bm25Index::build(prep->dataset.corpus));

  const auto pools = llmgen::pools_for(cfg.pools_id);
  llmgen::MockChatClient client(cfg.seed, prep->dataset.vocabulary);
  llmgen::CostMeter meter;
  auto gen = cfg.generate;
  gen.seed = cfg.seed;
  gen.template_id = llmgen::TemplateId::Full;
  prep->generations = llmgen::dedup(llmgen::generate_all(client, prep->train_pairs, pools, gen, &meter),
                                    cfg.dedup_threshold);
  gen.template_id = llmgen::TemplateId::Simple;
  prep->simple_generations = llmgen::dedup(llmgen::generate_all(client, prep->train_pairs, pools, gen, &meter),
                                           cfg.dedup_threshold);
  prep->cost = meter.snapshot();
  return prep;
}

StrategyRun run_strategy(const Prepared& prep, const ExperimentConfig& cfg, mixer::Strategy strategy) {
  const mixer::GenerationLookup lookup(prep.generations);
  const mixer::MixContext ctx{*prep.index, prep.dataset.judgments, lookup};
  auto mix_cfg = cfg.mix;
  mix_cfg.strategy = strategy;
  mix_cfg.seed = cfg.seed;
  auto train_cfg = cfg.train;
  train_cfg.seed = cfg.seed;

  StrategyRun run;
  run.strategy = strategy;
  run.instances = mixer::mix(prep.train_pairs, ctx, mix_cfg);
  run.trained = trainer::train(run.instances, train_cfg);
  run.metrics = eval::evaluate(run.trained.params, prep.dataset.corpus, prep.test_queries, prep.test_judgments,
                               cfg.ks, train_cfg.parallel);
  log::info("strategy_done", {{"strategy", std::string(mixer::to_string(strategy))},
                              {"seed", std::to_string(cfg.seed)},
                              {"ndcg@10", format_double(run.metrics.macro.count("ndcg@10") ? run.metrics.at("ndcg@10") : 0.0)},
                              {"grad_variance", format_double(run.trained.stats.grad_variance)}});
  return run;
}

std::vector<eval::AuditSample> audit_samples(const std::vector<data::Pair>& pairs, const retriever::Bm25Index& index,
                                             const data::Judgments& judgments,
                                             const std::vector<llmgen::GenerationRecord>& full,
                                             const std::vector<llmgen::GenerationRecord>& simple,
                                             std::size_t retrieved_per_pair, std::size_t skip_top) {
  std::vector<eval::AuditSample> out;
  const mixer::GenerationLookup full_lookup(full);
  const mixer::GenerationLookup simple_lookup(simple);
  for (const auto& [q, pos] : pairs) {
    out.push_back({q.text, pos.full_text(), eval::Category::Positive});
    for (const auto& n : retriever::mine_negatives(index, q, judgments, retrieved_per_pair, skip_top)) {
      out.push_back({q.text, n.text, eval::Category::RetrievedNeg});
    }
    if (const auto* r = simple_lookup.find(q.id, pos.id)) {
      for (const auto& n : r->negatives) out.push_back({q.text, n, eval::Category::SimplePromptNeg});
    }
    if (const auto* r = full_lookup.find(q.id, pos.id)) {
      for (const auto& n : r->negatives) out.push_back({q.text, n, eval::Category::SynNeg});
    }
  }
  return out;
}

std::vector<eval::AuditSample> audit_samples(const Prepared& prep, const ExperimentConfig& cfg) {
  return audit_samples(prep.train_pairs, *prep.index, prep.dataset.judgments, prep.generations,
                       prep.simple_generations, cfg.mix.negatives_per_instance, cfg.mix.skip_top);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<mixer::Strategy>& strategies) {
  const auto prep = prepare(cfg);
  ExperimentResult result;
  for (const auto s : strategies) result.runs.emplace(s, run_strategy(*prep, cfg, s));
  auto it = result.runs.find(mixer::Strategy::PureRetrieved);
  if (it != result.runs.end()) {
    result.audit = eval::similarity_audit(it->second.trained.params, audit_samples(*prep, cfg));
  }
  return result;
}

}  // namespace hardneg::pipeline
