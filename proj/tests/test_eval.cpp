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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hardneg/common.hpp"
#include "hardneg/error.hpp"
#include "hardneg/eval.hpp"
#include "hardneg/pipeline.hpp"
#include "hardneg/rng.hpp"

namespace hardneg::eval {
namespace {

RankedList list_of(std::vector<std::string> ids) {
  RankedList r;
  double s = static_cast<double>(ids.size());
  for (auto& id : ids) r.entries.push_back({std::move(id), s--});
  return r;
}

TEST(RankAll, SingleDoc) {
  data::Corpus c;
  c.add({"only", "", "some text"});
  const auto r = rank_all(trainer::init_params(64, 4, 0), c, {"q", "some"});
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].doc_id, "only");
}

TEST(RankAll, EqualScoresById) {
  data::Corpus c;
  for (const auto* id : {"d3", "d1", "d2"}) c.add({id, "", "identical"});
  const auto r = rank_all(trainer::init_params(64, 4, 0), c, {"q", "identical"});
  EXPECT_EQ(r.entries[0].doc_id, "d1");
  EXPECT_EQ(r.entries[1].doc_id, "d2");
  EXPECT_EQ(r.entries[2].doc_id, "d3");
}

TEST(RankAll, MatchesOracleSortOn20Docs) {
  Rng rng(3);
  const std::vector<std::string> words = {"heart", "lung", "cell", "gene", "virus", "drug", "dose", "trial"};
  data::Corpus c;
  for (int i = 0; i < 20; ++i) {
    std::string t;
    for (std::uint64_t j = 0, n = 2 + rng.below(6); j < n; ++j) t += words[rng.below(words.size())] + " ";
    c.add({"d" + std::to_string(100 + i), "", t});
  }
  const auto p = trainer::init_params(256, 8, 4);
  const data::Query q{"q", "gene drug trial"};
  // Independent scores: dense W^T x products.
  auto embed = [&](const std::string& text) {
    const auto x = trainer::featurize(text, p.vocab_dim);
    std::vector<double> h(p.embed_dim, 0.0);
    for (std::size_t i = 0; i < x.nnz(); ++i) {
      for (std::size_t k = 0; k < p.embed_dim; ++k) h[k] += p.at(x.index[i], k) * x.value[i];
    }
    return h;
  };
  const auto hq = embed(q.text);
  std::vector<std::pair<double, std::string>> oracle;
  for (const auto& d : c) {
    const auto hd = embed(d.full_text());
    oracle.push_back({std::inner_product(hq.begin(), hq.end(), hd.begin(), 0.0), d.id});
  }
  std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const auto r = rank_all(p, c, q);
  ASSERT_EQ(r.entries.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(r.entries[i].doc_id, oracle[i].second);
    EXPECT_NEAR(r.entries[i].score, oracle[i].first, 1e-12);
  }
}

TEST(RankAll, EmptyCorpusRejected) {
  EXPECT_THROW(rank_all(trainer::init_params(8, 2, 0), data::Corpus{}, {"q", "x"}), ParameterError);
}

TEST(Ndcg, Cases) {
  EXPECT_DOUBLE_EQ(ndcg_at_k(list_of({"a", "b", "c"}), {{"a", 1}}, 10), 1.0);
  EXPECT_NEAR(ndcg_at_k(list_of({"x", "y", "a", "z"}), {{"a", 1}}, 10), 0.5, 1e-15);
  EXPECT_EQ(ndcg_at_k(list_of({"x", "y", "a"}), {{"a", 1}}, 2), 0.0);
  EXPECT_EQ(ndcg_at_k(list_of({"x"}), {}, 10), 0.0);
  EXPECT_THROW(ndcg_at_k(list_of({"x"}), {{"x", 1}}, 0), ParameterError);
}

TEST(Ndcg, GradedMatchesHandFormula) {
  // ranks: b (2) at 1, x at 2, a (1) at 3. Ideal: 2 then 1.
  const double dcg = 3.0 / std::log2(2.0) + 1.0 / std::log2(4.0);
  const double idcg = 3.0 / std::log2(2.0) + 1.0 / std::log2(3.0);
  EXPECT_NEAR(ndcg_at_k(list_of({"b", "x", "a"}), {{"a", 1}, {"b", 2}}, 10), dcg / idcg, 1e-15);
}

TEST(MrrRecall, Cases) {
  EXPECT_DOUBLE_EQ(mrr_at_k(list_of({"x", "y", "z", "a"}), {{"a", 1}}, 10), 0.25);
  EXPECT_DOUBLE_EQ(recall_at_k(list_of({"a", "x", "b", "y", "c", "d"}), {{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}}, 4),
                   0.5);
  EXPECT_EQ(mrr_at_k(list_of({"x", "y", "a"}), {{"a", 1}}, 2), 0.0);
}

TEST(Evaluate, PerfectOnOneDoc) {
  data::Corpus c;
  c.add({"d1", "", "alpha beta"});
  data::QuerySet qs;
  qs.add({"q1", "alpha beta"});
  data::Judgments j;
  j.add("q1", "d1", 1);
  const auto m = evaluate(trainer::init_params(64, 4, 1), c, qs, j, {1, 10});
  for (const auto& [name, v] : m.macro) EXPECT_DOUBLE_EQ(v, 1.0) << name;
  EXPECT_DOUBLE_EQ(m.at("ndcg@10"), 1.0);
  EXPECT_THROW(m.at("ndcg@3"), LookupError);
}

TEST(Evaluate, MacroIsMeanOfPerQueryAndParallelMatchesSerial) {
  const auto ds = data::synth_dataset(2, {});
  const auto p = trainer::init_params(4096, 16, 2);
  const auto m = evaluate(p, ds.corpus, ds.queries, ds.judgments, {5, 10});
  for (const auto& [name, v] : m.macro) {
    double sum = 0;
    for (const auto& [q, per] : m.per_query) sum += per.at(name);
    EXPECT_NEAR(v, sum / static_cast<double>(m.per_query.size()), 1e-15) << name;
  }
  const auto s = evaluate(p, ds.corpus, ds.queries, ds.judgments, {5, 10}, false);
  EXPECT_EQ(s.per_query, m.per_query);
  EXPECT_EQ(s.macro, m.macro);
}

TEST(Evaluate, UnjudgedQueryExcludedWithWarning) {
  data::Corpus c;
  c.add({"d1", "", "alpha"});
  data::QuerySet qs;
  qs.add({"q1", "alpha"});
  qs.add({"q2", "beta"});
  data::Judgments j;
  j.add("q1", "d1", 1);
  hardneg::log::Capture capture;
  const auto m = evaluate(trainer::init_params(64, 4, 1), c, qs, j, {10});
  EXPECT_EQ(m.excluded, std::vector<std::string>{"q2"});
  EXPECT_EQ(m.per_query.size(), 1u);
  EXPECT_TRUE(capture.contains("query_without_relevant_docs"));
}

TEST(Evaluate, TrainedBeatsInitOnDeskSet) {
  pipeline::ExperimentConfig cfg;
  const auto prep = pipeline::prepare(cfg);
  const auto run = pipeline::run_strategy(*prep, cfg, mixer::Strategy::Hybrid);
  const auto init = trainer::init_params(cfg.train.vocab_dim, cfg.train.embed_dim, cfg.seed);
  const auto base = evaluate(init, prep->dataset.corpus, prep->test_queries, prep->test_judgments, {10});
  EXPECT_GT(run.metrics.at("ndcg@10"), base.at("ndcg@10"));
}

TEST(Audit, PositiveSelfSimilarityIsSquaredNorm) {
  const auto p = trainer::init_params(256, 8, 3);
  std::vector<AuditSample> samples;
  double sum = 0;
  for (const auto* t : {"alpha beta", "gamma", "delta epsilon zeta"}) {
    samples.push_back({t, t, Category::Positive});
    const auto h = trainer::encode(p, t);
    sum += std::inner_product(h.begin(), h.end(), h.begin(), 0.0);
  }
  const auto a = similarity_audit(p, samples);
  EXPECT_NEAR(a.categories.at(Category::Positive).mean, sum / 3, 1e-12);
  EXPECT_EQ(a.categories.at(Category::Positive).count, 3u);
}

TEST(Audit, IdenticalSamplesIdenticalStats) {
  const auto p = trainer::init_params(256, 8, 3);
  std::vector<AuditSample> samples;
  for (const auto* d : {"alpha", "beta gamma", "alpha delta"}) {
    samples.push_back({"alpha query", d, Category::RetrievedNeg});
    samples.push_back({"alpha query", d, Category::SynNeg});
  }
  hardneg::log::Capture capture;
  const auto a = similarity_audit(p, samples);
  const auto& r = a.categories.at(Category::RetrievedNeg);
  const auto& s = a.categories.at(Category::SynNeg);
  EXPECT_EQ(r.mean, s.mean);
  EXPECT_EQ(r.stddev, s.stddev);
  EXPECT_EQ(a.categories.count(Category::Positive), 0u);
  EXPECT_TRUE(capture.contains("audit_category_empty"));
}

TEST(Audit, SynNegAboveRetrievedOnDeskSet) {
  pipeline::ExperimentConfig cfg;
  const auto result = pipeline::run_experiment(cfg, {mixer::Strategy::PureRetrieved});
  EXPECT_GT(result.audit.categories.at(Category::SynNeg).mean, result.audit.categories.at(Category::RetrievedNeg).mean);
}

}  // namespace
}  // namespace hardneg::eval
