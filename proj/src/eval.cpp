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

#include "hardneg/eval.hpp"

#include <algorithm>
#include <cmath>

#include "hardneg/common.hpp"
#include "hardneg/error.hpp"
#include "hardneg/kernels.hpp"

namespace hardneg::eval {

namespace {

void check_k(std::size_t k) {
  if (k == 0) throw ParameterError("metric cutoff k must be >= 1");
}

int grade_of(const Grades& relevant, const std::string& doc_id) {
  auto it = relevant.find(doc_id);
  return it == relevant.end() ? 0 : it->second;
}

std::vector<double> embed_corpus(const trainer::EncoderParams& params, const data::Corpus& corpus, bool parallel) {
  std::vector<kernels::SparseVector> features;
  features.reserve(corpus.size());
  for (const auto& doc : corpus) features.push_back(trainer::featurize(doc.full_text(), params.vocab_dim));
  std::vector<double> out(corpus.size() * params.embed_dim);
  if (parallel) {
    kernels::parallel::project_batch(params.view(), features, out);
  } else {
    kernels::serial::project_batch(params.view(), features, out);
  }
  return out;
}

RankedList rank_embedded(const trainer::EncoderParams& params, const data::Corpus& corpus,
                         std::span<const double> doc_embeddings, const data::Query& query) {
  const auto h_q = trainer::encode(params, query.text);
  std::vector<double> scores(corpus.size());
  kernels::serial::dot_rows(h_q, {doc_embeddings, corpus.size(), params.embed_dim}, scores);
  RankedList out{query.id, {}};
  out.entries.reserve(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) out.entries.push_back({corpus[d].id, scores[d]});
  std::sort(out.entries.begin(), out.entries.end(), retriever::ranks_before);
  return out;
}

}  // namespace

RankedList rank_all(const trainer::EncoderParams& params, const data::Corpus& corpus, const data::Query& query) {
  if (corpus.empty()) throw ParameterError("rank_all: empty corpus");
  const auto emb = embed_corpus(params, corpus, false);
  return rank_embedded(params, corpus, emb, query);
}

double ndcg_at_k(const RankedList& ranked, const Grades& relevant, std::size_t k) {
  check_k(k);
  if (relevant.empty()) return 0.0;
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranked.entries.size()); ++i) {
    const int g = grade_of(relevant, ranked.entries[i].doc_id);
    if (g > 0) dcg += (std::exp2(g) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<int> ideal;
  for (const auto& [id, g] : relevant) ideal.push_back(g);
  std::sort(ideal.rbegin(), ideal.rend());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    idcg += (std::exp2(ideal[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double recall_at_k(const RankedList& ranked, const Grades& relevant, std::size_t k) {
  check_k(k);
  if (relevant.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.entries.size()); ++i) {
    if (grade_of(relevant, ranked.entries[i].doc_id) > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double mrr_at_k(const RankedList& ranked, const Grades& relevant, std::size_t k) {
  check_k(k);
  for (std::size_t i = 0; i < std::min(k, ranked.entries.size()); ++i) {
    if (grade_of(relevant, ranked.entries[i].doc_id) > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

std::string metric_name(std::string_view metric, std::size_t k) {
  return std::string(metric) + "@" + std::to_string(k);
}

double Metrics::at(std::string_view name) const {
  auto it = macro.find(std::string(name));
  if (it == macro.end()) throw LookupError("no metric '" + std::string(name) + "'");
  return it->second;
}

std::map<std::string, double> query_metrics(const RankedList& ranked, const Grades& relevant,
                                            const std::vector<std::size_t>& ks) {
  std::map<std::string, double> out;
  for (const auto k : ks) {
    out[metric_name("ndcg", k)] = ndcg_at_k(ranked, relevant, k);
    out[metric_name("recall", k)] = recall_at_k(ranked, relevant, k);
    out[metric_name("mrr", k)] = mrr_at_k(ranked, relevant, k);
  }
  return out;
}

Metrics evaluate(const trainer::EncoderParams& params, const data::Corpus& corpus, const data::QuerySet& queries,
                 const data::Judgments& judgments, const std::vector<std::size_t>& ks, bool parallel) {
  if (corpus.empty()) throw ParameterError("evaluate: empty corpus");
  if (ks.empty()) throw ParameterError("evaluate: no cutoffs given");
  for (const auto k : ks) check_k(k);
  Metrics m;
  m.ks = ks;
  std::vector<const data::Query*> scored;
  for (const auto& q : queries) {
    if (judgments.relevant(q.id).empty()) {
      m.excluded.push_back(q.id);
      log::warn("query_without_relevant_docs", {{"query", q.id}});
    } else {
      scored.push_back(&q);
    }
  }
  const auto emb = embed_corpus(params, corpus, parallel);
  std::vector<std::map<std::string, double>> results(scored.size());
  const auto n = static_cast<std::ptrdiff_t>(scored.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& q = *scored[static_cast<std::size_t>(i)];
    results[static_cast<std::size_t>(i)] = query_metrics(rank_embedded(params, corpus, emb, q), judgments.relevant(q.id), ks);
  }
  for (std::size_t i = 0; i < scored.size(); ++i) {
    for (const auto& [name, v] : results[i]) m.macro[name] += v;
    m.per_query[scored[i]->id] = std::move(results[i]);
  }
  for (auto& [name, v] : m.macro) v /= static_cast<double>(scored.size());
  return m;
}

nlohmann::json to_json(const Metrics& m) {
  return {{"ks", m.ks}, {"macro", m.macro}, {"per_query", m.per_query}, {"excluded_queries", m.excluded},
          {"num_queries", m.per_query.size()}};
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Positive: return "positive";
    case Category::RetrievedNeg: return "retrieved_neg";
    case Category::SimplePromptNeg: return "simple_prompt_neg";
    case Category::SynNeg: return "syn_neg";
  }
  return "positive";
}

SimilarityAudit similarity_audit(const trainer::EncoderParams& params, const std::vector<AuditSample>& samples) {
  std::map<Category, std::vector<double>> sims;
  for (const auto& s : samples) {
    sims[s.category].push_back(trainer::similarity(trainer::encode(params, s.query), trainer::encode(params, s.doc)));
  }
  SimilarityAudit out;
  for (const auto c : {Category::Positive, Category::RetrievedNeg, Category::SimplePromptNeg, Category::SynNeg}) {
    auto it = sims.find(c);
    if (it == sims.end() || it->second.empty()) {
      log::warn("audit_category_empty", {{"category", std::string(to_string(c))}});
      continue;
    }
    const auto& v = it->second;
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    out.categories[c] = {v.size(), mean, std::sqrt(ss / static_cast<double>(v.size()))};
  }
  return out;
}

nlohmann::json to_json(const SimilarityAudit& audit) {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [c, s] : audit.categories) {
    cats[std::string(to_string(c))] = {{"count", s.count}, {"mean", s.mean}, {"std", s.stddev}};
  }
  return {{"similarity", "dot product of trained encoder embeddings"}, {"categories", cats}};
}

}  // namespace hardneg::eval
