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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardneg/data.hpp"
#include "hardneg/retriever.hpp"
#include "hardneg/trainer.hpp"

namespace hardneg::eval {

using retriever::RankedList;
using Grades = std::map<std::string, int>;

/// Every corpus document scored by dot product with the query embedding,
/// ordered by the ranked-list tie rule.
RankedList rank_all(const trainer::EncoderParams& params, const data::Corpus& corpus, const data::Query& query);

/// Gain 2^rel - 1, discount log2(rank + 1), normalized by the ideal DCG of
/// the judged grades. 0 when nothing is relevant.
double ndcg_at_k(const RankedList& ranked, const Grades& relevant, std::size_t k);
double recall_at_k(const RankedList& ranked, const Grades& relevant, std::size_t k);
double mrr_at_k(const RankedList& ranked, const Grades& relevant, std::size_t k);

struct Metrics {
  std::vector<std::size_t> ks;
  std::map<std::string, std::map<std::string, double>> per_query;  // query id -> "ndcg@10" -> value
  std::map<std::string, double> macro;
  std::vector<std::string> excluded;  // queries with no relevant docs

  double at(std::string_view name) const;
};

std::string metric_name(std::string_view metric, std::size_t k);

/// Metrics for one ranked list: ndcg, recall and mrr at each k.
std::map<std::string, double> query_metrics(const RankedList& ranked, const Grades& relevant,
                                            const std::vector<std::size_t>& ks);

/// Scores every judged query in `queries` against the full corpus and
/// macro-averages. Queries without relevant docs are excluded with a warning.
Metrics evaluate(const trainer::EncoderParams& params, const data::Corpus& corpus, const data::QuerySet& queries,
                 const data::Judgments& judgments, const std::vector<std::size_t>& ks, bool parallel = true);

nlohmann::json to_json(const Metrics& m);

// ---- Similarity audit ----

enum class Category { Positive, RetrievedNeg, SimplePromptNeg, SynNeg };

std::string_view to_string(Category c);

struct AuditSample {
  std::string query;
  std::string doc;
  Category category = Category::Positive;
};

struct CategoryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct SimilarityAudit {
  std::map<Category, CategoryStats> categories;
};

/// Mean and standard deviation of the dot-product similarity per category.
/// Categories without samples are omitted with a warning.
SimilarityAudit similarity_audit(const trainer::EncoderParams& params, const std::vector<AuditSample>& samples);

nlohmann::json to_json(const SimilarityAudit& audit);

}  // namespace hardneg::eval
