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
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hardneg/data.hpp"

namespace hardneg::retriever {

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

/// Ordered by score descending, ties by doc id ascending.
struct RankedList {
  std::string query_id;
  std::vector<ScoredDoc> entries;
};

/// Strict weak order implementing the ranked-list tie rule.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::size_t doc = 0;  // dense doc number, ascending within a postings list
  std::size_t tf = 0;

  bool operator==(const Posting&) const = default;
};

/// Okapi BM25 over an in-memory inverted index.
///
///   score(q, d) = sum over query terms t present in d of
///       idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(d) / avgdl))
///   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
///
/// Query terms are scored once per occurrence in the query text.
class Bm25Index {
 public:
  static Bm25Index build(const data::Corpus& corpus, Bm25Params params = {});

  double score(const std::vector<std::string>& query_terms, std::string_view doc_id) const;
  /// Top-k positive-score docs under the ranked-list tie rule.
  RankedList search(std::string_view query_text, std::size_t k, std::string_view query_id = {}) const;

  std::size_t doc_count() const { return doc_ids_.size(); }
  double avg_doc_length() const { return avgdl_; }
  const std::vector<std::size_t>& doc_lengths() const { return doc_lengths_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<Posting>& postings(std::string_view term) const;
  double idf(std::string_view term) const;
  const Bm25Params& params() const { return params_; }
  const data::Corpus& corpus() const { return *corpus_; }

  bool same_contents(const Bm25Index& other) const;

 private:
  double term_weight(std::size_t tf, std::size_t doc) const;
  std::vector<double> score_all(const std::vector<std::string>& query_terms) const;

  const data::Corpus* corpus_ = nullptr;
  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, std::size_t> doc_numbers_;
  std::vector<std::size_t> doc_lengths_;
  double avgdl_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

inline constexpr std::string_view kBm25Origin = "bm25";

/// Top-ranked documents with no judgment entry for the query, after dropping
/// the first `skip_top` ranks. Returns fewer than n only when the candidate
/// pool runs out.
std::vector<data::NegativeSample> mine_negatives(const Bm25Index& index, const data::Query& query,
                                                 const data::Judgments& judgments, std::size_t n,
                                                 std::size_t skip_top = 0);

}  // namespace hardneg::retriever
