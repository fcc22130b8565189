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

#include "hardneg/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hardneg/common.hpp"

namespace hardneg::retriever {

Bm25Index Bm25Index::build(const data::Corpus& corpus, Bm25Params params) {
  if (corpus.empty()) throw ParameterError("build_index: empty corpus");
  if (!(params.k1 >= 0.0) || !(params.b >= 0.0 && params.b <= 1.0)) {
    throw ParameterError("build_index: need k1 >= 0 and b in [0, 1]");
  }
  Bm25Index index;
  index.corpus_ = &corpus;
  index.params_ = params;
  index.doc_ids_.reserve(corpus.size());
  index.doc_lengths_.reserve(corpus.size());
  std::size_t total = 0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& doc = corpus[d];
    index.doc_ids_.push_back(doc.id);
    index.doc_numbers_.emplace(doc.id, d);
    const auto terms = tokenize(doc.full_text());
    index.doc_lengths_.push_back(terms.size());
    total += terms.size();
    // std::map keeps the build independent of hash iteration order.
    std::map<std::string, std::size_t> tf;
    for (const auto& t : terms) ++tf[t];
    for (const auto& [term, count] : tf) index.postings_[term].push_back(Posting{d, count});
  }
  index.avgdl_ = static_cast<double>(total) / static_cast<double>(corpus.size());
  return index;
}

const std::vector<Posting>& Bm25Index::postings(std::string_view term) const {
  static const std::vector<Posting> kEmpty;
  auto it = postings_.find(std::string(term));
  return it == postings_.end() ? kEmpty : it->second;
}

double Bm25Index::idf(std::string_view term) const {
  const double n = static_cast<double>(doc_ids_.size());
  const double df = static_cast<double>(postings(term).size());
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double Bm25Index::term_weight(std::size_t tf, std::size_t doc) const {
  const double f = static_cast<double>(tf);
  const double len = static_cast<double>(doc_lengths_[doc]);
  const double denom = avgdl_ > 0.0 ? f + params_.k1 * (1.0 - params_.b + params_.b * len / avgdl_) : f + params_.k1;
  return f * (params_.k1 + 1.0) / denom;
}

double Bm25Index::score(const std::vector<std::string>& query_terms, std::string_view doc_id) const {
  auto it = doc_numbers_.find(std::string(doc_id));
  if (it == doc_numbers_.end()) throw LookupError("bm25_score: unknown doc id '" + std::string(doc_id) + "'");
  const std::size_t doc = it->second;
  double total = 0.0;
  for (const auto& term : query_terms) {
    const auto& plist = postings(term);
    auto p = std::lower_bound(plist.begin(), plist.end(), doc,
                              [](const Posting& a, std::size_t d) { return a.doc < d; });
    if (p == plist.end() || p->doc != doc) continue;
    total += idf(term) * term_weight(p->tf, doc);
  }
  return total;
}

std::vector<double> Bm25Index::score_all(const std::vector<std::string>& query_terms) const {
  std::vector<double> scores(doc_ids_.size(), 0.0);
  for (const auto& term : query_terms) {
    const auto& plist = postings(term);
    if (plist.empty()) continue;
    const double w = idf(term);
    for (const auto& p : plist) scores[p.doc] += w * term_weight(p.tf, p.doc);
  }
  return scores;
}

RankedList Bm25Index::search(std::string_view query_text, std::size_t k, std::string_view query_id) const {
  RankedList out{std::string(query_id), {}};
  if (k == 0) throw ParameterError("search: k must be >= 1");
  const auto scores = score_all(tokenize(query_text));
  std::vector<ScoredDoc> hits;
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (scores[d] > 0.0) hits.push_back(ScoredDoc{doc_ids_[d], scores[d]});
  }
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), ranks_before);
  hits.resize(n);
  out.entries = std::move(hits);
  return out;
}

bool Bm25Index::same_contents(const Bm25Index& other) const {
  return params_.k1 == other.params_.k1 && params_.b == other.params_.b && doc_ids_ == other.doc_ids_ &&
         doc_lengths_ == other.doc_lengths_ && avgdl_ == other.avgdl_ && postings_ == other.postings_;
}

std::vector<data::NegativeSample> mine_negatives(const Bm25Index& index, const data::Query& query,
                                                 const data::Judgments& judgments, std::size_t n,
                                                 std::size_t skip_top) {
  if (n == 0) throw ParameterError("mine_negatives: n must be >= 1");
  const auto ranked = index.search(query.text, index.doc_count(), query.id);
  std::vector<data::NegativeSample> out;
  for (std::size_t r = skip_top; r < ranked.entries.size() && out.size() < n; ++r) {
    const auto& hit = ranked.entries[r];
    if (judgments.is_judged(query.id, hit.doc_id)) continue;
    const auto& doc = index.corpus().at(hit.doc_id);
    out.push_back(data::NegativeSample{doc.full_text(), doc.id, data::Provenance::Retrieved,
                                       std::string(kBm25Origin), false});
  }
  return out;
}

}  // namespace hardneg::retriever
