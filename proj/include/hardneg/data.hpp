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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hardneg/error.hpp"

namespace hardneg::data {

struct Document {
  std::string id;
  std::string title;
  std::string text;

  /// Title and text joined by one space; just the text when the title is empty.
  std::string full_text() const { return title.empty() ? text : title + " " + text; }

  bool operator==(const Document&) const = default;
};

struct Query {
  std::string id;
  std::string text;

  bool operator==(const Query&) const = default;
};

/// Id-indexed collection that keeps insertion order. Duplicate ids are an
/// integrity error.
template <typename T>
class Collection {
 public:
  void add(T item) {
    if (item.id.empty()) throw IntegrityError("empty id");
    auto [it, inserted] = index_.emplace(item.id, items_.size());
    if (!inserted) throw IntegrityError("duplicate id '" + item.id + "'");
    items_.push_back(std::move(item));
  }

  const T* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &items_[it->second];
  }

  const T& at(std::string_view id) const {
    if (const T* item = find(id)) return *item;
    throw LookupError("unknown id '" + std::string(id) + "'");
  }

  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const T& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<T>& items() const { return items_; }

  bool operator==(const Collection& other) const { return items_ == other.items_; }

 private:
  std::vector<T> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

using Corpus = Collection<Document>;
using QuerySet = Collection<Query>;

/// Relevance judgments. Rows graded 0 are kept apart: they never count as
/// relevant, but they are still judged and so never become negatives.
class Judgments {
 public:
  void add(const std::string& query_id, const std::string& doc_id, int grade);

  /// Graded >= 1 docs for a query; empty map when none.
  const std::map<std::string, int>& relevant(std::string_view query_id) const;
  bool is_relevant(std::string_view query_id, std::string_view doc_id) const;
  /// True for any doc with a judgment row, including grade 0.
  bool is_judged(std::string_view query_id, std::string_view doc_id) const;

  /// Query ids with at least one relevant doc, ascending.
  std::vector<std::string> query_ids() const;
  std::size_t num_relevant_rows() const;
  bool empty() const { return relevant_.empty() && zero_graded_.empty(); }

  const std::map<std::string, std::map<std::string, int>>& relevant_map() const { return relevant_; }
  const std::map<std::string, std::set<std::string>>& zero_graded() const { return zero_graded_; }

  /// Restrict to the given query ids.
  Judgments subset(const std::set<std::string>& query_ids) const;

  bool operator==(const Judgments&) const = default;

 private:
  std::map<std::string, std::map<std::string, int>> relevant_;
  std::map<std::string, std::set<std::string>> zero_graded_;
};

enum class Provenance { Synthetic, Retrieved, Random };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct NegativeSample {
  std::string text;
  std::optional<std::string> doc_id;  // absent for synthetic negatives
  Provenance provenance = Provenance::Retrieved;
  std::string origin;    // retriever name or generation-record id
  bool padding = false;  // filled in to reach N, not part of the strategy proper

  bool operator==(const NegativeSample&) const = default;
};

struct TrainInstance {
  Query query;
  Document positive;
  std::vector<NegativeSample> negatives;

  bool operator==(const TrainInstance&) const = default;
};

using Pair = std::pair<Query, Document>;

// Loading. Every loader throws ParseError (with line number) on malformed
// records and IntegrityError on duplicate ids. Blank lines are skipped.
Corpus load_corpus(const std::filesystem::path& path);
QuerySet load_queries(const std::filesystem::path& path);
Judgments load_qrels(const std::filesystem::path& path);
std::vector<TrainInstance> load_instances(const std::filesystem::path& path, const Corpus& corpus,
                                          const QuerySet& queries);

Corpus parse_corpus(std::string_view contents);
QuerySet parse_queries(std::string_view contents);
Judgments parse_qrels(std::string_view contents);
std::vector<TrainInstance> parse_instances(std::string_view contents, const Corpus& corpus,
                                           const QuerySet& queries);

std::string serialize_corpus(const Corpus& corpus);
std::string serialize_queries(const QuerySet& queries);
/// Includes a header row; zero-graded rows are written back.
std::string serialize_qrels(const Judgments& judgments);
std::string serialize_instances(const std::vector<TrainInstance>& instances);

/// Checks every judged id resolves. Throws IntegrityError listing offenders.
void validate(const Corpus& corpus, const QuerySet& queries, const Judgments& judgments);

/// Checks the false-negative filter and the per-instance count.
void validate_instances(const std::vector<TrainInstance>& instances, const Judgments& judgments,
                        std::size_t expected_negatives);

/// One (query, positive) pair per relevant judgment, ordered by
/// (query id, doc id).
std::vector<Pair> make_pairs(const QuerySet& queries, const Judgments& judgments, const Corpus& corpus);

// Synthetic desk-scale datasets.

struct SynthParams {
  std::size_t topics = 4;
  std::size_t docs_per_topic = 50;
  std::size_t queries = 60;
  std::size_t vocab = 60;  // topic-specific terms per topic
};

/// Term inventory of a synthetic dataset. Depends only on (topics, vocab), so
/// a mock generator can rebuild it without the rest of the dataset.
struct SynthVocabulary {
  std::vector<std::vector<std::string>> topic_terms;
  std::vector<std::string> background;

  static SynthVocabulary build(std::size_t topics, std::size_t vocab);
  /// Topic of a topic-specific term, or nullopt for background and unknown terms.
  std::optional<std::size_t> topic_of(std::string_view term) const;

 private:
  std::unordered_map<std::string, std::size_t> topic_lookup_;
};

struct SynthDataset {
  Corpus corpus;
  QuerySet queries;
  Judgments judgments;
  SynthVocabulary vocabulary;
};

SynthDataset synth_dataset(std::uint64_t seed, const SynthParams& params);

/// Seeded split of the judged queries into (train, held-out) id sets.
std::pair<std::set<std::string>, std::set<std::string>> split_queries(const Judgments& judgments,
                                                                      std::size_t train_count,
                                                                      std::uint64_t seed);

}  // namespace hardneg::data
