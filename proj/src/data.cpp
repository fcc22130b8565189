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

#include "hardneg/data.hpp"

#include <algorithm>
#include <charconv>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hardneg/common.hpp"
#include "hardneg/rng.hpp"

namespace hardneg::data {

using nlohmann::json;

namespace {

template <typename Fn>
void for_each_line(std::string_view contents, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line, line_no);
    pos = end + 1;
  }
}

json parse_json_line(std::string_view line, std::size_t line_no) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
    return j;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
}

std::string required_string(const json& j, const char* key, std::size_t line_no, bool allow_number = false) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'", line_no);
  if (it->is_string()) return it->get<std::string>();
  if (allow_number && it->is_number_integer()) return std::to_string(it->get<long long>());
  throw ParseError(std::string("field '") + key + "' must be a string", line_no);
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    // Some qrels files carry grades like "1.0".
    double d = 0;
    auto dres = std::from_chars(first, last, d);
    if (dres.ec != std::errc() || dres.ptr != last || d != static_cast<int>(d)) return std::nullopt;
    return static_cast<int>(d);
  }
  return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    cols.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return cols;
}

}  // namespace

// ---- Judgments ----

void Judgments::add(const std::string& query_id, const std::string& doc_id, int grade) {
  if (query_id.empty() || doc_id.empty()) throw IntegrityError("empty id in judgment");
  if (grade < 0) throw IntegrityError("negative relevance grade for " + query_id + "/" + doc_id);
  if (grade == 0) {
    zero_graded_[query_id].insert(doc_id);
  } else {
    relevant_[query_id][doc_id] = grade;
  }
}

const std::map<std::string, int>& Judgments::relevant(std::string_view query_id) const {
  static const std::map<std::string, int> kEmpty;
  auto it = relevant_.find(std::string(query_id));
  return it == relevant_.end() ? kEmpty : it->second;
}

bool Judgments::is_relevant(std::string_view query_id, std::string_view doc_id) const {
  const auto& rel = relevant(query_id);
  return rel.find(std::string(doc_id)) != rel.end();
}

bool Judgments::is_judged(std::string_view query_id, std::string_view doc_id) const {
  if (is_relevant(query_id, doc_id)) return true;
  auto it = zero_graded_.find(std::string(query_id));
  return it != zero_graded_.end() && it->second.count(std::string(doc_id)) > 0;
}

std::vector<std::string> Judgments::query_ids() const {
  std::vector<std::string> ids;
  ids.reserve(relevant_.size());
  for (const auto& [qid, docs] : relevant_) {
    if (!docs.empty()) ids.push_back(qid);
  }
  return ids;
}

std::size_t Judgments::num_relevant_rows() const {
  std::size_t n = 0;
  for (const auto& [qid, docs] : relevant_) n += docs.size();
  return n;
}

Judgments Judgments::subset(const std::set<std::string>& query_ids) const {
  Judgments out;
  for (const auto& [qid, docs] : relevant_) {
    if (query_ids.count(qid)) out.relevant_[qid] = docs;
  }
  for (const auto& [qid, docs] : zero_graded_) {
    if (query_ids.count(qid)) out.zero_graded_[qid] = docs;
  }
  return out;
}

// ---- Provenance ----

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Synthetic: return "synthetic";
    case Provenance::Retrieved: return "retrieved";
    case Provenance::Random: return "random";
  }
  return "retrieved";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "synthetic") return Provenance::Synthetic;
  if (s == "retrieved") return Provenance::Retrieved;
  if (s == "random") return Provenance::Random;
  throw ParseError("unknown provenance '" + std::string(s) + "'");
}

// ---- Parsing ----

Corpus parse_corpus(std::string_view contents) {
  Corpus corpus;
  for_each_line(contents, [&](std::string_view line, std::size_t line_no) {
    json j = parse_json_line(line, line_no);
    Document doc;
    doc.id = required_string(j, "_id", line_no, true);
    if (auto it = j.find("title"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError("field 'title' must be a string", line_no);
      doc.title = it->get<std::string>();
    }
    doc.text = required_string(j, "text", line_no);
    if (doc.id.empty()) throw ParseError("empty '_id'", line_no);
    if (doc.text.empty()) throw ParseError("empty 'text' for document " + doc.id, line_no);
    try {
      corpus.add(std::move(doc));
    } catch (const IntegrityError& e) {
      throw IntegrityError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  if (corpus.empty()) log::warn("empty_corpus");
  return corpus;
}

QuerySet parse_queries(std::string_view contents) {
  QuerySet queries;
  for_each_line(contents, [&](std::string_view line, std::size_t line_no) {
    json j = parse_json_line(line, line_no);
    Query q;
    q.id = required_string(j, "_id", line_no, true);
    q.text = required_string(j, "text", line_no);
    if (q.id.empty()) throw ParseError("empty '_id'", line_no);
    try {
      queries.add(std::move(q));
    } catch (const IntegrityError& e) {
      throw IntegrityError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  if (queries.empty()) log::warn("empty_queries");
  return queries;
}

Judgments parse_qrels(std::string_view contents) {
  Judgments judgments;
  bool first = true;
  for_each_line(contents, [&](std::string_view line, std::size_t line_no) {
    auto cols = split_tabs(line);
    if (cols.size() == 4) cols.erase(cols.begin() + 1);  // TREC layout: qid iter docid rel
    const bool header_candidate = first;
    first = false;
    if (cols.size() != 3) {
      if (header_candidate) return;
      throw ParseError("expected 3 tab-separated columns, got " + std::to_string(cols.size()), line_no);
    }
    auto grade = parse_int(cols[2]);
    if (!grade) {
      if (header_candidate) return;  // e.g. "query-id corpus-id score"
      throw ParseError("non-integer score '" + std::string(cols[2]) + "'", line_no);
    }
    if (*grade < 0) throw ParseError("negative score", line_no);
    if (cols[0].empty() || cols[1].empty()) throw ParseError("empty id", line_no);
    judgments.add(std::string(cols[0]), std::string(cols[1]), *grade);
  });
  return judgments;
}

std::vector<TrainInstance> parse_instances(std::string_view contents, const Corpus& corpus,
                                           const QuerySet& queries) {
  std::vector<TrainInstance> out;
  for_each_line(contents, [&](std::string_view line, std::size_t line_no) {
    json j = parse_json_line(line, line_no);
    const auto qid = required_string(j, "query_id", line_no);
    const auto pid = required_string(j, "positive_id", line_no);
    const Query* q = queries.find(qid);
    if (!q) throw IntegrityError("line " + std::to_string(line_no) + ": unknown query id '" + qid + "'");
    const Document* pos = corpus.find(pid);
    if (!pos) throw IntegrityError("line " + std::to_string(line_no) + ": unknown doc id '" + pid + "'");
    TrainInstance inst{*q, *pos, {}};
    auto negs = j.find("negatives");
    if (negs == j.end() || !negs->is_array()) throw ParseError("missing array 'negatives'", line_no);
    for (const auto& n : *negs) {
      if (!n.is_object()) throw ParseError("negative must be an object", line_no);
      NegativeSample s;
      s.text = required_string(n, "text", line_no);
      if (auto it = n.find("doc_id"); it != n.end() && !it->is_null()) {
        s.doc_id = it->get<std::string>();
        if (!corpus.contains(*s.doc_id)) {
          throw IntegrityError("line " + std::to_string(line_no) + ": unknown negative doc id '" + *s.doc_id + "'");
        }
      }
      try {
        s.provenance = provenance_from_string(required_string(n, "provenance", line_no));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
      s.origin = required_string(n, "origin", line_no);
      s.padding = n.value("padding", false);
      if (s.provenance != Provenance::Synthetic && !s.doc_id) {
        throw ParseError("non-synthetic negative without doc_id", line_no);
      }
      inst.negatives.push_back(std::move(s));
    }
    out.push_back(std::move(inst));
  });
  return out;
}

Corpus load_corpus(const std::filesystem::path& path) { return parse_corpus(read_file(path)); }
QuerySet load_queries(const std::filesystem::path& path) { return parse_queries(read_file(path)); }
Judgments load_qrels(const std::filesystem::path& path) { return parse_qrels(read_file(path)); }
std::vector<TrainInstance> load_instances(const std::filesystem::path& path, const Corpus& corpus,
                                          const QuerySet& queries) {
  return parse_instances(read_file(path), corpus, queries);
}

// ---- Serialization ----

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus) {
    json j = json::object();
    j["_id"] = d.id;
    j["title"] = d.title;
    j["text"] = d.text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_queries(const QuerySet& queries) {
  std::string out;
  for (const auto& q : queries) {
    json j = json::object();
    j["_id"] = q.id;
    j["text"] = q.text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_qrels(const Judgments& judgments) {
  // Merge both maps so rows come out in (query, doc) order.
  std::map<std::string, std::map<std::string, int>> rows = judgments.relevant_map();
  for (const auto& [qid, docs] : judgments.zero_graded()) {
    for (const auto& d : docs) rows[qid][d] = 0;
  }
  std::string out = "query-id\tcorpus-id\tscore\n";
  for (const auto& [qid, docs] : rows) {
    for (const auto& [did, grade] : docs) {
      out += qid + '\t' + did + '\t' + std::to_string(grade) + '\n';
    }
  }
  return out;
}

std::string serialize_instances(const std::vector<TrainInstance>& instances) {
  std::string out;
  for (const auto& inst : instances) {
    json negs = json::array();
    for (const auto& n : inst.negatives) {
      json jn = json::object();
      jn["text"] = n.text;
      if (n.doc_id) jn["doc_id"] = *n.doc_id;
      jn["provenance"] = std::string(to_string(n.provenance));
      jn["origin"] = n.origin;
      if (n.padding) jn["padding"] = true;
      negs.push_back(std::move(jn));
    }
    json j = json::object();
    j["query_id"] = inst.query.id;
    j["positive_id"] = inst.positive.id;
    j["negatives"] = std::move(negs);
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---- Validation ----

void validate(const Corpus& corpus, const QuerySet& queries, const Judgments& judgments) {
  std::vector<std::string> offenders;
  auto check = [&](const std::string& qid, const std::string& did) {
    if (!queries.contains(qid)) offenders.push_back("query:" + qid);
    if (!corpus.contains(did)) offenders.push_back("doc:" + did);
  };
  for (const auto& [qid, docs] : judgments.relevant_map()) {
    for (const auto& [did, grade] : docs) check(qid, did);
  }
  for (const auto& [qid, docs] : judgments.zero_graded()) {
    for (const auto& did : docs) check(qid, did);
  }
  if (offenders.empty()) return;
  std::sort(offenders.begin(), offenders.end());
  offenders.erase(std::unique(offenders.begin(), offenders.end()), offenders.end());
  std::string msg = "judgments reference unknown ids:";
  for (std::size_t i = 0; i < offenders.size() && i < 20; ++i) msg += " " + offenders[i];
  if (offenders.size() > 20) msg += " ... (" + std::to_string(offenders.size()) + " total)";
  throw IntegrityError(msg);
}

void validate_instances(const std::vector<TrainInstance>& instances, const Judgments& judgments,
                        std::size_t expected_negatives) {
  for (const auto& inst : instances) {
    if (inst.negatives.size() != expected_negatives) {
      throw IntegrityError("instance (" + inst.query.id + ", " + inst.positive.id + ") has " +
                           std::to_string(inst.negatives.size()) + " negatives, expected " +
                           std::to_string(expected_negatives));
    }
    for (const auto& n : inst.negatives) {
      if (n.doc_id && judgments.is_judged(inst.query.id, *n.doc_id)) {
        throw IntegrityError("judged doc '" + *n.doc_id + "' used as negative for query '" + inst.query.id + "'");
      }
    }
  }
}

std::vector<Pair> make_pairs(const QuerySet& queries, const Judgments& judgments, const Corpus& corpus) {
  std::vector<Pair> pairs;
  for (const auto& [qid, docs] : judgments.relevant_map()) {
    const Query* q = queries.find(qid);
    if (!q) continue;
    for (const auto& [did, grade] : docs) {
      if (const Document* d = corpus.find(did)) pairs.emplace_back(*q, *d);
    }
  }
  return pairs;
}

// ---- Synthetic datasets ----

namespace {

constexpr std::string_view kConsonants = "bcdfghjklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kSyllables = 17 * 5;
constexpr std::size_t kBackgroundWords = 30;

std::string syllable(std::size_t s) {
  return {kConsonants[s / kVowels.size()], kVowels[s % kVowels.size()]};
}

// Bijective scramble of [0, modulus) so consecutive indices look unrelated.
std::string pseudo_word(std::size_t index, std::size_t syllables) {
  std::size_t modulus = 1;
  for (std::size_t i = 0; i < syllables; ++i) modulus *= kSyllables;
  std::size_t x = (index * 7919 + 104729) % modulus;
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w += syllable(x % kSyllables);
    x /= kSyllables;
  }
  return w;
}

template <typename T>
std::vector<T> sample_distinct(Rng& rng, const std::vector<T>& pool, std::size_t n) {
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(pool[idx[i]]);
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

SynthVocabulary SynthVocabulary::build(std::size_t topics, std::size_t vocab) {
  SynthVocabulary v;
  v.topic_terms.resize(topics);
  for (std::size_t t = 0; t < topics; ++t) {
    for (std::size_t i = 0; i < vocab; ++i) {
      auto w = pseudo_word(t * vocab + i, 3);
      v.topic_lookup_.emplace(w, t);
      v.topic_terms[t].push_back(std::move(w));
    }
  }
  for (std::size_t i = 0; i < kBackgroundWords; ++i) v.background.push_back(pseudo_word(i, 2));
  return v;
}

std::optional<std::size_t> SynthVocabulary::topic_of(std::string_view term) const {
  auto it = topic_lookup_.find(std::string(term));
  if (it == topic_lookup_.end()) return std::nullopt;
  return it->second;
}

SynthDataset synth_dataset(std::uint64_t seed, const SynthParams& params) {
  constexpr std::size_t kFacets = 4;
  constexpr std::size_t kFacetRepeats = 2;
  constexpr std::size_t kFiller = 8;
  constexpr std::size_t kDocBackground = 8;
  constexpr std::size_t kQueryFacets = 3;
  constexpr std::size_t kQueryBackground = 2;

  if (params.topics == 0) throw ParameterError("synth_dataset: topics must be positive");
  if (params.docs_per_topic == 0) throw ParameterError("synth_dataset: docs_per_topic must be positive");
  if (params.queries == 0) throw ParameterError("synth_dataset: queries must be positive");
  if (params.vocab < kFacets + 1) throw ParameterError("synth_dataset: vocab must be at least 5");
  const std::size_t num_docs = params.topics * params.docs_per_topic;
  if (params.queries > num_docs) throw ParameterError("synth_dataset: more queries than documents");

  SynthDataset ds;
  ds.vocabulary = SynthVocabulary::build(params.topics, params.vocab);
  const auto& vocab = ds.vocabulary;

  Rng rng(derive_seed(seed, 0x5D0C));
  std::vector<std::vector<std::string>> facets(num_docs);
  std::vector<std::size_t> topic_of_doc(num_docs);
  char id_buf[32];
  for (std::size_t t = 0; t < params.topics; ++t) {
    for (std::size_t j = 0; j < params.docs_per_topic; ++j) {
      const std::size_t d = t * params.docs_per_topic + j;
      topic_of_doc[d] = t;
      facets[d] = sample_distinct(rng, vocab.topic_terms[t], kFacets);
      std::vector<std::string> tokens;
      for (std::size_t r = 0; r < kFacetRepeats; ++r) tokens.insert(tokens.end(), facets[d].begin(), facets[d].end());
      for (std::size_t i = 0; i < kFiller; ++i) {
        tokens.push_back(vocab.topic_terms[t][rng.below(vocab.topic_terms[t].size())]);
      }
      for (std::size_t i = 0; i < kDocBackground; ++i) tokens.push_back(vocab.background[rng.below(vocab.background.size())]);
      rng.shuffle(std::span(tokens));
      std::snprintf(id_buf, sizeof(id_buf), "D%04zu", d);
      ds.corpus.add(Document{id_buf, "", join(tokens)});
    }
  }

  std::vector<std::size_t> doc_order(num_docs);
  for (std::size_t i = 0; i < num_docs; ++i) doc_order[i] = i;
  const auto targets = sample_distinct(rng, doc_order, params.queries);
  for (std::size_t i = 0; i < params.queries; ++i) {
    const std::size_t d = targets[i];
    const std::size_t t = topic_of_doc[d];
    std::vector<std::string> tokens = sample_distinct(rng, facets[d], kQueryFacets);
    tokens.push_back(vocab.topic_terms[t][rng.below(vocab.topic_terms[t].size())]);
    for (std::size_t k = 0; k < kQueryBackground; ++k) tokens.push_back(vocab.background[rng.below(vocab.background.size())]);
    rng.shuffle(std::span(tokens));
    std::snprintf(id_buf, sizeof(id_buf), "Q%04zu", i);
    ds.queries.add(Query{id_buf, join(tokens)});
    ds.judgments.add(id_buf, ds.corpus[d].id, 1);
  }
  return ds;
}

std::pair<std::set<std::string>, std::set<std::string>> split_queries(const Judgments& judgments,
                                                                      std::size_t train_count,
                                                                      std::uint64_t seed) {
  auto ids = judgments.query_ids();
  if (train_count > ids.size()) throw ParameterError("split_queries: train_count exceeds judged queries");
  Rng rng(derive_seed(seed, 0x5917));
  rng.shuffle(std::span(ids));
  std::set<std::string> train(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_count));
  std::set<std::string> held(ids.begin() + static_cast<std::ptrdiff_t>(train_count), ids.end());
  return {std::move(train), std::move(held)};
}

}  // namespace hardneg::data
