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

#include <set>

#include "hardneg/common.hpp"
#include "hardneg/data.hpp"
#include "hardneg/error.hpp"
#include "test_util.hpp"

namespace hardneg::data {
namespace {

using hardneg::testing::TempDir;

TEST(Corpus, LoadsValidLines) {
  TempDir dir;
  const auto p = dir.write("corpus.jsonl",
                           "{\"_id\":\"d1\",\"title\":\"T\",\"text\":\"alpha beta\"}\n\n"
                           "{\"_id\":\"d2\",\"text\":\"gamma\"}\n");
  const auto corpus = load_corpus(p);
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus.at("d1").full_text(), "T alpha beta");
  EXPECT_EQ(corpus.at("d2").full_text(), "gamma");
}

TEST(Corpus, EmptyFileWarns) {
  log::Capture capture;
  EXPECT_TRUE(parse_corpus("").empty());
  EXPECT_TRUE(capture.contains("level=warn"));
}

TEST(Corpus, MissingIdNamesLine) {
  try {
    parse_corpus("{\"text\":\"no id\"}\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(Corpus, MalformedJsonNamesLine) {
  try {
    parse_corpus("{\"_id\":\"d1\",\"text\":\"ok\"}\n{not json\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Corpus, DuplicateIdIsIntegrityError) {
  EXPECT_THROW(parse_corpus("{\"_id\":\"d1\",\"text\":\"a\"}\n{\"_id\":\"d1\",\"text\":\"b\"}\n"), IntegrityError);
}

TEST(Corpus, SerializeRoundTrips) {
  const auto corpus = parse_corpus("{\"_id\":\"d1\",\"title\":\"T\",\"text\":\"a\"}\n{\"_id\":\"d2\",\"text\":\"b\"}\n");
  EXPECT_EQ(parse_corpus(serialize_corpus(corpus)), corpus);
}

TEST(Queries, LoadAndRoundTrip) {
  const auto q = parse_queries("{\"_id\":\"q1\",\"text\":\"what is x\"}\n");
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.at("q1").text, "what is x");
  EXPECT_EQ(parse_queries(serialize_queries(q)), q);
  EXPECT_THROW(q.at("q2"), LookupError);
}

TEST(Qrels, SingleRow) {
  const auto j = parse_qrels("q1\td1\t1\n");
  EXPECT_EQ(j.relevant("q1"), (std::map<std::string, int>{{"d1", 1}}));
}

TEST(Qrels, HeaderSkipped) {
  const auto j = parse_qrels("query-id\tcorpus-id\tscore\nq1\td1\t2\n");
  EXPECT_EQ(j.relevant("q1").at("d1"), 2);
  EXPECT_EQ(j.num_relevant_rows(), 1u);
}

TEST(Qrels, ZeroScoreIsNotRelevantButJudged) {
  const auto j = parse_qrels("q1\td1\t0\nq1\td2\t1\n");
  EXPECT_EQ(j.relevant("q1").size(), 1u);
  EXPECT_FALSE(j.is_relevant("q1", "d1"));
  EXPECT_TRUE(j.is_judged("q1", "d1"));
  EXPECT_TRUE(j.is_relevant("q1", "d2"));
}

TEST(Qrels, BadScoreIsParseError) {
  EXPECT_THROW(parse_qrels("q1\td1\t1\nq1\td2\tmany\n"), ParseError);
}

TEST(Qrels, SerializeKeepsZeroGrades) {
  const auto j = parse_qrels("q1\td1\t0\nq1\td2\t1\n");
  EXPECT_EQ(parse_qrels(serialize_qrels(j)), j);
}

TEST(Validate, UnknownDocIsIntegrityError) {
  const auto corpus = parse_corpus("{\"_id\":\"d1\",\"text\":\"a\"}\n");
  const auto queries = parse_queries("{\"_id\":\"q1\",\"text\":\"a\"}\n");
  EXPECT_NO_THROW(validate(corpus, queries, parse_qrels("q1\td1\t1\n")));
  try {
    validate(corpus, queries, parse_qrels("q1\td9\t1\n"));
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("d9"), std::string::npos);
  }
}

Corpus small_corpus() {
  Corpus c;
  for (const auto* id : {"d1", "d2", "d3", "d4", "d5", "d6"}) c.add({id, "", std::string("text of ") + id});
  return c;
}

QuerySet small_queries() {
  QuerySet q;
  for (const auto* id : {"q1", "q2", "q3"}) q.add({id, std::string("query ") + id});
  return q;
}

TEST(Pairs, TwoPositives) {
  Judgments j;
  j.add("q1", "d2", 1);
  j.add("q1", "d1", 1);
  const auto pairs = make_pairs(small_queries(), j, small_corpus());
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].first.id, "q1");
  EXPECT_EQ(pairs[0].second.id, "d1");
  EXPECT_EQ(pairs[1].second.id, "d2");
}

TEST(Pairs, NoJudgmentsNoPairs) {
  EXPECT_TRUE(make_pairs(small_queries(), Judgments{}, small_corpus()).empty());
}

TEST(Pairs, ThreeQueriesTwoPositivesSorted) {
  Judgments j;
  j.add("q3", "d6", 1);
  j.add("q2", "d4", 1);
  j.add("q1", "d2", 1);
  j.add("q3", "d5", 1);
  j.add("q1", "d1", 1);
  j.add("q2", "d3", 1);
  const auto pairs = make_pairs(small_queries(), j, small_corpus());
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"q1", "d1"}, {"q1", "d2"}, {"q2", "d3"}, {"q2", "d4"}, {"q3", "d5"}, {"q3", "d6"}};
  ASSERT_EQ(pairs.size(), expected.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(pairs[i].first.id, expected[i].first);
    EXPECT_EQ(pairs[i].second.id, expected[i].second);
  }
}

TEST(Instances, RoundTripAndFalseNegativeCheck) {
  const auto corpus = small_corpus();
  const auto queries = small_queries();
  TrainInstance inst{queries.at("q1"), corpus.at("d1"), {}};
  inst.negatives.push_back({corpus.at("d2").full_text(), "d2", Provenance::Retrieved, "bm25", false});
  inst.negatives.push_back({"made up text", std::nullopt, Provenance::Synthetic, "abc", false});
  const std::vector<TrainInstance> instances{inst};
  EXPECT_EQ(parse_instances(serialize_instances(instances), corpus, queries), instances);

  Judgments j;
  j.add("q1", "d1", 1);
  EXPECT_NO_THROW(validate_instances(instances, j, 2));
  EXPECT_THROW(validate_instances(instances, j, 3), IntegrityError);
  j.add("q1", "d2", 1);
  EXPECT_THROW(validate_instances(instances, j, 2), IntegrityError);
}

TEST(Synth, SameSeedIdenticalOutput) {
  const SynthParams p{};
  const auto a = synth_dataset(11, p);
  const auto b = synth_dataset(11, p);
  EXPECT_EQ(serialize_corpus(a.corpus), serialize_corpus(b.corpus));
  EXPECT_EQ(serialize_queries(a.queries), serialize_queries(b.queries));
  EXPECT_EQ(serialize_qrels(a.judgments), serialize_qrels(b.judgments));
  const auto c = synth_dataset(12, p);
  EXPECT_NE(serialize_corpus(a.corpus), serialize_corpus(c.corpus));
}

TEST(Synth, Counts) {
  const auto ds = synth_dataset(0, {4, 50, 40, 60});
  EXPECT_EQ(ds.corpus.size(), 200u);
  EXPECT_EQ(ds.queries.size(), 40u);
  EXPECT_NO_THROW(validate(ds.corpus, ds.queries, ds.judgments));
}

TEST(Synth, PositivesShareTopicTermsAndHardNegativesExist) {
  const auto ds = synth_dataset(3, {});
  for (const auto& q : ds.queries) {
    const auto& rel = ds.judgments.relevant(q.id);
    ASSERT_FALSE(rel.empty()) << q.id;
    const auto q_tokens = tokenize(q.text);
    const std::set<std::string> q_topic(q_tokens.begin(), q_tokens.end());
    std::optional<std::size_t> topic;
    for (const auto& [doc_id, grade] : rel) {
      std::set<std::string> shared;
      for (const auto& t : tokenize(ds.corpus.at(doc_id).full_text())) {
        if (q_topic.count(t) && ds.vocabulary.topic_of(t)) {
          shared.insert(t);
          topic = ds.vocabulary.topic_of(t);
        }
      }
      EXPECT_GE(shared.size(), 3u) << q.id << " / " << doc_id;
    }
    ASSERT_TRUE(topic);
    // A same-topic document outside the judgments.
    bool same_topic_negative = false;
    for (const auto& d : ds.corpus) {
      if (ds.judgments.is_judged(q.id, d.id)) continue;
      for (const auto& t : tokenize(d.full_text())) {
        if (ds.vocabulary.topic_of(t) == topic) {
          same_topic_negative = true;
          break;
        }
      }
      if (same_topic_negative) break;
    }
    EXPECT_TRUE(same_topic_negative) << q.id;
  }
}

TEST(Synth, ZeroTopicsRejected) {
  EXPECT_THROW(synth_dataset(0, {0, 50, 40, 60}), ParameterError);
}

TEST(Synth, VocabularyRebuildsFromShape) {
  const auto ds = synth_dataset(5, {});
  const auto v = SynthVocabulary::build(4, 60);
  EXPECT_EQ(v.topic_terms, ds.vocabulary.topic_terms);
  EXPECT_EQ(v.background, ds.vocabulary.background);
  EXPECT_EQ(v.topic_of(v.topic_terms[2][0]), 2u);
  EXPECT_FALSE(v.topic_of("zzzz-not-a-term"));
}

TEST(Split, SeededAndDisjoint) {
  const auto ds = synth_dataset(0, {});
  const auto [train, test] = split_queries(ds.judgments, 40, 9);
  EXPECT_EQ(train.size(), 40u);
  EXPECT_EQ(test.size(), 20u);
  for (const auto& id : train) EXPECT_EQ(test.count(id), 0u);
  EXPECT_EQ(split_queries(ds.judgments, 40, 9), split_queries(ds.judgments, 40, 9));
}

}  // namespace
}  // namespace hardneg::data
