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

#include <algorithm>
#include <set>
#include <unordered_set>

#include "hardneg/common.hpp"
#include "hardneg/llmgen.hpp"
#include "hardneg/rng.hpp"

namespace hardneg::llmgen {

using nlohmann::json;

MockChatClient::MockChatClient(std::uint64_t seed, std::optional<data::SynthVocabulary> vocabulary)
    : seed_(seed), vocabulary_(std::move(vocabulary)) {}

std::unique_ptr<ChatClient> mock_client(std::uint64_t seed, std::optional<data::SynthVocabulary> vocabulary) {
  return std::make_unique<MockChatClient>(seed, std::move(vocabulary));
}

namespace {

struct Example {
  std::string query;
  std::string positive;
};

Example extract_example(const std::string& prompt) {
  const auto marker = prompt.find("example:");
  if (marker == std::string::npos) throw TransportError("mock client: prompt has no example");
  const auto start = prompt.find('{', marker);
  const auto end = prompt.find('\n', marker);
  if (start == std::string::npos || (end != std::string::npos && start > end)) {
    throw TransportError("mock client: example is not a JSON object");
  }
  try {
    const json j = json::parse(prompt.substr(start, end == std::string::npos ? std::string::npos : end - start));
    return {j.at("user_query").get<std::string>(), j.at("positive_document").get<std::string>()};
  } catch (const json::exception& e) {
    throw TransportError(std::string("mock client: unreadable example: ") + e.what());
  }
}

std::string pseudo_term(std::uint64_t h) {
  static constexpr char kLetters[] = "bcdfghjklmnprstvz";
  std::string w = "x";
  for (int i = 0; i < 6; ++i) {
    w.push_back(kLetters[h % 17]);
    h /= 17;
  }
  return w;
}

}  // namespace

ChatResponse MockChatClient::complete(const ChatRequest& request) {
  ++calls_;
  const Example ex = extract_example(request.prompt);
  const bool full = request.prompt.find("\"reasoning\"") != std::string::npos;

  const auto q_tokens = tokenize(ex.query);
  const std::unordered_set<std::string> q_set(q_tokens.begin(), q_tokens.end());
  const auto p_tokens = tokenize(ex.positive);
  const std::unordered_set<std::string> p_set(p_tokens.begin(), p_tokens.end());

  std::vector<std::string> salient;
  for (const auto& t : p_tokens) {
    if (!q_set.count(t) || std::find(salient.begin(), salient.end(), t) != salient.end()) continue;
    if (vocabulary_ && !vocabulary_->topic_of(t)) continue;
    salient.push_back(t);
  }
  if (salient.empty()) {
    // Nothing in common with the query: perturb the longest terms instead.
    std::vector<std::string> distinct(p_set.begin(), p_set.end());
    std::sort(distinct.begin(), distinct.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
    distinct.resize(std::min<std::size_t>(2, distinct.size()));
    salient = distinct;
  }

  Rng rng(derive_seed(seed_, fnv1a64(request.prompt)));
  // Full-template negatives diverge subtly: one key term changes. Simple ones
  // lose every term they share with the query.
  const std::size_t swaps = full ? 1 : salient.size();

  auto replacement_for = [&](const std::string& term, std::set<std::string>& used) {
    if (vocabulary_) {
      if (auto topic = vocabulary_->topic_of(term)) {
        const auto& pool = vocabulary_->topic_terms[*topic];
        std::vector<std::string> candidates;
        for (const auto& w : pool) {
          if (!p_set.count(w) && !q_set.count(w) && !used.count(w)) candidates.push_back(w);
        }
        if (!candidates.empty()) {
          auto pick = candidates[rng.below(candidates.size())];
          used.insert(pick);
          return pick;
        }
      }
    }
    auto pick = pseudo_term(rng.next());
    used.insert(pick);
    return pick;
  };

  nlohmann::ordered_json payload;
  std::string reasoning = "The query hinges on";
  for (const auto& s : salient) reasoning += " '" + s + "'";
  reasoning += ". Each negative keeps the wording and topic of the positive document but replaces part of "
               "those terms with related terms, so it looks relevant without answering the query.";
  if (full) payload[std::string(kReasoningKey)] = reasoning;

  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<std::string> order = salient;
    rng.shuffle(std::span(order));
    std::set<std::string> used;
    std::unordered_map<std::string, std::string> swap;
    for (std::size_t k = 0; k < swaps && k < order.size(); ++k) swap[order[k]] = replacement_for(order[k], used);
    std::string text;
    for (const auto& t : p_tokens) {
      if (!text.empty()) text.push_back(' ');
      auto it = swap.find(t);
      text += it == swap.end() ? t : it->second;
    }
    payload[std::string(kNegativeKeys[i])] = text;
  }
  return ChatResponse{payload.dump(), std::nullopt, std::nullopt};
}

}  // namespace hardneg::llmgen
