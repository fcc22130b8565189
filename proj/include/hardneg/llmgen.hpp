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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardneg/data.hpp"
#include "hardneg/error.hpp"
#include "hardneg/prompt.hpp"

namespace hardneg::llmgen {

// ---- Output parsing ----

struct ParsedGeneration {
  std::string reasoning;  // empty for the simple template
  std::vector<std::string> negatives;
  std::vector<std::string> warnings;
};

/// Parses one model reply. Markdown code fences are stripped. Unknown
/// top-level keys produce a warning.
///
/// Throws ParseError when the payload is not a JSON object, SchemaError (whose
/// key() names the offending field) when a required key is missing, is not a
/// string, or is empty.
ParsedGeneration parse_generation(std::string_view raw, TemplateId mode = TemplateId::Full);

/// Inverse of parse_generation for a well-formed generation.
std::string serialize_generation(const ParsedGeneration& gen, TemplateId mode = TemplateId::Full);

// ---- Records ----

struct GenerationRecord {
  std::string id;  // sha256 of the rendered prompt
  std::string query_id;
  std::string positive_id;
  std::string query;     // one-shot example, kept for auditing and dedup
  std::string positive;
  TemplateId template_id = TemplateId::Full;
  std::string reasoning;
  std::vector<std::string> negatives;  // exactly 3 as generated; fewer after dedup
  AttributeSet attributes;
  std::string model;
  double temperature = 0.7;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::size_t retries_used = 0;

  bool operator==(const GenerationRecord&) const = default;
};

nlohmann::json to_json(const GenerationRecord& r);
GenerationRecord record_from_json(const nlohmann::json& j);

std::string serialize_generations(const std::vector<GenerationRecord>& records);
std::vector<GenerationRecord> parse_generations(std::string_view contents);

// ---- Clients ----

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.7;
};

struct ChatResponse {
  std::string content;
  std::optional<std::size_t> prompt_tokens;
  std::optional<std::size_t> completion_tokens;
};

/// Network or protocol failure. Retried by generate().
class TransportError : public GenerationError {
 public:
  using GenerationError::GenerationError;
};

/// A chat-completions backend. Implementations must tolerate concurrent
/// complete() calls.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

inline constexpr const char* kApiKeyEnv = "HARDNEG_API_KEY";

/// OpenAI-style POST {endpoint}/v1/chat/completions with bearer auth.
class HttpChatClient : public ChatClient {
 public:
  HttpChatClient(std::string endpoint, std::string api_key, int timeout_seconds = 120);
  ChatResponse complete(const ChatRequest& request) override;

  /// Request body sent for a request. Exposed for tests.
  static nlohmann::json request_body(const ChatRequest& request);
  /// Extracts content and usage. Throws TransportError on an unexpected shape.
  static ChatResponse parse_response_body(std::string_view body);

 private:
  std::string endpoint_;
  std::string api_key_;
  int timeout_seconds_;
};

/// Offline stand-in for an LLM. Reads the one-shot example out of the prompt
/// and perturbs the positive document: query terms are swapped for unseen
/// same-topic terms, so each negative keeps most of the positive's wording
/// while losing part of what made it relevant. The full template changes one
/// matched term, the simple template swaps every matched term.
class MockChatClient : public ChatClient {
 public:
  explicit MockChatClient(std::uint64_t seed, std::optional<data::SynthVocabulary> vocabulary = std::nullopt);
  ChatResponse complete(const ChatRequest& request) override;

  std::size_t calls() const { return calls_.load(); }

 private:
  std::uint64_t seed_;
  std::optional<data::SynthVocabulary> vocabulary_;
  std::atomic<std::size_t> calls_{0};
};

std::unique_ptr<ChatClient> mock_client(std::uint64_t seed,
                                        std::optional<data::SynthVocabulary> vocabulary = std::nullopt);

// ---- Generation ----

struct GenerateConfig {
  std::string model = "gpt-4o";
  double temperature = 0.7;
  std::size_t max_retries = 3;
  std::optional<std::filesystem::path> cache_dir;
  TemplateId template_id = TemplateId::Full;
  std::uint64_t seed = 0;  // attribute sampling
  std::size_t max_in_flight = 4;
};

/// Run-level cost accounting. Token counts come from the provider when it
/// reports them, otherwise ceil(chars / 4).
struct CostCounters {
  std::size_t requests = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;

  nlohmann::json to_json() const;
};

/// Thread-safe accumulator around CostCounters.
class CostMeter {
 public:
  void add(const CostCounters& delta);
  CostCounters snapshot() const;

 private:
  mutable std::mutex mu_;
  CostCounters totals_;
};

std::size_t estimate_tokens(std::string_view text);

/// Lowercase hex sha256 of model, temperature and prompt, separated by '\n'.
std::string cache_key(std::string_view model, double temperature, std::string_view prompt);

PromptSpec prompt_spec_for(const data::Pair& pair, const AttributePools& pools, const GenerateConfig& config,
                           std::size_t instance_index);

/// One generation call with caching and retries.
///
/// A warm cache entry short-circuits the client. Otherwise the client is
/// asked up to 1 + max_retries times; a reply that fails to parse, or that
/// repeats the positive verbatim, is re-requested. After the last attempt a
/// schema failure surfaces as SchemaError (carrying the last raw reply) and a
/// transport failure as GenerationError.
GenerationRecord generate(ChatClient& client, const data::Pair& pair, const AttributePools& pools,
                          const GenerateConfig& config, std::size_t instance_index = 0, CostMeter* meter = nullptr);

/// generate() over every pair with at most config.max_in_flight concurrent
/// requests. Output is index-aligned with `pairs`.
std::vector<GenerationRecord> generate_all(ChatClient& client, const std::vector<data::Pair>& pairs,
                                           const AttributePools& pools, const GenerateConfig& config,
                                           CostMeter* meter = nullptr);

// ---- Dedup ----

/// Jaccard similarity of the 3-word shingle sets of two texts. Texts shorter
/// than three tokens contribute their whole token sequence as one shingle.
double shingle_jaccard(std::string_view a, std::string_view b);

/// Drops a negative whose shingle Jaccard with an earlier kept negative of
/// the same record, or with the record's positive, reaches the threshold.
/// Records left with no negatives are dropped with a warning.
std::vector<GenerationRecord> dedup(const std::vector<GenerationRecord>& records, double jaccard_threshold = 0.9);

}  // namespace hardneg::llmgen
