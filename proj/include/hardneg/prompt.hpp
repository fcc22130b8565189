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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hardneg::llmgen {

enum class TemplateId { Full, Simple };

std::string_view to_string(TemplateId t);
TemplateId template_from_string(std::string_view s);

/// Candidate values for each prompt attribute. One value per pool is drawn
/// for every prompt.
struct AttributePools {
  std::vector<std::string> domain_name;
  std::vector<std::string> difficulty_level;
  std::vector<std::string> length_phrase;
};

/// Built-in pools, keyed by dataset: scifact, fiqa, quora, hotpotqa, msmarco.
AttributePools pools_for(std::string_view dataset);
std::vector<std::string> known_pool_ids();

struct AttributeSet {
  std::string domain_name;
  std::string difficulty_level;
  std::string length_phrase;

  bool operator==(const AttributeSet&) const = default;
};

/// Deterministic in (seed, instance_index); each pool sampled uniformly and
/// independently. Throws ParameterError on an empty pool.
AttributeSet sample_attributes(const AttributePools& pools, std::uint64_t seed, std::uint64_t instance_index);

struct PromptSpec {
  TemplateId template_id = TemplateId::Full;
  std::string query;
  std::string positive;
  std::optional<AttributeSet> attributes;  // required by Full
  std::string domain_name;                 // Simple only, used when attributes is absent
};

/// The one-shot example as a compact JSON object with keys user_query and
/// positive_document, in that order.
std::string render_example(std::string_view query, std::string_view positive);

/// Renders the negative-generation prompt. Throws ParameterError when Full
/// lacks attributes or Simple has no domain name.
std::string render_prompt(const PromptSpec& spec);

inline constexpr std::string_view kReasoningKey = "reasoning";
inline constexpr std::string_view kNegativeKeys[3] = {"hard_negative_document_1", "hard_negative_document_2",
                                                      "hard_negative_document_3"};

}  // namespace hardneg::llmgen
