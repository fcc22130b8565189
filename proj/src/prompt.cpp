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

#include "hardneg/prompt.hpp"

#include <nlohmann/json.hpp>

#include "hardneg/error.hpp"
#include "hardneg/rng.hpp"

namespace hardneg::llmgen {

std::string_view to_string(TemplateId t) { return t == TemplateId::Full ? "full" : "simple"; }

TemplateId template_from_string(std::string_view s) {
  if (s == "full") return TemplateId::Full;
  if (s == "simple") return TemplateId::Simple;
  throw ParameterError("unknown prompt template '" + std::string(s) + "' (expected full or simple)");
}

namespace {

const std::vector<std::string> kLengths = {"approximately the same as", "nearly the same as"};
const std::vector<std::string> kFoundationalIntermediate = {
    "Foundational (Equivalent to Elementary and Middle School)", "Intermediate (High School and Undergraduate)"};

}  // namespace

AttributePools pools_for(std::string_view dataset) {
  if (dataset == "scifact") {
    return {{"Epidemiology", "Public Health", "Virology", "Biostatistics", "Healthcare Policy", "Infectious Diseases",
             "Bioinformatics", "Medical Research", "Pharmacology"},
            kFoundationalIntermediate,
            kLengths};
  }
  if (dataset == "fiqa") return {{"Finance"}, {"Advanced (Postgraduate and Beyond)"}, kLengths};
  if (dataset == "quora" || dataset == "hotpotqa") return {{"General knowledge"}, kFoundationalIntermediate, kLengths};
  if (dataset == "msmarco") return {{"Question Answering"}, kFoundationalIntermediate, kLengths};
  throw ParameterError("unknown attribute pools '" + std::string(dataset) + "'");
}

std::vector<std::string> known_pool_ids() { return {"scifact", "fiqa", "quora", "hotpotqa", "msmarco"}; }

AttributeSet sample_attributes(const AttributePools& pools, std::uint64_t seed, std::uint64_t instance_index) {
  if (pools.domain_name.empty() || pools.difficulty_level.empty() || pools.length_phrase.empty()) {
    throw ParameterError("sample_attributes: every attribute pool must be non-empty");
  }
  Rng rng(derive_seed(seed, instance_index));
  AttributeSet a;
  a.domain_name = pools.domain_name[rng.below(pools.domain_name.size())];
  a.difficulty_level = pools.difficulty_level[rng.below(pools.difficulty_level.size())];
  a.length_phrase = pools.length_phrase[rng.below(pools.length_phrase.size())];
  return a;
}

std::string render_example(std::string_view query, std::string_view positive) {
  nlohmann::ordered_json j;
  j["user_query"] = std::string(query);
  j["positive_document"] = std::string(positive);
  return j.dump();
}

std::string render_prompt(const PromptSpec& spec) {
  const std::string example = render_example(spec.query, spec.positive);
  std::string p;
  if (spec.template_id == TemplateId::Full) {
    if (!spec.attributes) throw ParameterError("render_prompt: full template requires attributes");
    const auto& a = *spec.attributes;
    if (a.domain_name.empty() || a.difficulty_level.empty() || a.length_phrase.empty()) {
      throw ParameterError("render_prompt: full template requires all three attributes");
    }
    p += "Assume you are an expert in " + a.domain_name +
         ", and there is a example with a \"user_query\" and its related doc \"positive_document\".\n";
    p += "\n";
    p += "example: " + example + "\n";
    p += "\n";
    p += "[Task Definition]\n";
    p += "Your task is to write three hard negative samples in JSON format. "
         "The JSON object must contain the following keys:\n";
    p += "- \"reasoning\": a string, reasoning steps on how to generate three hard negative documents.\n";
    p += "- \"hard_negative_document_1\": a string, a hard-negative document to the user query.\n";
    p += "- \"hard_negative_document_2\": a string, a hard-negative document to the user query.\n";
    p += "- \"hard_negative_document_3\": a string, a hard-negative document to the user query.\n";
    p += "\n";
    p += "[Reasoning Definition]\n";
    p += "- Write the inference process step by step in \"reasoning\", including how to associate from the "
         "\"user_query\" and \"positive_document\" to get the hard-negative documents.\n";
    p += "[Hard Negatives Definition]\n";
    p += "- All the hard negative documents should use similar keywords or topics as the \"positive_document\".\n";
    p += "- All the hard negative documents appear to address the \"user_query\" at first glance. However, subtly "
         "diverges in content or context such that it does not truly answer the query or meet the user's "
         "information need.\n";
    p += "- All the hard negative documents should be plausible and accurate documents, they should be diverse in "
         "topic, sources, and styles.\n";
    p += "[Attributes Definition]\n";
    p += "- All the negative documents should be in the education level of " + a.difficulty_level +
         " to comprehend, and the length should be " + a.length_phrase + " the \"positive_document\".\n";
    p += "[Format Definition]\n";
    p += "- Your output must always be a JSON object only, do not explain yourself or output anything else.";
    return p;
  }

  const std::string& domain = spec.attributes ? spec.attributes->domain_name : spec.domain_name;
  if (domain.empty()) throw ParameterError("render_prompt: simple template requires a domain name");
  p += "Assume you are an expert in " + domain +
       ", and there is a example with a \"user_query\" and its related doc \"positive_document\".\n";
  p += "example:" + example + "\n";
  p += "\n";
  p += "Your task is to write three hard negative samples in JSON format. "
       "The JSON object must contain the following keys:\n";
  p += "- \"hard_negative_document_1\": a string, a hard-negative document to the user query.\n";
  p += "- \"hard_negative_document_2\": a string, a hard-negative document to the user query.\n";
  p += "- \"hard_negative_document_3\": a string, a hard-negative document to the user query.\n";
  p += "\n";
  p += "- All the hard negative documents length should be approximately the same as the \"positive_document\".\n";
  p += "- Your output must always be a JSON object only, do not explain yourself or output anything else.";
  return p;
}

}  // namespace hardneg::llmgen
