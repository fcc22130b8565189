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

#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "hardneg/error.hpp"
#include "hardneg/prompt.hpp"

namespace hardneg::llmgen {
namespace {

PromptSpec full_spec() {
  PromptSpec s;
  s.template_id = TemplateId::Full;
  s.query = "does vitamin d reduce flu risk";
  s.positive = "A randomized trial found vitamin D lowered influenza incidence.";
  s.attributes = AttributeSet{"Virology", "Intermediate (High School and Undergraduate)", "nearly the same as"};
  return s;
}

std::size_t count_present(const std::string& text, const std::vector<std::string>& pool) {
  std::size_t n = 0;
  for (const auto& v : pool) n += text.find(v) != std::string::npos ? 1 : 0;
  return n;
}

TEST(Attributes, SingletonPools) {
  const AttributePools pools{{"Finance"}, {"Advanced"}, {"about"}};
  const auto a = sample_attributes(pools, 9, 3);
  EXPECT_EQ(a, (AttributeSet{"Finance", "Advanced", "about"}));
}

TEST(Attributes, Deterministic) {
  const auto pools = pools_for("scifact");
  EXPECT_EQ(sample_attributes(pools, 1, 17), sample_attributes(pools, 1, 17));
}

TEST(Attributes, EmptyPoolRejected) {
  EXPECT_THROW(sample_attributes({{}, {"x"}, {"y"}}, 0, 0), ParameterError);
}

TEST(Attributes, SciFactDomainsUniform) {
  const auto pools = pools_for("scifact");
  ASSERT_EQ(pools.domain_name.size(), 9u);
  std::map<std::string, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[sample_attributes(pools, 2024, static_cast<std::uint64_t>(i)).domain_name];
  const double p = 1.0 / 9.0;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  ASSERT_EQ(counts.size(), 9u);
  for (const auto& [domain, c] : counts) EXPECT_NEAR(c, mean, 3 * sigma) << domain;
}

TEST(Pools, KnownIdsResolve) {
  for (const auto& id : known_pool_ids()) EXPECT_NO_THROW(pools_for(id));
  EXPECT_THROW(pools_for("nfcorpus"), ParameterError);
  EXPECT_EQ(pools_for("fiqa").domain_name, std::vector<std::string>{"Finance"});
}

TEST(Render, FullContainsDefinitionsAndKeys) {
  const auto p = render_prompt(full_spec());
  for (const auto* block : {"[Task Definition]", "[Reasoning Definition]", "[Hard Negatives Definition]",
                            "[Attributes Definition]", "[Format Definition]"}) {
    EXPECT_NE(p.find(block), std::string::npos) << block;
  }
  EXPECT_NE(p.find("subtly diverges"), std::string::npos);
  EXPECT_NE(p.find("\"reasoning\""), std::string::npos);
  for (const auto key : kNegativeKeys) EXPECT_NE(p.find("\"" + std::string(key) + "\""), std::string::npos);
  EXPECT_NE(p.find("Assume you are an expert in Virology,"), std::string::npos);
  EXPECT_NE(p.find("education level of Intermediate (High School and Undergraduate) to comprehend"),
            std::string::npos);
  EXPECT_NE(p.find("the length should be nearly the same as the \"positive_document\""), std::string::npos);
}

TEST(Render, FullHasOneValuePerPool) {
  const auto pools = pools_for("scifact");
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto spec = full_spec();
    spec.attributes = sample_attributes(pools, 5, i);
    const auto p = render_prompt(spec);
    EXPECT_EQ(count_present(p, pools.domain_name), 1u);
    EXPECT_EQ(count_present(p, pools.difficulty_level), 1u);
    EXPECT_EQ(count_present(p, pools.length_phrase), 1u);
  }
}

TEST(Render, ExampleIsEmbeddedAsJson) {
  const auto spec = full_spec();
  const auto p = render_prompt(spec);
  const auto example = render_example(spec.query, spec.positive);
  EXPECT_NE(p.find("example: " + example + "\n"), std::string::npos);
  const auto j = nlohmann::json::parse(example);
  EXPECT_EQ(j.at("user_query"), spec.query);
  EXPECT_EQ(j.at("positive_document"), spec.positive);
  EXPECT_LT(example.find("user_query"), example.find("positive_document"));
}

TEST(Render, SimpleOmitsReasoningAndAttributes) {
  PromptSpec s;
  s.template_id = TemplateId::Simple;
  s.query = "q";
  s.positive = "p";
  s.domain_name = "Finance";
  const auto p = render_prompt(s);
  EXPECT_EQ(p.find("reasoning"), std::string::npos);
  EXPECT_EQ(p.find("education level"), std::string::npos);
  EXPECT_EQ(p.find("Definition]"), std::string::npos);
  EXPECT_NE(p.find("Assume you are an expert in Finance,"), std::string::npos);
  EXPECT_NE(p.find("do not explain yourself"), std::string::npos);
  for (const auto key : kNegativeKeys) EXPECT_NE(p.find(std::string(key)), std::string::npos);
}

TEST(Render, Pure) { EXPECT_EQ(render_prompt(full_spec()), render_prompt(full_spec())); }

TEST(Render, MissingAttributesRejected) {
  auto s = full_spec();
  s.attributes.reset();
  EXPECT_THROW(render_prompt(s), ParameterError);
  s.template_id = TemplateId::Simple;
  EXPECT_THROW(render_prompt(s), ParameterError);
}

TEST(Templates, FromString) {
  EXPECT_EQ(template_from_string("full"), TemplateId::Full);
  EXPECT_EQ(template_from_string("simple"), TemplateId::Simple);
  EXPECT_THROW(template_from_string("fancy"), ParameterError);
}

}  // namespace
}  // namespace hardneg::llmgen
