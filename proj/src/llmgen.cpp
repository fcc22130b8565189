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

#include "hardneg/llmgen.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "hardneg/common.hpp"

namespace hardneg::llmgen {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view strip_fences(std::string_view raw) {
  std::string_view s = trim(raw);
  const auto open = s.find("```");
  if (open == std::string_view::npos) return s;
  auto body_start = s.find('\n', open);
  if (body_start == std::string_view::npos) return s;
  ++body_start;
  auto close = s.find("```", body_start);
  if (close == std::string_view::npos) close = s.size();
  return trim(s.substr(body_start, close - body_start));
}

std::string required_key(const json& obj, std::string_view key, std::string_view raw) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    throw SchemaError(std::string(key), "generation is missing key '" + std::string(key) + "'", std::string(raw));
  }
  if (!it->is_string()) {
    throw SchemaError(std::string(key), "generation key '" + std::string(key) + "' is not a string", std::string(raw));
  }
  return it->get<std::string>();
}

}  // namespace

ParsedGeneration parse_generation(std::string_view raw, TemplateId mode) {
  const std::string_view body = strip_fences(raw);
  json obj;
  try {
    obj = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("generation is not valid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError("generation is not a JSON object");

  ParsedGeneration out;
  std::set<std::string> expected;
  if (mode == TemplateId::Full) {
    out.reasoning = required_key(obj, kReasoningKey, raw);
    expected.insert(std::string(kReasoningKey));
  }
  for (const auto key : kNegativeKeys) {
    auto text = required_key(obj, key, raw);
    if (trim(text).empty()) {
      throw SchemaError(std::string(key), "generation key '" + std::string(key) + "' is empty", std::string(raw));
    }
    out.negatives.push_back(std::move(text));
    expected.insert(std::string(key));
  }
  for (const auto& [key, value] : obj.items()) {
    if (expected.count(key)) continue;
    if (mode == TemplateId::Simple && key == kReasoningKey && value.is_string()) {
      out.reasoning = value.get<std::string>();
      continue;
    }
    out.warnings.push_back("unexpected key '" + key + "'");
  }
  for (const auto& w : out.warnings) log::warn("generation_extra_key", {{"detail", w}});
  return out;
}

std::string serialize_generation(const ParsedGeneration& gen, TemplateId mode) {
  nlohmann::ordered_json j;
  if (mode == TemplateId::Full) j[std::string(kReasoningKey)] = gen.reasoning;
  for (std::size_t i = 0; i < gen.negatives.size() && i < 3; ++i) j[std::string(kNegativeKeys[i])] = gen.negatives[i];
  return j.dump();
}

// ---- Records ----

json to_json(const GenerationRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  j["query_id"] = r.query_id;
  j["positive_id"] = r.positive_id;
  j["query"] = r.query;
  j["positive"] = r.positive;
  j["template"] = std::string(to_string(r.template_id));
  j["reasoning"] = r.reasoning;
  j["negatives"] = r.negatives;
  j["attributes"] = {{"domain_name", r.attributes.domain_name},
                     {"difficulty_level", r.attributes.difficulty_level},
                     {"length_phrase", r.attributes.length_phrase}};
  j["model"] = r.model;
  j["temperature"] = r.temperature;
  j["prompt_tokens"] = r.prompt_tokens;
  j["completion_tokens"] = r.completion_tokens;
  j["retries_used"] = r.retries_used;
  return j;
}

GenerationRecord record_from_json(const json& j) {
  try {
    GenerationRecord r;
    r.id = j.at("id").get<std::string>();
    r.query_id = j.at("query_id").get<std::string>();
    r.positive_id = j.at("positive_id").get<std::string>();
    r.query = j.value("query", "");
    r.positive = j.value("positive", "");
    r.template_id = template_from_string(j.value("template", "full"));
    r.reasoning = j.value("reasoning", "");
    r.negatives = j.at("negatives").get<std::vector<std::string>>();
    const auto& a = j.at("attributes");
    r.attributes = {a.value("domain_name", ""), a.value("difficulty_level", ""), a.value("length_phrase", "")};
    r.model = j.value("model", "");
    r.temperature = j.value("temperature", 0.7);
    r.prompt_tokens = j.value("prompt_tokens", std::size_t{0});
    r.completion_tokens = j.value("completion_tokens", std::size_t{0});
    r.retries_used = j.value("retries_used", std::size_t{0});
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed generation record: ") + e.what());
  }
}

std::string serialize_generations(const std::vector<GenerationRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<GenerationRecord> parse_generations(std::string_view contents) {
  std::vector<GenerationRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    auto line = trim(contents.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

// ---- Cost ----

json CostCounters::to_json() const {
  return {{"requests", requests},
          {"cache_hits", cache_hits},
          {"retries", retries},
          {"prompt_tokens", prompt_tokens},
          {"completion_tokens", completion_tokens}};
}

void CostMeter::add(const CostCounters& d) {
  std::lock_guard lock(mu_);
  totals_.requests += d.requests;
  totals_.cache_hits += d.cache_hits;
  totals_.retries += d.retries;
  totals_.prompt_tokens += d.prompt_tokens;
  totals_.completion_tokens += d.completion_tokens;
}

CostCounters CostMeter::snapshot() const {
  std::lock_guard lock(mu_);
  return totals_;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

// ---- Generation ----

std::string cache_key(std::string_view model, double temperature, std::string_view prompt) {
  std::string material(model);
  material += '\n';
  material += format_double(temperature);
  material += '\n';
  material += prompt;
  return sha256_hex(material);
}

PromptSpec prompt_spec_for(const data::Pair& pair, const AttributePools& pools, const GenerateConfig& config,
                           std::size_t instance_index) {
  PromptSpec spec;
  spec.template_id = config.template_id;
  spec.query = pair.first.text;
  spec.positive = pair.second.full_text();
  spec.attributes = sample_attributes(pools, config.seed, instance_index);
  return spec;
}

namespace {

std::optional<GenerationRecord> read_cache(const std::filesystem::path& file, TemplateId mode) {
  std::error_code ec;
  if (!std::filesystem::exists(file, ec)) return std::nullopt;
  try {
    const json entry = json::parse(read_file(file));
    // Re-validate the stored reply so a hand-edited entry cannot slip through.
    parse_generation(entry.at("raw").get<std::string>(), mode);
    return record_from_json(entry.at("record"));
  } catch (const std::exception& e) {
    log::warn("cache_entry_unreadable", {{"path", file.string()}, {"error", e.what()}});
    return std::nullopt;
  }
}

}  // namespace

GenerationRecord generate(ChatClient& client, const data::Pair& pair, const AttributePools& pools,
                          const GenerateConfig& config, std::size_t instance_index, CostMeter* meter) {
  const PromptSpec spec = prompt_spec_for(pair, pools, config, instance_index);
  const std::string prompt = render_prompt(spec);
  const std::string key = cache_key(config.model, config.temperature, prompt);

  std::optional<std::filesystem::path> cache_file;
  if (config.cache_dir) {
    cache_file = *config.cache_dir / (key + ".json");
    if (auto hit = read_cache(*cache_file, config.template_id)) {
      if (meter) meter->add(CostCounters{0, 1, 0, 0, 0});
      return *hit;
    }
  }

  CostCounters cost;
  std::string last_raw;
  std::string last_error;
  bool last_was_schema = false;
  std::string last_schema_key;
  const ChatRequest request{config.model, prompt, config.temperature};

  for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) ++cost.retries;
    ChatResponse response;
    ++cost.requests;
    try {
      response = client.complete(request);
    } catch (const TransportError& e) {
      cost.prompt_tokens += estimate_tokens(prompt);
      last_error = e.what();
      last_was_schema = false;
      log::warn("generation_transport_error", {{"attempt", std::to_string(attempt)}, {"error", e.what()}});
      continue;
    }
    cost.prompt_tokens += response.prompt_tokens.value_or(estimate_tokens(prompt));
    cost.completion_tokens += response.completion_tokens.value_or(estimate_tokens(response.content));

    try {
      auto parsed = parse_generation(response.content, config.template_id);
      for (std::size_t i = 0; i < parsed.negatives.size(); ++i) {
        if (parsed.negatives[i] == spec.positive) {
          throw SchemaError(std::string(kNegativeKeys[i]), "negative repeats the positive document verbatim",
                            response.content);
        }
      }
      GenerationRecord rec;
      rec.id = sha256_hex(prompt);
      rec.query_id = pair.first.id;
      rec.positive_id = pair.second.id;
      rec.query = spec.query;
      rec.positive = spec.positive;
      rec.template_id = config.template_id;
      rec.reasoning = std::move(parsed.reasoning);
      rec.negatives = std::move(parsed.negatives);
      rec.attributes = *spec.attributes;
      rec.model = config.model;
      rec.temperature = config.temperature;
      rec.prompt_tokens = cost.prompt_tokens;
      rec.completion_tokens = cost.completion_tokens;
      rec.retries_used = attempt;
      if (cache_file) {
        json entry = {{"key", key}, {"raw", response.content}, {"record", to_json(rec)}};
        write_file_atomic(*cache_file, entry.dump());
      }
      if (meter) meter->add(cost);
      return rec;
    } catch (const SchemaError& e) {
      last_was_schema = true;
      last_schema_key = e.key();
      last_error = e.what();
    } catch (const ParseError& e) {
      last_was_schema = true;
      last_schema_key.clear();
      last_error = e.what();
    }
    last_raw = response.content;
    log::warn("generation_malformed", {{"attempt", std::to_string(attempt)}, {"error", last_error}});
  }

  if (meter) meter->add(cost);
  const std::string where = " for (" + pair.first.id + ", " + pair.second.id + ") after " +
                            std::to_string(config.max_retries + 1) + " attempts";
  if (last_was_schema) throw SchemaError(last_schema_key, last_error + where, last_raw);
  throw GenerationError(last_error + where);
}

std::vector<GenerationRecord> generate_all(ChatClient& client, const std::vector<data::Pair>& pairs,
                                           const AttributePools& pools, const GenerateConfig& config,
                                           CostMeter* meter) {
  std::vector<std::optional<GenerationRecord>> slots(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      try {
        slots[i] = generate(client, pairs[i], pools, config, i, meter);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(config.max_in_flight, pairs.size()));
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < n_workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<GenerationRecord> out;
  out.reserve(pairs.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---- Dedup ----

namespace {

std::set<std::string> shingles(std::string_view text) {
  const auto tokens = tokenize(text);
  std::set<std::string> out;
  if (tokens.size() < 3) {
    std::string whole;
    for (const auto& t : tokens) whole += t + ' ';
    out.insert(whole);
    return out;
  }
  for (std::size_t i = 0; i + 2 < tokens.size(); ++i) out.insert(tokens[i] + ' ' + tokens[i + 1] + ' ' + tokens[i + 2]);
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& s : a) inter += b.count(s);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double shingle_jaccard(std::string_view a, std::string_view b) { return jaccard(shingles(a), shingles(b)); }

std::vector<GenerationRecord> dedup(const std::vector<GenerationRecord>& records, double jaccard_threshold) {
  if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0)) {
    throw ParameterError("dedup: jaccard threshold must be in (0, 1]");
  }
  std::vector<GenerationRecord> out;
  for (const auto& rec : records) {
    const auto positive = shingles(rec.positive);
    std::vector<std::set<std::string>> kept_shingles;
    GenerationRecord filtered = rec;
    filtered.negatives.clear();
    for (const auto& neg : rec.negatives) {
      auto sh = shingles(neg);
      bool drop = !rec.positive.empty() && jaccard(sh, positive) >= jaccard_threshold;
      for (std::size_t i = 0; !drop && i < kept_shingles.size(); ++i) {
        drop = jaccard(sh, kept_shingles[i]) >= jaccard_threshold;
      }
      if (drop) continue;
      kept_shingles.push_back(std::move(sh));
      filtered.negatives.push_back(neg);
    }
    if (filtered.negatives.empty()) {
      log::warn("dedup_dropped_record", {{"id", rec.id}, {"query_id", rec.query_id}, {"positive_id", rec.positive_id}});
      continue;
    }
    out.push_back(std::move(filtered));
  }
  return out;
}

}  // namespace hardneg::llmgen
