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

#include "hardneg/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "hardneg/common.hpp"
#include "hardneg/error.hpp"
#include "hardneg/eval.hpp"
#include "hardneg/pipeline.hpp"
#include "hardneg/prompt.hpp"

namespace hardneg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- Config ----

const json& RunConfig::defaults() {
  static const json kDefaults = {
      {"seed", 0u},
      {"data.corpus", ""},
      {"data.queries", ""},
      {"data.qrels_train", ""},
      {"data.qrels_test", ""},
      {"synth.topics", 4u},
      {"synth.docs_per_topic", 50u},
      {"synth.queries", 60u},
      {"synth.vocab", 60u},
      {"synth.train_queries", 40u},
      {"retriever.k1", 1.2},
      {"retriever.b", 0.75},
      {"retriever.skip_top", 0u},
      {"generate.model", "gpt-4o"},
      {"generate.temperature", 0.7},
      {"generate.pools", "scifact"},
      {"generate.mock", false},
      {"generate.template", "full"},
      {"generate.max_retries", 3u},
      {"generate.max_in_flight", 4u},
      {"generate.endpoint", "https://api.openai.com"},
      {"generate.timeout_seconds", 120u},
      {"generate.dedup_threshold", 0.9},
      {"mix.strategy", "hybrid"},
      {"mix.n", 4u},
      {"mix.ratio", 0.7},
      {"train.tau", 0.02},
      {"train.lr", 0.1},
      {"train.epochs", 5u},
      {"train.batch", 4u},
      {"train.vocab_dim", 32768u},
      {"train.embed_dim", 64u},
      {"train.record_grad_epoch", 1u},
      {"train.reservoir_size", 100000u},
      {"eval.ks", json::array({10u})},
      {"eval.split", "test"},
      {"simulate.trials", 10000u},
      {"simulate.inject_top_rank", 5u},
      {"simulate.corpus_size", 1000u},
      {"simulate.pool_size", 4u},
      {"simulate.decay", 0.05},
      {"simulate.num_pos", 1u},
      {"simulate.worlds", 1000u},
      {"simulate.top_n", 3u},
      {"sweep.param", "tau"},
      {"sweep.values", "0.01,0.02,0.05"},
  };
  return kDefaults;
}

RunConfig::RunConfig() : values_(defaults()) {}

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ParameterError("config key '" + key + "': " + why);
}

std::size_t parse_count(const std::string& key, std::string_view text) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || text.empty()) bad_key(key, "expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  bad_key(key, "expected a number, got '" + text + "'");
}

bool same_kind(const json& def, const json& value) {
  if (def.is_boolean()) return value.is_boolean();
  if (def.is_number_float()) return value.is_number();
  if (def.is_number_unsigned()) return value.is_number_unsigned();
  if (def.is_string()) return value.is_string();
  if (def.is_array()) {
    if (!value.is_array()) return false;
    for (const auto& v : value) {
      if (!v.is_number_unsigned()) return false;
    }
    return true;
  }
  return false;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace

void RunConfig::merge(const json& flat) {
  if (!flat.is_object()) throw ParameterError("config must be a JSON object of dotted keys");
  for (const auto& [key, value] : flat.items()) {
    const auto& def = defaults();
    auto it = def.find(key);
    if (it == def.end()) bad_key(key, "unknown key");
    if (!same_kind(*it, value)) bad_key(key, "expected a value like " + it->dump() + ", got " + value.dump());
    values_[key] = it->is_number_float() ? json(value.get<double>()) : value;
  }
}

void RunConfig::merge_file(const fs::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  merge(j);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& def = defaults();
  auto it = def.find(key);
  if (it == def.end()) bad_key(key, "unknown key");
  if (it->is_boolean()) {
    if (value == "true" || value == "1") {
      values_[key] = true;
    } else if (value == "false" || value == "0") {
      values_[key] = false;
    } else {
      bad_key(key, "expected true or false, got '" + value + "'");
    }
  } else if (it->is_number_float()) {
    values_[key] = parse_real(key, value);
  } else if (it->is_number_unsigned()) {
    values_[key] = parse_count(key, value);
  } else if (it->is_array()) {
    json arr = json::array();
    for (const auto& part : split_commas(value)) arr.push_back(parse_count(key, part));
    values_[key] = arr;
  } else {
    values_[key] = value;
  }
}

const json& RunConfig::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) bad_key(key, "unknown key");
  return *it;
}

std::string RunConfig::str(const std::string& key) const { return at(key).get<std::string>(); }
double RunConfig::real(const std::string& key) const { return at(key).get<double>(); }
std::size_t RunConfig::count(const std::string& key) const { return at(key).get<std::size_t>(); }
bool RunConfig::flag(const std::string& key) const { return at(key).get<bool>(); }

void RunConfig::validate() const {
  auto positive = [&](const std::string& key) {
    if (!(real(key) > 0.0)) bad_key(key, "must be > 0");
  };
  auto at_least_one = [&](const std::string& key) {
    if (count(key) < 1) bad_key(key, "must be >= 1");
  };
  for (const auto* key : {"synth.topics", "synth.docs_per_topic", "synth.queries", "mix.n", "train.batch",
                          "train.vocab_dim", "train.embed_dim", "simulate.trials", "simulate.inject_top_rank",
                          "simulate.corpus_size", "simulate.pool_size", "generate.max_in_flight"}) {
    at_least_one(key);
  }
  positive("train.tau");
  positive("train.lr");
  if (real("retriever.k1") < 0.0) bad_key("retriever.k1", "must be >= 0");
  if (real("retriever.b") < 0.0 || real("retriever.b") > 1.0) bad_key("retriever.b", "must be in [0, 1]");
  if (real("mix.ratio") < 0.0 || real("mix.ratio") > 1.0) bad_key("mix.ratio", "must be in [0, 1]");
  if (real("generate.temperature") < 0.0) bad_key("generate.temperature", "must be >= 0");
  const double dedup = real("generate.dedup_threshold");
  if (!(dedup > 0.0 && dedup <= 1.0)) bad_key("generate.dedup_threshold", "must be in (0, 1]");
  const double decay = real("simulate.decay");
  if (!(decay > 0.0 && decay < 1.0)) bad_key("simulate.decay", "must be in (0, 1)");
  if (count("simulate.inject_top_rank") > count("simulate.corpus_size")) {
    bad_key("simulate.inject_top_rank", "must not exceed simulate.corpus_size");
  }
  if (count("synth.train_queries") > count("synth.queries")) bad_key("synth.train_queries", "exceeds synth.queries");
  const auto& ks = at("eval.ks");
  if (ks.empty()) bad_key("eval.ks", "needs at least one cutoff");
  for (const auto& k : ks) {
    if (k.get<std::size_t>() == 0) bad_key("eval.ks", "cutoffs must be >= 1");
  }
  if (str("eval.split") != "test" && str("eval.split") != "train") bad_key("eval.split", "expected test or train");
  if (str("sweep.param") != "tau" && str("sweep.param") != "R") bad_key("sweep.param", "expected tau or R");
  try {
    mixer::strategy_from_string(str("mix.strategy"));
  } catch (const ParameterError& e) {
    bad_key("mix.strategy", e.what());
  }
  try {
    llmgen::template_from_string(str("generate.template"));
  } catch (const ParameterError& e) {
    bad_key("generate.template", e.what());
  }
  try {
    llmgen::pools_for(str("generate.pools"));
  } catch (const ParameterError& e) {
    bad_key("generate.pools", e.what());
  }
}

data::SynthParams RunConfig::synth() const {
  return {count("synth.topics"), count("synth.docs_per_topic"), count("synth.queries"), count("synth.vocab")};
}

retriever::Bm25Params RunConfig::bm25() const { return {real("retriever.k1"), real("retriever.b")}; }

llmgen::GenerateConfig RunConfig::generate(const fs::path& workdir) const {
  llmgen::GenerateConfig g;
  g.model = str("generate.model");
  g.temperature = real("generate.temperature");
  g.max_retries = count("generate.max_retries");
  g.cache_dir = workdir / files::kCache;
  g.template_id = llmgen::template_from_string(str("generate.template"));
  g.seed = seed();
  g.max_in_flight = count("generate.max_in_flight");
  return g;
}

mixer::MixConfig RunConfig::mix() const {
  mixer::MixConfig m;
  m.strategy = mixer::strategy_from_string(str("mix.strategy"));
  m.negatives_per_instance = count("mix.n");
  m.ratio = real("mix.ratio");
  m.seed = seed();
  m.skip_top = count("retriever.skip_top");
  return m;
}

trainer::TrainConfig RunConfig::train() const {
  trainer::TrainConfig t;
  t.temperature = real("train.tau");
  t.learning_rate = real("train.lr");
  t.epochs = count("train.epochs");
  t.batch_size = count("train.batch");
  t.seed = seed();
  t.record_grad_epoch = count("train.record_grad_epoch");
  t.vocab_dim = count("train.vocab_dim");
  t.embed_dim = count("train.embed_dim");
  t.reservoir_size = count("train.reservoir_size");
  return t;
}

std::vector<std::size_t> RunConfig::ks() const { return at("eval.ks").get<std::vector<std::size_t>>(); }

theory::SimulationConfig RunConfig::simulation() const {
  theory::SimulationConfig s;
  s.corpus_size = count("simulate.corpus_size");
  s.pool_size = count("simulate.pool_size");
  s.decay = real("simulate.decay");
  s.num_pos = count("simulate.num_pos");
  s.inject_top_rank = count("simulate.inject_top_rank");
  s.trials = count("simulate.trials");
  s.seed = seed();
  return s;
}

std::unique_ptr<llmgen::ChatClient> default_http_client(const RunConfig& cfg) {
  const char* key = std::getenv(std::string(llmgen::kApiKeyEnv).c_str());
  if (!key || !*key) {
    throw ParameterError("generation needs an API key in " + std::string(llmgen::kApiKeyEnv) +
                         " (or set generate.mock)");
  }
  return std::make_unique<llmgen::HttpChatClient>(cfg.str("generate.endpoint"), key,
                                                  static_cast<int>(cfg.count("generate.timeout_seconds")));
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParameterError*>(&e)) return 1;
  if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 4;
  if (dynamic_cast<const GenerationError*>(&e) || dynamic_cast<const SchemaError*>(&e)) return 3;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const IntegrityError*>(&e) ||
      dynamic_cast<const LookupError*>(&e) || dynamic_cast<const MixError*>(&e)) {
    return 2;
  }
  return 1;
}

// ---- Work directory ----

namespace {

/// Reads and writes files under one root, recording the sha256 of each for
/// the run manifest.
class Workspace {
 public:
  Workspace(fs::path root, const RunConfig& cfg, std::string command)
      : root_(std::move(root)), cfg_(cfg), command_(std::move(command)) {}

  fs::path path(std::string_view rel) const { return root_ / rel; }
  bool exists(std::string_view rel) const { return fs::exists(path(rel)); }

  std::string read(std::string_view rel) {
    std::string contents = read_file(path(rel));
    inputs_[std::string(rel)] = sha256_hex(contents);
    return contents;
  }

  std::string read_external(const fs::path& p) {
    std::string contents = read_file(p);
    inputs_[p.string()] = sha256_hex(contents);
    return contents;
  }

  void write(std::string_view rel, std::string_view contents) {
    const auto p = path(rel);
    fs::create_directories(p.parent_path());
    write_file_atomic(p, contents);
    outputs_[std::string(rel)] = sha256_hex(contents);
    log::info("wrote", {{"file", std::string(rel)}, {"bytes", std::to_string(contents.size())}});
  }

  void write_json(std::string_view rel, const json& j) { write(rel, j.dump(2) + "\n"); }

  void note(const std::string& key, json value) { notes_[key] = std::move(value); }

  void write_manifest() {
    json m = {{"command", command_},
              {"version", std::string(kVersion)},
              {"config", cfg_.values()},
              {"inputs", inputs_},
              {"outputs", outputs_}};
    if (!notes_.empty()) m["notes"] = notes_;
    const auto rel = std::string(files::kManifests) + "/" + command_ + ".json";
    const auto p = path(rel);
    fs::create_directories(p.parent_path());
    write_file_atomic(p, m.dump(2) + "\n");
  }

 private:
  fs::path root_;
  const RunConfig& cfg_;
  std::string command_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  json notes_ = json::object();
};

struct Loaded {
  data::Corpus corpus;
  data::QuerySet queries;
  data::Judgments train;
};

Loaded load_training(Workspace& ws) {
  Loaded l;
  l.corpus = data::parse_corpus(ws.read(files::kCorpus));
  l.queries = data::parse_queries(ws.read(files::kQueries));
  l.train = data::parse_qrels(ws.read(files::kQrelsTrain));
  data::validate(l.corpus, l.queries, l.train);
  return l;
}

std::optional<data::SynthVocabulary> load_vocabulary(Workspace& ws) {
  if (!ws.exists(files::kSynth)) return std::nullopt;
  const auto j = json::parse(ws.read(files::kSynth));
  return data::SynthVocabulary::build(j.at("topics").get<std::size_t>(), j.at("vocab").get<std::size_t>());
}

// ---- Stages ----

void do_ingest(Workspace& ws, const RunConfig& cfg, bool force_synthetic) {
  const bool external = !force_synthetic && !cfg.str("data.corpus").empty();
  if (external) {
    for (const auto* key : {"data.corpus", "data.queries", "data.qrels_train"}) {
      const auto p = cfg.str(key);
      if (p.empty()) bad_key(key, "required when data.corpus is set");
      if (!fs::exists(p)) bad_key(key, "path does not exist: " + p);
    }
    const auto test_path = cfg.str("data.qrels_test");
    if (!test_path.empty() && !fs::exists(test_path)) bad_key("data.qrels_test", "path does not exist: " + test_path);

    const auto corpus = data::parse_corpus(ws.read_external(cfg.str("data.corpus")));
    const auto queries = data::parse_queries(ws.read_external(cfg.str("data.queries")));
    const auto train = data::parse_qrels(ws.read_external(cfg.str("data.qrels_train")));
    data::validate(corpus, queries, train);
    ws.write(files::kCorpus, data::serialize_corpus(corpus));
    ws.write(files::kQueries, data::serialize_queries(queries));
    ws.write(files::kQrelsTrain, data::serialize_qrels(train));
    if (!test_path.empty()) {
      const auto test = data::parse_qrels(ws.read_external(test_path));
      data::validate(corpus, queries, test);
      ws.write(files::kQrelsTest, data::serialize_qrels(test));
    }
    log::info("ingested", {{"docs", std::to_string(corpus.size())}, {"queries", std::to_string(queries.size())}});
    return;
  }
  const auto params = cfg.synth();
  const auto ds = data::synth_dataset(cfg.seed(), params);
  const auto [train_ids, test_ids] = data::split_queries(ds.judgments, cfg.count("synth.train_queries"), cfg.seed());
  ws.write(files::kCorpus, data::serialize_corpus(ds.corpus));
  ws.write(files::kQueries, data::serialize_queries(ds.queries));
  ws.write(files::kQrelsTrain, data::serialize_qrels(ds.judgments.subset(train_ids)));
  ws.write(files::kQrelsTest, data::serialize_qrels(ds.judgments.subset(test_ids)));
  ws.write_json(files::kSynth, {{"seed", cfg.seed()}, {"topics", params.topics}, {"docs_per_topic", params.docs_per_topic},
                                {"queries", params.queries}, {"vocab", params.vocab}});
  log::info("synthesized", {{"docs", std::to_string(ds.corpus.size())},
                            {"queries", std::to_string(ds.queries.size())},
                            {"train_queries", std::to_string(train_ids.size())}});
}

void do_mine(Workspace& ws, const RunConfig& cfg) {
  const auto l = load_training(ws);
  const auto index = retriever::Bm25Index::build(l.corpus, cfg.bm25());
  std::string out;
  for (const auto& qid : l.train.query_ids()) {
    const auto* q = l.queries.find(qid);
    if (!q) continue;
    json ids = json::array();
    for (const auto& n : retriever::mine_negatives(index, *q, l.train, cfg.count("mix.n"), cfg.count("retriever.skip_top"))) {
      ids.push_back(*n.doc_id);
    }
    out += json{{"query_id", qid}, {"negatives", ids}}.dump() + "\n";
  }
  ws.write(files::kRetrieved, out);
}

void do_generate(Workspace& ws, const RunConfig& cfg, const Environment& env) {
  const auto l = load_training(ws);
  const auto pairs = data::make_pairs(l.queries, l.train, l.corpus);
  const auto gen_cfg = cfg.generate(ws.path(""));
  std::unique_ptr<llmgen::ChatClient> client;
  if (cfg.flag("generate.mock")) {
    client = llmgen::mock_client(cfg.seed(), load_vocabulary(ws));
  } else {
    client = env.http_client(cfg);
  }
  llmgen::CostMeter meter;
  const auto records = llmgen::generate_all(*client, pairs, llmgen::pools_for(cfg.str("generate.pools")), gen_cfg, &meter);
  const auto kept = llmgen::dedup(records, cfg.real("generate.dedup_threshold"));
  const auto cost = meter.snapshot();
  log::info("generation_cost", {{"requests", std::to_string(cost.requests)},
                                {"cache_hits", std::to_string(cost.cache_hits)},
                                {"retries", std::to_string(cost.retries)},
                                {"prompt_tokens", std::to_string(cost.prompt_tokens)},
                                {"completion_tokens", std::to_string(cost.completion_tokens)}});
  ws.note("generation_cost." + cfg.str("generate.template"), cost.to_json());
  const auto rel = gen_cfg.template_id == llmgen::TemplateId::Full ? files::kGenerations : files::kSimpleGenerations;
  ws.write(rel, llmgen::serialize_generations(kept));
}

void do_mix(Workspace& ws, const RunConfig& cfg) {
  const auto l = load_training(ws);
  const auto pairs = data::make_pairs(l.queries, l.train, l.corpus);
  const auto index = retriever::Bm25Index::build(l.corpus, cfg.bm25());
  const auto mix_cfg = cfg.mix();
  std::vector<llmgen::GenerationRecord> records;
  const bool needs_generations = mix_cfg.strategy != mixer::Strategy::PureRetrieved &&
                                 mix_cfg.strategy != mixer::Strategy::Random && mix_cfg.ratio > 0.0;
  if (needs_generations) records = llmgen::parse_generations(ws.read(files::kGenerations));
  const mixer::GenerationLookup lookup(records);
  const auto instances = mixer::mix(pairs, {index, l.train, lookup}, mix_cfg);
  data::validate_instances(instances, l.train, mix_cfg.negatives_per_instance);
  ws.write(files::kInstances, data::serialize_instances(instances));
  ws.write_json(files::kMixManifest, mixer::mix_manifest(pairs, instances, mix_cfg));
}

void do_train(Workspace& ws, const RunConfig& cfg) {
  const auto corpus = data::parse_corpus(ws.read(files::kCorpus));
  const auto queries = data::parse_queries(ws.read(files::kQueries));
  const auto instances = data::parse_instances(ws.read(files::kInstances), corpus, queries);
  const auto train_cfg = cfg.train();
  const auto result = trainer::train(instances, train_cfg);
  trainer::save_checkpoint(ws.path(files::kModel), result.params);
  ws.write(files::kModel, read_file(ws.path(files::kModel)));
  ws.write_json(files::kStats, trainer::stats_json(result.stats, train_cfg));
  log::info("trained", {{"instances", std::to_string(instances.size())},
                        {"final_loss", format_double(result.stats.epoch_losses.empty() ? 0.0 : result.stats.epoch_losses.back())},
                        {"grad_variance", format_double(result.stats.grad_variance)}});
}

trainer::EncoderParams read_model(Workspace& ws) {
  ws.read(files::kModel);
  return trainer::load_checkpoint(ws.path(files::kModel));
}

void do_eval(Workspace& ws, const RunConfig& cfg) {
  const auto params = read_model(ws);
  const auto corpus = data::parse_corpus(ws.read(files::kCorpus));
  const auto queries = data::parse_queries(ws.read(files::kQueries));
  const bool test = cfg.str("eval.split") == "test";
  const auto judgments = data::parse_qrels(ws.read(test ? files::kQrelsTest : files::kQrelsTrain));
  data::validate(corpus, queries, judgments);
  data::QuerySet judged;
  for (const auto& q : queries) {
    if (!judgments.relevant(q.id).empty()) judged.add(q);
  }
  const auto metrics = eval::evaluate(params, corpus, judged, judgments, cfg.ks());
  auto j = eval::to_json(metrics);
  j["split"] = cfg.str("eval.split");
  ws.write_json(files::kMetrics, j);
  for (const auto& [name, v] : metrics.macro) log::info("metric", {{"name", name}, {"value", format_double(v)}});
}

void do_audit(Workspace& ws, const RunConfig& cfg) {
  const auto params = read_model(ws);
  const auto l = load_training(ws);
  const auto pairs = data::make_pairs(l.queries, l.train, l.corpus);
  const auto index = retriever::Bm25Index::build(l.corpus, cfg.bm25());
  const auto full = llmgen::parse_generations(ws.read(files::kGenerations));
  std::vector<llmgen::GenerationRecord> simple;
  if (ws.exists(files::kSimpleGenerations)) simple = llmgen::parse_generations(ws.read(files::kSimpleGenerations));
  const auto samples = pipeline::audit_samples(pairs, index, l.train, full, simple, cfg.count("mix.n"),
                                               cfg.count("retriever.skip_top"));
  auto j = eval::to_json(eval::similarity_audit(params, samples));
  j["encoder"] = files::kModel;
  ws.write_json(files::kAudit, j);
}

void do_simulate(Workspace& ws, const RunConfig& cfg) {
  const auto identity = theory::check_random_worlds(cfg.count("simulate.worlds"), cfg.count("simulate.top_n"), cfg.seed());
  const auto sim = theory::simulate_comparison(cfg.simulation());
  ws.write_json(files::kTheory, theory::report_json(identity, sim));
  log::info("simulated", {{"trials", std::to_string(sim.config.trials)},
                          {"mean_inf_mrr_baseline", format_double(sim.mean_inf_mrr_baseline)},
                          {"mean_inf_mrr_augmented", format_double(sim.mean_inf_mrr_augmented)},
                          {"violations", std::to_string(sim.per_trial_violations)},
                          {"identity_failed", std::to_string(identity.failed)}});
}

void do_sweep(Workspace& ws, const RunConfig& cfg) {
  pipeline::ExperimentConfig ex;
  ex.seed = cfg.seed();
  ex.synth = cfg.synth();
  ex.train_queries = cfg.count("synth.train_queries");
  ex.pools_id = cfg.str("generate.pools");
  ex.dedup_threshold = cfg.real("generate.dedup_threshold");
  ex.mix = cfg.mix();
  ex.train = cfg.train();
  ex.ks = {10};
  const auto param = cfg.str("sweep.param");
  const auto values = split_commas(cfg.str("sweep.values"));
  if (values.empty()) bad_key("sweep.values", "needs at least one value");
  const auto prep = pipeline::prepare(ex);
  std::string csv = "param,value,ndcg@10\n";
  for (const auto& text : values) {
    const double v = parse_real("sweep.values", text);
    auto run_cfg = ex;
    if (param == "tau") {
      if (!(v > 0.0)) bad_key("sweep.values", "tau values must be > 0");
      run_cfg.train.temperature = v;
    } else {
      if (v < 0.0 || v > 1.0) bad_key("sweep.values", "R values must be in [0, 1]");
      run_cfg.mix.ratio = v;
    }
    const auto run = pipeline::run_strategy(*prep, run_cfg, ex.mix.strategy);
    csv += param + "," + format_double(v) + "," + format_double(run.metrics.at("ndcg@10")) + "\n";
  }
  ws.write(files::kSweep, csv);
}

void do_e2e(Workspace& ws, RunConfig cfg, const Environment& env) {
  cfg.set("generate.mock", "true");
  do_ingest(ws, cfg, true);
  do_mine(ws, cfg);
  cfg.set("generate.template", "full");
  do_generate(ws, cfg, env);
  cfg.set("generate.template", "simple");
  do_generate(ws, cfg, env);
  cfg.set("generate.template", "full");
  do_mix(ws, cfg);
  do_train(ws, cfg);
  do_eval(ws, cfg);
  do_audit(ws, cfg);
}

class SinkGuard {
 public:
  explicit SinkGuard(std::ostream& err)
      : previous_(log::set_sink([&err](log::Level, const std::string& line) { err << line << '\n'; })) {}
  ~SinkGuard() { log::set_sink(std::move(previous_)); }
  SinkGuard(const SinkGuard&) = delete;
  SinkGuard& operator=(const SinkGuard&) = delete;

 private:
  log::Sink previous_;
};

}  // namespace

int run(const std::vector<std::string>& args, const Environment& env) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), env);
}

int run(int argc, const char* const* argv, const Environment& env) {
  std::ostream& out = env.out ? *env.out : std::cout;
  std::ostream& err = env.err ? *env.err : std::cerr;

  CLI::App app{"Hard-negative mining, synthesis and dual-encoder training", "hardneg"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  std::string workdir = ".";
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> overrides;

  auto option = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(name, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
                                          help);
  };
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-w,--workdir", workdir, "work directory holding every artifact")->capture_default_str();
    sub->add_option("-c,--config", config_path, "JSON file of dotted config keys");
    sub->add_option("--set", sets, "override one config key (key=value), repeatable");
    option(sub, "--seed", "seed", "master seed");
    return sub;
  };

  auto* ingest = add("ingest", "load BEIR files or synthesize a dataset into the work directory");
  option(ingest, "--corpus", "data.corpus", "corpus.jsonl to load");
  option(ingest, "--queries", "data.queries", "queries.jsonl to load");
  option(ingest, "--qrels-train", "data.qrels_train", "training qrels TSV");
  option(ingest, "--qrels-test", "data.qrels_test", "test qrels TSV");

  auto* mine = add("mine", "write BM25 hard negatives for the training queries");
  option(mine, "--n", "mix.n", "negatives per query");
  option(mine, "--skip-top", "retriever.skip_top", "ranks to skip before mining");

  auto* generate = add("generate", "generate synthetic negatives for every training pair");
  option(generate, "--model", "generate.model", "chat model name");
  option(generate, "--temperature", "generate.temperature", "sampling temperature");
  option(generate, "--template", "generate.template", "prompt template: full or simple");
  option(generate, "--pools", "generate.pools", "attribute pools: scifact, fiqa, quora, hotpotqa, msmarco");
  option(generate, "--endpoint", "generate.endpoint", "chat completions base URL");
  generate->add_flag_callback("--mock", [&] { overrides.emplace_back("generate.mock", "true"); },
                              "use the offline mock client");

  auto* mix = add("mix", "assemble training instances");
  option(mix, "--strategy", "mix.strategy", "hybrid, direct, pure-synthetic, pure-retrieved or random");
  option(mix, "--n", "mix.n", "negatives per instance");
  option(mix, "--ratio", "mix.ratio", "synthetic negatives per positive");

  auto* train = add("train", "train the dual encoder");
  option(train, "--tau", "train.tau", "InfoNCE temperature");
  option(train, "--lr", "train.lr", "learning rate");
  option(train, "--epochs", "train.epochs", "epochs");
  option(train, "--batch", "train.batch", "batch size");

  auto* evaluate = add("eval", "evaluate the trained encoder");
  std::vector<std::string> ks;
  evaluate->add_option("--k", ks, "metric cutoff, repeatable");
  option(evaluate, "--split", "eval.split", "test or train");

  auto* audit = add("audit", "similarity audit of negatives under the trained encoder");

  auto* simulate = add("simulate", "rank-theory checks and the synthetic-vs-retrieved simulation");
  option(simulate, "--trials", "simulate.trials", "Monte-Carlo trials");
  option(simulate, "--inject-top-rank", "simulate.inject_top_rank", "best rank a synthetic negative may take");

  auto* sweep = add("sweep", "sweep tau or R on the synthetic experiment, writing NDCG@10 per setting");
  option(sweep, "--param", "sweep.param", "tau or R");
  option(sweep, "--values", "sweep.values", "comma-separated values");
  option(sweep, "--strategy", "mix.strategy", "mixing strategy");

  auto* e2e = add("e2e", "synthesize, mine, mock-generate, mix, train and evaluate in one go");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  SinkGuard sink(err);
  CLI::App* chosen = app.get_subcommands().front();
  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.merge_file(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    if (!ks.empty()) {
      std::string joined;
      for (const auto& k : ks) joined += (joined.empty() ? "" : ",") + k;
      cfg.set("eval.ks", joined);
    }
    cfg.validate();

    const std::string name = chosen->get_name();
    fs::create_directories(workdir);
    Workspace ws(workdir, cfg, name);
    log::info("start", {{"command", name}, {"workdir", workdir}});
    if (chosen == ingest) {
      do_ingest(ws, cfg, false);
    } else if (chosen == mine) {
      do_mine(ws, cfg);
    } else if (chosen == generate) {
      do_generate(ws, cfg, env);
    } else if (chosen == mix) {
      do_mix(ws, cfg);
    } else if (chosen == train) {
      do_train(ws, cfg);
    } else if (chosen == evaluate) {
      do_eval(ws, cfg);
    } else if (chosen == audit) {
      do_audit(ws, cfg);
    } else if (chosen == simulate) {
      do_simulate(ws, cfg);
    } else if (chosen == sweep) {
      do_sweep(ws, cfg);
    } else if (chosen == e2e) {
      do_e2e(ws, cfg, env);
    }
    ws.write_manifest();
    log::info("done", {{"command", name}});
    return 0;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    log::emit(log::Level::Error, "failed", {{"command", chosen->get_name()}, {"exit", std::to_string(code)}, {"error", e.what()}});
    return code;
  }
}

}  // namespace hardneg::cli
