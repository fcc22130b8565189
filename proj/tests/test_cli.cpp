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

#include <sstream>

#include <nlohmann/json.hpp>

#include "hardneg/cli.hpp"
#include "hardneg/common.hpp"
#include "hardneg/error.hpp"
#include "test_util.hpp"

namespace hardneg::cli {
namespace {

using hardneg::testing::TempDir;
using nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

/// Runs the CLI with a client factory that fails the test if called.
Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Environment env;
  env.out = &out;
  env.err = &err;
  env.http_client = [](const RunConfig&) -> std::unique_ptr<llmgen::ChatClient> {
    ADD_FAILURE() << "network client requested";
    throw GenerationError("network disabled in tests");
  };
  args.insert(args.begin(), "hardneg");
  const int code = run(args, env);
  return {code, out.str(), err.str()};
}

json read_json(const std::filesystem::path& p) { return json::parse(read_file(p)); }

TEST(Config, DefaultsValidate) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.real("train.tau"), 0.02);
  EXPECT_EQ(cfg.count("mix.n"), 4u);
  EXPECT_EQ(cfg.str("mix.strategy"), "hybrid");
  EXPECT_EQ(cfg.ks(), std::vector<std::size_t>{10});
}

TEST(Config, SetParsesByType) {
  RunConfig cfg;
  cfg.set("train.tau", "0.05");
  cfg.set("mix.n", "3");
  cfg.set("generate.mock", "true");
  cfg.set("eval.ks", "1,5,10");
  cfg.set("seed", "7");
  EXPECT_EQ(cfg.train().temperature, 0.05);
  EXPECT_EQ(cfg.mix().negatives_per_instance, 3u);
  EXPECT_TRUE(cfg.flag("generate.mock"));
  EXPECT_EQ(cfg.ks(), (std::vector<std::size_t>{1, 5, 10}));
  EXPECT_EQ(cfg.train().seed, 7u);
  EXPECT_EQ(cfg.mix().seed, 7u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  RunConfig cfg;
  EXPECT_THROW(cfg.set("train.speed", "1"), ParameterError);
  EXPECT_THROW(cfg.set("mix.n", "-1"), ParameterError);
  EXPECT_THROW(cfg.set("mix.n", "four"), ParameterError);
  EXPECT_THROW(cfg.set("generate.mock", "maybe"), ParameterError);
  EXPECT_THROW(cfg.merge(json{{"train.tau", "cold"}}), ParameterError);
  try {
    cfg.merge(json{{"nope", 1}});
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
  }
  cfg.merge(json{{"train.tau", 1}});
  EXPECT_EQ(cfg.real("train.tau"), 1.0);
}

TEST(Config, ValidateNamesKey) {
  RunConfig cfg;
  cfg.set("mix.ratio", "1.5");
  try {
    cfg.validate();
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("mix.ratio"), std::string::npos);
  }
  RunConfig other;
  other.set("mix.strategy", "blend");
  EXPECT_THROW(other.validate(), ParameterError);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ParameterError("x")), 1);
  EXPECT_EQ(exit_code_for(ParseError("x")), 2);
  EXPECT_EQ(exit_code_for(IntegrityError("x")), 2);
  EXPECT_EQ(exit_code_for(LookupError("x")), 2);
  EXPECT_EQ(exit_code_for(MixError("x")), 2);
  EXPECT_EQ(exit_code_for(GenerationError("x")), 3);
  EXPECT_EQ(exit_code_for(llmgen::TransportError("x")), 3);
  EXPECT_EQ(exit_code_for(SchemaError("k", "x")), 3);
  EXPECT_EQ(exit_code_for(NumericError("x")), 4);
  EXPECT_EQ(exit_code_for(DomainError("x")), 4);
}

TEST(Cli, UnknownSubcommandFails) {
  const auto r = run_cli({"frobnicate"});
  EXPECT_NE(r.code, 0);
}

TEST(Cli, NoSubcommandFails) { EXPECT_NE(run_cli({}).code, 0); }

TEST(Cli, HelpExitsZero) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(Cli, SimulateWritesReport) {
  TempDir dir;
  const auto r = run_cli({"simulate", "--trials", "100", "--workdir", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = read_json(dir / "theory-report.json");
  EXPECT_TRUE(report.is_object());
  const auto manifest = read_json(dir / "manifests/simulate.json");
  EXPECT_EQ(manifest.at("command"), "simulate");
  EXPECT_EQ(manifest.at("config").at("simulate.trials"), 100);
  EXPECT_EQ(manifest.at("outputs").at("theory-report.json"), sha256_file(dir / "theory-report.json"));
}

TEST(Cli, BadFlagValueIsUsageError) {
  TempDir dir;
  const auto r = run_cli({"simulate", "--trials", "many", "--workdir", dir.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("simulate.trials"), std::string::npos);
}

TEST(Cli, ConfigFileAndSetOverride) {
  TempDir dir;
  const auto cfg = dir.write("cfg.json", R"({"simulate.trials": 50, "simulate.inject_top_rank": 2})");
  const auto r = run_cli({"simulate", "--config", cfg.string(), "--set", "simulate.trials=60", "--workdir",
                          dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_json(dir / "manifests/simulate.json");
  EXPECT_EQ(m.at("config").at("simulate.trials"), 60);
  EXPECT_EQ(m.at("config").at("simulate.inject_top_rank"), 2);
}

TEST(Cli, MissingInputIsIntegrityExit) {
  TempDir dir;
  EXPECT_EQ(run_cli({"mine", "--workdir", dir.path().string()}).code, 2);
}

TEST(Cli, IngestMissingPathIsParameterExit) {
  TempDir dir;
  const auto r = run_cli({"ingest", "--corpus", (dir / "nope.jsonl").string(), "--queries", "x", "--qrels-train", "y",
                          "--workdir", dir.path().string()});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, IngestBeirFiles) {
  TempDir src, work;
  const auto corpus = src.write("corpus.jsonl", "{\"_id\":\"d1\",\"text\":\"alpha beta\"}\n{\"_id\":\"d2\",\"text\":\"gamma\"}\n");
  const auto queries = src.write("queries.jsonl", "{\"_id\":\"q1\",\"text\":\"alpha\"}\n");
  const auto qrels = src.write("train.tsv", "query-id\tcorpus-id\tscore\nq1\td1\t1\n");
  const auto r = run_cli({"ingest", "--corpus", corpus.string(), "--queries", queries.string(), "--qrels-train",
                          qrels.string(), "--workdir", work.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(work / "corpus.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(work / "qrels/train.tsv"));
  const auto bad = src.write("bad.tsv", "q1\td9\t1\n");
  EXPECT_EQ(run_cli({"ingest", "--corpus", corpus.string(), "--queries", queries.string(), "--qrels-train",
                     bad.string(), "--workdir", work.path().string()})
                .code,
            2);
}

TEST(Cli, StagesRunOfflineWithMock) {
  TempDir dir;
  const auto w = dir.path().string();
  const std::vector<std::string> small = {"--set", "synth.docs_per_topic=10", "--set", "synth.queries=12", "--set",
                                          "synth.train_queries=8", "--workdir", w};
  auto with = [&](std::vector<std::string> args) {
    args.insert(args.end(), small.begin(), small.end());
    return run_cli(args);
  };
  ASSERT_EQ(with({"ingest"}).code, 0);
  ASSERT_EQ(with({"mine"}).code, 0);
  // Without --mock the aborting factory would be hit.
  ASSERT_EQ(with({"generate", "--mock"}).code, 0);
  ASSERT_EQ(with({"generate", "--mock", "--template", "simple"}).code, 0);
  ASSERT_EQ(with({"mix", "--strategy", "direct"}).code, 0);
  ASSERT_EQ(with({"train", "--epochs", "2", "--set", "train.vocab_dim=4096"}).code, 0);
  ASSERT_EQ(with({"eval", "--k", "1", "--k", "10"}).code, 0);
  ASSERT_EQ(with({"audit"}).code, 0);
  const auto metrics = read_json(dir / "metrics.json");
  EXPECT_TRUE(metrics.at("macro").contains("ndcg@1"));
  EXPECT_TRUE(metrics.at("macro").contains("mrr@10"));
  const auto audit = read_json(dir / "audit.json");
  EXPECT_TRUE(audit.at("categories").contains("syn_neg"));
  EXPECT_TRUE(audit.at("categories").contains("simple_prompt_neg"));
  for (const auto* m : {"ingest", "mine", "generate", "mix", "train", "eval", "audit"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / (std::string("manifests/") + m + ".json"))) << m;
  }
  const auto retrieved = read_file(dir / "retrieved.jsonl");
  EXPECT_EQ(std::count(retrieved.begin(), retrieved.end(), '\n'), 8);
  EXPECT_FALSE(std::filesystem::is_empty(dir / "cache"));
}

TEST(Cli, LiveGenerationWithoutKeyFails) {
  TempDir dir;
  const auto w = dir.path().string();
  ASSERT_EQ(run_cli({"ingest", "--set", "synth.docs_per_topic=10", "--set", "synth.queries=12", "--set",
                     "synth.train_queries=8", "--workdir", w})
                .code,
            0);
  std::ostringstream out, err;
  Environment env;
  env.out = &out;
  env.err = &err;
  env.http_client = [](const RunConfig&) -> std::unique_ptr<llmgen::ChatClient> {
    throw ParameterError("no key");
  };
  EXPECT_EQ(run({"hardneg", "generate", "--workdir", w}, env), 1);
}

TEST(Cli, EndToEndDeterministic) {
  TempDir a, b;
  ASSERT_EQ(run_cli({"e2e", "--seed", "7", "--workdir", a.path().string()}).code, 0);
  ASSERT_EQ(run_cli({"e2e", "--seed", "7", "--workdir", b.path().string()}).code, 0);
  EXPECT_EQ(read_file(a / "metrics.json"), read_file(b / "metrics.json"));
  EXPECT_EQ(read_file(a / "manifests/e2e.json"), read_file(b / "manifests/e2e.json"));
  EXPECT_EQ(read_file(a / "model.bin"), read_file(b / "model.bin"));
}

}  // namespace
}  // namespace hardneg::cli
