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

// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <vector>

#include "hardneg/kernels.hpp"
#include "hardneg/rng.hpp"
#include "hardneg/theory.hpp"
#include "hardneg/trainer.hpp"

namespace {

using namespace hardneg;

struct ProjectInputs {
  trainer::EncoderParams params;
  std::vector<kernels::SparseVector> docs;
  std::vector<double> out;

  explicit ProjectInputs(std::size_t n) : params(trainer::init_params(1u << 15, 64, 1)) {
    Rng rng(2);
    const char* words[] = {"cell", "gene", "virus", "dose", "trial", "heart", "lung", "drug", "risk", "cohort"};
    for (std::size_t i = 0; i < n; ++i) {
      std::string text;
      for (int j = 0; j < 40; ++j) text += std::string(words[rng.below(10)]) + std::to_string(rng.below(50)) + " ";
      docs.push_back(trainer::featurize(text, params.vocab_dim));
    }
    out.resize(n * params.embed_dim);
  }
};

void BM_ProjectBatchSerial(benchmark::State& state) {
  ProjectInputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::serial::project_batch(in.params.view(), in.docs, in.out);
    benchmark::DoNotOptimize(in.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ProjectBatchParallel(benchmark::State& state) {
  ProjectInputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::parallel::project_batch(in.params.view(), in.docs, in.out);
    benchmark::DoNotOptimize(in.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct DotInputs {
  std::vector<double> docs, query, out;
  std::size_t rows, cols = 64;
  explicit DotInputs(std::size_t n) : rows(n) {
    Rng rng(3);
    docs.resize(rows * cols);
    query.resize(cols);
    out.resize(rows);
    for (auto& x : docs) x = rng.uniform(-1, 1);
    for (auto& x : query) x = rng.uniform(-1, 1);
  }
};

void BM_DotRowsSerial(benchmark::State& state) {
  DotInputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::serial::dot_rows(in.query, {in.docs, in.rows, in.cols}, in.out);
    benchmark::DoNotOptimize(in.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DotRowsParallel(benchmark::State& state) {
  DotInputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::parallel::dot_rows(in.query, {in.docs, in.rows, in.cols}, in.out);
    benchmark::DoNotOptimize(in.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Simulation(benchmark::State& state) {
  theory::SimulationConfig cfg;
  cfg.trials = 10000;
  cfg.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(theory::simulate_comparison(cfg).mean_inf_mrr_augmented);
}

BENCHMARK(BM_ProjectBatchSerial)->Arg(200)->Arg(2000);
BENCHMARK(BM_ProjectBatchParallel)->Arg(200)->Arg(2000);
BENCHMARK(BM_DotRowsSerial)->Arg(1000)->Arg(100000);
BENCHMARK(BM_DotRowsParallel)->Arg(1000)->Arg(100000);
BENCHMARK(BM_Simulation)->ArgName("parallel")->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
