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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardneg/data.hpp"
#include "hardneg/kernels.hpp"

namespace hardneg::trainer {

using kernels::SparseVector;

/// Dual-encoder weights: one V x k projection shared by queries and
/// documents, stored row-major.
struct EncoderParams {
  std::size_t vocab_dim = 0;  // V
  std::size_t embed_dim = 0;  // k
  std::uint64_t seed = 0;
  std::vector<double> weights;

  kernels::MatrixView view() const { return {weights, vocab_dim, embed_dim}; }
  double& at(std::size_t row, std::size_t col) { return weights[row * embed_dim + col]; }
  double at(std::size_t row, std::size_t col) const { return weights[row * embed_dim + col]; }

  bool operator==(const EncoderParams&) const = default;
};

/// Uniform(-1/sqrt(k), 1/sqrt(k)) entries drawn from seed.
EncoderParams init_params(std::size_t vocab_dim, std::size_t embed_dim, std::uint64_t seed);

struct TrainConfig {
  double temperature = 0.02;  // tau
  double learning_rate = 0.1;
  std::size_t epochs = 5;
  std::size_t batch_size = 4;
  std::uint64_t seed = 0;
  std::size_t record_grad_epoch = 1;  // 1-based; 0 disables recording
  std::size_t vocab_dim = std::size_t{1} << 15;
  std::size_t embed_dim = 64;
  std::size_t reservoir_size = 100000;
  bool parallel = true;  // OpenMP forward pass; results match the serial path bitwise

  void validate() const;
};

struct TrainingStats {
  std::vector<double> step_losses;   // mean batch loss per step
  std::vector<double> epoch_losses;  // mean instance loss per epoch
  std::vector<double> grad_samples;  // uniform reservoir of gradient components
  std::size_t grad_components_seen = 0;
  double grad_variance = 0.0;        // population variance of grad_samples
};

/// Lowercased word unigrams and bigrams, hashed (FNV-1a) into V buckets,
/// counted, then L2-normalized. Empty text gives the zero vector.
SparseVector featurize(std::string_view text, std::size_t vocab_dim);

/// W^T featurize(text).
std::vector<double> encode(const EncoderParams& params, std::string_view text);
std::vector<double> encode(const EncoderParams& params, const SparseVector& features);

/// Dot product. Throws ParameterError on a length mismatch.
double similarity(std::span<const double> query_embedding, std::span<const double> doc_embedding);

/// -log softmax of the positive among {positive, negatives} at temperature
/// tau, with max-subtraction.
double infonce_loss(double s_pos, std::span<const double> s_negs, double tau);

/// Loss and its partial derivatives with respect to each score.
struct ScoreGradient {
  double loss = 0.0;
  double d_pos = 0.0;
  std::vector<double> d_negs;
};
ScoreGradient infonce_score_gradient(double s_pos, std::span<const double> s_negs, double tau);

struct GradientResult {
  std::vector<double> gradient;  // dense V x k, row-major
  double loss = 0.0;             // mean over the batch
};

/// Exact gradient of the mean InfoNCE loss of a batch with respect to W.
/// Accumulates in instance order, then positive, then negatives in order.
GradientResult infonce_grad(const EncoderParams& params, std::span<const data::TrainInstance> batch, double tau);

struct TrainResult {
  EncoderParams params;
  TrainingStats stats;
};

/// Plain minibatch gradient descent over seeded per-epoch shuffles. Throws
/// NumericError on a non-finite loss.
TrainResult train(const std::vector<data::TrainInstance>& instances, const TrainConfig& cfg);

/// Population variance. Throws ParameterError for fewer than two samples.
double grad_variance(std::span<const double> samples);

/// Binary checkpoint: 8-byte magic "HNCKPT01", then V, k, seed as
/// little-endian uint64, then V*k little-endian float64 weights, row-major.
void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params);
EncoderParams load_checkpoint(const std::filesystem::path& path);

nlohmann::json stats_json(const TrainingStats& stats, const TrainConfig& cfg);

}  // namespace hardneg::trainer
