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

#include "hardneg/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>

#include "hardneg/common.hpp"
#include "hardneg/error.hpp"
#include "hardneg/rng.hpp"

namespace hardneg::trainer {

void TrainConfig::validate() const {
  if (!(temperature > 0.0)) throw ParameterError("train: temperature must be > 0");
  if (!(learning_rate > 0.0)) throw ParameterError("train: learning rate must be > 0");
  if (batch_size == 0) throw ParameterError("train: batch size must be >= 1");
  if (vocab_dim == 0 || embed_dim == 0) throw ParameterError("train: V and k must be >= 1");
}

EncoderParams init_params(std::size_t vocab_dim, std::size_t embed_dim, std::uint64_t seed) {
  if (vocab_dim == 0 || embed_dim == 0) throw ParameterError("init_params: V and k must be >= 1");
  EncoderParams p{vocab_dim, embed_dim, seed, std::vector<double>(vocab_dim * embed_dim)};
  const double bound = 1.0 / std::sqrt(static_cast<double>(embed_dim));
  Rng rng(derive_seed(seed, 0x1417));
  for (auto& w : p.weights) w = rng.uniform(-bound, bound);
  return p;
}

SparseVector featurize(std::string_view text, std::size_t vocab_dim) {
  if (vocab_dim == 0) throw ParameterError("featurize: V must be >= 1");
  const auto tokens = tokenize(text);
  std::map<std::uint32_t, double> counts;
  auto bump = [&](std::string_view feature) {
    counts[static_cast<std::uint32_t>(fnv1a64(feature) % vocab_dim)] += 1.0;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    bump(tokens[i]);
    if (i + 1 < tokens.size()) bump(tokens[i] + ' ' + tokens[i + 1]);
  }
  SparseVector v;
  double norm2 = 0.0;
  for (const auto& [idx, c] : counts) norm2 += c * c;
  const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
  for (const auto& [idx, c] : counts) {
    v.index.push_back(idx);
    v.value.push_back(c * inv);
  }
  return v;
}

std::vector<double> encode(const EncoderParams& params, const SparseVector& features) {
  std::vector<double> out(params.embed_dim);
  for (const auto idx : features.index) {
    if (idx >= params.vocab_dim) throw ParameterError("encode: feature index out of range");
  }
  kernels::serial::project(params.view(), features, out);
  return out;
}

std::vector<double> encode(const EncoderParams& params, std::string_view text) {
  return encode(params, featurize(text, params.vocab_dim));
}

double similarity(std::span<const double> query_embedding, std::span<const double> doc_embedding) {
  if (query_embedding.size() != doc_embedding.size()) {
    throw ParameterError("similarity: embedding sizes differ (" + std::to_string(query_embedding.size()) + " vs " +
                         std::to_string(doc_embedding.size()) + ")");
  }
  return kernels::dot(query_embedding, doc_embedding);
}

ScoreGradient infonce_score_gradient(double s_pos, std::span<const double> s_negs, double tau) {
  if (!(tau > 0.0)) throw ParameterError("infonce: temperature must be > 0");
  if (s_negs.empty()) throw ParameterError("infonce: need at least one negative");
  double zmax = s_pos / tau;
  for (const double s : s_negs) zmax = std::max(zmax, s / tau);
  const double e_pos = std::exp(s_pos / tau - zmax);
  std::vector<double> e_negs(s_negs.size());
  double denom = e_pos;
  for (std::size_t i = 0; i < s_negs.size(); ++i) {
    e_negs[i] = std::exp(s_negs[i] / tau - zmax);
    denom += e_negs[i];
  }
  ScoreGradient g;
  g.loss = std::log(denom) - (s_pos / tau - zmax);
  g.d_pos = (e_pos / denom - 1.0) / tau;
  g.d_negs.resize(s_negs.size());
  for (std::size_t i = 0; i < s_negs.size(); ++i) g.d_negs[i] = (e_negs[i] / denom) / tau;
  return g;
}

double infonce_loss(double s_pos, std::span<const double> s_negs, double tau) {
  return infonce_score_gradient(s_pos, s_negs, tau).loss;
}

namespace {

struct InstanceFeatures {
  SparseVector query;
  std::vector<SparseVector> docs;  // positive first, then negatives
};

struct Forward {
  std::vector<double> h_query;
  std::vector<double> h_docs;  // docs.size() x k
  ScoreGradient grad;
};

InstanceFeatures features_for(const data::TrainInstance& inst, std::size_t vocab_dim) {
  if (inst.negatives.empty()) {
    throw ParameterError("instance (" + inst.query.id + ", " + inst.positive.id + ") has no negatives");
  }
  InstanceFeatures f;
  f.query = featurize(inst.query.text, vocab_dim);
  f.docs.push_back(featurize(inst.positive.full_text(), vocab_dim));
  for (const auto& n : inst.negatives) f.docs.push_back(featurize(n.text, vocab_dim));
  return f;
}

Forward forward(const EncoderParams& params, const InstanceFeatures& f, double tau) {
  const std::size_t k = params.embed_dim;
  Forward out;
  out.h_query.resize(k);
  out.h_docs.resize(f.docs.size() * k);
  kernels::serial::project(params.view(), f.query, out.h_query);
  kernels::serial::project_batch(params.view(), f.docs, out.h_docs);
  const auto h = std::span<const double>(out.h_docs);
  const double s_pos = kernels::dot(out.h_query, h.subspan(0, k));
  std::vector<double> s_negs(f.docs.size() - 1);
  for (std::size_t j = 1; j < f.docs.size(); ++j) s_negs[j - 1] = kernels::dot(out.h_query, h.subspan(j * k, k));
  out.grad = infonce_score_gradient(s_pos, s_negs, tau);
  return out;
}

// One forward per instance. The OpenMP path writes each result to its own
// slot, so it matches the serial path exactly.
std::vector<Forward> forward_batch(const EncoderParams& params, std::span<const InstanceFeatures* const> batch,
                                   double tau, bool parallel) {
  std::vector<Forward> out(batch.size());
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = forward(params, *batch[static_cast<std::size_t>(i)], tau);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = forward(params, *batch[static_cast<std::size_t>(i)], tau);
  }
  return out;
}

/// Gradient restricted to the rows it touches.
class SparseGradient {
 public:
  explicit SparseGradient(std::size_t cols) : cols_(cols) {}

  std::span<double> row(std::uint32_t r) {
    auto [it, inserted] = slots_.emplace(r, rows_.size());
    if (inserted) {
      rows_.push_back(r);
      data_.resize(data_.size() + cols_, 0.0);
    }
    return std::span<double>(data_).subspan(it->second * cols_, cols_);
  }

  void scale(double s) {
    for (auto& v : data_) v *= s;
  }

  /// (row, slot) pairs ordered by row.
  std::vector<std::pair<std::uint32_t, std::size_t>> sorted_rows() const {
    std::vector<std::pair<std::uint32_t, std::size_t>> out;
    out.reserve(rows_.size());
    for (std::size_t s = 0; s < rows_.size(); ++s) out.emplace_back(rows_[s], s);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::span<const double> slot(std::size_t s) const { return std::span<const double>(data_).subspan(s * cols_, cols_); }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t cols_;
  std::unordered_map<std::uint32_t, std::size_t> slots_;
  std::vector<std::uint32_t> rows_;
  std::vector<double> data_;
};

// d s(q, d) / dW = x_q h_d^T + x_d h_q^T, weighted by dL/ds.
void accumulate(SparseGradient& g, const InstanceFeatures& f, const Forward& fw) {
  const std::size_t k = g.cols();
  const auto h_docs = std::span<const double>(fw.h_docs);
  std::vector<double> mix(k, 0.0);
  for (std::size_t j = 0; j < f.docs.size(); ++j) {
    const double c = j == 0 ? fw.grad.d_pos : fw.grad.d_negs[j - 1];
    const auto h = h_docs.subspan(j * k, k);
    for (std::size_t c2 = 0; c2 < k; ++c2) mix[c2] += c * h[c2];
  }
  for (std::size_t n = 0; n < f.query.nnz(); ++n) {
    auto r = g.row(f.query.index[n]);
    const double v = f.query.value[n];
    for (std::size_t c2 = 0; c2 < k; ++c2) r[c2] += v * mix[c2];
  }
  for (std::size_t j = 0; j < f.docs.size(); ++j) {
    const double c = j == 0 ? fw.grad.d_pos : fw.grad.d_negs[j - 1];
    const auto& x = f.docs[j];
    for (std::size_t n = 0; n < x.nnz(); ++n) {
      auto r = g.row(x.index[n]);
      const double w = x.value[n] * c;
      for (std::size_t c2 = 0; c2 < k; ++c2) r[c2] += w * fw.h_query[c2];
    }
  }
}

}  // namespace

GradientResult infonce_grad(const EncoderParams& params, std::span<const data::TrainInstance> batch, double tau) {
  if (batch.empty()) throw ParameterError("infonce_grad: empty batch");
  if (!(tau > 0.0)) throw ParameterError("infonce_grad: temperature must be > 0");
  SparseGradient g(params.embed_dim);
  double loss = 0.0;
  for (const auto& inst : batch) {
    const auto f = features_for(inst, params.vocab_dim);
    const auto fw = forward(params, f, tau);
    loss += fw.grad.loss;
    accumulate(g, f, fw);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  g.scale(inv);
  GradientResult out{std::vector<double>(params.weights.size(), 0.0), loss * inv};
  for (const auto& [row, slot] : g.sorted_rows()) {
    std::copy_n(g.slot(slot).begin(), params.embed_dim, out.gradient.begin() + static_cast<std::ptrdiff_t>(row * params.embed_dim));
  }
  return out;
}

double grad_variance(std::span<const double> samples) {
  if (samples.size() < 2) throw ParameterError("grad_variance: need at least 2 samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (const double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (const double x : samples) ss += (x - mean) * (x - mean);
  return ss / n;
}

TrainResult train(const std::vector<data::TrainInstance>& instances, const TrainConfig& cfg) {
  cfg.validate();
  if (instances.empty()) throw ParameterError("train: no instances");
  TrainResult result{init_params(cfg.vocab_dim, cfg.embed_dim, cfg.seed), {}};
  auto& params = result.params;
  auto& stats = result.stats;

  std::vector<InstanceFeatures> features;
  features.reserve(instances.size());
  for (const auto& inst : instances) features.push_back(features_for(inst, cfg.vocab_dim));

  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(cfg.seed, 0x5AFF1E));
  Rng reservoir_rng(derive_seed(cfg.seed, 0x7E5E));

  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++step) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<const InstanceFeatures*> batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&features[order[i]]);
      const auto fws = forward_batch(params, batch, cfg.temperature, cfg.parallel);

      SparseGradient g(cfg.embed_dim);
      double batch_loss = 0.0;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        if (!std::isfinite(fws[b].grad.loss)) {
          const auto& inst = instances[order[start + b]];
          throw NumericError("non-finite loss at step " + std::to_string(step) + " (epoch " + std::to_string(epoch) +
                             ") for instance (" + inst.query.id + ", " + inst.positive.id + ")");
        }
        batch_loss += fws[b].grad.loss;
        accumulate(g, *batch[b], fws[b]);
      }
      g.scale(1.0 / static_cast<double>(batch.size()));
      epoch_loss += batch_loss;
      stats.step_losses.push_back(batch_loss / static_cast<double>(batch.size()));

      const auto rows = g.sorted_rows();
      if (epoch == cfg.record_grad_epoch) {
        for (const auto& [row, slot] : rows) {
          for (const double v : g.slot(slot)) {
            ++stats.grad_components_seen;
            if (stats.grad_samples.size() < cfg.reservoir_size) {
              stats.grad_samples.push_back(v);
            } else {
              const auto j = reservoir_rng.below(stats.grad_components_seen);
              if (j < cfg.reservoir_size) stats.grad_samples[j] = v;
            }
          }
        }
      }
      for (const auto& [row, slot] : rows) {
        const auto gr = g.slot(slot);
        double* w = params.weights.data() + static_cast<std::size_t>(row) * cfg.embed_dim;
        for (std::size_t c = 0; c < cfg.embed_dim; ++c) w[c] -= cfg.learning_rate * gr[c];
      }
    }
    stats.epoch_losses.push_back(epoch_loss / static_cast<double>(instances.size()));
  }
  if (stats.grad_samples.size() >= 2) stats.grad_variance = grad_variance(stats.grad_samples);
  return result;
}

// ---- Checkpoints ----

namespace {

constexpr char kMagic[8] = {'H', 'N', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get_le(std::string_view& in) {
  if (in.size() < sizeof(T)) throw ParseError("checkpoint truncated");
  T value;
  std::memcpy(&value, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params) {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint64_t>(out, params.vocab_dim);
  put_le<std::uint64_t>(out, params.embed_dim);
  put_le<std::uint64_t>(out, params.seed);
  out.reserve(out.size() + params.weights.size() * sizeof(double));
  for (const double w : params.weights) put_le<double>(out, w);
  write_file_atomic(path, out);
}

EncoderParams load_checkpoint(const std::filesystem::path& path) {
  const std::string contents = read_file(path);
  std::string_view in(contents);
  if (in.size() < sizeof(kMagic) || std::memcmp(in.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a checkpoint file: " + path.string());
  }
  in.remove_prefix(sizeof(kMagic));
  EncoderParams p;
  p.vocab_dim = get_le<std::uint64_t>(in);
  p.embed_dim = get_le<std::uint64_t>(in);
  p.seed = get_le<std::uint64_t>(in);
  if (p.vocab_dim == 0 || p.embed_dim == 0) throw ParseError("checkpoint has zero dimension");
  if (in.size() != p.vocab_dim * p.embed_dim * sizeof(double)) throw ParseError("checkpoint body has wrong size");
  p.weights.resize(p.vocab_dim * p.embed_dim);
  for (auto& w : p.weights) {
    w = get_le<double>(in);
    if (!std::isfinite(w)) throw NumericError("checkpoint contains a non-finite weight");
  }
  return p;
}

nlohmann::json stats_json(const TrainingStats& stats, const TrainConfig& cfg) {
  return {{"config",
           {{"temperature", cfg.temperature},
            {"learning_rate", cfg.learning_rate},
            {"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"seed", cfg.seed},
            {"record_grad_epoch", cfg.record_grad_epoch},
            {"vocab_dim", cfg.vocab_dim},
            {"embed_dim", cfg.embed_dim},
            {"reservoir_size", cfg.reservoir_size}}},
          {"step_losses", stats.step_losses},
          {"epoch_losses", stats.epoch_losses},
          {"grad_components_seen", stats.grad_components_seen},
          {"grad_samples", stats.grad_samples.size()},
          {"grad_variance", stats.grad_variance}};
}

}  // namespace hardneg::trainer
