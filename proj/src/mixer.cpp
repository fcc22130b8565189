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

#include "hardneg/mixer.hpp"

#include <algorithm>
#include <cmath>

#include "hardneg/common.hpp"
#include "hardneg/rng.hpp"

namespace hardneg::mixer {

using data::NegativeSample;
using data::Pair;
using data::Provenance;
using data::TrainInstance;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Hybrid: return "hybrid";
    case Strategy::Direct: return "direct";
    case Strategy::PureSynthetic: return "pure-synthetic";
    case Strategy::PureRetrieved: return "pure-retrieved";
    case Strategy::Random: return "random";
  }
  return "hybrid";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "hybrid") return Strategy::Hybrid;
  if (s == "direct") return Strategy::Direct;
  if (s == "pure-synthetic") return Strategy::PureSynthetic;
  if (s == "pure-retrieved") return Strategy::PureRetrieved;
  if (s == "random") return Strategy::Random;
  throw ParameterError("unknown mix strategy '" + std::string(s) +
                       "' (expected hybrid, direct, pure-synthetic, pure-retrieved or random)");
}

void MixConfig::validate() const {
  if (negatives_per_instance == 0) throw ParameterError("mix: N must be >= 1");
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ParameterError("mix: R must be in [0, 1]");
}

GenerationLookup::GenerationLookup(const std::vector<llmgen::GenerationRecord>& records) {
  for (const auto& r : records) records_.insert_or_assign({r.query_id, r.positive_id}, r);
}

const llmgen::GenerationRecord* GenerationLookup::find(const std::string& query_id,
                                                        const std::string& positive_id) const {
  auto it = records_.find({query_id, positive_id});
  return it == records_.end() ? nullptr : &it->second;
}

std::vector<std::size_t> select_for_synthesis(std::size_t n, double ratio, std::uint64_t seed) {
  const auto count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(derive_seed(seed, 0x5E1EC7));
  for (std::size_t i = 0; i < count && i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(std::min(count, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

std::uint64_t pair_seed(std::uint64_t seed, const Pair& pair) {
  return derive_seed(seed, fnv1a64(pair.first.id + '\x1f' + pair.second.id));
}

std::vector<NegativeSample> random_negatives(const Pair& pair, const MixContext& ctx, std::size_t n,
                                             std::uint64_t seed, const std::vector<NegativeSample>& exclude) {
  const auto& corpus = ctx.index.corpus();
  std::vector<std::size_t> candidates;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& id = corpus[d].id;
    if (ctx.judgments.is_judged(pair.first.id, id)) continue;
    const bool taken = std::any_of(exclude.begin(), exclude.end(),
                                   [&](const NegativeSample& s) { return s.doc_id && *s.doc_id == id; });
    if (!taken) candidates.push_back(d);
  }
  if (candidates.size() < n) {
    throw MixError("not enough unjudged documents to sample " + std::to_string(n) + " random negatives for (" +
                   pair.first.id + ", " + pair.second.id + ")");
  }
  Rng rng(pair_seed(seed, pair));
  std::vector<NegativeSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
    const auto& doc = corpus[candidates[i]];
    out.push_back(NegativeSample{doc.full_text(), doc.id, Provenance::Random, "random", false});
  }
  return out;
}

// N BM25 negatives, topped up with flagged random documents when the
// candidate pool runs dry.
std::vector<NegativeSample> retrieved_negatives(const Pair& pair, const MixContext& ctx, const MixConfig& cfg,
                                                std::size_t n) {
  auto negs = retriever::mine_negatives(ctx.index, pair.first, ctx.judgments, n, cfg.skip_top);
  if (negs.size() < n) {
    auto extra = random_negatives(pair, ctx, n - negs.size(), derive_seed(cfg.seed, 0xFAD), negs);
    for (auto& e : extra) {
      e.padding = true;
      negs.push_back(std::move(e));
    }
  }
  return negs;
}

const llmgen::GenerationRecord& record_for(const Pair& pair, const MixContext& ctx) {
  const auto* rec = ctx.generations.find(pair.first.id, pair.second.id);
  if (!rec || rec->negatives.empty()) {
    throw MixError("pair (" + pair.first.id + ", " + pair.second.id +
                   ") is selected for synthetic negatives but has no generation record");
  }
  return *rec;
}

NegativeSample synthetic(const llmgen::GenerationRecord& rec, std::size_t i) {
  return NegativeSample{rec.negatives[i % rec.negatives.size()], std::nullopt, Provenance::Synthetic, rec.id,
                        i >= rec.negatives.size()};
}

}  // namespace

std::vector<TrainInstance> mix_hybrid(const std::vector<Pair>& pairs, const MixContext& ctx, const MixConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.negatives_per_instance;
  const auto selected = select_for_synthesis(pairs.size(), cfg.ratio, cfg.seed);
  std::vector<TrainInstance> out;
  out.reserve(pairs.size());
  std::size_t next_selected = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    TrainInstance inst{pair.first, pair.second, {}};
    if (next_selected < selected.size() && selected[next_selected] == i) {
      ++next_selected;
      inst.negatives.push_back(synthetic(record_for(pair, ctx), 0));
      auto retrieved = retrieved_negatives(pair, ctx, cfg, n - 1);
      inst.negatives.insert(inst.negatives.end(), retrieved.begin(), retrieved.end());
    } else {
      inst.negatives = retrieved_negatives(pair, ctx, cfg, n);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TrainInstance> mix_direct(const std::vector<Pair>& pairs, const MixContext& ctx, const MixConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.negatives_per_instance;
  std::vector<TrainInstance> out;
  for (const auto& pair : pairs) out.push_back(TrainInstance{pair.first, pair.second, retrieved_negatives(pair, ctx, cfg, n)});
  for (const auto i : select_for_synthesis(pairs.size(), cfg.ratio, cfg.seed)) {
    const auto& pair = pairs[i];
    const auto& rec = record_for(pair, ctx);
    TrainInstance inst{pair.first, pair.second, {}};
    for (std::size_t k = 0; k < n && k < rec.negatives.size(); ++k) inst.negatives.push_back(synthetic(rec, k));
    if (inst.negatives.size() < n) {
      for (auto& pad : retrieved_negatives(pair, ctx, cfg, n - inst.negatives.size())) {
        pad.padding = true;
        inst.negatives.push_back(std::move(pad));
      }
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TrainInstance> mix_pure(const std::vector<Pair>& pairs, Provenance source, const MixContext& ctx,
                                    const MixConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.negatives_per_instance;
  std::vector<TrainInstance> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    TrainInstance inst{pair.first, pair.second, {}};
    switch (source) {
      case Provenance::Synthetic: {
        const auto& rec = record_for(pair, ctx);
        for (std::size_t k = 0; k < n; ++k) inst.negatives.push_back(synthetic(rec, k));
        break;
      }
      case Provenance::Retrieved: inst.negatives = retrieved_negatives(pair, ctx, cfg, n); break;
      case Provenance::Random: inst.negatives = random_negatives(pair, ctx, n, cfg.seed, {}); break;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TrainInstance> mix(const std::vector<Pair>& pairs, const MixContext& ctx, const MixConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::Hybrid: return mix_hybrid(pairs, ctx, cfg);
    case Strategy::Direct: return mix_direct(pairs, ctx, cfg);
    case Strategy::PureSynthetic: return mix_pure(pairs, Provenance::Synthetic, ctx, cfg);
    case Strategy::PureRetrieved: return mix_pure(pairs, Provenance::Retrieved, ctx, cfg);
    case Strategy::Random: return mix_pure(pairs, Provenance::Random, ctx, cfg);
  }
  return {};
}

nlohmann::json mix_manifest(const std::vector<Pair>& pairs, const std::vector<TrainInstance>& instances,
                            const MixConfig& cfg) {
  std::size_t synthetic_negs = 0, retrieved_negs = 0, random_negs = 0, padded = 0, synthetic_instances = 0;
  for (const auto& inst : instances) {
    bool has_syn = false;
    for (const auto& n : inst.negatives) {
      switch (n.provenance) {
        case Provenance::Synthetic: ++synthetic_negs; has_syn = true; break;
        case Provenance::Retrieved: ++retrieved_negs; break;
        case Provenance::Random: ++random_negs; break;
      }
      padded += n.padding ? 1 : 0;
    }
    synthetic_instances += has_syn ? 1 : 0;
  }
  return {{"strategy", std::string(to_string(cfg.strategy))},
          {"N", cfg.negatives_per_instance},
          {"R", cfg.ratio},
          {"seed", cfg.seed},
          {"skip_top", cfg.skip_top},
          {"pairs", pairs.size()},
          {"instances", instances.size()},
          {"synthetic_instances", synthetic_instances},
          {"synthetic_negatives", synthetic_negs},
          {"retrieved_negatives", retrieved_negs},
          {"random_negatives", random_negs},
          {"padded_negatives", padded}};
}

}  // namespace hardneg::mixer
