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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardneg/retriever.hpp"
#include "hardneg/rng.hpp"

namespace hardneg::theory {

/// A fully ranked candidate set for one query. Every document that is not a
/// positive counts as a negative; `negative_pool` is the retrieved subset.
class RankWorld {
 public:
  /// Sorts by the ranked-list tie rule. Throws ParameterError when the pools
  /// overlap or name unknown ids.
  RankWorld(std::vector<retriever::ScoredDoc> docs, std::set<std::string> positives,
            std::set<std::string> negative_pool = {});

  const std::vector<retriever::ScoredDoc>& ordering() const { return ordering_; }
  const std::set<std::string>& positives() const { return positives_; }
  const std::set<std::string>& negative_pool() const { return negative_pool_; }

  bool is_positive(const std::string& id) const { return positives_.count(id) > 0; }
  /// 1-based position in the ordering.
  std::size_t rank(const std::string& id) const;
  double score(const std::string& id) const;
  std::size_t num_negatives() const { return ordering_.size() - positives_.size(); }

 private:
  std::vector<retriever::ScoredDoc> ordering_;
  std::set<std::string> positives_;
  std::set<std::string> negative_pool_;
};

/// 1 iff s_pos < s_neg.
int pairwise_loss(double s_pos, double s_neg);

struct IdentityCheck {
  std::string doc_id;
  std::size_t lhs = 0;  // rank of the positive
  std::size_t rhs = 0;  // positives above + 1 + pairwise losses against all negatives
  bool pass = false;
};

std::vector<IdentityCheck> check_rank_identity(const RankWorld& world);

struct TopNResult {
  std::size_t loss = 0;          // sum over positives of min(rank - delta - 1, N)
  std::size_t indicator_sum = 0; // pairwise losses restricted to the top-N negatives
  std::size_t n_q = 0;           // rank of the N-th negative
  bool indicator_matches = false;
  bool top_n_count_matches = false;  // exactly N negatives ranked at or above n_q
};

/// Throws ParameterError when the world has fewer than N negatives.
TopNResult topn_loss(const RankWorld& world, std::size_t n);

/// Best (minimum) rank in a negative pool. Throws ParameterError when empty.
std::size_t quality_phi(const std::vector<std::size_t>& ranks);
std::size_t quality_phi(const RankWorld& world);

/// 1 / (phi - num_pos). Throws DomainError when phi - num_pos < 1.
double inf_mrr(std::size_t phi, std::size_t num_pos);

/// Random world with at most max_docs documents, distinct scores, at least
/// one positive and one pooled negative.
RankWorld random_world(Rng& rng, std::size_t max_docs = 12);

struct SimulationConfig {
  std::size_t corpus_size = 1000;
  std::size_t pool_size = 4;    // retrieved negatives per trial
  double decay = 0.05;          // truncated geometric over [1, corpus_size]
  std::size_t num_pos = 1;
  std::size_t inject_top_rank = 5;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  bool parallel = true;

  void validate() const;
};

struct TrialResult {
  std::size_t phi_baseline = 0;
  std::size_t phi_augmented = 0;
  std::optional<double> mrr_baseline;   // empty when inf_mrr is undefined
  std::optional<double> mrr_augmented;
};

/// Draws a truncated-geometric rank in [1, max_rank].
std::size_t sample_rank(Rng& rng, std::size_t max_rank, double decay);

TrialResult run_trial(const SimulationConfig& cfg, std::size_t trial);

struct SimulationReport {
  SimulationConfig config;
  std::vector<TrialResult> trials;
  double mean_phi_baseline = 0.0;
  double mean_phi_augmented = 0.0;
  // Means over trials where both arms are defined.
  double mean_inf_mrr_baseline = 0.0;
  double mean_inf_mrr_augmented = 0.0;
  std::size_t paired_trials = 0;
  std::size_t undefined_baseline = 0;
  std::size_t undefined_augmented = 0;
  std::size_t per_trial_violations = 0;  // trials with phi(augmented) > phi(baseline)
  bool verdict = false;  // no violations and a strictly higher mean inf-MRR
};

SimulationReport simulate_comparison(const SimulationConfig& cfg);

struct IdentitySummary {
  std::size_t worlds = 0;
  std::size_t checks = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t bound_violations = 0;     // topn loss above N * |D+|
  std::size_t indicator_mismatches = 0;
  std::size_t top_n_count_mismatches = 0;
  std::vector<std::size_t> phi;         // per world
  std::vector<std::size_t> n_q;         // per world
};

/// Randomized checks of the rank identity and the top-N bound.
IdentitySummary check_random_worlds(std::size_t worlds, std::size_t n, std::uint64_t seed, std::size_t max_docs = 12);

nlohmann::json report_json(const IdentitySummary& identity, const SimulationReport& sim);

}  // namespace hardneg::theory
