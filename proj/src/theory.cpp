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

#include "hardneg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hardneg/error.hpp"

namespace hardneg::theory {

RankWorld::RankWorld(std::vector<retriever::ScoredDoc> docs, std::set<std::string> positives,
                     std::set<std::string> negative_pool)
    : ordering_(std::move(docs)), positives_(std::move(positives)), negative_pool_(std::move(negative_pool)) {
  std::sort(ordering_.begin(), ordering_.end(), retriever::ranks_before);
  std::set<std::string> ids;
  for (const auto& d : ordering_) {
    if (!ids.insert(d.doc_id).second) throw ParameterError("world: duplicate doc id '" + d.doc_id + "'");
  }
  for (const auto& p : positives_) {
    if (!ids.count(p)) throw ParameterError("world: positive '" + p + "' not in the ordering");
  }
  for (const auto& n : negative_pool_) {
    if (!ids.count(n)) throw ParameterError("world: pooled negative '" + n + "' not in the ordering");
    if (positives_.count(n)) throw ParameterError("world: '" + n + "' is both positive and pooled negative");
  }
}

std::size_t RankWorld::rank(const std::string& id) const {
  for (std::size_t i = 0; i < ordering_.size(); ++i) {
    if (ordering_[i].doc_id == id) return i + 1;
  }
  throw LookupError("world: unknown doc '" + id + "'");
}

double RankWorld::score(const std::string& id) const { return ordering_[rank(id) - 1].score; }

int pairwise_loss(double s_pos, double s_neg) { return s_pos < s_neg ? 1 : 0; }

std::vector<IdentityCheck> check_rank_identity(const RankWorld& world) {
  std::vector<IdentityCheck> out;
  const auto& ord = world.ordering();
  std::size_t positives_above = 0;
  for (std::size_t i = 0; i < ord.size(); ++i) {
    if (!world.is_positive(ord[i].doc_id)) continue;
    std::size_t losses = 0;
    for (const auto& d : ord) {
      if (!world.is_positive(d.doc_id)) losses += static_cast<std::size_t>(pairwise_loss(ord[i].score, d.score));
    }
    IdentityCheck c{ord[i].doc_id, i + 1, positives_above + 1 + losses, false};
    c.pass = c.lhs == c.rhs;
    out.push_back(c);
    ++positives_above;
  }
  return out;
}

TopNResult topn_loss(const RankWorld& world, std::size_t n) {
  if (world.num_negatives() < n) {
    throw ParameterError("topn_loss: world has " + std::to_string(world.num_negatives()) + " negatives, fewer than N=" +
                         std::to_string(n));
  }
  const auto& ord = world.ordering();
  TopNResult r;
  std::vector<double> top_negative_scores;
  for (std::size_t i = 0; i < ord.size() && top_negative_scores.size() < n; ++i) {
    if (world.is_positive(ord[i].doc_id)) continue;
    top_negative_scores.push_back(ord[i].score);
    if (top_negative_scores.size() == n) r.n_q = i + 1;
  }
  std::size_t within = 0;
  for (std::size_t i = 0; i < ord.size(); ++i) {
    if (!world.is_positive(ord[i].doc_id)) {
      if (i + 1 <= r.n_q) ++within;
      continue;
    }
    // rank - delta - 1 counts the negatives placed above this positive.
    std::size_t above = 0;
    for (std::size_t j = 0; j < i; ++j) above += world.is_positive(ord[j].doc_id) ? 0 : 1;
    r.loss += std::min(above, n);
    for (const double s : top_negative_scores) r.indicator_sum += static_cast<std::size_t>(pairwise_loss(ord[i].score, s));
  }
  r.indicator_matches = r.loss == r.indicator_sum;
  r.top_n_count_matches = n == 0 ? r.n_q == 0 : within == n;
  return r;
}

std::size_t quality_phi(const std::vector<std::size_t>& ranks) {
  if (ranks.empty()) throw ParameterError("quality_phi: empty negative pool");
  return *std::min_element(ranks.begin(), ranks.end());
}

std::size_t quality_phi(const RankWorld& world) {
  std::vector<std::size_t> ranks;
  for (const auto& id : world.negative_pool()) ranks.push_back(world.rank(id));
  return quality_phi(ranks);
}

double inf_mrr(std::size_t phi, std::size_t num_pos) {
  if (phi < num_pos + 1) {
    throw DomainError("inf_mrr undefined: phi - |D+| = " + std::to_string(static_cast<long long>(phi) -
                                                                          static_cast<long long>(num_pos)) +
                      " < 1");
  }
  return 1.0 / static_cast<double>(phi - num_pos);
}

RankWorld random_world(Rng& rng, std::size_t max_docs) {
  if (max_docs < 2) throw ParameterError("random_world: need room for at least 2 docs");
  const std::size_t n = 2 + rng.below(max_docs - 1);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(std::span(perm));
  std::vector<retriever::ScoredDoc> docs;
  char id[24];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(id, sizeof(id), "d%02zu", i);
    docs.push_back({id, static_cast<double>(perm[i]) / static_cast<double>(n)});
  }
  const std::size_t num_pos = 1 + rng.below(n - 1);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(std::span(order));
  std::set<std::string> positives, pool;
  for (std::size_t i = 0; i < num_pos; ++i) positives.insert(docs[order[i]].doc_id);
  for (std::size_t i = num_pos; i < n; ++i) {
    if (i == num_pos || rng.below(2) == 0) pool.insert(docs[order[i]].doc_id);
  }
  return RankWorld(std::move(docs), std::move(positives), std::move(pool));
}

void SimulationConfig::validate() const {
  if (trials == 0) throw ParameterError("simulate: trials must be >= 1");
  if (corpus_size == 0) throw ParameterError("simulate: corpus size must be >= 1");
  if (pool_size == 0 || pool_size > corpus_size) throw ParameterError("simulate: pool size must be in [1, corpus size]");
  if (!(decay > 0.0 && decay < 1.0)) throw ParameterError("simulate: decay must be in (0, 1)");
  if (inject_top_rank == 0 || inject_top_rank > corpus_size) {
    throw ParameterError("simulate: inject-top-rank must be in [1, corpus size]");
  }
}

std::size_t sample_rank(Rng& rng, std::size_t max_rank, double decay) {
  // Inverse CDF of P(r) proportional to (1 - decay)^(r - 1), r in [1, max_rank].
  const double log_keep = std::log1p(-decay);
  const double mass = -std::expm1(static_cast<double>(max_rank) * log_keep);
  const double u = rng.uniform01();
  const double r = std::floor(std::log1p(-u * mass) / log_keep);
  return std::min(max_rank, 1 + static_cast<std::size_t>(std::max(0.0, r)));
}

namespace {

std::optional<double> maybe_inf_mrr(std::size_t phi, std::size_t num_pos) {
  if (phi < num_pos + 1) return std::nullopt;
  return inf_mrr(phi, num_pos);
}

}  // namespace

TrialResult run_trial(const SimulationConfig& cfg, std::size_t trial) {
  Rng rng(derive_seed(cfg.seed, trial));
  std::set<std::size_t> pool;
  while (pool.size() < cfg.pool_size) pool.insert(sample_rank(rng, cfg.corpus_size, cfg.decay));
  TrialResult r;
  r.phi_baseline = *pool.begin();
  const std::size_t injected = 1 + rng.below(cfg.inject_top_rank);
  r.phi_augmented = std::min(r.phi_baseline, injected);
  r.mrr_baseline = maybe_inf_mrr(r.phi_baseline, cfg.num_pos);
  r.mrr_augmented = maybe_inf_mrr(r.phi_augmented, cfg.num_pos);
  return r;
}

SimulationReport simulate_comparison(const SimulationConfig& cfg) {
  cfg.validate();
  SimulationReport rep;
  rep.config = cfg;
  rep.trials.resize(cfg.trials);
  const auto n = static_cast<std::ptrdiff_t>(cfg.trials);
#pragma omp parallel for schedule(static) if (cfg.parallel)
  for (std::ptrdiff_t t = 0; t < n; ++t) rep.trials[static_cast<std::size_t>(t)] = run_trial(cfg, static_cast<std::size_t>(t));

  for (const auto& t : rep.trials) {
    rep.mean_phi_baseline += static_cast<double>(t.phi_baseline);
    rep.mean_phi_augmented += static_cast<double>(t.phi_augmented);
    if (t.phi_augmented > t.phi_baseline) ++rep.per_trial_violations;
    if (!t.mrr_baseline) ++rep.undefined_baseline;
    if (!t.mrr_augmented) ++rep.undefined_augmented;
    if (t.mrr_baseline && t.mrr_augmented) {
      ++rep.paired_trials;
      rep.mean_inf_mrr_baseline += *t.mrr_baseline;
      rep.mean_inf_mrr_augmented += *t.mrr_augmented;
    }
  }
  const auto trials = static_cast<double>(cfg.trials);
  rep.mean_phi_baseline /= trials;
  rep.mean_phi_augmented /= trials;
  if (rep.paired_trials > 0) {
    rep.mean_inf_mrr_baseline /= static_cast<double>(rep.paired_trials);
    rep.mean_inf_mrr_augmented /= static_cast<double>(rep.paired_trials);
  }
  rep.verdict = rep.per_trial_violations == 0 && rep.paired_trials > 0 &&
                rep.mean_inf_mrr_augmented > rep.mean_inf_mrr_baseline;
  return rep;
}

IdentitySummary check_random_worlds(std::size_t worlds, std::size_t n, std::uint64_t seed, std::size_t max_docs) {
  IdentitySummary s;
  s.worlds = worlds;
  Rng rng(derive_seed(seed, 0x1DE7));
  for (std::size_t w = 0; w < worlds; ++w) {
    const auto world = random_world(rng, max_docs);
    for (const auto& c : check_rank_identity(world)) {
      ++s.checks;
      c.pass ? ++s.passed : ++s.failed;
    }
    const std::size_t nn = std::min(n, world.num_negatives());
    const auto t = topn_loss(world, nn);
    if (t.loss > nn * world.positives().size()) ++s.bound_violations;
    if (!t.indicator_matches) ++s.indicator_mismatches;
    if (!t.top_n_count_matches) ++s.top_n_count_mismatches;
    s.phi.push_back(quality_phi(world));
    s.n_q.push_back(t.n_q);
  }
  return s;
}

nlohmann::json report_json(const IdentitySummary& identity, const SimulationReport& sim) {
  const auto& c = sim.config;
  return {{"rank_identity",
           {{"worlds", identity.worlds},
            {"checks", identity.checks},
            {"passed", identity.passed},
            {"failed", identity.failed}}},
          {"topn",
           {{"bound_violations", identity.bound_violations},
            {"indicator_mismatches", identity.indicator_mismatches},
            {"top_n_count_mismatches", identity.top_n_count_mismatches},
            {"n_q", identity.n_q}}},
          {"phi", identity.phi},
          {"simulation",
           {{"config",
             {{"corpus_size", c.corpus_size},
              {"pool_size", c.pool_size},
              {"decay", c.decay},
              {"num_pos", c.num_pos},
              {"inject_top_rank", c.inject_top_rank},
              {"trials", c.trials},
              {"seed", c.seed}}},
            {"mean_phi_baseline", sim.mean_phi_baseline},
            {"mean_phi_augmented", sim.mean_phi_augmented},
            {"mean_inf_mrr_baseline", sim.mean_inf_mrr_baseline},
            {"mean_inf_mrr_augmented", sim.mean_inf_mrr_augmented},
            {"paired_trials", sim.paired_trials},
            {"undefined_baseline", sim.undefined_baseline},
            {"undefined_augmented", sim.undefined_augmented},
            {"per_trial_violations", sim.per_trial_violations},
            {"verdict", sim.verdict ? "augmented pool raises the inf-MRR bound" : "no improvement"}}}};
}

}  // namespace hardneg::theory
