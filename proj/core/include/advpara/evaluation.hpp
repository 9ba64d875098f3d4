#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "advpara/constraints.hpp"
#include "advpara/models.hpp"
#include "advpara/rewards.hpp"
#include "advpara/rng.hpp"
#include "advpara/types.hpp"

namespace advpara {

// Valid (delta = 1) and misclassified (argmax differs from the true label).
bool is_adversarial(const LabeledExample& original, const Candidate& candidate);

struct AttackResult {
  std::string original_id;
  bool success = false;
  std::vector<Candidate> successful_candidates;
  std::size_t num_successes = 0;
  std::uint64_t queries_used = 0;
};

// Percentage of originals with at least one success.
double attack_success_rate(const std::vector<AttackResult>& results);

// Paired bootstrap p-value for mean(a) > mean(b): the fraction of resampled
// mean differences that are <= 0. Two-sided doubles the smaller tail.
double bootstrap_test(const std::vector<bool>& successes_a, const std::vector<bool>& successes_b,
                      std::size_t resamples, Rng& rng, bool two_sided = false);

// Clusters plus noise points among the embedded success texts.
std::size_t diversity_score(const std::vector<Candidate>& successes, const Embedder& embedder,
                            const ClusteringConfig& cfg);

// Subsamples a large success set to a handful of mutually distinct
// candidates: every cluster (and every noise point, as its own cluster)
// contributes its members nearest the medoid first.
std::vector<Candidate> filter_candidates(const std::vector<Candidate>& successes, const Embedder& embedder,
                                         const ClusteringConfig& clustering, const FilterConfig& cfg, Rng& rng);

struct FluencyMetrics {
  double median_perplexity = 0.0;
  std::size_t unique_bigrams = 0;
};

FluencyMetrics fluency_metrics(const std::vector<CandidateSet>& sets, const PerplexityScorer& scorer);

double median(std::vector<double> values);

struct EvalReport {
  double attack_success_rate = 0.0;
  double avg_queries = 0.0;
  double avg_successes = 0.0;
  double diversity_score = 0.0;  // mean over originals with at least one success
  double median_perplexity = 0.0;
  std::size_t unique_bigrams = 0;
  std::vector<AttackResult> results;
  std::vector<CandidateSet> sets;

  nlohmann::json summary_json() const;
};

// Queries the victim on every candidate and attaches victim outputs,
// constraint reports, and the pre-baseline reward r.
void score_candidate_set(const LabeledExample& original, CandidateSet& set, const Victim& victim,
                         const Scorers& scorers, const ConstraintThresholds& thresholds, const RewardParams& reward);

AttackResult attack_result(const LabeledExample& original, const CandidateSet& scored);

struct EvalModels {
  const SequenceModel* generator = nullptr;
  const Victim* victim = nullptr;
  Scorers scorers;
  const PerplexityScorer* perplexity = nullptr;
};

// Decodes a candidate set for every original, scores it, and aggregates.
// Originals are processed on up to `threads` workers; results do not depend
// on the thread count.
EvalReport evaluate_split(const std::vector<LabeledExample>& split, const EvalModels& models, const RunConfig& cfg,
                          const DecodingConfig& decoding, std::uint64_t seed, std::size_t threads = 1);

nlohmann::json to_json(const AttackResult& r);

}  // namespace advpara
