#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "advpara/evaluation.hpp"
#include "advpara/models.hpp"
#include "advpara/optimizer.hpp"
#include "advpara/rewards.hpp"
#include "advpara/rng.hpp"

namespace advpara {

// One sampled training paraphrase with its reward.
struct PolicySample {
  std::vector<TokenId> source;
  Candidate candidate;
  RewardBreakdown reward;
};

struct LossBreakdown {
  std::vector<double> normalized_logprob;  // sum_t log pi / T
  std::vector<double> R;
  std::vector<double> loss;  // -R * normalized_logprob
  double mean = 0.0;
};

// Mean over samples of -R * (sum_t log pi) / T, using the stored log-probs.
LossBreakdown reinforce_loss(const std::vector<PolicySample>& samples);

// The same loss with log-probs recomputed under the policy's current parameters.
double reinforce_objective(const SequenceModel& policy, const std::vector<PolicySample>& samples, LengthBounds bounds);

// grad += d reinforce_objective / d theta, rewards held fixed.
void reinforce_gradient(const TrainablePolicy& policy, const std::vector<PolicySample>& samples,
                        LengthBounds bounds, std::span<double> grad);

struct StopDecision {
  bool stop = false;
  std::string reason;
};

// Stops at the epoch cap, or when the latest value falls below the median of
// every earlier value.
StopDecision should_stop(const std::vector<double>& history, std::size_t epoch, std::size_t max_epochs);

struct TrainingModels {
  const Victim* victim = nullptr;
  Scorers scorers;
  const PerplexityScorer* perplexity = nullptr;
};

struct TrainState {
  std::size_t epoch = 0;
  std::unique_ptr<TrainablePolicy> policy;
  std::shared_ptr<const TrainablePolicy> reference;
  AdamW optimizer;
  BaselineRegistry baselines;
  std::vector<double> history;
  double running_median = 0.0;
  Rng rng;
  std::uint64_t seed = 0;
  bool stopped = false;
  std::string stop_reason;

  std::vector<double> best_parameters;
  double best_asr = -1.0;
  std::size_t best_epoch = 0;

  // Freezes a copy of `policy` as the reference model.
  TrainState(std::unique_ptr<TrainablePolicy> policy, const RunConfig& cfg);
};

struct EpochStats {
  std::size_t samples = 0;
  double mean_reward = 0.0;    // r
  double mean_modified = 0.0;  // R
  double mean_kl = 0.0;
  double mean_loss = 0.0;
  std::size_t optimizer_steps = 0;
};

// One shuffled pass: a nucleus-sampled paraphrase per original, rewarded and
// pushed through the REINFORCE loss; an optimizer step every grad_accum_steps
// batches and once more for a trailing partial window.
EpochStats train_epoch(TrainState& state, const std::vector<LabeledExample>& train, const TrainingModels& models,
                       const RunConfig& cfg);

struct ValidationMetrics {
  double val_asr = 0.0;
  double median_perplexity = 0.0;
  std::size_t unique_bigrams = 0;
  std::size_t baselines_updated = 0;
};

// Validation ASR under cfg.decoding (appended to the history), then baseline
// refresh from candidate sets decoded the same way on the training split.
ValidationMetrics validation_phase(TrainState& state, const std::vector<LabeledExample>& train,
                                   const std::vector<LabeledExample>& val, const TrainingModels& models,
                                   const RunConfig& cfg, std::size_t threads = 1);

struct EpochRecord {
  std::size_t epoch = 0;
  EpochStats train;
  bool validated = false;
  ValidationMetrics validation;
  StopDecision decision;
};

// Epochs until should_stop fires. `on_epoch` sees each record after it is
// complete (the place to checkpoint).
void train(TrainState& state, const std::vector<LabeledExample>& train_split,
           const std::vector<LabeledExample>& val_split, const TrainingModels& models, const RunConfig& cfg,
           const std::function<void(const EpochRecord&, const TrainState&)>& on_epoch = {}, std::size_t threads = 1);

// Checkpoint files: policy.json, optimizer.json, baselines.json, state.json.
void save_checkpoint(const std::filesystem::path& dir, const TrainState& state);
void load_checkpoint(const std::filesystem::path& dir, TrainState& state);

void save_parameters(const std::filesystem::path& file, std::span<const double> params);
std::vector<double> load_parameters(const std::filesystem::path& file);

}  // namespace advpara
