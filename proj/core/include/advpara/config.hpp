#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace advpara {

enum class DecodingVariant { nucleus, beam, diverse_beam };

std::string_view to_string(DecodingVariant v);
DecodingVariant parse_decoding_variant(std::string_view name);

// How candidate paraphrases are decoded. max_length bounds the generated
// tokens including end-of-sequence; min_length is the number of content
// tokens that must precede end-of-sequence.
struct DecodingConfig {
  DecodingVariant variant = DecodingVariant::beam;
  double top_p = 1.0;
  double temperature = 1.0;
  std::size_t num_beams = 48;
  std::size_t num_groups = 1;
  double diversity_penalty = 0.0;
  std::size_t min_length = 3;
  std::size_t max_length = 48;

  // Named evaluation presets: "sampling", "beam", "dbs-low", "dbs-high".
  static DecodingConfig preset(std::string_view name, std::size_t n = 48);
  static const std::vector<std::string>& preset_names();

  // Nucleus sampling used to draw training paraphrases.
  static DecodingConfig training(double top_p, double temperature);

  // Throws ConfigError naming the field at fault.
  void validate() const;

  bool operator==(const DecodingConfig&) const = default;
};

// Density-based clustering used by the diversity score and candidate filtering.
struct ClusteringConfig {
  std::size_t min_cluster_size = 2;
  std::size_t min_samples = 2;
  bool allow_single_cluster = true;
  std::size_t reduce_above_dims = 20;
  std::size_t reduce_above_points = 25;
  std::size_t reduced_dims = 10;

  bool operator==(const ClusteringConfig&) const = default;
};

struct FilterConfig {
  std::size_t passthrough_max = 6;
  std::size_t target_total = 6;
  std::size_t max_total = 12;

  bool operator==(const FilterConfig&) const = default;
};

// Every tunable of a training or evaluation run. Defaults are the reference
// hyperparameters; run files override individual keys.
struct RunConfig {
  // optimisation
  double lr = 1e-4;
  double weight_decay = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 32;
  std::size_t grad_accum_steps = 2;

  // lengths
  std::size_t max_paraphrase_length = 48;
  std::size_t min_paraphrase_length = 3;
  std::size_t max_original_length = 32;

  // generation
  std::size_t n_eval_candidates = 48;
  double train_top_p = 0.95;
  double train_temperature = 1.15;
  DecodingConfig decoding = DecodingConfig::preset("beam");

  // reward
  double alpha = 10.0;
  double eta = 35.0;
  double beta = 0.4;

  // constraints
  long char_diff_threshold = 30;
  double cosine_threshold = 0.8;
  double contradiction_threshold = 0.2;
  double acceptability_threshold = 0.5;
  std::string contrast_phrases_file;

  // schedule
  std::size_t max_epochs = 100;
  std::size_t validate_every = 1;
  double baseline_subsample = 1.0;
  std::uint64_t seed = 0;

  // evaluation
  std::size_t bootstrap_resamples = 10000;
  ClusteringConfig clustering;
  FilterConfig filter;

  // Misclassified originals are dropped from these splits during preprocessing.
  std::vector<std::string> exclude_misclassified_splits = {"train", "validation", "test"};

  DecodingConfig training_decoding() const;

  bool operator==(const RunConfig&) const = default;
};

// Fills defaults from a (possibly empty) JSON object of overrides and checks
// every invariant. Unknown keys are rejected. Throws ConfigError.
RunConfig validate_config(const nlohmann::json& overrides);

// Re-checks a config built in code. Returns it unchanged when valid.
RunConfig validate_config(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const DecodingConfig& cfg);
DecodingConfig decoding_from_json(const nlohmann::json& j);

}  // namespace advpara
