#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "advpara/types.hpp"

namespace advpara {

struct RewardBreakdown {
  double V = 0.0;
  bool delta = false;
  double r = 0.0;
  double b = 0.0;
  double kl = 0.0;
  double R = 0.0;
};

// V = f(x)_y - f(x')_y.
double degradation(const LabeledExample& original, const ProbVector& candidate_victim_probs);

// r = max(0, min(alpha, eta * delta * V)).
double paraphrase_reward(double V, bool delta, double eta, double alpha);

// (log pi - log rho) / T for one sampled sequence.
double kl_sample_term(double policy_logprob, double reference_logprob, std::size_t T);

// R = r - b - beta * kl.
double modified_reward(double r, double b, double kl, double beta);

// Per-original reward baselines b(x), refreshed once per validation phase.
class BaselineRegistry {
 public:
  explicit BaselineRegistry(double default_value = 0.0) : default_(default_value) {}

  double get(const std::string& id) const;
  bool contains(const std::string& id) const { return values_.count(id) != 0; }
  std::size_t size() const { return values_.size(); }
  double default_value() const { return default_; }
  const std::map<std::string, double>& values() const { return values_; }

  nlohmann::json to_json() const;
  static BaselineRegistry from_json(const nlohmann::json& j);

  bool operator==(const BaselineRegistry&) const = default;

 private:
  friend void update_baselines(BaselineRegistry&, const std::vector<CandidateSet>&);
  double default_;
  std::map<std::string, double> values_;
};

// b(x) := mean reward r over x's candidate set. Every candidate must carry a
// reward; ids without a set here keep their previous value.
void update_baselines(BaselineRegistry& registry, const std::vector<CandidateSet>& sets);

struct RewardParams {
  double alpha = 10.0;
  double eta = 35.0;
  double beta = 0.4;

  static RewardParams from(const RunConfig& cfg) { return {cfg.alpha, cfg.eta, cfg.beta}; }
};

// Full breakdown for a scored candidate (victim probs and constraint report set).
RewardBreakdown reward_breakdown(const LabeledExample& original, const Candidate& c, double baseline,
                                 const RewardParams& p);

}  // namespace advpara
