#include "advpara/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "advpara/errors.hpp"

namespace advpara {

double degradation(const LabeledExample& original, const ProbVector& candidate_victim_probs) {
  if (original.label >= original.victim_probs.size() || original.label >= candidate_victim_probs.size()) {
    throw Error("label " + std::to_string(original.label) + " out of range for victim output");
  }
  return original.victim_probs[original.label] - candidate_victim_probs[original.label];
}

double paraphrase_reward(double V, bool delta, double eta, double alpha) {
  const double gated = delta ? eta * V : 0.0;
  return std::max(0.0, std::min(alpha, gated));
}

double kl_sample_term(double policy_logprob, double reference_logprob, std::size_t T) {
  if (T == 0) throw Error("sequence length must be positive");
  return (policy_logprob - reference_logprob) / static_cast<double>(T);
}

double modified_reward(double r, double b, double kl, double beta) { return r - b - beta * kl; }

double BaselineRegistry::get(const std::string& id) const {
  const auto it = values_.find(id);
  return it == values_.end() ? default_ : it->second;
}

nlohmann::json BaselineRegistry::to_json() const {
  return {{"default_value", default_}, {"values", values_}};
}

BaselineRegistry BaselineRegistry::from_json(const nlohmann::json& j) {
  BaselineRegistry reg(j.value("default_value", 0.0));
  for (const auto& [id, v] : j.at("values").get<std::map<std::string, double>>()) {
    if (!std::isfinite(v)) throw Error("baseline for '" + id + "' is not finite");
    reg.values_[id] = v;
  }
  return reg;
}

void update_baselines(BaselineRegistry& registry, const std::vector<CandidateSet>& sets) {
  std::map<std::string, double> fresh;
  for (const auto& s : sets) {
    if (s.candidates.empty()) continue;
    double sum = 0.0;
    for (const auto& c : s.candidates) {
      if (!c.reward) throw Error("candidate for '" + s.original_id + "' has no reward");
      sum += *c.reward;
    }
    const double mean = sum / static_cast<double>(s.candidates.size());
    if (!std::isfinite(mean)) throw Error("non-finite baseline for '" + s.original_id + "'");
    fresh[s.original_id] = mean;
  }
  for (auto& [id, v] : fresh) registry.values_[id] = v;
}

RewardBreakdown reward_breakdown(const LabeledExample& original, const Candidate& c, double baseline,
                                 const RewardParams& p) {
  RewardBreakdown rb;
  rb.V = degradation(original, c.victim_probs);
  rb.delta = c.constraint_report.delta();
  rb.r = paraphrase_reward(rb.V, rb.delta, p.eta, p.alpha);
  rb.b = baseline;
  rb.kl = kl_sample_term(c.policy_logprob, c.reference_logprob, c.length());
  rb.R = modified_reward(rb.r, rb.b, rb.kl, p.beta);
  return rb;
}

}  // namespace advpara
