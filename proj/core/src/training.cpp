#include "advpara/training.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "advpara/decoding.hpp"
#include "advpara/errors.hpp"
#include "advpara/serialization.hpp"

namespace advpara {

LossBreakdown reinforce_loss(const std::vector<PolicySample>& samples) {
  LossBreakdown out;
  for (const auto& s : samples) {
    const auto& c = s.candidate;
    if (!std::isfinite(c.policy_logprob)) throw Error("non-finite policy log-prob for '" + c.text + "'");
    if (c.length() == 0) throw Error("empty sample");
    const double norm = c.policy_logprob / static_cast<double>(c.length());
    out.normalized_logprob.push_back(norm);
    out.R.push_back(s.reward.R);
    out.loss.push_back(-s.reward.R * norm);
  }
  if (!samples.empty()) {
    out.mean = std::accumulate(out.loss.begin(), out.loss.end(), 0.0) / static_cast<double>(samples.size());
  }
  return out;
}

double reinforce_objective(const SequenceModel& policy, const std::vector<PolicySample>& samples, LengthBounds bounds) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) {
    const auto lp = policy.score_tokens(s.source, s.candidate.tokens, bounds);
    const double sum = std::accumulate(lp.begin(), lp.end(), 0.0);
    total += -s.reward.R * sum / static_cast<double>(s.candidate.length());
  }
  return total / static_cast<double>(samples.size());
}

void reinforce_gradient(const TrainablePolicy& policy, const std::vector<PolicySample>& samples,
                        LengthBounds bounds, std::span<double> grad) {
  const double n = static_cast<double>(samples.size());
  for (const auto& s : samples) {
    const double w = -s.reward.R / static_cast<double>(s.candidate.length()) / n;
    if (w != 0.0) policy.accumulate_logprob_gradient(s.source, s.candidate.tokens, bounds, w, grad);
  }
}

StopDecision should_stop(const std::vector<double>& history, std::size_t epoch, std::size_t max_epochs) {
  if (epoch >= max_epochs) return {true, "max_epochs"};
  if (history.size() >= 2) {
    const double latest = history.back();
    const double med = median(std::vector<double>(history.begin(), history.end() - 1));
    if (latest < med) return {true, "below_running_median"};
  }
  return {false, ""};
}

TrainState::TrainState(std::unique_ptr<TrainablePolicy> p, const RunConfig& cfg)
    : policy(std::move(p)),
      reference(policy->clone()),
      optimizer(policy->parameters().size(),
                AdamW::Options{cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, cfg.weight_decay}),
      rng(Rng::derive(cfg.seed, 1)),
      seed(cfg.seed) {}

namespace {

LengthBounds paraphrase_bounds(const RunConfig& cfg) {
  return {cfg.min_paraphrase_length, cfg.max_paraphrase_length};
}

}  // namespace

EpochStats train_epoch(TrainState& state, const std::vector<LabeledExample>& train, const TrainingModels& models,
                       const RunConfig& cfg) {
  if (!models.victim) throw Error("training needs a victim");
  EpochStats stats;
  const auto bounds = paraphrase_bounds(cfg);
  const auto dec = cfg.training_decoding();
  const auto thresholds = ConstraintThresholds::from(cfg);
  const auto reward = RewardParams::from(cfg);
  TrainablePolicy& policy = *state.policy;
  const Vocabulary& vocab = policy.vocabulary();

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  state.rng.shuffle(order);

  std::vector<double> grad(policy.parameters().size(), 0.0);
  std::size_t window = 0;
  auto flush = [&] {
    const double scale = 1.0 / static_cast<double>(window);
    for (auto& g : grad) g *= scale;
    state.optimizer.step(policy.parameters(), grad);
    std::fill(grad.begin(), grad.end(), 0.0);
    window = 0;
    ++stats.optimizer_steps;
  };

  double sum_r = 0.0, sum_R = 0.0, sum_kl = 0.0, sum_loss = 0.0;
  for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
    std::vector<PolicySample> batch;
    for (std::size_t i = b0; i < std::min(order.size(), b0 + cfg.batch_size); ++i) {
      const LabeledExample& ex = train[order[i]];
      PolicySample s;
      s.source = vocab.encode(ex.text);
      const auto out = decoding::sample_sequence(policy, s.source, dec.top_p, dec.temperature, bounds, state.rng);
      Candidate& c = s.candidate;
      c.text = out.text;
      c.tokens = out.tokens;
      c.policy_logprob = out.total_logprob();
      const auto ref = state.reference->score_tokens(s.source, c.tokens, bounds);
      c.reference_logprob = std::accumulate(ref.begin(), ref.end(), 0.0);
      c.victim_probs = models.victim->predict(c.text);
      c.constraint_report = evaluate_all(ex, c.text, models.scorers, thresholds);
      s.reward = reward_breakdown(ex, c, state.baselines.get(ex.id), reward);
      c.reward = s.reward.r;
      sum_r += s.reward.r;
      sum_R += s.reward.R;
      sum_kl += s.reward.kl;
      batch.push_back(std::move(s));
    }
    const auto loss = reinforce_loss(batch);
    if (!std::isfinite(loss.mean)) {
      std::ostringstream os;
      os << "non-finite loss in epoch " << state.epoch + 1 << ", batch starting at " << b0;
      throw Error(os.str());
    }
    sum_loss += loss.mean * static_cast<double>(batch.size());
    stats.samples += batch.size();
    reinforce_gradient(policy, batch, bounds, grad);
    if (++window == cfg.grad_accum_steps) flush();
  }
  if (window > 0) flush();

  if (stats.samples) {
    const double n = static_cast<double>(stats.samples);
    stats.mean_reward = sum_r / n;
    stats.mean_modified = sum_R / n;
    stats.mean_kl = sum_kl / n;
    stats.mean_loss = sum_loss / n;
  }
  ++state.epoch;
  return stats;
}

ValidationMetrics validation_phase(TrainState& state, const std::vector<LabeledExample>& train,
                                   const std::vector<LabeledExample>& val, const TrainingModels& models,
                                   const RunConfig& cfg, std::size_t threads) {
  EvalModels em{state.policy.get(), models.victim, models.scorers, models.perplexity};
  ValidationMetrics m;

  const auto val_report = evaluate_split(val, em, cfg, cfg.decoding, state.seed ^ (0x5a17ull << 32) ^ state.epoch, threads);
  m.val_asr = val_report.attack_success_rate;
  m.median_perplexity = val_report.median_perplexity;
  m.unique_bigrams = val_report.unique_bigrams;
  state.history.push_back(m.val_asr);
  state.running_median = median(state.history);
  if (m.val_asr > state.best_asr) {
    state.best_asr = m.val_asr;
    state.best_epoch = state.epoch;
    state.best_parameters.assign(state.policy->parameters().begin(), state.policy->parameters().end());
  }

  std::vector<LabeledExample> subset = train;
  if (cfg.baseline_subsample < 1.0) {
    state.rng.shuffle(subset);
    const auto keep = static_cast<std::size_t>(std::ceil(cfg.baseline_subsample * static_cast<double>(subset.size())));
    subset.resize(keep);
  }
  const auto train_report = evaluate_split(subset, em, cfg, cfg.decoding, state.seed ^ (0xba5eull << 32) ^ state.epoch, threads);
  update_baselines(state.baselines, train_report.sets);
  m.baselines_updated = train_report.sets.size();
  return m;
}

void train(TrainState& state, const std::vector<LabeledExample>& train_split,
           const std::vector<LabeledExample>& val_split, const TrainingModels& models, const RunConfig& cfg,
           const std::function<void(const EpochRecord&, const TrainState&)>& on_epoch, std::size_t threads) {
  while (!state.stopped) {
    EpochRecord rec;
    rec.train = train_epoch(state, train_split, models, cfg);
    rec.epoch = state.epoch;
    if (state.epoch % cfg.validate_every == 0) {
      rec.validation = validation_phase(state, train_split, val_split, models, cfg, threads);
      rec.validated = true;
      rec.decision = should_stop(state.history, state.epoch, cfg.max_epochs);
    } else {
      rec.decision = should_stop({}, state.epoch, cfg.max_epochs);
    }
    state.stopped = rec.decision.stop;
    state.stop_reason = rec.decision.reason;
    if (on_epoch) on_epoch(rec, state);
  }
}

void save_parameters(const std::filesystem::path& file, std::span<const double> params) {
  write_json(file, {{"parameters", std::vector<double>(params.begin(), params.end())}});
}

std::vector<double> load_parameters(const std::filesystem::path& file) {
  return read_json(file).at("parameters").get<std::vector<double>>();
}

void save_checkpoint(const std::filesystem::path& dir, const TrainState& state) {
  std::filesystem::create_directories(dir);
  save_parameters(dir / "policy.json", state.policy->parameters());
  save_parameters(dir / "reference.json", state.reference->parameters());
  if (!state.best_parameters.empty()) save_parameters(dir / "best_policy.json", state.best_parameters);
  write_json(dir / "optimizer.json", state.optimizer.state());
  write_json(dir / "baselines.json", state.baselines.to_json());
  write_json(dir / "state.json", {{"epoch", state.epoch},
                                  {"history", state.history},
                                  {"running_median", state.running_median},
                                  {"rng_state", state.rng.state()},
                                  {"seed", state.seed},
                                  {"stopped", state.stopped},
                                  {"stop_reason", state.stop_reason},
                                  {"best_asr", state.best_asr},
                                  {"best_epoch", state.best_epoch}});
}

void load_checkpoint(const std::filesystem::path& dir, TrainState& state) {
  auto copy_into = [](std::span<double> dst, const std::vector<double>& src, const std::string& what) {
    if (dst.size() != src.size()) throw Error(what + " has " + std::to_string(src.size()) + " parameters, expected " +
                                              std::to_string(dst.size()));
    std::copy(src.begin(), src.end(), dst.begin());
  };
  copy_into(state.policy->parameters(), load_parameters(dir / "policy.json"), "policy checkpoint");
  auto ref = state.policy->clone();
  copy_into(ref->parameters(), load_parameters(dir / "reference.json"), "reference checkpoint");
  state.reference = std::move(ref);
  state.best_parameters.clear();
  if (std::filesystem::exists(dir / "best_policy.json")) state.best_parameters = load_parameters(dir / "best_policy.json");
  state.optimizer.load_state(read_json(dir / "optimizer.json"));
  state.baselines = BaselineRegistry::from_json(read_json(dir / "baselines.json"));
  const auto s = read_json(dir / "state.json");
  state.epoch = s.at("epoch").get<std::size_t>();
  state.history = s.at("history").get<std::vector<double>>();
  state.running_median = s.at("running_median").get<double>();
  state.rng.set_state(s.at("rng_state").get<std::string>());
  state.seed = s.at("seed").get<std::uint64_t>();
  state.stopped = s.at("stopped").get<bool>();
  state.stop_reason = s.at("stop_reason").get<std::string>();
  state.best_asr = s.at("best_asr").get<double>();
  state.best_epoch = s.at("best_epoch").get<std::size_t>();
}

}  // namespace advpara
