#include "advpara/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "advpara/errors.hpp"

namespace advpara::decoding {

std::vector<NucleusEntry> nucleus_support(std::span<const double> logits, double top_p, double temperature) {
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error("top_p must lie in (0, 1]");
  if (!(temperature > 0.0)) throw Error("temperature must be positive");

  double mx = -std::numeric_limits<double>::infinity();
  for (double z : logits) {
    if (std::isnan(z)) throw Error("NaN logit");
    mx = std::max(mx, z);
  }
  if (std::isinf(mx) && mx < 0) throw Error("every token is masked");

  std::vector<NucleusEntry> probs;
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (std::isinf(logits[i])) continue;
    const double p = std::exp((logits[i] - mx) / temperature);
    probs.push_back({static_cast<TokenId>(i), p});
    total += p;
  }
  for (auto& e : probs) e.prob /= total;
  std::stable_sort(probs.begin(), probs.end(), [](const auto& a, const auto& b) { return a.prob > b.prob; });

  std::size_t keep = probs.size();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i].prob;
    if (cum >= top_p) {
      keep = i + 1;
      break;
    }
  }
  probs.resize(keep);
  double mass = 0.0;
  for (const auto& e : probs) mass += e.prob;
  for (auto& e : probs) e.prob /= mass;
  return probs;
}

TokenId nucleus_step(std::span<const double> logits, double top_p, double temperature, Rng& rng) {
  const auto support = nucleus_support(logits, top_p, temperature);
  double u = rng.uniform();
  for (const auto& e : support) {
    if (u < e.prob) return e.token;
    u -= e.prob;
  }
  return support.back().token;
}

GeneratorOutput sample_sequence(const SequenceModel& model, std::span<const TokenId> source, double top_p,
                                double temperature, LengthBounds bounds, Rng& rng) {
  const auto& vocab = model.vocabulary();
  GeneratorOutput out;
  std::vector<double> lp(vocab.size());
  while (true) {
    model.next_logprobs(source, out.tokens, bounds, lp);
    const TokenId tok = nucleus_step(lp, top_p, temperature, rng);
    out.tokens.push_back(tok);
    out.per_token_logprobs.push_back(lp[static_cast<std::size_t>(tok)]);
    if (tok == Vocabulary::eos) break;
  }
  out.text = vocab.decode(out.tokens);
  return out;
}

namespace {

struct Beam {
  std::vector<TokenId> tokens;
  std::vector<double> logprobs;
  double rank = 0.0;  // summed step scores, penalties included
};

struct Expansion {
  std::size_t beam;
  TokenId token;
  double logprob;
  double rank;
};

struct Group {
  std::vector<Beam> live;
  std::vector<Hypothesis> finished;
  bool done = false;
};

std::vector<Hypothesis> grouped_search(const SequenceModel& model, std::span<const TokenId> source,
                                       std::size_t num_beams, std::size_t num_groups, double penalty,
                                       LengthBounds bounds) {
  if (num_beams < 1 || num_groups < 1 || num_groups > num_beams || num_beams % num_groups != 0) {
    throw Error("num_groups must divide num_beams");
  }
  const auto& vocab = model.vocabulary();
  const std::size_t v = vocab.size();
  const std::size_t width = num_beams / num_groups;

  std::vector<Group> groups(num_groups);
  for (auto& g : groups) g.live.push_back(Beam{});

  std::vector<double> lp(v);
  std::vector<std::size_t> picked(v);
  for (std::size_t step = 0; step < bounds.max_length; ++step) {
    std::fill(picked.begin(), picked.end(), 0);
    bool any_live = false;
    for (std::size_t gi = 0; gi < num_groups; ++gi) {
      Group& g = groups[gi];
      if (g.done) continue;

      std::vector<Expansion> exps;
      for (std::size_t b = 0; b < g.live.size(); ++b) {
        model.next_logprobs(source, g.live[b].tokens, bounds, lp);
        for (std::size_t tok = 0; tok < v; ++tok) {
          if (std::isinf(lp[tok])) continue;
          const double step_score = lp[tok] - penalty * static_cast<double>(picked[tok]);
          exps.push_back({b, static_cast<TokenId>(tok), lp[tok], g.live[b].rank + step_score});
        }
      }
      std::sort(exps.begin(), exps.end(), [](const Expansion& a, const Expansion& b) {
        if (a.rank != b.rank) return a.rank > b.rank;
        if (a.beam != b.beam) return a.beam < b.beam;
        return a.token < b.token;
      });

      std::vector<Beam> next;
      for (std::size_t r = 0; r < exps.size(); ++r) {
        if (next.size() == width && r >= width) break;
        const Expansion& e = exps[r];
        const Beam& parent = g.live[e.beam];
        if (e.token == Vocabulary::eos) {
          // only end-of-sequence moves ranked within the beam width finish
          if (r >= width) continue;
          Hypothesis h;
          h.output.tokens = parent.tokens;
          h.output.tokens.push_back(e.token);
          h.output.per_token_logprobs = parent.logprobs;
          h.output.per_token_logprobs.push_back(e.logprob);
          h.output.text = vocab.decode(h.output.tokens);
          h.score = e.rank / static_cast<double>(h.output.tokens.size());
          h.group = gi;
          g.finished.push_back(std::move(h));
        } else if (next.size() < width) {
          Beam nb = parent;
          nb.tokens.push_back(e.token);
          nb.logprobs.push_back(e.logprob);
          nb.rank = e.rank;
          next.push_back(std::move(nb));
        }
      }
      for (const auto& nb : next) ++picked[static_cast<std::size_t>(nb.tokens.back())];
      g.live = std::move(next);
      if (g.finished.size() >= width || g.live.empty()) g.done = true;
      any_live = any_live || !g.done;
    }
    if (!any_live) break;
  }

  std::vector<Hypothesis> out;
  for (auto& g : groups) {
    std::stable_sort(g.finished.begin(), g.finished.end(),
                     [](const Hypothesis& a, const Hypothesis& b) { return a.score > b.score; });
    if (g.finished.size() > width) g.finished.resize(width);
    for (auto& h : g.finished) out.push_back(std::move(h));
  }
  return out;
}

}  // namespace

std::vector<Hypothesis> beam_search(const SequenceModel& model, std::span<const TokenId> source,
                                    std::size_t num_beams, LengthBounds bounds) {
  return grouped_search(model, source, num_beams, 1, 0.0, bounds);
}

std::vector<Hypothesis> diverse_beam_search(const SequenceModel& model, std::span<const TokenId> source,
                                            std::size_t num_beams, std::size_t num_groups,
                                            double diversity_penalty, LengthBounds bounds) {
  if (diversity_penalty < 0.0) throw Error("diversity_penalty must be >= 0");
  return grouped_search(model, source, num_beams, num_groups, diversity_penalty, bounds);
}

std::vector<GeneratorOutput> generate(const SequenceModel& model, std::string_view input, const DecodingConfig& cfg,
                                      std::size_t count, Rng& rng) {
  cfg.validate();
  if (count < 1) throw Error("count must be positive");
  const auto source = model.vocabulary().encode(input);
  const LengthBounds bounds = bounds_of(cfg);
  std::vector<GeneratorOutput> out;
  if (cfg.variant == DecodingVariant::nucleus) {
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(sample_sequence(model, source, cfg.top_p, cfg.temperature, bounds, rng));
    }
    return out;
  }
  auto hyps = cfg.variant == DecodingVariant::beam
                  ? beam_search(model, source, cfg.num_beams, bounds)
                  : diverse_beam_search(model, source, cfg.num_beams, cfg.num_groups, cfg.diversity_penalty, bounds);
  const std::size_t keep = std::min(count, hyps.size());
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(std::move(hyps[i].output));
  return out;
}

CandidateSet generate_candidate_set(const SequenceModel& policy, const LabeledExample& original,
                                    const DecodingConfig& cfg, std::size_t n, Rng& rng,
                                    const SequenceModel* reference) {
  CandidateSet set;
  set.original_id = original.id;
  set.decoding = cfg;
  set.requested = cfg.variant == DecodingVariant::nucleus ? n : std::min(n, cfg.num_beams);
  const auto outputs = generate(policy, original.text, cfg, n, rng);
  const auto source = reference ? reference->vocabulary().encode(original.text) : std::vector<TokenId>{};
  set.candidates.reserve(outputs.size());
  for (const auto& o : outputs) {
    Candidate c;
    c.text = o.text;
    c.tokens = o.tokens;
    c.policy_logprob = o.total_logprob();
    if (reference) {
      const auto ref = reference->score_tokens(source, o.tokens, bounds_of(cfg));
      c.reference_logprob = std::accumulate(ref.begin(), ref.end(), 0.0);
    }
    set.candidates.push_back(std::move(c));
  }
  return set;
}

}  // namespace advpara::decoding
