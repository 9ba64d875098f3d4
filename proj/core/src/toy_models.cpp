#include "advpara/toy_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advpara/errors.hpp"
#include "advpara/text.hpp"

namespace advpara {

// ---------------------------------------------------------------- generator

ToyGenerator::ToyGenerator(std::shared_ptr<const Vocabulary> vocab) : vocab_(std::move(vocab)) {
  const std::size_t v = vocab_->size();
  params_.assign(v * v + (v + 1) * v, 0.0);
}

std::size_t ToyGenerator::source_index(TokenId src, TokenId out) const {
  const std::size_t v = vocab_->size();
  return static_cast<std::size_t>(src) * v + static_cast<std::size_t>(out);
}

std::size_t ToyGenerator::transition_index(TokenId prev, TokenId out) const {
  const std::size_t v = vocab_->size();
  return v * v + static_cast<std::size_t>(prev) * v + static_cast<std::size_t>(out);
}

std::vector<bool> ToyGenerator::allowed_mask(std::size_t position, LengthBounds bounds) const {
  const std::size_t v = vocab_->size();
  std::vector<bool> allowed(v, true);
  if (position + 1 >= bounds.max_length) {
    std::fill(allowed.begin(), allowed.end(), false);
    allowed[Vocabulary::eos] = true;
  } else if (position < bounds.min_length) {
    allowed[Vocabulary::eos] = false;
  }
  return allowed;
}

void ToyGenerator::logits(std::span<const TokenId> source, std::size_t position, TokenId prev,
                          std::span<double> out) const {
  const std::size_t v = vocab_->size();
  const TokenId src = position < source.size() ? source[position] : Vocabulary::eos;
  const double* s_row = &params_[source_index(src, 0)];
  const double* b_row = &params_[transition_index(prev, 0)];
  for (std::size_t i = 0; i < v; ++i) out[i] = s_row[i] + b_row[i];
}

void ToyGenerator::next_logprobs(std::span<const TokenId> source, std::span<const TokenId> prefix,
                                 LengthBounds bounds, std::span<double> out) const {
  const std::size_t v = vocab_->size();
  const std::size_t t = prefix.size();
  const TokenId prev = t == 0 ? begin_marker() : prefix[t - 1];
  std::vector<double> z(v);
  logits(source, t, prev, z);
  masked_log_softmax(z, allowed_mask(t, bounds), out);
}

void ToyGenerator::accumulate_logprob_gradient(std::span<const TokenId> source, std::span<const TokenId> tokens,
                                               LengthBounds bounds, double weight, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw Error("gradient buffer has the wrong size");
  const std::size_t v = vocab_->size();
  std::vector<double> lp(v);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const TokenId prev = t == 0 ? begin_marker() : tokens[t - 1];
    const TokenId src = t < source.size() ? source[t] : Vocabulary::eos;
    next_logprobs(source, tokens.first(t), bounds, lp);
    const std::size_t s_base = source_index(src, 0);
    const std::size_t b_base = transition_index(prev, 0);
    // d log softmax_y / d logit_i = 1[i = y] - p_i over the allowed tokens
    for (std::size_t i = 0; i < v; ++i) {
      if (std::isinf(lp[i])) continue;
      const double g = weight * ((static_cast<TokenId>(i) == tokens[t] ? 1.0 : 0.0) - std::exp(lp[i]));
      grad[s_base + i] += g;
      grad[b_base + i] += g;
    }
  }
}

// ------------------------------------------------------------------- victim

BagOfWordsVictim::BagOfWordsVictim(std::vector<std::string> class_names, std::vector<double> bias,
                                   std::unordered_map<std::string, std::vector<double>> weights)
    : class_names_(std::move(class_names)), bias_(std::move(bias)), weights_(std::move(weights)) {
  if (class_names_.size() < 2) throw Error("victim needs at least two classes");
  if (bias_.size() != class_names_.size()) throw Error("victim bias has the wrong size");
  for (const auto& [w, row] : weights_) {
    if (row.size() != class_names_.size()) throw Error("victim weights for '" + w + "' have the wrong size");
  }
}

std::vector<double> BagOfWordsVictim::logits(std::string_view s) const {
  std::vector<double> z = bias_;
  for (const auto& w : text::words(s)) {
    auto it = weights_.find(w);
    if (it == weights_.end()) continue;
    for (std::size_t c = 0; c < z.size(); ++c) z[c] += it->second[c];
  }
  return z;
}

ProbVector BagOfWordsVictim::compute(std::string_view s) const {
  auto z = logits(s);
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return z;
}

// ---------------------------------------------------------------------- nli

ToyNLIScorer::ToyNLIScorer(std::map<std::string, int> polarity, std::set<std::string> negations,
                           double contradiction, double novelty_scale)
    : polarity_(std::move(polarity)),
      negations_(std::move(negations)),
      contradiction_(contradiction),
      novelty_scale_(novelty_scale) {}

int ToyNLIScorer::polarity(std::string_view s) const {
  int sum = 0;
  int negs = 0;
  for (const auto& w : text::words(s)) {
    if (negations_.count(w)) ++negs;
    if (auto it = polarity_.find(w); it != polarity_.end()) sum += it->second;
  }
  const int sign = (sum > 0) - (sum < 0);
  return negs % 2 ? -sign : sign;
}

double ToyNLIScorer::contradiction_prob(std::string_view premise, std::string_view hypothesis) const {
  const auto wp = text::words(premise);
  const auto wh = text::words(hypothesis);
  if (wp == wh) return 0.0;

  auto negation_parity = [&](const std::vector<std::string>& ws) {
    return std::count_if(ws.begin(), ws.end(), [&](const auto& w) { return negations_.count(w) > 0; }) % 2;
  };
  if (negation_parity(wp) != negation_parity(wh)) return contradiction_;
  const int pp = polarity(premise);
  const int ph = polarity(hypothesis);
  if (pp != 0 && ph != 0 && pp != ph) return contradiction_;

  if (wh.empty()) return novelty_scale_;
  const std::set<std::string> seen(wp.begin(), wp.end());
  const auto novel = std::count_if(wh.begin(), wh.end(), [&](const auto& w) { return !seen.count(w); });
  return novelty_scale_ * static_cast<double>(novel) / static_cast<double>(wh.size());
}

// ----------------------------------------------------------------- embedder

ToyEmbedder::ToyEmbedder(std::shared_ptr<const Vocabulary> vocab, std::unordered_map<std::string, std::string> concepts)
    : vocab_(std::move(vocab)), concepts_(std::move(concepts)) {}

std::vector<double> ToyEmbedder::embed(std::string_view s) const {
  std::vector<double> e(vocab_->size(), 0.0);
  const auto ws = text::words(s);
  if (ws.empty()) {
    e[Vocabulary::eos] = 1.0;
    return e;
  }
  for (const auto& w : ws) {
    auto it = concepts_.find(w);
    const std::string& canon = it == concepts_.end() ? w : it->second;
    e[static_cast<std::size_t>(vocab_->id(canon))] += 1.0;
  }
  const double norm = std::sqrt(dot(e, e));
  for (auto& v : e) v /= norm;
  return e;
}

// ------------------------------------------------------------ acceptability

ToyGrammarScorer::ToyGrammarScorer(std::unordered_map<std::string, char> categories, const std::string& pattern)
    : categories_(std::move(categories)), pattern_(pattern) {}

std::optional<char> ToyGrammarScorer::category(std::string_view w) const {
  auto it = categories_.find(std::string(w));
  if (it == categories_.end()) return std::nullopt;
  return it->second;
}

bool ToyGrammarScorer::grammatical(std::string_view s) const {
  const auto ws = text::words(s);
  if (ws.empty()) return false;
  std::string cats;
  for (const auto& w : ws) {
    auto c = category(w);
    if (!c) return false;
    cats.push_back(*c);
  }
  return std::regex_match(cats, pattern_);
}

double ToyGrammarScorer::acceptable_prob(std::string_view s) const { return grammatical(s) ? 1.0 : 0.0; }

// ---------------------------------------------------------------- bigram lm

BigramLM::BigramLM(std::shared_ptr<const Vocabulary> vocab, std::vector<std::vector<double>> probs)
    : vocab_(std::move(vocab)), probs_(std::move(probs)) {
  const std::size_t v = vocab_->size();
  if (probs_.size() != v + 1) throw Error("bigram table needs one row per word plus the start row");
  for (const auto& row : probs_) {
    if (row.size() != v) throw Error("bigram row has the wrong size");
    double s = 0.0;
    for (double p : row) {
      if (p < 0.0) throw Error("negative bigram probability");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw Error("bigram row does not sum to 1");
  }
}

BigramLM BigramLM::uniform(std::shared_ptr<const Vocabulary> vocab) {
  const std::size_t v = vocab->size();
  std::vector<std::vector<double>> probs(v + 1, std::vector<double>(v, 1.0 / static_cast<double>(v)));
  return BigramLM(std::move(vocab), std::move(probs));
}

BigramLM BigramLM::estimate(std::shared_ptr<const Vocabulary> vocab, const std::vector<std::string>& corpus,
                            double add_k) {
  const std::size_t v = vocab->size();
  std::vector<std::vector<double>> counts(v + 1, std::vector<double>(v, add_k));
  for (const auto& s : corpus) {
    std::size_t prev = v;
    for (const auto& w : text::words(s)) {
      const auto id = static_cast<std::size_t>(vocab->id(w));
      counts[prev][id] += 1.0;
      prev = id;
    }
    counts[prev][Vocabulary::eos] += 1.0;
  }
  for (auto& row : counts) {
    double s = 0.0;
    for (double c : row) s += c;
    for (auto& c : row) c /= s;
  }
  return BigramLM(std::move(vocab), std::move(counts));
}

double BigramLM::logprob(TokenId prev, TokenId next) const {
  return std::log(probs_.at(static_cast<std::size_t>(prev)).at(static_cast<std::size_t>(next)));
}

double BigramLM::perplexity(std::string_view s) const {
  const auto ws = text::words(s);
  if (ws.empty()) return std::numeric_limits<double>::infinity();
  auto prev = static_cast<TokenId>(vocab_->size());
  double total = 0.0;
  for (const auto& w : ws) {
    const TokenId id = vocab_->id(w);
    total += logprob(prev, id);
    prev = id;
  }
  return std::exp(-total / static_cast<double>(ws.size()));
}

}  // namespace advpara
