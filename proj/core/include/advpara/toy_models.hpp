#pragma once

// Small closed-form implementations of every model contract. They make the
// training and evaluation machinery verifiable by enumeration and finite
// differences without pretrained checkpoints.

#include <map>
#include <memory>
#include <regex>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "advpara/models.hpp"

namespace advpara {

// Position-aligned conditional categorical generator.
//
//   logit_t(v) = S[src_t][v] + B[prev_t][v]
//
// src_t is the source token at position t (end-of-sequence past the end of
// the source) and prev_t the previously generated token (a begin marker at
// t = 0). End-of-sequence is masked before min_length content tokens and is
// the only choice in the last slot allowed by max_length.
class ToyGenerator final : public TrainablePolicy {
 public:
  explicit ToyGenerator(std::shared_ptr<const Vocabulary> vocab);

  const Vocabulary& vocabulary() const override { return *vocab_; }

  void next_logprobs(std::span<const TokenId> source, std::span<const TokenId> prefix, LengthBounds bounds,
                     std::span<double> out) const override;

  std::span<double> parameters() override { return params_; }
  std::span<const double> parameters() const override { return params_; }

  void accumulate_logprob_gradient(std::span<const TokenId> source, std::span<const TokenId> tokens,
                                   LengthBounds bounds, double weight, std::span<double> grad) const override;

  std::unique_ptr<TrainablePolicy> clone() const override { return std::make_unique<ToyGenerator>(*this); }

  // Row index of the begin marker in the transition table.
  TokenId begin_marker() const { return static_cast<TokenId>(vocab_->size()); }

  double& source_weight(TokenId src, TokenId out) { return params_[source_index(src, out)]; }
  double source_weight(TokenId src, TokenId out) const { return params_[source_index(src, out)]; }
  double& transition_weight(TokenId prev, TokenId out) { return params_[transition_index(prev, out)]; }
  double transition_weight(TokenId prev, TokenId out) const { return params_[transition_index(prev, out)]; }

  std::size_t source_index(TokenId src, TokenId out) const;
  std::size_t transition_index(TokenId prev, TokenId out) const;

 private:
  std::vector<bool> allowed_mask(std::size_t position, LengthBounds bounds) const;
  void logits(std::span<const TokenId> source, std::size_t position, TokenId prev, std::span<double> out) const;

  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<double> params_;
};

// Linear bag-of-words classifier: softmax(bias + sum of per-word weights).
class BagOfWordsVictim final : public Victim {
 public:
  BagOfWordsVictim(std::vector<std::string> class_names, std::vector<double> bias,
                   std::unordered_map<std::string, std::vector<double>> weights);

  std::size_t num_classes() const override { return class_names_.size(); }
  const std::vector<std::string>& class_names() const override { return class_names_; }
  std::vector<double> logits(std::string_view text) const;

 protected:
  ProbVector compute(std::string_view text) const override;

 private:
  std::vector<std::string> class_names_;
  std::vector<double> bias_;
  std::unordered_map<std::string, std::vector<double>> weights_;
};

// Rule-based entailment stand-in. A hypothesis contradicts its premise with
// probability `contradiction` when the parity of negation words differs or the
// lexicon polarities of the two texts have opposite signs. Otherwise the score
// is `novelty_scale` times the fraction of hypothesis words absent from the
// premise. Identical word sequences score 0.
class ToyNLIScorer final : public NLIScorer {
 public:
  ToyNLIScorer(std::map<std::string, int> polarity, std::set<std::string> negations,
               double contradiction = 0.9, double novelty_scale = 0.1);

  double contradiction_prob(std::string_view premise, std::string_view hypothesis) const override;

  int polarity(std::string_view text) const;

 private:
  std::map<std::string, int> polarity_;
  std::set<std::string> negations_;
  double contradiction_;
  double novelty_scale_;
};

// Normalised count vector over vocabulary ids. An optional concept map sends
// words to a canonical word first so that synonyms share a dimension.
// Out-of-vocabulary words share one dimension; a text without words maps to
// the end-of-sequence dimension.
class ToyEmbedder final : public Embedder {
 public:
  explicit ToyEmbedder(std::shared_ptr<const Vocabulary> vocab,
                       std::unordered_map<std::string, std::string> concepts = {});

  std::vector<double> embed(std::string_view text) const override;
  std::size_t dimension() const { return vocab_->size(); }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::unordered_map<std::string, std::string> concepts_;
};

// Acceptability as grammar membership: each word maps to a one-letter
// category and the category string must match `pattern` in full.
class ToyGrammarScorer final : public AcceptabilityScorer {
 public:
  ToyGrammarScorer(std::unordered_map<std::string, char> categories, const std::string& pattern);

  double acceptable_prob(std::string_view text) const override;
  bool grammatical(std::string_view text) const;
  std::optional<char> category(std::string_view word) const;

 private:
  std::unordered_map<std::string, char> categories_;
  std::regex pattern_;
};

// Bigram language model over a vocabulary; row 'size()' holds the start context.
class BigramLM final : public PerplexityScorer {
 public:
  BigramLM(std::shared_ptr<const Vocabulary> vocab, std::vector<std::vector<double>> probs);

  // Every word equally likely in every context.
  static BigramLM uniform(std::shared_ptr<const Vocabulary> vocab);
  // Add-k estimate from a corpus of texts.
  static BigramLM estimate(std::shared_ptr<const Vocabulary> vocab, const std::vector<std::string>& corpus,
                           double add_k = 0.1);

  double perplexity(std::string_view text) const override;
  double logprob(TokenId prev, TokenId next) const;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<std::vector<double>> probs_;
};

}  // namespace advpara
