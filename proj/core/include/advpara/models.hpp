#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "advpara/types.hpp"

namespace advpara {

struct LengthBounds {
  std::size_t min_length = 3;
  std::size_t max_length = 48;
};

inline LengthBounds bounds_of(const DecodingConfig& c) { return {c.min_length, c.max_length}; }

// Word-level vocabulary. Id 0 is end-of-sequence, id 1 stands in for
// out-of-vocabulary words.
class Vocabulary {
 public:
  static constexpr TokenId eos = 0;
  static constexpr TokenId unk = 1;

  explicit Vocabulary(const std::vector<std::string>& words);

  std::size_t size() const { return words_.size(); }
  const std::string& word(TokenId id) const;
  std::optional<TokenId> find(std::string_view word) const;
  TokenId id(std::string_view word) const { return find(word).value_or(unk); }
  bool valid(TokenId id) const { return id >= 0 && static_cast<std::size_t>(id) < words_.size(); }

  // Lowercased word tokens; throws TokenizerError when the text has no words.
  std::vector<TokenId> encode(std::string_view text) const;
  // Joins words with single spaces, stopping at end-of-sequence.
  std::string decode(std::span<const TokenId> tokens) const;

  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
};

// A generated sequence with per-token log-probabilities under the model that
// produced it (natural log, temperature 1).
struct GeneratorOutput {
  std::vector<TokenId> tokens;
  std::vector<double> per_token_logprobs;
  std::string text;

  double total_logprob() const;
};

// Autoregressive conditional model over a Vocabulary: the paraphrase
// generator contract. Decoding algorithms only need next_logprobs.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;

  // log p(next | prefix, source) for every token; disallowed tokens are -inf.
  // `prefix` must not contain end-of-sequence.
  virtual void next_logprobs(std::span<const TokenId> source, std::span<const TokenId> prefix,
                             LengthBounds bounds, std::span<double> out) const = 0;

  // Teacher-forced per-token log-probabilities of `tokens`. Reproduces the
  // values stored by decoding under the same parameters exactly.
  std::vector<double> score(std::string_view input, std::span<const TokenId> tokens, LengthBounds bounds) const;
  std::vector<double> score_tokens(std::span<const TokenId> source, std::span<const TokenId> tokens,
                                   LengthBounds bounds) const;
};

// A SequenceModel with a flat parameter vector and closed-form gradients of
// its sequence log-probability.
class TrainablePolicy : public SequenceModel {
 public:
  virtual std::span<double> parameters() = 0;
  virtual std::span<const double> parameters() const = 0;

  // grad += weight * d/dθ sum_t log p(tokens_t | tokens_<t, source).
  virtual void accumulate_logprob_gradient(std::span<const TokenId> source, std::span<const TokenId> tokens,
                                           LengthBounds bounds, double weight, std::span<double> grad) const = 0;

  virtual std::unique_ptr<TrainablePolicy> clone() const = 0;
};

// Number of victim forward passes. Safe to bump from concurrent callers.
class QueryCounter {
 public:
  void increment() { count_.fetch_add(1, std::memory_order_relaxed); }
  std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};

// The attacked classifier f. Every predict() call is one query.
class Victim {
 public:
  virtual ~Victim() = default;

  ProbVector predict(std::string_view text) const {
    counter_.increment();
    return compute(text);
  }

  std::uint64_t queries() const { return counter_.count(); }
  virtual std::size_t num_classes() const = 0;
  virtual const std::vector<std::string>& class_names() const = 0;

 protected:
  virtual ProbVector compute(std::string_view text) const = 0;

 private:
  mutable QueryCounter counter_;
};

class NLIScorer {
 public:
  virtual ~NLIScorer() = default;
  // Probability that `hypothesis` contradicts `premise`.
  virtual double contradiction_prob(std::string_view premise, std::string_view hypothesis) const = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  // Unit-norm sentence embedding.
  virtual std::vector<double> embed(std::string_view text) const = 0;
};

class AcceptabilityScorer {
 public:
  virtual ~AcceptabilityScorer() = default;
  virtual double acceptable_prob(std::string_view text) const = 0;
};

class PerplexityScorer {
 public:
  virtual ~PerplexityScorer() = default;
  // exp(-mean per-token log-probability) under the scoring language model.
  virtual double perplexity(std::string_view text) const = 0;
};

double dot(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Log-softmax of `logits` restricted to entries where `allowed` is true.
void masked_log_softmax(std::span<const double> logits, const std::vector<bool>& allowed, std::span<double> out);

}  // namespace advpara
