#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advpara/config.hpp"

namespace advpara {

using TokenId = std::int32_t;
using ProbVector = std::vector<double>;

// An original input x with its label y and the cached victim prediction f(x).
struct LabeledExample {
  std::string id;
  std::string text;
  std::size_t label = 0;
  ProbVector victim_probs;
  std::size_t char_length = 0;
  std::size_t token_length = 0;

  bool operator==(const LabeledExample&) const = default;
};

// Checks a LabeledExample's invariants; throws DataError on violation.
void check_example(const LabeledExample& ex);

// Raw scores of the five validity constraints and their pass flags.
struct ConstraintReport {
  double contradiction_prob = 0.0;
  double cosine_similarity = 0.0;
  double acceptability_prob = 0.0;
  long char_length_diff = 0;
  bool contrast_phrase_violation = false;
  std::string contrast_phrase;

  bool label_invariance_pass = false;
  bool semantic_pass = false;
  bool acceptability_pass = false;
  bool length_pass = false;
  bool contrast_pass = false;

  // The constraint gate: 1 iff all five checks pass.
  bool delta() const {
    return label_invariance_pass && semantic_pass && acceptability_pass && length_pass && contrast_pass;
  }

  bool operator==(const ConstraintReport&) const = default;
};

// One generated paraphrase x'. Log-probabilities are summed over its tokens, in nats.
struct Candidate {
  std::string text;
  std::vector<TokenId> tokens;
  double policy_logprob = 0.0;
  double reference_logprob = 0.0;
  ProbVector victim_probs;
  ConstraintReport constraint_report;
  std::optional<double> reward;

  std::size_t length() const { return tokens.size(); }

  bool operator==(const Candidate&) const = default;
};

// The candidates decoded for one original. `requested` is the configured n;
// beam variants may return fewer when the search space runs out.
struct CandidateSet {
  std::string original_id;
  std::vector<Candidate> candidates;
  DecodingConfig decoding;
  std::size_t requested = 0;

  bool exhausted() const { return candidates.size() < requested; }

  bool operator==(const CandidateSet&) const = default;
};

std::size_t argmax(const ProbVector& p);

}  // namespace advpara
