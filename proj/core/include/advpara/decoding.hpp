#pragma once

#include <span>
#include <vector>

#include "advpara/models.hpp"
#include "advpara/rng.hpp"
#include "advpara/types.hpp"

namespace advpara::decoding {

struct NucleusEntry {
  TokenId token;
  double prob;  // renormalised within the nucleus
};

// The smallest prefix of the temperature-scaled softmax, ordered by
// probability and then token id, whose mass reaches top_p. -inf logits are
// never included.
std::vector<NucleusEntry> nucleus_support(std::span<const double> logits, double top_p, double temperature);

TokenId nucleus_step(std::span<const double> logits, double top_p, double temperature, Rng& rng);

// A finished beam. `score` is the (penalised, for diverse search) summed
// log-probability divided by the token count.
struct Hypothesis {
  GeneratorOutput output;
  double score = 0.0;
  std::size_t group = 0;
};

// Up to num_beams finished sequences, best length-normalised score first.
std::vector<Hypothesis> beam_search(const SequenceModel& model, std::span<const TokenId> source,
                                    std::size_t num_beams, LengthBounds bounds);

// Grouped beam search with a Hamming diversity penalty: while group g
// expands, each token's step score is lowered by diversity_penalty times the
// number of groups before g that picked that token at the same step. Results
// come back group by group, each group sorted by score.
std::vector<Hypothesis> diverse_beam_search(const SequenceModel& model, std::span<const TokenId> source,
                                            std::size_t num_beams, std::size_t num_groups,
                                            double diversity_penalty, LengthBounds bounds);

GeneratorOutput sample_sequence(const SequenceModel& model, std::span<const TokenId> source, double top_p,
                                double temperature, LengthBounds bounds, Rng& rng);

// Generator.sample: `count` sequences under the given decoding config. Beam
// variants return at most num_beams distinct sequences; fewer when the
// search space is exhausted.
std::vector<GeneratorOutput> generate(const SequenceModel& model, std::string_view input, const DecodingConfig& cfg,
                                      std::size_t count, Rng& rng);

// Decodes the candidate set for one original and attaches policy
// log-probabilities, plus reference log-probabilities when a reference model
// is given. Victim outputs and constraint reports are left for the caller.
CandidateSet generate_candidate_set(const SequenceModel& policy, const LabeledExample& original,
                                    const DecodingConfig& cfg, std::size_t n, Rng& rng,
                                    const SequenceModel* reference = nullptr);

}  // namespace advpara::decoding
