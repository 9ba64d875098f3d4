#pragma once

// A small sentiment task on which the full pipeline runs in seconds.
//
// Sentences follow "det noun verb adv adv adj" over a 30-word vocabulary.
// The bag-of-words victim carries two planted errors: "decent" pushes
// towards negative and "weak" towards positive. The toy paraphraser prefers
// copying and synonyms, so its untrained beam rarely proposes those two
// words, while a policy that learns to use them flips almost every original
// without breaking any constraint.

#include <cstdint>
#include <string>
#include <vector>

#include "advpara/data.hpp"
#include "advpara/model_suite.hpp"
#include "advpara/toy_models.hpp"

namespace advpara::synthetic {

const std::vector<std::string>& class_names();

// Paraphraser prior logits.
struct PriorOptions {
  double copy = 4.0;
  double synonym = 3.0;
  double near_synonym = 0.5;
  double same_category = 0.0;
  double other = -1.0;
  double grammar_bonus = 1.0;
  double unk = -8.0;
};

std::shared_ptr<const Vocabulary> vocabulary();
std::unique_ptr<ToyGenerator> paraphraser(std::shared_ptr<const Vocabulary> vocab, const PriorOptions& opts = {});
std::unique_ptr<BagOfWordsVictim> victim();
std::unique_ptr<ToyNLIScorer> nli();
std::unique_ptr<ToyEmbedder> embedder(std::shared_ptr<const Vocabulary> vocab);
std::unique_ptr<ToyGrammarScorer> grammar();
SubstitutionSource synonyms();

// Raw labelled sentences; the label is the adjective's true polarity.
std::vector<RawExample> corpus(std::size_t count, std::uint64_t seed);

ModelSuite suite();

// Preprocessed and split dataset over corpus(count, seed).
Dataset dataset(const ModelSuite& models, std::size_t count, std::uint64_t seed, double val_frac = 0.1,
                double test_frac = 0.1);

// Hyperparameters sized for the task (the reference values assume large
// pretrained models and thousands of steps).
RunConfig run_config();

}  // namespace advpara::synthetic
