#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "advpara/models.hpp"
#include "advpara/types.hpp"

namespace advpara {

struct RawExample {
  std::string id;
  std::string text;
  std::size_t label = 0;
};

// One JSON object per line with "text" and "label" (class name or index) and
// an optional "id" (defaults to the line number). Throws DataError naming the
// line for malformed rows, unknown labels, and duplicate ids.
std::vector<RawExample> load_jsonl(const std::filesystem::path& path, const std::vector<std::string>& class_names);

// Word count under the generator's word-level tokenizer.
std::size_t token_length(const Vocabulary& vocab, std::string_view text);

struct PreprocessStats {
  std::size_t raw = 0;
  std::size_t misclassified = 0;
  std::size_t too_long = 0;
  std::size_t kept = 0;

  nlohmann::json to_json() const;
};

// Queries the victim once per raw example and keeps those it classifies
// correctly (when exclude_misclassified) with at most max_tokens tokens.
// Survivors carry the cached victim output.
std::vector<LabeledExample> preprocess(const std::vector<RawExample>& raw, const Victim& victim,
                                       const Vocabulary& tokenizer, std::size_t max_tokens,
                                       bool exclude_misclassified = true, PreprocessStats* stats = nullptr);

std::vector<RawExample> to_raw(const std::vector<LabeledExample>& examples);

struct Splits {
  std::vector<LabeledExample> train, validation, test;
};

// Disjoint random cover; validation and test sizes are round(n * frac).
Splits split_random(const std::vector<LabeledExample>& examples, double val_frac, double test_frac,
                    std::uint64_t seed);

struct Dataset {
  std::string name;
  std::vector<std::string> class_names;
  Splits splits;
  nlohmann::json provenance = nlohmann::json::object();

  const std::vector<LabeledExample>& split(std::string_view name) const;
  // Throws DataError if an id appears in two splits or an example is invalid.
  void check() const;
};

// train.jsonl, validation.jsonl, test.jsonl and dataset.json (names and provenance).
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace advpara
