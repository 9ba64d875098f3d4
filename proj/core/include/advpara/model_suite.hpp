#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "advpara/constraints.hpp"
#include "advpara/models.hpp"
#include "advpara/tokenmod.hpp"

namespace advpara {

// Every model role a run needs, built from one backend configuration.
struct ModelSuite {
  std::shared_ptr<const Vocabulary> vocab;
  std::shared_ptr<const TrainablePolicy> paraphraser;  // initial policy, also the reference
  std::shared_ptr<const Victim> victim;
  std::shared_ptr<const NLIScorer> nli;
  std::shared_ptr<const Embedder> embedder;
  std::shared_ptr<const AcceptabilityScorer> acceptability;
  std::shared_ptr<const PerplexityScorer> perplexity;
  ContrastPhraseList contrast;
  SubstitutionSource synonyms;
  StopwordList stopwords;

  Scorers scorers() const { return {nli.get(), embedder.get(), acceptability.get(), &contrast}; }
};

inline const std::vector<std::string>& model_roles() {
  static const std::vector<std::string> roles = {"victim", "paraphraser", "nli", "embedder", "acceptability",
                                                 "perplexity"};
  return roles;
}

struct RoleSpec {
  std::string backend = "synthetic";
  std::string checkpoint;  // relative paths resolve against the model directory
};

// JSON form: {"victim": {"backend": "synthetic", "checkpoint": ""}, ...}.
// Missing roles use the synthetic backend.
struct SuiteSpec {
  std::map<std::string, RoleSpec> roles;

  static SuiteSpec from_json(const nlohmann::json& j);
  static SuiteSpec load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// ADVPARA_MODEL_DIR, or ./models when unset.
std::filesystem::path default_model_dir();

// Builds the suite. Only the "synthetic" backend ships with the library; a
// paraphraser checkpoint (a parameter file) replaces the initial weights.
ModelSuite load_model_suite(const SuiteSpec& spec, const std::filesystem::path& model_dir = default_model_dir());

}  // namespace advpara
