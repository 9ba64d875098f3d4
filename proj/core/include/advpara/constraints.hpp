#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advpara/models.hpp"
#include "advpara/types.hpp"

namespace advpara {

// Linking contrast phrases that may not be added at either end of a paraphrase.
class ContrastPhraseList {
 public:
  ContrastPhraseList();
  explicit ContrastPhraseList(std::vector<std::string> phrases);

  // One phrase per line; blank lines and lines starting with '#' are skipped.
  static ContrastPhraseList load(const std::filesystem::path& path);
  static const std::vector<std::string>& defaults();

  const std::vector<std::string>& phrases() const { return phrases_; }

  // The first listed phrase the text starts (or ends) with, word-aligned.
  std::optional<std::string> leading(std::string_view text) const;
  std::optional<std::string> trailing(std::string_view text) const;

 private:
  std::vector<std::string> phrases_;
  std::vector<std::vector<std::string>> split_;
};

template <typename Score>
struct CheckResult {
  bool pass;
  Score value;
};

CheckResult<double> check_label_invariance(std::string_view original, std::string_view paraphrase,
                                           const NLIScorer& nli, double threshold);
CheckResult<double> check_semantic_consistency(std::string_view original, std::string_view paraphrase,
                                               const Embedder& embedder, double threshold);
CheckResult<double> check_acceptability(std::string_view paraphrase, const AcceptabilityScorer& scorer,
                                        double threshold);
CheckResult<long> check_length(std::string_view original, std::string_view paraphrase, long threshold_chars);
// value holds the offending phrase when the check fails.
CheckResult<std::optional<std::string>> check_contrast_phrases(std::string_view original, std::string_view paraphrase,
                                                               const ContrastPhraseList& list);

struct Scorers {
  const NLIScorer* nli = nullptr;
  const Embedder* embedder = nullptr;
  const AcceptabilityScorer* acceptability = nullptr;
  const ContrastPhraseList* contrast = nullptr;
};

struct ConstraintThresholds {
  double contradiction = 0.2;
  double cosine = 0.8;
  double acceptability = 0.5;
  long char_diff = 30;

  static ConstraintThresholds from(const RunConfig& cfg);
};

ConstraintReport evaluate_all(const LabeledExample& original, std::string_view paraphrase, const Scorers& scorers,
                              const ConstraintThresholds& thresholds);

}  // namespace advpara
