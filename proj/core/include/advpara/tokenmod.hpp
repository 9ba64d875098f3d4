#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "advpara/constraints.hpp"
#include "advpara/models.hpp"
#include "advpara/types.hpp"

namespace advpara {

// Replacement candidates per lowercase word.
class SubstitutionSource {
 public:
  SubstitutionSource() = default;
  explicit SubstitutionSource(std::map<std::string, std::vector<std::string>> table,
                              std::size_t max_candidates = std::numeric_limits<std::size_t>::max());

  // Lines of the form "word<TAB>cand1,cand2,...".
  static SubstitutionSource load(const std::filesystem::path& path,
                                 std::size_t max_candidates = std::numeric_limits<std::size_t>::max());

  const std::vector<std::string>& candidates(const std::string& word) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

class StopwordList {
 public:
  StopwordList();
  explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {}

  // One word per line.
  static StopwordList load(const std::filesystem::path& path);
  static const std::set<std::string>& defaults();

  bool contains(const std::string& w) const { return words_.count(w) != 0; }

 private:
  std::set<std::string> words_;
};

// Non-stopword positions ordered by the true-class confidence drop when the
// word is deleted (largest first, ties by position). One query per position.
std::vector<std::size_t> rank_by_deletion(const std::vector<std::string>& words, std::size_t label,
                                          const Victim& victim, const StopwordList& stopwords);

struct AttackStep {
  std::size_t position = 0;
  std::string original;
  std::string replacement;
  double confidence_after = 0.0;
};

struct AttackTrace {
  std::vector<AttackStep> steps;
  std::uint64_t rank_queries = 0;
  std::uint64_t substitution_queries = 0;
  std::uint64_t queries = 0;  // 1 + rank_queries + substitution_queries
  std::string final_text;
  bool success = false;
  std::optional<Candidate> adversarial;
};

struct GreedyAttackOptions {
  std::size_t max_words = std::numeric_limits<std::size_t>::max();
};

// Greedy word substitution in deletion-importance order. At each ranked
// position every candidate is queried; the constraint-satisfying one with
// the largest confidence drop is kept if the drop is positive. Positions are
// never revisited and the walk ends on a label flip.
AttackTrace greedy_attack(const LabeledExample& example, const Victim& victim, const SubstitutionSource& source,
                          const StopwordList& stopwords, const Scorers& scorers,
                          const ConstraintThresholds& thresholds, const GreedyAttackOptions& opts = {});

}  // namespace advpara
