#include "advpara/constraints.hpp"

#include <algorithm>
#include <fstream>

#include "advpara/errors.hpp"
#include "advpara/text.hpp"

namespace advpara {

const std::vector<std::string>& ContrastPhraseList::defaults() {
  static const std::vector<std::string> list = {
      "however", "nonetheless", "but",   "although", "though",          "yet",
      "nevertheless", "still",  "even so", "on the other hand"};
  return list;
}

ContrastPhraseList::ContrastPhraseList() : ContrastPhraseList(defaults()) {}

ContrastPhraseList::ContrastPhraseList(std::vector<std::string> phrases) : phrases_(std::move(phrases)) {
  if (phrases_.empty()) throw Error("contrast phrase list is empty");
  for (const auto& p : phrases_) {
    if (p != text::to_lower(p) || text::trim(p) != p || p.empty()) {
      throw Error("contrast phrase must be lowercase and trimmed: '" + p + "'");
    }
    auto w = text::words(p);
    if (w.empty()) throw Error("contrast phrase has no words: '" + p + "'");
    split_.push_back(std::move(w));
  }
}

ContrastPhraseList ContrastPhraseList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open contrast phrase file " + path.string());
  std::vector<std::string> phrases;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    phrases.push_back(text::to_lower(t));
  }
  return ContrastPhraseList(std::move(phrases));
}

std::optional<std::string> ContrastPhraseList::leading(std::string_view s) const {
  const auto w = text::words(s);
  for (std::size_t i = 0; i < phrases_.size(); ++i) {
    const auto& p = split_[i];
    if (p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin())) return phrases_[i];
  }
  return std::nullopt;
}

std::optional<std::string> ContrastPhraseList::trailing(std::string_view s) const {
  const auto w = text::words(s);
  for (std::size_t i = 0; i < phrases_.size(); ++i) {
    const auto& p = split_[i];
    if (p.size() <= w.size() && std::equal(p.rbegin(), p.rend(), w.rbegin())) return phrases_[i];
  }
  return std::nullopt;
}

CheckResult<double> check_label_invariance(std::string_view original, std::string_view paraphrase,
                                           const NLIScorer& nli, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("contradiction threshold must lie in [0, 1]");
  const double p = nli.contradiction_prob(original, paraphrase);
  return {p <= threshold, p};
}

CheckResult<double> check_semantic_consistency(std::string_view original, std::string_view paraphrase,
                                               const Embedder& embedder, double threshold) {
  const auto a = embedder.embed(original);
  const auto b = embedder.embed(paraphrase);
  const double c = cosine_similarity(a, b);
  return {c >= threshold, c};
}

CheckResult<double> check_acceptability(std::string_view paraphrase, const AcceptabilityScorer& scorer,
                                        double threshold) {
  const double p = scorer.acceptable_prob(paraphrase);
  return {p >= threshold, p};
}

CheckResult<long> check_length(std::string_view original, std::string_view paraphrase, long threshold_chars) {
  const long a = static_cast<long>(text::char_length(original));
  const long b = static_cast<long>(text::char_length(paraphrase));
  const long diff = b - a;
  return {std::labs(diff) <= threshold_chars, diff};
}

CheckResult<std::optional<std::string>> check_contrast_phrases(std::string_view original, std::string_view paraphrase,
                                                               const ContrastPhraseList& list) {
  // The exemption applies per end: an original that starts with a phrase only
  // licenses that phrase at the start of the paraphrase.
  const auto para_lead = list.leading(paraphrase);
  if (para_lead && list.leading(original) != para_lead) return {false, para_lead};
  const auto para_trail = list.trailing(paraphrase);
  if (para_trail && list.trailing(original) != para_trail) return {false, para_trail};
  return {true, std::nullopt};
}

ConstraintThresholds ConstraintThresholds::from(const RunConfig& cfg) {
  return {cfg.contradiction_threshold, cfg.cosine_threshold, cfg.acceptability_threshold, cfg.char_diff_threshold};
}

ConstraintReport evaluate_all(const LabeledExample& original, std::string_view paraphrase, const Scorers& scorers,
                              const ConstraintThresholds& thresholds) {
  if (!scorers.nli || !scorers.embedder || !scorers.acceptability || !scorers.contrast) {
    throw Error("evaluate_all needs every scorer");
  }
  ConstraintReport r;
  const auto li = check_label_invariance(original.text, paraphrase, *scorers.nli, thresholds.contradiction);
  r.contradiction_prob = li.value;
  r.label_invariance_pass = li.pass;

  const auto sc = check_semantic_consistency(original.text, paraphrase, *scorers.embedder, thresholds.cosine);
  r.cosine_similarity = sc.value;
  r.semantic_pass = sc.pass;

  const auto ac = check_acceptability(paraphrase, *scorers.acceptability, thresholds.acceptability);
  r.acceptability_prob = ac.value;
  r.acceptability_pass = ac.pass;

  const auto len = check_length(original.text, paraphrase, thresholds.char_diff);
  r.char_length_diff = len.value;
  r.length_pass = len.pass;

  const auto cp = check_contrast_phrases(original.text, paraphrase, *scorers.contrast);
  r.contrast_pass = cp.pass;
  r.contrast_phrase_violation = !cp.pass;
  r.contrast_phrase = cp.value.value_or("");
  return r;
}

}  // namespace advpara
