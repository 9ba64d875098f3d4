#include "advpara/tokenmod.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "advpara/errors.hpp"
#include "advpara/evaluation.hpp"
#include "advpara/text.hpp"

namespace advpara {

SubstitutionSource::SubstitutionSource(std::map<std::string, std::vector<std::string>> table,
                                       std::size_t max_candidates) {
  for (auto& [word, cands] : table) {
    const std::string key = text::to_lower(word);
    std::vector<std::string> kept;
    for (const auto& c : cands) {
      const std::string lc = text::to_lower(text::trim(c));
      if (lc.empty() || lc == key || std::find(kept.begin(), kept.end(), lc) != kept.end()) continue;
      if (kept.size() == max_candidates) break;
      kept.push_back(lc);
    }
    if (!kept.empty()) table_[key] = std::move(kept);
  }
}

SubstitutionSource SubstitutionSource::load(const std::filesystem::path& path, std::size_t max_candidates) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open synonym table " + path.string());
  std::map<std::string, std::vector<std::string>> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("synonym table line " + std::to_string(lineno) + ": expected word<TAB>candidates");
    }
    auto& dst = table[std::string(text::trim(line.substr(0, tab)))];
    std::string rest = line.substr(tab + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      dst.emplace_back(text::trim(rest.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return SubstitutionSource(std::move(table), max_candidates);
}

const std::vector<std::string>& SubstitutionSource::candidates(const std::string& word) const {
  static const std::vector<std::string> none;
  const auto it = table_.find(word);
  return it == table_.end() ? none : it->second;
}

const std::set<std::string>& StopwordList::defaults() {
  static const std::set<std::string> words = {
      "a",    "an",   "and",  "are",  "as",   "at",   "be",    "by",    "for",  "from", "has",  "he",
      "in",   "is",   "it",   "its",  "of",   "on",   "or",    "that",  "the",  "this", "to",   "was",
      "were", "will", "with", "i",    "you",  "we",   "they",  "them",  "his",  "her",  "she",  "there",
      "these", "those", "been", "being", "have", "had", "do",  "does",  "did",  "so",   "than", "then"};
  return words;
}

StopwordList::StopwordList() : words_(defaults()) {}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword file " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (!t.empty() && t.front() != '#') words.insert(text::to_lower(t));
  }
  return StopwordList(std::move(words));
}

std::vector<std::size_t> rank_by_deletion(const std::vector<std::string>& words, std::size_t label,
                                          const Victim& victim, const StopwordList& stopwords) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (stopwords.contains(words[i])) continue;
    std::vector<std::string> rest;
    for (std::size_t j = 0; j < words.size(); ++j)
      if (j != i) rest.push_back(words[j]);
    const auto p = victim.predict(text::join(rest));
    if (label >= p.size()) throw Error("label out of range for victim output");
    scored.emplace_back(p[label], i);
  }
  // lowest remaining confidence = largest drop
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::size_t> out;
  for (const auto& s : scored) out.push_back(s.second);
  return out;
}

AttackTrace greedy_attack(const LabeledExample& example, const Victim& victim, const SubstitutionSource& source,
                          const StopwordList& stopwords, const Scorers& scorers,
                          const ConstraintThresholds& thresholds, const GreedyAttackOptions& opts) {
  AttackTrace trace;
  std::vector<std::string> current = text::words(example.text);
  trace.final_text = text::join(current);
  if (current.empty()) throw Error("example '" + example.id + "' has no words");

  const auto p0 = victim.predict(example.text);
  trace.queries = 1;
  if (example.label >= p0.size()) throw Error("label out of range for victim output");
  double confidence = p0[example.label];

  const auto ranking = rank_by_deletion(current, example.label, victim, stopwords);
  trace.rank_queries = ranking.size();

  std::size_t modified = 0;
  for (std::size_t pos : ranking) {
    if (modified >= opts.max_words) break;
    struct Best {
      std::string word;
      Candidate cand;
      double drop;
    };
    std::optional<Best> best;
    for (const auto& repl : source.candidates(current[pos])) {
      auto trial = current;
      trial[pos] = repl;
      Candidate c;
      c.text = text::join(trial);
      c.victim_probs = victim.predict(c.text);
      ++trace.substitution_queries;
      c.constraint_report = evaluate_all(example, c.text, scorers, thresholds);
      if (!c.constraint_report.delta()) continue;
      const double drop = confidence - c.victim_probs[example.label];
      if (!best || drop > best->drop) best = Best{repl, std::move(c), drop};
    }
    if (!best || best->drop <= 0.0) continue;

    trace.steps.push_back({pos, current[pos], best->word, best->cand.victim_probs[example.label]});
    current[pos] = best->word;
    confidence = best->cand.victim_probs[example.label];
    trace.final_text = best->cand.text;
    ++modified;
    if (is_adversarial(example, best->cand)) {
      trace.success = true;
      trace.adversarial = std::move(best->cand);
      break;
    }
  }
  trace.queries = 1 + trace.rank_queries + trace.substitution_queries;
  return trace;
}

}  // namespace advpara
