#include "advpara/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include "advpara/clustering.hpp"
#include "advpara/decoding.hpp"
#include "advpara/errors.hpp"
#include "advpara/serialization.hpp"
#include "advpara/text.hpp"

namespace advpara {

bool is_adversarial(const LabeledExample& original, const Candidate& candidate) {
  return candidate.constraint_report.delta() && argmax(candidate.victim_probs) != original.label;
}

double attack_success_rate(const std::vector<AttackResult>& results) {
  if (results.empty()) return 0.0;
  const auto hits = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.success; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(results.size());
}

double bootstrap_test(const std::vector<bool>& successes_a, const std::vector<bool>& successes_b,
                      std::size_t resamples, Rng& rng, bool two_sided) {
  if (resamples == 0) throw Error("resamples must be positive");
  if (successes_a.size() != successes_b.size()) throw Error("paired vectors differ in length");
  const std::size_t n = successes_a.size();
  if (n == 0) throw Error("paired vectors are empty");

  std::vector<int> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = int(successes_a[i]) - int(successes_b[i]);
  // The resampling depends only on the multiset of differences.
  std::sort(d.begin(), d.end());

  std::size_t le = 0, ge = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    long sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += d[rng.index(n)];
    if (sum <= 0) ++le;
    if (sum >= 0) ++ge;
  }
  const double lo = static_cast<double>(le) / static_cast<double>(resamples);
  if (!two_sided) return lo;
  const double hi = static_cast<double>(ge) / static_cast<double>(resamples);
  return std::min(1.0, 2.0 * std::min(lo, hi));
}

namespace {

clustering::Points embed_all(const std::vector<Candidate>& cands, const Embedder& embedder) {
  clustering::Points pts;
  pts.reserve(cands.size());
  for (const auto& c : cands) pts.push_back(embedder.embed(c.text));
  return pts;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

std::size_t diversity_score(const std::vector<Candidate>& successes, const Embedder& embedder,
                            const ClusteringConfig& cfg) {
  if (successes.empty()) return 0;
  const auto res = clustering::cluster(embed_all(successes, embedder), cfg);
  return res.num_clusters + res.num_noise;
}

std::vector<Candidate> filter_candidates(const std::vector<Candidate>& successes, const Embedder& embedder,
                                         const ClusteringConfig& clustering_cfg, const FilterConfig& cfg, Rng& rng) {
  if (successes.size() <= cfg.passthrough_max) return successes;
  const auto pts = embed_all(successes, embedder);
  const auto res = clustering::cluster(pts, clustering_cfg);

  std::vector<std::vector<std::size_t>> clusters(res.num_clusters), noise;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (res.labels[i] < 0) {
      noise.push_back({i});
    } else {
      clusters[static_cast<std::size_t>(res.labels[i])].push_back(i);
    }
  }
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  if (clusters.size() + noise.size() > cfg.max_total) rng.shuffle(noise);
  std::vector<std::vector<std::size_t>> groups = clusters;
  groups.insert(groups.end(), noise.begin(), noise.end());
  if (groups.size() > cfg.max_total) groups.resize(cfg.max_total);

  // members ordered by distance to the group medoid
  for (auto& g : groups) {
    std::size_t medoid = g.front();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : g) {
      double s = 0.0;
      for (std::size_t j : g) s += std::sqrt(sq_dist(pts[i], pts[j]));
      if (s < best) {
        best = s;
        medoid = i;
      }
    }
    std::stable_sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) {
      return sq_dist(pts[a], pts[medoid]) < sq_dist(pts[b], pts[medoid]);
    });
  }

  const std::size_t k = groups.size();
  const std::size_t per = std::max<std::size_t>(1, (cfg.target_total + k - 1) / k);
  std::vector<std::size_t> taken(k, 0);
  std::size_t total = 0;
  for (std::size_t g = 0; g < k; ++g) {
    taken[g] = std::min(per, groups[g].size());
    total += taken[g];
  }
  while (total > cfg.max_total) {
    // trim the largest contributions first, never below one per group
    const auto it = std::max_element(taken.begin(), taken.end());
    if (*it <= 1) break;
    --*it;
    --total;
  }
  for (bool grew = true; total < cfg.target_total && grew;) {
    grew = false;
    for (std::size_t g = 0; g < k && total < cfg.target_total; ++g) {
      if (taken[g] < groups[g].size()) {
        ++taken[g];
        ++total;
        grew = true;
      }
    }
  }

  std::vector<std::size_t> picked;
  for (std::size_t g = 0; g < k; ++g) picked.insert(picked.end(), groups[g].begin(), groups[g].begin() + taken[g]);
  std::sort(picked.begin(), picked.end());
  std::vector<Candidate> out;
  out.reserve(picked.size());
  for (std::size_t i : picked) out.push_back(successes[i]);
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

FluencyMetrics fluency_metrics(const std::vector<CandidateSet>& sets, const PerplexityScorer& scorer) {
  std::vector<double> ppl;
  std::set<std::pair<std::string, std::string>> bigrams;
  for (const auto& s : sets) {
    for (const auto& c : s.candidates) {
      ppl.push_back(scorer.perplexity(c.text));
      for (auto& bg : text::bigrams(c.text)) bigrams.insert(std::move(bg));
    }
  }
  return {median(std::move(ppl)), bigrams.size()};
}

nlohmann::json EvalReport::summary_json() const {
  return {{"attack_success_rate", attack_success_rate},
          {"avg_queries", avg_queries},
          {"avg_successes", avg_successes},
          {"diversity_score", diversity_score},
          {"median_perplexity", median_perplexity},
          {"unique_bigrams", unique_bigrams},
          {"num_originals", results.size()}};
}

void score_candidate_set(const LabeledExample& original, CandidateSet& set, const Victim& victim,
                         const Scorers& scorers, const ConstraintThresholds& thresholds, const RewardParams& reward) {
  for (auto& c : set.candidates) {
    c.victim_probs = victim.predict(c.text);
    c.constraint_report = evaluate_all(original, c.text, scorers, thresholds);
    c.reward = paraphrase_reward(degradation(original, c.victim_probs), c.constraint_report.delta(), reward.eta,
                                 reward.alpha);
  }
}

AttackResult attack_result(const LabeledExample& original, const CandidateSet& scored) {
  AttackResult r;
  r.original_id = original.id;
  for (const auto& c : scored.candidates) {
    if (is_adversarial(original, c)) r.successful_candidates.push_back(c);
  }
  r.num_successes = r.successful_candidates.size();
  r.success = r.num_successes > 0;
  r.queries_used = scored.candidates.size();
  return r;
}

EvalReport evaluate_split(const std::vector<LabeledExample>& split, const EvalModels& models, const RunConfig& cfg,
                          const DecodingConfig& decoding, std::uint64_t seed, std::size_t threads) {
  if (!models.generator || !models.victim) throw Error("evaluate_split needs a generator and a victim");
  const auto thresholds = ConstraintThresholds::from(cfg);
  const auto reward = RewardParams::from(cfg);

  EvalReport rep;
  rep.sets.resize(split.size());
  rep.results.resize(split.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < split.size(); i += step) {
      Rng rng = Rng::derive(seed, i);
      auto set = decoding::generate_candidate_set(*models.generator, split[i], decoding, cfg.n_eval_candidates, rng);
      score_candidate_set(split[i], set, *models.victim, models.scorers, thresholds, reward);
      rep.results[i] = attack_result(split[i], set);
      rep.sets[i] = std::move(set);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, split.size()));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }

  rep.attack_success_rate = attack_success_rate(rep.results);
  double q = 0.0, s = 0.0, div = 0.0;
  std::size_t with_success = 0;
  for (const auto& r : rep.results) {
    q += static_cast<double>(r.queries_used);
    s += static_cast<double>(r.num_successes);
    if (r.success && models.scorers.embedder) {
      div += static_cast<double>(diversity_score(r.successful_candidates, *models.scorers.embedder, cfg.clustering));
      ++with_success;
    }
  }
  if (!split.empty()) {
    rep.avg_queries = q / static_cast<double>(split.size());
    rep.avg_successes = s / static_cast<double>(split.size());
  }
  if (with_success) rep.diversity_score = div / static_cast<double>(with_success);
  if (models.perplexity) {
    const auto f = fluency_metrics(rep.sets, *models.perplexity);
    rep.median_perplexity = f.median_perplexity;
    rep.unique_bigrams = f.unique_bigrams;
  }
  return rep;
}

nlohmann::json to_json(const AttackResult& r) {
  nlohmann::json succ = nlohmann::json::array();
  for (const auto& c : r.successful_candidates) succ.push_back(to_json(c));
  return {{"original_id", r.original_id},
          {"success", r.success},
          {"num_successes", r.num_successes},
          {"queries_used", r.queries_used},
          {"successful_candidates", std::move(succ)}};
}

}  // namespace advpara
