// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "advpara/constraints.hpp"
#include "advpara/data.hpp"
#include "advpara/decoding.hpp"
#include "advpara/evaluation.hpp"
#include "advpara/rewards.hpp"
#include "advpara/synthetic.hpp"
#include "advpara/text.hpp"
#include "advpara/tokenmod.hpp"
#include "advpara/training.hpp"
#include "../support.hpp"

using namespace advpara;
using namespace advpara::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome reward_suite() {
  Rng rng(101);
  std::size_t bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const double V = 2.0 * rng.uniform() - 1.0;
    const bool delta = rng.index(2) == 1;
    const double r = paraphrase_reward(V, delta, 35.0, 10.0);
    if (r < 0.0 || r > 10.0) ++bad;
    if ((!delta || V <= 0.0) && r != 0.0) ++bad;
    if (delta && V >= 10.0 / 35.0 && r != 10.0) ++bad;
  }
  // boundary V = alpha / eta exactly
  if (paraphrase_reward(10.0 / 35.0, true, 35.0, 10.0) != 10.0) ++bad;
  return {bad == 0, std::to_string(bad) + " violations in 10000 draws"};
}

Outcome gradient_check() {
  auto vocab = small_vocab(4);
  const LengthBounds bounds{1, 5};
  const std::vector<TokenId> source = {2, 3, 4};
  double worst = 0.0;
  for (std::uint64_t point = 0; point < 20; ++point) {
    auto policy = random_generator(vocab, 1000 + point, 1.5);
    Rng rng(2000 + point);
    std::vector<PolicySample> samples;
    for (int k = 0; k < 6; ++k) {
      PolicySample s;
      s.source = source;
      const auto out = decoding::sample_sequence(*policy, source, 1.0, 1.0, bounds, rng);
      s.candidate.tokens = out.tokens;
      s.reward.R = 10.0 * rng.uniform() - 3.0;
      samples.push_back(s);
    }
    std::vector<double> analytic(policy->parameters().size(), 0.0);
    reinforce_gradient(*policy, samples, bounds, analytic);

    std::vector<double> numeric(analytic.size());
    const double h = 1e-5;
    auto params = policy->parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + h;
      const double up = reinforce_objective(*policy, samples, bounds);
      params[i] = keep - h;
      const double down = reinforce_objective(*policy, samples, bounds);
      params[i] = keep;
      numeric[i] = (up - down) / (2.0 * h);
    }
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  std::ostringstream os;
  os << "max relative error " << worst << " over 20 points";
  return {worst < 1e-4, os.str()};
}

Outcome kl_oracle() {
  auto vocab = small_vocab(4);
  const LengthBounds bounds{1, 5};
  const std::vector<TokenId> source = {2, 5, 3};
  auto pi = random_generator(vocab, 31, 1.0);
  auto rho = random_generator(vocab, 32, 1.0);

  // Sequence-level sum over the enumerated space, using the scorers.
  const auto space = enumerate(*pi, source, bounds);
  double seq_sum = 0.0, mass = 0.0;
  for (const auto& e : space) {
    const auto lp = pi->score_tokens(source, e.tokens, bounds);
    const auto lr = rho->score_tokens(source, e.tokens, bounds);
    const double a = std::accumulate(lp.begin(), lp.end(), 0.0);
    const double b = std::accumulate(lr.begin(), lr.end(), 0.0);
    const double T = static_cast<double>(e.tokens.size());
    seq_sum += std::exp(a) * kl_sample_term(a, b, e.tokens.size()) * T;
    mass += std::exp(a);
  }

  // Exact KL by the chain rule: prefix probability times per-step KL.
  const std::size_t V = vocab->size();
  std::function<double(std::vector<TokenId>&, double)> chain = [&](std::vector<TokenId>& prefix, double logp) {
    std::vector<double> p(V), r(V);
    pi->next_logprobs(source, prefix, bounds, p);
    rho->next_logprobs(source, prefix, bounds, r);
    double total = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      if (std::isinf(p[v])) continue;
      total += std::exp(logp) * std::exp(p[v]) * (p[v] - r[v]);
      if (v != 0) {
        prefix.push_back(static_cast<TokenId>(v));
        total += chain(prefix, logp + p[v]);
        prefix.pop_back();
      }
    }
    return total;
  };
  std::vector<TokenId> prefix;
  const double exact = chain(prefix, 0.0);
  const double rel = std::abs(seq_sum - exact) / std::abs(exact);

  Rng rng(33);
  const int n = 50000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto out = decoding::sample_sequence(*pi, source, 1.0, 1.0, bounds, rng);
    const auto lr = rho->score_tokens(source, out.tokens, bounds);
    const double term = kl_sample_term(out.total_logprob(), std::accumulate(lr.begin(), lr.end(), 0.0),
                                       out.tokens.size()) *
                        static_cast<double>(out.tokens.size());
    sum += term;
    sq += term * term;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  const double z = std::abs(mean - exact) / se;

  std::ostringstream os;
  os << space.size() << " sequences (mass " << mass << "), exact KL " << exact << ", enumeration rel err " << rel
     << ", Monte Carlo " << mean << " (" << z << " SE)";
  return {space.size() <= 10000 && rel < 1e-8 && z < 3.0, os.str()};
}

Outcome baseline_unbiasedness() {
  auto vocab = small_vocab(3);
  // fixed length: exactly three content tokens, so T = 4 everywhere
  const LengthBounds bounds{3, 4};
  const std::vector<TokenId> source = {2, 3, 4};
  auto policy = random_generator(vocab, 41, 1.0);
  const auto space = enumerate(*policy, source, bounds);
  const std::size_t P = policy->parameters().size();

  auto reward_of = [](const std::vector<TokenId>& t) {
    double r = 0.0;
    for (TokenId x : t) r += x == 2 ? 3.0 : (x == 3 ? 1.0 : 0.0);
    return std::min(10.0, r);
  };
  double mean_r = 0.0;
  for (const auto& e : space) mean_r += std::exp(e.logprob) * reward_of(e.tokens);

  auto expected_grad = [&](double b) {
    std::vector<double> g(P, 0.0);
    for (const auto& e : space) {
      PolicySample s;
      s.source = source;
      s.candidate.tokens = e.tokens;
      s.reward.R = modified_reward(reward_of(e.tokens), b, 0.0, 0.0);
      std::vector<double> gi(P, 0.0);
      reinforce_gradient(*policy, {s}, bounds, gi);
      for (std::size_t i = 0; i < P; ++i) g[i] += std::exp(e.logprob) * gi[i];
    }
    return g;
  };
  const auto g0 = expected_grad(0.0);
  const auto gb = expected_grad(mean_r);
  const double rel = relative_error(g0, gb);

  // empirical variance over 1000 batches of 8
  Rng rng(42);
  double var0 = 0.0, varb = 0.0;
  for (int batch = 0; batch < 1000; ++batch) {
    std::vector<PolicySample> s0, sb;
    for (int k = 0; k < 8; ++k) {
      const auto out = decoding::sample_sequence(*policy, source, 1.0, 1.0, bounds, rng);
      PolicySample s;
      s.source = source;
      s.candidate.tokens = out.tokens;
      s.reward.R = reward_of(out.tokens);
      s0.push_back(s);
      s.reward.R -= mean_r;
      sb.push_back(s);
    }
    std::vector<double> a(P, 0.0), b(P, 0.0);
    reinforce_gradient(*policy, s0, bounds, a);
    reinforce_gradient(*policy, sb, bounds, b);
    for (std::size_t i = 0; i < P; ++i) {
      var0 += (a[i] - g0[i]) * (a[i] - g0[i]);
      varb += (b[i] - g0[i]) * (b[i] - g0[i]);
    }
  }
  std::ostringstream os;
  os << "expected-gradient rel err " << rel << ", variance " << var0 / 1000 << " (b=0) vs " << varb / 1000
     << " (b=mean)";
  return {rel < 1e-8 && varb < var0, os.str()};
}

Outcome decoding_oracles() {
  auto vocab = small_vocab(2);
  const LengthBounds bounds{1, 3};  // at most three steps
  const std::vector<TokenId> source = {2, 3};
  std::size_t failures = 0;
  std::size_t spaces = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = random_generator(vocab, 500 + seed, 2.0);
    auto space = enumerate(*g, source, bounds);
    std::stable_sort(space.begin(), space.end(), [](const auto& a, const auto& b) {
      return a.logprob / a.tokens.size() > b.logprob / b.tokens.size();
    });
    spaces = space.size();
    const auto beams = decoding::beam_search(*g, source, space.size(), bounds);
    if (beams.size() != space.size()) {
      ++failures;
      continue;
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (beams[i].output.tokens != space[i].tokens) ++failures;
    }
    const auto plain = decoding::beam_search(*g, source, 4, bounds);
    const auto diverse = decoding::diverse_beam_search(*g, source, 4, 1, 0.0, bounds);
    if (plain.size() != diverse.size()) ++failures;
    for (std::size_t i = 0; i < std::min(plain.size(), diverse.size()); ++i) {
      if (plain[i].output.tokens != diverse[i].output.tokens ||
          plain[i].output.per_token_logprobs != diverse[i].output.per_token_logprobs ||
          plain[i].score != diverse[i].score)
        ++failures;
    }
  }

  Rng rng(7);
  std::size_t outside = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + rng.index(30);
    std::vector<double> logits(n);
    for (auto& z : logits) z = 6.0 * rng.uniform() - 3.0;
    const double top_p = 0.05 + 0.95 * rng.uniform();
    const double temp = 0.5 + rng.uniform();
    // independent nucleus: sort by probability, then id
    std::vector<std::pair<double, std::size_t>> probs;
    double zsum = 0.0;
    for (std::size_t k = 0; k < n; ++k) zsum += std::exp(logits[k] / temp);
    for (std::size_t k = 0; k < n; ++k) probs.emplace_back(std::exp(logits[k] / temp) / zsum, k);
    std::sort(probs.begin(), probs.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::set<std::size_t> nucleus;
    double cum = 0.0;
    for (const auto& [p, k] : probs) {
      nucleus.insert(k);
      cum += p;
      if (cum >= top_p) break;
    }
    for (int draw = 0; draw < 20; ++draw) {
      const auto tok = static_cast<std::size_t>(decoding::nucleus_step(logits, top_p, temp, rng));
      if (!nucleus.count(tok)) ++outside;
    }
  }
  std::ostringstream os;
  os << failures << " beam mismatches over 20 spaces of " << spaces << " sequences, " << outside
     << " out-of-nucleus emissions in 20000 draws";
  return {failures == 0 && outside == 0, os.str()};
}

Outcome end_to_end() {
  const auto suite = synthetic::suite();
  const auto ds = synthetic::dataset(suite, 400, 3, 0.1, 0.2);
  const RunConfig cfg = synthetic::run_config();
  const auto beam = DecodingConfig::preset("beam", cfg.n_eval_candidates);

  EvalModels em{suite.paraphraser.get(), suite.victim.get(), suite.scorers(), suite.perplexity.get()};
  const auto before = evaluate_split(ds.splits.test, em, cfg, beam, 11);

  TrainState state(suite.paraphraser->clone(), cfg);
  TrainingModels tm{suite.victim.get(), suite.scorers(), suite.perplexity.get()};
  train(state, ds.splits.train, ds.splits.validation, tm, cfg);

  auto best = state.policy->clone();
  std::copy(state.best_parameters.begin(), state.best_parameters.end(), best->parameters().begin());
  em.generator = best.get();
  const auto after = evaluate_split(ds.splits.test, em, cfg, beam, 11);

  std::size_t invalid = 0;
  for (std::size_t i = 0; i < after.results.size(); ++i) {
    for (const auto& c : after.results[i].successful_candidates) {
      const auto fresh = evaluate_all(ds.splits.test[i], c.text, suite.scorers(), ConstraintThresholds::from(cfg));
      if (!fresh.delta() || !c.constraint_report.delta()) ++invalid;
    }
  }
  const double gain = after.attack_success_rate - before.attack_success_rate;
  std::ostringstream os;
  os.precision(3);
  os << "test ASR " << before.attack_success_rate << "% -> " << after.attack_success_rate << "% (+" << gain
     << " pp) after " << state.epoch << " epochs, best epoch " << state.best_epoch << ", " << invalid
     << " invalid successes";
  return {state.epoch <= 50 && gain >= 20.0 && invalid == 0, os.str()};
}

Outcome early_stopping() {
  bool ok = true;
  ok &= !should_stop({10, 20, 30}, 3, 100).stop;
  ok &= should_stop({30, 20}, 2, 100).stop;
  ok &= should_stop({30, 20}, 2, 100).reason == "below_running_median";
  for (std::size_t cap = 1; cap < 20; ++cap) {
    ok &= should_stop({10, 20, 30}, cap, cap).stop;
    ok &= should_stop({}, cap + 5, cap).stop;
  }
  return {ok, "[10,20,30] continues, [30,20] stops, epoch cap stops"};
}

std::vector<Candidate> named_candidates(const std::vector<std::string>& texts) {
  std::vector<Candidate> out;
  for (const auto& t : texts) {
    Candidate c;
    c.text = t;
    out.push_back(c);
  }
  return out;
}

Outcome filtering() {
  // 8 planted clusters of 6 points in 32 dimensions
  TableEmbedder emb([](std::string_view t) {
    const int c = t[1] - '0';
    const int i = t[3] - '0';
    std::vector<double> v(32, 0.0);
    v[static_cast<std::size_t>(c)] = 10.0;
    v[static_cast<std::size_t>(8 + (c * 6 + i) % 24)] += 0.05 * (i + 1);
    return v;
  });
  std::vector<std::string> texts;
  for (int c = 0; c < 8; ++c)
    for (int i = 0; i < 6; ++i) texts.push_back("c" + std::to_string(c) + "-" + std::to_string(i));
  const auto set = named_candidates(texts);
  const RunConfig cfg;

  Rng r1(5), r2(5);
  const auto a = filter_candidates(set, emb, cfg.clustering, cfg.filter, r1);
  const auto b = filter_candidates(set, emb, cfg.clustering, cfg.filter, r2);
  std::set<char> clusters;
  for (const auto& c : a) clusters.insert(c.text[1]);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].text == b[i].text;

  const auto small = named_candidates({"c0-0", "c0-1", "c1-0", "c2-0"});
  Rng r3(5);
  const auto id = filter_candidates(small, emb, cfg.clustering, cfg.filter, r3);
  bool identity = id.size() == small.size();
  for (std::size_t i = 0; identity && i < id.size(); ++i) identity = id[i].text == small[i].text;

  std::ostringstream os;
  os << "48 successes -> " << a.size() << " kept covering " << clusters.size() << " clusters; |S|=4 identity "
     << (identity ? "yes" : "no") << "; deterministic " << (same ? "yes" : "no");
  return {a.size() >= 8 && a.size() <= 12 && clusters.size() == 8 && same && identity, os.str()};
}

Outcome diversity() {
  const ClusteringConfig cfg;
  TableEmbedder emb([](std::string_view t) -> std::vector<double> {
    static const std::map<std::string, std::vector<double>, std::less<>> table = {
        {"a1", {0.0, 0.0}},   {"a2", {0.1, 0.0}},   {"a3", {0.0, 0.1}},  {"b1", {10.0, 10.0}},
        {"b2", {10.1, 10.0}}, {"b3", {10.0, 10.1}}, {"out", {30.0, -30.0}}, {"same", {1.0, 1.0}}};
    return table.find(t)->second;
  });
  const auto empty = diversity_score({}, emb, cfg);
  const auto identical = diversity_score(named_candidates({"same", "same", "same", "same", "same"}), emb, cfg);
  const auto groups = diversity_score(named_candidates({"a1", "a2", "a3", "b1", "b2", "b3", "out"}), emb, cfg);
  std::ostringstream os;
  os << "scores " << empty << ", " << identical << ", " << groups;
  return {empty == 0 && identical == 1 && groups == 3, os.str()};
}

Outcome bootstrap() {
  Rng rng(9);
  std::vector<bool> mixed(100);
  for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] = rng.index(2) == 1;
  Rng r1(10), r2(11);
  const double same = bootstrap_test(mixed, mixed, 10000, r1);
  const double apart = bootstrap_test(std::vector<bool>(100, true), std::vector<bool>(100, false), 10000, r2);
  std::ostringstream os;
  os << "identical p=" << same << ", all-true vs all-false p=" << apart;
  return {same >= 0.4 && apart < 0.01, os.str()};
}

Outcome tokenmod_accounting() {
  const auto suite = synthetic::suite();
  const auto ds = synthetic::dataset(suite, 200, 4);
  const RunConfig cfg;
  std::size_t mismatches = 0, successes = 0, invalid = 0, attacks = 0;
  for (const auto* split : {&ds.splits.train, &ds.splits.test}) {
    for (const auto& ex : *split) {
      const auto before = suite.victim->queries();
      const auto trace = greedy_attack(ex, *suite.victim, suite.synonyms, suite.stopwords, suite.scorers(),
                                       ConstraintThresholds::from(cfg));
      ++attacks;
      if (suite.victim->queries() - before != trace.queries) ++mismatches;
      if (trace.success) {
        ++successes;
        if (!trace.adversarial || !is_adversarial(ex, *trace.adversarial)) ++invalid;
      }
    }
  }
  std::ostringstream os;
  os << attacks << " attacks, " << successes << " successes, " << mismatches << " query mismatches, " << invalid
     << " invalid successes";
  return {mismatches == 0 && invalid == 0 && successes > 0, os.str()};
}

Outcome preprocessing() {
  // logit(positive) = 2 * #good - 2 * #bad + 0.5 * #fine
  BagOfWordsVictim victim({"negative", "positive"}, {0.0, 0.0},
                          {{"good", {0.0, 2.0}}, {"bad", {0.0, -2.0}}, {"fine", {0.0, 0.5}}});
  const auto vocab = small_vocab(1);
  struct Row {
    const char* text;
    std::size_t label;
  };
  const Row rows[] = {
      {"good", 1},                                  // kept
      {"bad", 0},                                   // kept
      {"good", 0},                                  // misclassified
      {"bad", 1},                                   // misclassified
      {"good good bad", 1},                         // kept
      {"good bad bad", 1},                          // misclassified
      {"fine", 1},                                  // kept
      {"fine fine bad", 0},                         // kept (logit -1)
      {"fine fine fine fine bad", 1},               // tie goes to class 0: misclassified
      {"a good film indeed", 1},                    // kept, 4 tokens
      {"a good film that was well made", 1},        // 7 tokens, too long
      {"a bad film that was poorly made", 0},       // too long
      {"a bad film that was poorly made", 1},       // too long and misclassified
      {"nothing here", 1},                          // logit 0: argmax 0, misclassified
      {"nothing here", 0},                          // kept
      {"bad but good and fine", 1},                 // kept (0.5)
      {"bad but good and fine too", 1},             // exactly 6 tokens, kept
      {"bad bad good", 1},                          // misclassified
      {"one two three four five six seven", 0},     // too long
      {"good, bad, good!", 1},                      // kept, punctuation ignored
  };
  std::vector<RawExample> raw;
  for (std::size_t i = 0; i < std::size(rows); ++i) raw.push_back({"r" + std::to_string(i), rows[i].text, rows[i].label});

  const std::set<std::string> expected = {"r0", "r1", "r4", "r6", "r7", "r9", "r14", "r15", "r16", "r19"};
  const auto q0 = victim.queries();
  PreprocessStats stats;
  const auto kept = preprocess(raw, victim, *vocab, 6, true, &stats);
  std::set<std::string> got;
  for (const auto& ex : kept) got.insert(ex.id);
  const bool queries_ok = victim.queries() - q0 == raw.size();
  const auto again = preprocess(to_raw(kept), victim, *vocab, 6, true);
  std::ostringstream os;
  os << kept.size() << " of 20 survive (expected " << expected.size() << "), " << stats.misclassified
     << " misclassified, " << stats.too_long << " too long";
  return {got == expected && queries_ok && again.size() == kept.size(), os.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"reward formula suite", reward_suite},
      {"gradient check", gradient_check},
      {"KL estimator oracle", kl_oracle},
      {"baseline unbiasedness", baseline_unbiasedness},
      {"decoding oracles", decoding_oracles},
      {"end-to-end synthetic run", end_to_end},
      {"early stopping", early_stopping},
      {"candidate filtering", filtering},
      {"diversity score", diversity},
      {"bootstrap test", bootstrap},
      {"token-modification accounting", tokenmod_accounting},
      {"preprocessing filters", preprocessing},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2d. %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
