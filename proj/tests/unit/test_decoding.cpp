#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "advpara/decoding.hpp"
#include "support.hpp"

using namespace advpara;
using namespace advpara::testing;
using decoding::Hypothesis;

namespace {

std::vector<Enumerated> ranked(const SequenceModel& m, std::span<const TokenId> source, LengthBounds b) {
  auto space = enumerate(m, source, b);
  std::stable_sort(space.begin(), space.end(), [](const auto& x, const auto& y) {
    return x.logprob / x.tokens.size() > y.logprob / y.tokens.size();
  });
  return space;
}

LabeledExample example(std::string text) {
  LabeledExample ex;
  ex.id = "x";
  ex.text = std::move(text);
  ex.victim_probs = {1.0};
  return ex;
}

}  // namespace

TEST_CASE("a dominant logit is always chosen") {
  const std::vector<double> logits = {0.0, 20.0, 0.0, 0.0};
  Rng rng(1);
  for (double p : {0.1, 0.5, 0.95, 0.999}) {
    const auto support = decoding::nucleus_support(logits, p, 1.0);
    REQUIRE(support.size() == 1);
    CHECK(support[0].token == 1);
    CHECK(support[0].prob == 1.0);
    CHECK(decoding::nucleus_step(logits, p, 1.0, rng) == 1);
  }
}

TEST_CASE("uniform logits truncate to the lowest ids") {
  const std::vector<double> logits(4, 0.0);
  const auto support = decoding::nucleus_support(logits, 0.5, 1.0);
  REQUIRE(support.size() == 2);
  CHECK(support[0].token == 0);
  CHECK(support[1].token == 1);
  CHECK(support[0].prob == doctest::Approx(0.5));
  CHECK(support[1].prob == doctest::Approx(0.5));
}

TEST_CASE("lower temperature sharpens the distribution") {
  const std::vector<double> logits = {1.0, 0.2, -0.5, 0.7};
  const auto cold = decoding::nucleus_support(logits, 1.0, 0.85);
  const auto hot = decoding::nucleus_support(logits, 1.0, 1.15);
  CHECK(cold[0].token == 0);
  CHECK(cold[0].prob > hot[0].prob);
}

TEST_CASE("masked logits never enter the nucleus") {
  const std::vector<double> logits = {-INFINITY, 0.0, -INFINITY, 1.0};
  const auto support = decoding::nucleus_support(logits, 1.0, 1.0);
  CHECK(support.size() == 2);
  for (const auto& e : support) CHECK((e.token == 1 || e.token == 3));
}

TEST_CASE("nucleus frequencies match the truncated distribution") {
  const std::vector<double> logits = {0.3, 1.2, -0.4, 0.9, 0.0, -2.0};
  const double top_p = 0.8, temp = 1.15;
  const auto support = decoding::nucleus_support(logits, top_p, temp);
  Rng rng(77);
  const int n = 10000;
  std::map<TokenId, int> counts;
  for (int i = 0; i < n; ++i) ++counts[decoding::nucleus_step(logits, top_p, temp, rng)];
  std::size_t total = 0;
  for (const auto& e : support) {
    const double expected = n * e.prob;
    const double sd = std::sqrt(n * e.prob * (1 - e.prob));
    CHECK(std::abs(counts[e.token] - expected) < 3 * sd);
    total += counts[e.token];
  }
  CHECK(total == static_cast<std::size_t>(n));
}

TEST_CASE("beam search with full width reproduces the exhaustive ranking") {
  auto vocab = small_vocab(1);  // eos, unk, w0
  const std::vector<TokenId> source = {2, 2};
  const LengthBounds b{0, 3};  // two steps before the forced end
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = random_generator(vocab, seed, 2.0);
    const auto space = ranked(*g, source, b);
    CHECK(space.size() == 7);
    const auto beams = decoding::beam_search(*g, source, space.size(), b);
    REQUIRE(beams.size() == space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
      CHECK(beams[i].output.tokens == space[i].tokens);
      CHECK(beams[i].score == doctest::Approx(space[i].logprob / space[i].tokens.size()));
    }
  }
}

TEST_CASE("width one is greedy and scores are sorted") {
  auto vocab = small_vocab(3);
  const std::vector<TokenId> source = {2, 3, 4};
  const LengthBounds b{1, 5};
  auto g = random_generator(vocab, 12, 2.0);
  const auto one = decoding::beam_search(*g, source, 1, b);
  REQUIRE(one.size() == 1);
  std::vector<TokenId> greedy;
  std::vector<double> lp(vocab->size());
  while (true) {
    g->next_logprobs(source, greedy, b, lp);
    const auto best = static_cast<TokenId>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    greedy.push_back(best);
    if (best == Vocabulary::eos) break;
  }
  CHECK(one[0].output.tokens == greedy);

  const auto many = decoding::beam_search(*g, source, 16, b);
  CHECK(many.size() == 16);
  for (std::size_t i = 1; i < many.size(); ++i) CHECK(many[i - 1].score >= many[i].score);
  std::set<std::vector<TokenId>> distinct;
  for (const auto& h : many) distinct.insert(h.output.tokens);
  CHECK(distinct.size() == many.size());
}

TEST_CASE("diverse beam search without penalty is beam search") {
  auto vocab = small_vocab(4);
  const std::vector<TokenId> source = {2, 5, 3};
  const LengthBounds b{1, 6};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = random_generator(vocab, 90 + seed, 1.5);
    const auto plain = decoding::beam_search(*g, source, 6, b);
    const auto diverse = decoding::diverse_beam_search(*g, source, 6, 1, 0.0, b);
    REQUIRE(plain.size() == diverse.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
      CHECK(plain[i].output.tokens == diverse[i].output.tokens);
      CHECK(plain[i].output.per_token_logprobs == diverse[i].output.per_token_logprobs);
      CHECK(plain[i].score == diverse[i].score);
    }
  }
}

TEST_CASE("the diversity penalty separates first tokens of close candidates") {
  auto vocab = small_vocab(2);  // eos, unk, w0, w1
  ToyGenerator g(vocab);
  g.transition_weight(g.begin_marker(), 2) = 1.0;
  g.transition_weight(g.begin_marker(), 3) = 0.7;
  g.transition_weight(g.begin_marker(), Vocabulary::unk) = -5.0;
  const std::vector<TokenId> source = {2};
  const LengthBounds b{1, 3};

  const auto penalised = decoding::diverse_beam_search(g, source, 2, 2, 1.0, b);
  REQUIRE(penalised.size() == 2);
  CHECK(penalised[0].group == 0);
  CHECK(penalised[1].group == 1);
  CHECK(penalised[0].output.tokens[0] == 2);
  CHECK(penalised[1].output.tokens[0] == 3);

  const auto free = decoding::diverse_beam_search(g, source, 2, 2, 0.0, b);
  CHECK(free[0].output.tokens[0] == free[1].output.tokens[0]);

  const auto bounded = decoding::diverse_beam_search(g, source, 8, 4, 1.0, b);
  CHECK(bounded.size() <= 8);
}

TEST_CASE("invalid search settings are rejected") {
  auto vocab = small_vocab(2);
  ToyGenerator g(vocab);
  const std::vector<TokenId> source = {2};
  CHECK_THROWS(decoding::diverse_beam_search(g, source, 5, 2, 0.5, {1, 4}));
  CHECK_THROWS(decoding::diverse_beam_search(g, source, 4, 2, -1.0, {1, 4}));
  const std::vector<double> bad = {-INFINITY, -INFINITY};
  Rng rng(0);
  CHECK_THROWS(decoding::nucleus_step(bad, 0.9, 1.0, rng));
  CHECK_THROWS(decoding::nucleus_support(std::vector<double>{0.0}, 0.0, 1.0));
}

TEST_CASE("candidate sets") {
  auto vocab = small_vocab(6);
  auto g = random_generator(vocab, 5, 1.0);
  Rng rng(3);

  auto nucleus = DecodingConfig::preset("sampling");
  const auto sampled = decoding::generate_candidate_set(*g, example("w0 w1 w2"), nucleus, 48, rng, g.get());
  CHECK(sampled.candidates.size() == 48);
  CHECK(sampled.requested == 48);
  for (const auto& c : sampled.candidates) {
    CHECK(c.tokens.size() >= 4);  // three content tokens and end-of-sequence
    CHECK(c.policy_logprob <= 0.0);
    CHECK(c.reference_logprob == doctest::Approx(c.policy_logprob));
  }

  const auto beam = DecodingConfig::preset("beam", 48);
  const auto beams = decoding::generate_candidate_set(*g, example("w0 w1 w2"), beam, 48, rng);
  CHECK(beams.candidates.size() == 48);
  std::set<std::string> texts;
  for (const auto& c : beams.candidates) texts.insert(c.text);
  CHECK(texts.size() == 48);
}

TEST_CASE("beam candidate sets stop when the space runs out") {
  auto vocab = small_vocab(1);  // eos, unk, w0
  auto g = random_generator(vocab, 2);
  DecodingConfig cfg = DecodingConfig::preset("beam", 3);
  cfg.min_length = 0;
  cfg.max_length = 2;  // [eos], [unk eos], [w0 eos]
  Rng rng(0);
  const auto set = decoding::generate_candidate_set(*g, example("w0"), cfg, 3, rng);
  CHECK(set.candidates.size() == 3);
  CHECK_FALSE(set.exhausted());
  std::set<std::vector<TokenId>> seqs;
  for (const auto& c : set.candidates) seqs.insert(c.tokens);
  CHECK(seqs == std::set<std::vector<TokenId>>{{0}, {1, 0}, {2, 0}});

  cfg.num_beams = 8;
  const auto more = decoding::generate_candidate_set(*g, example("w0"), cfg, 8, rng);
  CHECK(more.candidates.size() == 3);
  CHECK(more.exhausted());
}

TEST_CASE("greedy decoding on a single-path grammar") {
  auto vocab = small_vocab(2);
  ToyGenerator g(vocab);
  // only w1 is ever likely; everything else is far below
  for (TokenId prev = 0; prev <= g.begin_marker(); ++prev)
    for (TokenId out = 0; out < static_cast<TokenId>(vocab->size()); ++out)
      g.transition_weight(prev, out) = out == 3 ? 0.0 : -40.0;
  Rng rng(0);
  DecodingConfig cfg = DecodingConfig::preset("beam", 1);
  cfg.min_length = 3;
  cfg.max_length = 4;
  const auto out = decoding::generate(g, "w0", cfg, 1, rng);
  REQUIRE(out.size() == 1);
  CHECK(out[0].tokens == std::vector<TokenId>{3, 3, 3, 0});
  CHECK(out[0].text == "w1 w1 w1");
}
