#include <doctest.h>

#include "advpara/rewards.hpp"

using namespace advpara;

namespace {

LabeledExample original(double p_true) {
  LabeledExample ex;
  ex.id = "x";
  ex.text = "t";
  ex.label = 1;
  ex.victim_probs = {1.0 - p_true, p_true};
  return ex;
}

CandidateSet rewarded(const std::string& id, std::vector<double> rewards) {
  CandidateSet s;
  s.original_id = id;
  for (double r : rewards) {
    Candidate c;
    c.reward = r;
    s.candidates.push_back(c);
  }
  return s;
}

}  // namespace

TEST_CASE("degradation") {
  CHECK(degradation(original(0.9), {0.4, 0.6}) == doctest::Approx(0.3));
  CHECK(degradation(original(0.7), {0.3, 0.7}) == 0.0);
  CHECK(degradation(original(0.4), {0.1, 0.9}) == doctest::Approx(-0.5));
  CHECK_THROWS(degradation(original(0.4), {1.0}));
}

TEST_CASE("reward formula") {
  CHECK(paraphrase_reward(0.1, true, 35, 10) == doctest::Approx(3.5));
  CHECK(paraphrase_reward(0.9, true, 35, 10) == 10.0);
  for (double v : {-1.0, -0.2, 0.0, 0.3, 1.0}) CHECK(paraphrase_reward(v, false, 35, 10) == 0.0);
  CHECK(paraphrase_reward(-0.3, true, 35, 10) == 0.0);
}

TEST_CASE("kl sample term") {
  CHECK(kl_sample_term(-3.0, -3.0, 4) == 0.0);
  CHECK(kl_sample_term(-4.0, -6.0, 2) == 1.0);
  CHECK_THROWS(kl_sample_term(-1.0, -1.0, 0));
}

TEST_CASE("modified reward") {
  CHECK(modified_reward(10, 4, 2.5, 0.4) == doctest::Approx(5.0));
  CHECK(modified_reward(3, 3, 0, 0.4) == 0.0);
  CHECK(modified_reward(7, 2, 9, 0.0) == 5.0);
}

TEST_CASE("baselines are candidate-set means") {
  BaselineRegistry reg;
  CHECK(reg.get("a") == 0.0);
  update_baselines(reg, {rewarded("a", {0, 10, 5, 5}), rewarded("b", {0, 0}), rewarded("c", {7})});
  CHECK(reg.get("a") == 5.0);
  CHECK(reg.get("b") == 0.0);
  CHECK(reg.get("c") == 7.0);
  CHECK(reg.contains("c"));
  CHECK_FALSE(reg.contains("d"));

  update_baselines(reg, {rewarded("a", {1, 3})});
  CHECK(reg.get("a") == 2.0);
  CHECK(reg.get("c") == 7.0);

  auto missing = rewarded("e", {1});
  missing.candidates.emplace_back();
  CHECK_THROWS(update_baselines(reg, {missing}));

  CHECK(BaselineRegistry::from_json(reg.to_json()) == reg);
}

TEST_CASE("reward breakdown") {
  const auto ex = original(0.9);
  Candidate c;
  c.tokens = {3, 4, 0};
  c.policy_logprob = -2.0;
  c.reference_logprob = -3.5;
  c.victim_probs = {0.6, 0.4};
  c.constraint_report.label_invariance_pass = c.constraint_report.semantic_pass = true;
  c.constraint_report.acceptability_pass = c.constraint_report.length_pass = true;
  c.constraint_report.contrast_pass = true;
  const RewardParams p;
  const auto b = reward_breakdown(ex, c, 4.0, p);
  CHECK(b.V == doctest::Approx(0.5));
  CHECK(b.delta);
  CHECK(b.r == 10.0);
  CHECK(b.b == 4.0);
  CHECK(b.kl == doctest::Approx(0.5));
  CHECK(b.R == doctest::Approx(10.0 - 4.0 - 0.4 * 0.5));

  c.constraint_report.length_pass = false;
  const auto closed = reward_breakdown(ex, c, 4.0, p);
  CHECK(closed.r == 0.0);
  CHECK(closed.R == doctest::Approx(-4.2));
}
