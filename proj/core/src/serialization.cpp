#include "advpara/serialization.hpp"

#include <cmath>
#include <fstream>

#include "advpara/errors.hpp"
#include "advpara/text.hpp"

namespace advpara {

using nlohmann::json;

std::size_t argmax(const ProbVector& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

void check_example(const LabeledExample& ex) {
  if (ex.victim_probs.empty()) throw DataError("example '" + ex.id + "': victim_probs is empty");
  double sum = 0.0;
  for (double p : ex.victim_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("example '" + ex.id + "': probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw DataError("example '" + ex.id + "': victim_probs do not sum to 1");
  if (ex.label >= ex.victim_probs.size()) throw DataError("example '" + ex.id + "': label out of range");
  if (ex.char_length != text::char_length(ex.text)) {
    throw DataError("example '" + ex.id + "': char_length does not match text");
  }
}

json to_json(const LabeledExample& ex) {
  return json{{"id", ex.id},
              {"text", ex.text},
              {"label", ex.label},
              {"victim_probs", ex.victim_probs},
              {"char_length", ex.char_length},
              {"token_length", ex.token_length}};
}

LabeledExample example_from_json(const json& j) {
  LabeledExample ex;
  ex.id = j.at("id").get<std::string>();
  ex.text = j.at("text").get<std::string>();
  ex.label = j.at("label").get<std::size_t>();
  ex.victim_probs = j.at("victim_probs").get<ProbVector>();
  ex.char_length = j.value("char_length", text::char_length(ex.text));
  ex.token_length = j.value("token_length", std::size_t{0});
  check_example(ex);
  return ex;
}

json to_json(const ConstraintReport& r) {
  return json{{"contradiction_prob", r.contradiction_prob},
              {"cosine_similarity", r.cosine_similarity},
              {"acceptability_prob", r.acceptability_prob},
              {"char_length_diff", r.char_length_diff},
              {"contrast_phrase_violation", r.contrast_phrase_violation},
              {"contrast_phrase", r.contrast_phrase},
              {"label_invariance_pass", r.label_invariance_pass},
              {"semantic_pass", r.semantic_pass},
              {"acceptability_pass", r.acceptability_pass},
              {"length_pass", r.length_pass},
              {"contrast_pass", r.contrast_pass},
              {"delta", r.delta() ? 1 : 0}};
}

ConstraintReport report_from_json(const json& j) {
  ConstraintReport r;
  r.contradiction_prob = j.at("contradiction_prob").get<double>();
  r.cosine_similarity = j.at("cosine_similarity").get<double>();
  r.acceptability_prob = j.at("acceptability_prob").get<double>();
  r.char_length_diff = j.at("char_length_diff").get<long>();
  r.contrast_phrase_violation = j.at("contrast_phrase_violation").get<bool>();
  r.contrast_phrase = j.value("contrast_phrase", std::string{});
  r.label_invariance_pass = j.at("label_invariance_pass").get<bool>();
  r.semantic_pass = j.at("semantic_pass").get<bool>();
  r.acceptability_pass = j.at("acceptability_pass").get<bool>();
  r.length_pass = j.at("length_pass").get<bool>();
  r.contrast_pass = j.at("contrast_pass").get<bool>();
  if (j.contains("delta") && (j["delta"].get<int>() != 0) != r.delta()) {
    throw DataError("constraint report: delta disagrees with the pass flags");
  }
  return r;
}

json to_json(const Candidate& c) {
  json j{{"text", c.text},
         {"tokens", c.tokens},
         {"policy_logprob", c.policy_logprob},
         {"reference_logprob", c.reference_logprob},
         {"victim_probs", c.victim_probs},
         {"constraint_report", to_json(c.constraint_report)}};
  j["reward"] = c.reward ? json(*c.reward) : json(nullptr);
  return j;
}

Candidate candidate_from_json(const json& j) {
  Candidate c;
  c.text = j.at("text").get<std::string>();
  c.tokens = j.at("tokens").get<std::vector<TokenId>>();
  c.policy_logprob = j.at("policy_logprob").get<double>();
  c.reference_logprob = j.at("reference_logprob").get<double>();
  c.victim_probs = j.at("victim_probs").get<ProbVector>();
  c.constraint_report = report_from_json(j.at("constraint_report"));
  if (j.contains("reward") && !j["reward"].is_null()) c.reward = j["reward"].get<double>();
  return c;
}

json to_json(const CandidateSet& s) {
  json cands = json::array();
  for (const auto& c : s.candidates) cands.push_back(to_json(c));
  return json{{"original_id", s.original_id},
              {"candidates", std::move(cands)},
              {"decoding", to_json(s.decoding)},
              {"requested", s.requested},
              {"count", s.candidates.size()}};
}

CandidateSet candidate_set_from_json(const json& j) {
  CandidateSet s;
  s.original_id = j.at("original_id").get<std::string>();
  for (const auto& c : j.at("candidates")) s.candidates.push_back(candidate_from_json(c));
  s.decoding = decoding_from_json(j.at("decoding"));
  s.requested = j.at("requested").get<std::size_t>();
  return s;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : rows) out << r.dump() << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed JSON (" + e.what() + ")");
    }
  }
  return rows;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

}  // namespace advpara
