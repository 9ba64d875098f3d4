#include "advpara/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advpara/errors.hpp"
#include "advpara/text.hpp"

namespace advpara {

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  words_.reserve(words.size() + 2);
  words_.emplace_back("</s>");
  words_.emplace_back("<unk>");
  for (const auto& w : words) {
    const auto lw = text::to_lower(w);
    if (lw.empty() || index_.count(lw) || lw == "</s>" || lw == "<unk>") {
      throw TokenizerError("vocabulary word '" + w + "' is empty or duplicated");
    }
    words_.push_back(lw);
  }
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<TokenId>(i));
}

const std::string& Vocabulary::word(TokenId id) const {
  if (!valid(id)) throw TokenizerError("invalid token id " + std::to_string(id));
  return words_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view w) const {
  auto it = index_.find(std::string(w));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<TokenId> Vocabulary::encode(std::string_view s) const {
  const auto ws = text::words(s);
  if (ws.empty()) throw TokenizerError("cannot tokenize empty input");
  std::vector<TokenId> ids;
  ids.reserve(ws.size());
  for (const auto& w : ws) ids.push_back(id(w));
  return ids;
}

std::string Vocabulary::decode(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (t == eos) break;
    if (!out.empty()) out.push_back(' ');
    out += word(t);
  }
  return out;
}

double GeneratorOutput::total_logprob() const {
  double s = 0.0;
  for (double v : per_token_logprobs) s += v;
  return s;
}

std::vector<double> SequenceModel::score(std::string_view input, std::span<const TokenId> tokens,
                                         LengthBounds bounds) const {
  const auto source = vocabulary().encode(input);
  return score_tokens(source, tokens, bounds);
}

std::vector<double> SequenceModel::score_tokens(std::span<const TokenId> source, std::span<const TokenId> tokens,
                                                LengthBounds bounds) const {
  const auto& vocab = vocabulary();
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (!vocab.valid(tokens[t])) throw TokenizerError("invalid token id " + std::to_string(tokens[t]));
    if (tokens[t] == Vocabulary::eos && t + 1 != tokens.size()) {
      throw TokenizerError("end-of-sequence before the last position");
    }
  }
  std::vector<double> out;
  out.reserve(tokens.size());
  std::vector<double> lp(vocab.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    next_logprobs(source, tokens.first(t), bounds, lp);
    out.push_back(lp[static_cast<std::size_t>(tokens[t])]);
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

void masked_log_softmax(std::span<const double> logits, const std::vector<bool>& allowed, std::span<double> out) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  double mx = ninf;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (allowed[i]) mx = std::max(mx, logits[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (allowed[i]) z += std::exp(logits[i] - mx);
  }
  const double lz = mx + std::log(z);
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = allowed[i] ? logits[i] - lz : ninf;
}

}  // namespace advpara
