#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "advpara/models.hpp"
#include "advpara/rng.hpp"
#include "advpara/toy_models.hpp"

namespace advpara::testing {

inline std::shared_ptr<const Vocabulary> small_vocab(std::size_t words) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < words; ++i) w.push_back("w" + std::to_string(i));
  return std::make_shared<const Vocabulary>(w);
}

// Toy generator with parameters drawn uniformly from [-scale, scale].
inline std::unique_ptr<ToyGenerator> random_generator(std::shared_ptr<const Vocabulary> vocab, std::uint64_t seed,
                                                      double scale = 1.0) {
  auto g = std::make_unique<ToyGenerator>(std::move(vocab));
  Rng rng(seed);
  for (auto& p : g->parameters()) p = scale * (2.0 * rng.uniform() - 1.0);
  return g;
}

struct Enumerated {
  std::vector<TokenId> tokens;
  double logprob;
};

// Every sequence the model can emit under `bounds`, by depth-first expansion.
inline std::vector<Enumerated> enumerate(const SequenceModel& m, std::span<const TokenId> source, LengthBounds bounds) {
  std::vector<Enumerated> out;
  std::vector<double> lp(m.vocabulary().size());
  std::function<void(std::vector<TokenId>&, double)> rec = [&](std::vector<TokenId>& prefix, double acc) {
    std::vector<double> step(m.vocabulary().size());
    m.next_logprobs(source, prefix, bounds, step);
    for (std::size_t v = 0; v < step.size(); ++v) {
      if (std::isinf(step[v])) continue;
      const double total = acc + step[v];
      prefix.push_back(static_cast<TokenId>(v));
      if (v == static_cast<std::size_t>(Vocabulary::eos)) {
        out.push_back({prefix, total});
      } else {
        rec(prefix, total);
      }
      prefix.pop_back();
    }
  };
  std::vector<TokenId> prefix;
  rec(prefix, 0.0);
  return out;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    da += a[i] * a[i];
    db += b[i] * b[i];
  }
  const double den = std::max(std::sqrt(da), std::sqrt(db));
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num) / den;
}

// Fixed-vector embedder for planted clustering geometries.
class TableEmbedder final : public Embedder {
 public:
  explicit TableEmbedder(std::function<std::vector<double>(std::string_view)> f) : f_(std::move(f)) {}
  std::vector<double> embed(std::string_view text) const override { return f_(text); }

 private:
  std::function<std::vector<double>(std::string_view)> f_;
};

// A victim that ignores its input.
class ConstantVictim final : public Victim {
 public:
  explicit ConstantVictim(ProbVector p) : p_(std::move(p)), names_(p_.size(), "c") {}
  std::size_t num_classes() const override { return p_.size(); }
  const std::vector<std::string>& class_names() const override { return names_; }

 protected:
  ProbVector compute(std::string_view) const override { return p_; }

 private:
  ProbVector p_;
  std::vector<std::string> names_;
};

}  // namespace advpara::testing
