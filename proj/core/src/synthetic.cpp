#include "advpara/synthetic.hpp"

#include <algorithm>

#include "advpara/rng.hpp"
#include "advpara/text.hpp"

namespace advpara::synthetic {

namespace {

struct Word {
  const char* word;
  char category;  // D N V A J C
  const char* meaning;
  int polarity;
  double positive_weight;
};

// clang-format off
const Word kWords[] = {
    {"the", 'D', "the", 0, 0.0},        {"this", 'D', "the", 0, 0.0},      {"a", 'D', "the", 0, 0.0},
    {"film", 'N', "film", 0, 0.0},      {"movie", 'N', "film", 0, 0.0},    {"picture", 'N', "film", 0, 0.0},
    {"story", 'N', "story", 0, 0.0},    {"plot", 'N', "story", 0, 0.0},
    {"is", 'V', "is", 0, 0.0},          {"was", 'V', "is", 0, 0.0},        {"seems", 'V', "is", 0, 0.0},
    {"really", 'A', "really", 0, 0.3},  {"truly", 'A', "really", 0, 0.3},  {"very", 'A', "really", 0, 0.4},
    {"quite", 'A', "quite", 0, -0.2},   {"not", 'A', "not", 0, -4.0},
    {"good", 'J', "good", 1, 2.5},      {"great", 'J', "good", 1, 3.0},    {"superb", 'J', "superb", 1, 3.0},
    {"fine", 'J', "fine", 1, 1.5},      {"decent", 'J', "fine", 1, -1.0},
    {"bad", 'J', "bad", -1, -2.5},      {"awful", 'J', "bad", -1, -3.0},   {"poor", 'J', "poor", -1, -2.5},
    {"dull", 'J', "dull", -1, -1.5},    {"weak", 'J', "dull", -1, 1.0},
    {"however", 'C', "however", 0, -3.5}, {"but", 'C', "but", 0, -2.5},
};
// clang-format on

// Words a paraphraser may reach for that are close but not interchangeable.
const std::pair<const char*, const char*> kNear[] = {
    {"good", "decent"}, {"great", "decent"}, {"superb", "decent"},
    {"bad", "weak"},    {"awful", "weak"},   {"poor", "weak"},
};

const Word* lookup(std::string_view w) {
  for (const auto& x : kWords)
    if (w == x.word) return &x;
  return nullptr;
}

bool valid_transition(char prev, char next) {
  // '^' begins the sentence, '$' ends it.
  static const std::pair<char, const char*> kNext[] = {
      {'^', "DC"}, {'C', "D$"}, {'D', "N"}, {'N', "V"}, {'V', "AJ"}, {'A', "AJ"}, {'J', "$C"},
  };
  for (const auto& [p, allowed] : kNext)
    if (p == prev) return std::string_view(allowed).find(next) != std::string_view::npos;
  return false;
}

}  // namespace

const std::vector<std::string>& class_names() {
  static const std::vector<std::string> names = {"negative", "positive"};
  return names;
}

std::shared_ptr<const Vocabulary> vocabulary() {
  std::vector<std::string> words;
  for (const auto& w : kWords) words.emplace_back(w.word);
  return std::make_shared<const Vocabulary>(words);
}

std::unique_ptr<ToyGenerator> paraphraser(std::shared_ptr<const Vocabulary> vocab, const PriorOptions& o) {
  auto gen = std::make_unique<ToyGenerator>(vocab);
  const auto n = static_cast<TokenId>(vocab->size());
  auto info = [&](TokenId id) { return id >= 2 ? lookup(vocab->word(id)) : nullptr; };
  auto near = [&](const Word* a, const Word* b) {
    return std::any_of(std::begin(kNear), std::end(kNear), [&](const auto& p) {
      return std::string_view(p.first) == a->word && std::string_view(p.second) == b->word;
    });
  };

  for (TokenId src = 0; src < n; ++src) {
    for (TokenId out = 0; out < n; ++out) {
      double w = o.other;
      const Word* a = info(src);
      const Word* b = info(out);
      if (out == Vocabulary::unk) {
        w = o.unk;
      } else if (src == Vocabulary::eos || src == Vocabulary::unk) {
        w = out == Vocabulary::eos ? o.copy : o.other;
      } else if (out == src) {
        w = o.copy;
      } else if (a && b && std::string_view(a->meaning) == b->meaning) {
        w = o.synonym;
      } else if (a && b && near(a, b)) {
        w = o.near_synonym;
      } else if (a && b && a->category == b->category) {
        w = o.same_category;
      }
      gen->source_weight(src, out) = w;
    }
  }
  for (TokenId prev = 0; prev <= n; ++prev) {
    char pc = '?';
    if (prev == gen->begin_marker()) pc = '^';
    else if (const Word* a = info(prev)) pc = a->category;
    for (TokenId out = 0; out < n; ++out) {
      char oc = '?';
      if (out == Vocabulary::eos) oc = '$';
      else if (const Word* b = info(out)) oc = b->category;
      gen->transition_weight(prev, out) = out == Vocabulary::unk ? o.unk
                                          : valid_transition(pc, oc) ? o.grammar_bonus
                                                                     : 0.0;
    }
  }
  return gen;
}

std::unique_ptr<BagOfWordsVictim> victim() {
  std::unordered_map<std::string, std::vector<double>> weights;
  for (const auto& w : kWords)
    if (w.positive_weight != 0.0) weights[w.word] = {0.0, w.positive_weight};
  return std::make_unique<BagOfWordsVictim>(class_names(), std::vector<double>{0.0, 0.0}, std::move(weights));
}

std::unique_ptr<ToyNLIScorer> nli() {
  std::map<std::string, int> polarity;
  for (const auto& w : kWords)
    if (w.polarity != 0) polarity[w.word] = w.polarity;
  return std::make_unique<ToyNLIScorer>(std::move(polarity), std::set<std::string>{"not"});
}

std::unique_ptr<ToyEmbedder> embedder(std::shared_ptr<const Vocabulary> vocab) {
  std::unordered_map<std::string, std::string> concepts;
  for (const auto& w : kWords) concepts[w.word] = w.meaning;
  return std::make_unique<ToyEmbedder>(std::move(vocab), std::move(concepts));
}

std::unique_ptr<ToyGrammarScorer> grammar() {
  std::unordered_map<std::string, char> cats;
  for (const auto& w : kWords) cats[w.word] = w.category;
  return std::make_unique<ToyGrammarScorer>(std::move(cats), "C?DNVA{0,3}JC?");
}

SubstitutionSource synonyms() {
  std::map<std::string, std::vector<std::string>> table;
  for (const auto& a : kWords) {
    for (const auto& b : kWords)
      if (&a != &b && std::string_view(a.meaning) == b.meaning) table[a.word].push_back(b.word);
  }
  for (const auto& [a, b] : kNear) table[a].push_back(b);
  return SubstitutionSource(std::move(table));
}

std::vector<RawExample> corpus(std::size_t count, std::uint64_t seed) {
  auto pick = [](Rng& rng, std::initializer_list<const char*> xs) {
    return std::string(*(xs.begin() + static_cast<std::ptrdiff_t>(rng.index(xs.size()))));
  };
  Rng rng = Rng::derive(seed, 0x5e17);
  std::vector<RawExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::string> w = {
        pick(rng, {"the", "this", "a"}),
        pick(rng, {"film", "movie", "picture", "story", "plot"}),
        pick(rng, {"is", "was", "seems"}),
        pick(rng, {"really", "truly", "very", "quite"}),
        pick(rng, {"really", "truly", "very", "quite"}),
        pick(rng, {"good", "great", "superb", "fine", "decent", "bad", "awful", "poor", "dull", "weak"}),
    };
    RawExample ex;
    ex.id = "syn-" + std::to_string(i);
    ex.label = lookup(w.back())->polarity > 0 ? 1 : 0;
    ex.text = text::join(w);
    out.push_back(std::move(ex));
  }
  return out;
}

ModelSuite suite() {
  ModelSuite s;
  s.vocab = vocabulary();
  s.paraphraser = paraphraser(s.vocab);
  s.victim = victim();
  s.nli = nli();
  s.embedder = embedder(s.vocab);
  s.acceptability = grammar();
  std::vector<std::string> lm_corpus;
  for (const auto& ex : corpus(2000, 7)) lm_corpus.push_back(ex.text);
  s.perplexity = std::make_shared<BigramLM>(BigramLM::estimate(s.vocab, lm_corpus));
  s.synonyms = synonyms();
  return s;
}

Dataset dataset(const ModelSuite& models, std::size_t count, std::uint64_t seed, double val_frac, double test_frac) {
  Dataset ds;
  ds.name = "synthetic";
  ds.class_names = class_names();
  PreprocessStats stats;
  const auto kept = preprocess(corpus(count, seed), *models.victim, *models.vocab, 32, true, &stats);
  ds.splits = split_random(kept, val_frac, test_frac, seed);
  ds.provenance = {{"source", "synthetic"}, {"count", count}, {"seed", seed}, {"filters", stats.to_json()}};
  return ds;
}

RunConfig run_config() {
  RunConfig cfg;
  cfg.lr = 0.05;
  cfg.weight_decay = 0.0;
  cfg.batch_size = 8;
  cfg.grad_accum_steps = 2;
  cfg.max_epochs = 30;
  cfg.seed = 1;
  return validate_config(cfg);
}

}  // namespace advpara::synthetic
