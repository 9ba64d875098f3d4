#include "advpara/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "advpara/errors.hpp"
#include "advpara/rng.hpp"
#include "advpara/serialization.hpp"
#include "advpara/text.hpp"

namespace advpara {

std::vector<RawExample> load_jsonl(const std::filesystem::path& path, const std::vector<std::string>& class_names) {
  if (class_names.empty()) throw DataError("class names are empty");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<RawExample> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + "malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(where + "expected an object");
    if (!j.contains("text") || !j["text"].is_string()) throw DataError(where + "missing string field \"text\"");
    if (!j.contains("label")) throw DataError(where + "missing field \"label\"");

    RawExample ex;
    ex.text = j["text"].get<std::string>();
    const auto& lab = j["label"];
    if (lab.is_string()) {
      const auto name = lab.get<std::string>();
      const auto it = std::find(class_names.begin(), class_names.end(), name);
      if (it == class_names.end()) throw DataError(where + "unknown label \"" + name + "\"");
      ex.label = static_cast<std::size_t>(it - class_names.begin());
    } else if (lab.is_number_integer()) {
      const auto idx = lab.get<long long>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= class_names.size()) {
        throw DataError(where + "label index " + std::to_string(idx) + " out of range");
      }
      ex.label = static_cast<std::size_t>(idx);
    } else {
      throw DataError(where + "label must be a class name or index");
    }
    if (j.contains("id")) {
      ex.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    } else {
      ex.id = std::to_string(lineno);
    }
    if (!seen.insert(ex.id).second) throw DataError(where + "duplicate id \"" + ex.id + "\"");
    out.push_back(std::move(ex));
  }
  return out;
}

std::size_t token_length(const Vocabulary&, std::string_view s) { return text::words(s).size(); }

nlohmann::json PreprocessStats::to_json() const {
  return {{"raw", raw}, {"misclassified", misclassified}, {"too_long", too_long}, {"kept", kept}};
}

std::vector<LabeledExample> preprocess(const std::vector<RawExample>& raw, const Victim& victim,
                                       const Vocabulary& tokenizer, std::size_t max_tokens,
                                       bool exclude_misclassified, PreprocessStats* stats) {
  PreprocessStats st;
  st.raw = raw.size();
  std::vector<LabeledExample> out;
  for (const auto& r : raw) {
    auto probs = victim.predict(r.text);
    if (r.label >= probs.size()) throw DataError("example '" + r.id + "': label out of range for victim");
    const bool wrong = argmax(probs) != r.label;
    const std::size_t ntok = token_length(tokenizer, r.text);
    const bool long_ = ntok > max_tokens;
    if (wrong) ++st.misclassified;
    if (long_) ++st.too_long;
    if ((wrong && exclude_misclassified) || long_) continue;
    LabeledExample ex;
    ex.id = r.id;
    ex.text = r.text;
    ex.label = r.label;
    ex.victim_probs = std::move(probs);
    ex.char_length = text::char_length(r.text);
    ex.token_length = ntok;
    out.push_back(std::move(ex));
  }
  st.kept = out.size();
  if (stats) *stats = st;
  return out;
}

std::vector<RawExample> to_raw(const std::vector<LabeledExample>& examples) {
  std::vector<RawExample> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back({e.id, e.text, e.label});
  return out;
}

Splits split_random(const std::vector<LabeledExample>& examples, double val_frac, double test_frac,
                    std::uint64_t seed) {
  if (val_frac < 0 || test_frac < 0 || val_frac + test_frac > 1.0) {
    throw Error("split fractions must be non-negative and sum to at most 1");
  }
  const std::size_t n = examples.size();
  const auto n_val = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(n)));
  const auto n_test = std::min(n - n_val, static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(n))));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  auto take = [&](std::size_t from, std::size_t to) {
    std::vector<std::size_t> part(idx.begin() + static_cast<std::ptrdiff_t>(from),
                                  idx.begin() + static_cast<std::ptrdiff_t>(to));
    std::sort(part.begin(), part.end());
    std::vector<LabeledExample> out;
    for (std::size_t i : part) out.push_back(examples[i]);
    return out;
  };
  Splits s;
  s.validation = take(0, n_val);
  s.test = take(n_val, n_val + n_test);
  s.train = take(n_val + n_test, n);
  return s;
}

const std::vector<LabeledExample>& Dataset::split(std::string_view name) const {
  if (name == "train") return splits.train;
  if (name == "validation" || name == "val") return splits.validation;
  if (name == "test") return splits.test;
  throw DataError("unknown split \"" + std::string(name) + "\"");
}

void Dataset::check() const {
  std::set<std::string> ids;
  for (const auto* part : {&splits.train, &splits.validation, &splits.test}) {
    for (const auto& ex : *part) {
      check_example(ex);
      if (ex.label >= class_names.size()) throw DataError("example '" + ex.id + "' has an unknown label");
      if (!ids.insert(ex.id).second) throw DataError("example id '" + ex.id + "' appears twice");
    }
  }
}

namespace {

void write_split(const std::filesystem::path& file, const std::vector<LabeledExample>& xs) {
  std::vector<nlohmann::json> rows;
  rows.reserve(xs.size());
  for (const auto& x : xs) rows.push_back(to_json(x));
  write_jsonl(file, rows);
}

std::vector<LabeledExample> read_split(const std::filesystem::path& file) {
  std::vector<LabeledExample> out;
  for (const auto& row : read_jsonl(file)) out.push_back(example_from_json(row));
  return out;
}

}  // namespace

void write_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  ds.check();
  std::filesystem::create_directories(dir);
  write_split(dir / "train.jsonl", ds.splits.train);
  write_split(dir / "validation.jsonl", ds.splits.validation);
  write_split(dir / "test.jsonl", ds.splits.test);
  write_json(dir / "dataset.json",
             {{"name", ds.name}, {"class_names", ds.class_names}, {"provenance", ds.provenance}});
}

Dataset read_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("dataset directory " + dir.string() + " does not exist");
  const auto meta = read_json(dir / "dataset.json");
  Dataset ds;
  ds.name = meta.at("name").get<std::string>();
  ds.class_names = meta.at("class_names").get<std::vector<std::string>>();
  ds.provenance = meta.value("provenance", nlohmann::json::object());
  ds.splits.train = read_split(dir / "train.jsonl");
  ds.splits.validation = read_split(dir / "validation.jsonl");
  ds.splits.test = read_split(dir / "test.jsonl");
  ds.check();
  return ds;
}

}  // namespace advpara
