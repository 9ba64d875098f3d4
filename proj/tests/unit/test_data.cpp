#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "advpara/data.hpp"
#include "advpara/errors.hpp"
#include "advpara/synthetic.hpp"
#include "support.hpp"

using namespace advpara;
using namespace advpara::testing;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path write(const std::string& file, const std::string& body) const {
    std::ofstream(path / file) << body;
    return path / file;
  }
};

const std::vector<std::string> kClasses = {"negative", "positive"};

std::string error_of(const std::filesystem::path& p) {
  try {
    load_jsonl(p, kClasses);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

std::vector<LabeledExample> numbered(std::size_t n) {
  std::vector<LabeledExample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = "x" + std::to_string(i);
    out[i].text = "t";
    out[i].victim_probs = {0.5, 0.5};
    out[i].char_length = 1;
  }
  return out;
}

}  // namespace

TEST_CASE("load_jsonl") {
  TempDir d("advpara_test_data_load");
  const auto ok = d.write("ok.jsonl",
                          "{\"text\": \"a good film\", \"label\": \"positive\"}\n"
                          "{\"id\": \"k\", \"text\": \"bad\", \"label\": 0}\n"
                          "\n"
                          "{\"text\": \"fine\", \"label\": 1}\n");
  const auto rows = load_jsonl(ok, kClasses);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].label == 1);
  CHECK(rows[1].id == "k");
  CHECK(rows[1].label == 0);
  CHECK(rows[0].id != rows[2].id);

  CHECK(error_of(d.write("a.jsonl", "{\"label\": 1}\n")).find(":1:") != std::string::npos);
  CHECK(error_of(d.write("b.jsonl", "{\"text\": \"x\", \"label\": 1}\n{\"text\": \"y\"}\n")).find(":2:") !=
        std::string::npos);
  CHECK(error_of(d.write("c.jsonl", "{\"text\": \"x\", \"label\": \"neutral\"}\n")).find("neutral") !=
        std::string::npos);
  CHECK(error_of(d.write("d.jsonl", "{\"text\": \"x\", \"label\": 5}\n")) != "");
  CHECK(error_of(d.write("e.jsonl", "not json\n")) != "");
  CHECK(error_of(d.write("f.jsonl", "{\"id\": \"q\", \"text\": \"x\", \"label\": 1}\n{\"id\": \"q\", \"text\": \"y\", "
                                    "\"label\": 1}\n"))
            .find("duplicate") != std::string::npos);
  CHECK(error_of(d.path / "missing.jsonl") != "");
}

TEST_CASE("preprocess drops misclassified and long examples") {
  BagOfWordsVictim v({"negative", "positive"}, {0.0, 0.0}, {{"good", {0.0, 2.0}}, {"bad", {0.0, -2.0}}});
  const auto vocab = small_vocab(1);
  const std::vector<RawExample> raw = {{"a", "good", 1}, {"b", "bad", 1}, {"c", "bad", 0}};
  const auto q0 = v.queries();
  PreprocessStats st;
  const auto kept = preprocess(raw, v, *vocab, 32, true, &st);
  CHECK(v.queries() - q0 == 3);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == "a");
  CHECK(kept[1].id == "c");
  CHECK(kept[0].victim_probs[1] > 0.5);
  CHECK(kept[0].token_length == 1);
  CHECK(st.misclassified == 1);
  CHECK(st.kept == 2);
  CHECK(preprocess(raw, v, *vocab, 32, false).size() == 3);

  std::string long_text, edge_text;
  for (int i = 0; i < 33; ++i) long_text += "good ";
  for (int i = 0; i < 32; ++i) edge_text += "good ";
  const auto lengths = preprocess({{"l", long_text, 1}, {"e", edge_text, 1}}, v, *vocab, 32);
  REQUIRE(lengths.size() == 1);
  CHECK(lengths[0].id == "e");
  for (const auto& ex : kept) CHECK_NOTHROW(check_example(ex));
}

TEST_CASE("random splits") {
  const auto ex = numbered(100);
  const auto s = split_random(ex, 0.1, 0.1, 4);
  CHECK(s.train.size() == 80);
  CHECK(s.validation.size() == 10);
  CHECK(s.test.size() == 10);
  std::set<std::string> ids;
  for (const auto* part : {&s.train, &s.validation, &s.test})
    for (const auto& e : *part) ids.insert(e.id);
  CHECK(ids.size() == 100);

  const auto all = split_random(ex, 0.0, 0.0, 4);
  CHECK(all.train.size() == 100);
  CHECK(all.validation.empty());

  const auto again = split_random(ex, 0.1, 0.1, 4);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK(split_random(ex, 0.1, 0.1, 5).test != s.test);
  CHECK_THROWS(split_random(ex, 0.6, 0.6, 1));
}

TEST_CASE("datasets round-trip and are checked") {
  TempDir d("advpara_test_data_ds");
  const auto models = synthetic::suite();
  const auto ds = synthetic::dataset(models, 80, 2);
  CHECK_NOTHROW(ds.check());
  write_dataset(d.path / "ds", ds);
  const auto back = read_dataset(d.path / "ds");
  CHECK(back.class_names == ds.class_names);
  CHECK(back.splits.train == ds.splits.train);
  CHECK(back.splits.validation == ds.splits.validation);
  CHECK(back.splits.test == ds.splits.test);
  CHECK(&back.split("test") == &back.splits.test);
  CHECK_THROWS_AS(back.split("dev"), DataError);

  auto dup = ds;
  dup.splits.test.push_back(dup.splits.train.front());
  CHECK_THROWS_AS(dup.check(), DataError);
  CHECK_THROWS_AS(read_dataset(d.path / "nope"), DataError);
}

TEST_CASE("synthetic corpus") {
  const auto a = synthetic::corpus(50, 3);
  const auto b = synthetic::corpus(50, 3);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].text == b[i].text);
  const auto grammar = synthetic::grammar();
  for (const auto& r : a) CHECK(grammar->grammatical(r.text));
}
