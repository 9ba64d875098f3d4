#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace advpara::cli {

struct PrepareOptions {
  std::filesystem::path input;
  std::string classes;  // comma-separated
  std::string victim = "synthetic";  // models file, or a backend name for every role
  std::size_t max_tokens = 32;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  double val_frac = 0.1;
  double test_frac = 0.1;
  std::string exclude_misclassified = "train,validation,test";
};

struct TrainOptions {
  std::filesystem::path data;
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::string models = "synthetic";
  std::size_t threads = 1;
};

struct EvalOptions {
  std::filesystem::path run;
  std::string split = "test";
  std::string decoding = "beam";
  std::string checkpoint = "best";  // best, final, or initial
  std::size_t threads = 1;
};

struct CompareOptions {
  std::filesystem::path run;
  std::string attack = "tokenmod";
  std::filesystem::path synonyms;
  std::filesystem::path stopwords;
  std::string split = "test";
  std::string decoding = "beam";
  std::string checkpoint = "best";
  std::size_t max_candidates = 50;
  std::size_t threads = 1;
};

struct FilterOptions {
  std::filesystem::path run;
  std::string split = "test";
  std::string decoding = "beam";
  std::string checkpoint = "best";
  std::size_t threads = 1;
};

struct SynthOptions {
  std::filesystem::path out;
  std::size_t count = 400;
  std::uint64_t seed = 0;
};

// Each command writes its artifacts, prints a short summary to `out`, and
// throws on failure.
void cmd_prepare(const PrepareOptions& o, std::ostream& out);
void cmd_train(const TrainOptions& o, std::ostream& out);
void cmd_eval(const EvalOptions& o, std::ostream& out);
void cmd_compare(const CompareOptions& o, std::ostream& out);
void cmd_filter(const FilterOptions& o, std::ostream& out);
void cmd_synth(const SynthOptions& o, std::ostream& out);

// Parses argv and dispatches. Returns the process exit code: 0 on success,
// 1 when a command fails, 2 for usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace advpara::cli
