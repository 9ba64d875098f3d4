#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "advpara/config.hpp"
#include "advpara/training.hpp"

namespace advpara {

// On-disk layout of one training run:
//
//   LOCK              held while a command writes to the run
//   config.json       validated RunConfig snapshot
//   run.json          data directory, model suite, seed
//   metrics.csv       one row per epoch
//   checkpoints/      final/ and best/
//   reports/          evaluation outputs, each naming its checkpoint
//   logs/run.log
class RunDirectory {
 public:
  // Creates the directory (which must not already hold a run) and writes the
  // config snapshot before anything else.
  static RunDirectory create(const std::filesystem::path& path, const RunConfig& cfg, const nlohmann::json& run_info);
  static RunDirectory open(const std::filesystem::path& path);

  RunDirectory(RunDirectory&& other) noexcept;
  RunDirectory& operator=(RunDirectory&&) = delete;
  RunDirectory(const RunDirectory&) = delete;
  ~RunDirectory();

  const std::filesystem::path& path() const { return path_; }
  const RunConfig& config() const { return config_; }
  const nlohmann::json& info() const { return info_; }

  std::filesystem::path checkpoint(const std::string& name) const { return path_ / "checkpoints" / name; }
  std::filesystem::path reports_dir() const { return path_ / "reports"; }

  void append_metrics(const EpochRecord& rec);
  void log(const std::string& line) const;

  // Writes reports/<name> with a "checkpoint" field added.
  void write_report(const std::string& name, nlohmann::json report, const std::string& checkpoint_name) const;

  static const char* metrics_header();

 private:
  RunDirectory(std::filesystem::path path, RunConfig cfg, nlohmann::json info);
  void lock();

  std::filesystem::path path_;
  RunConfig config_;
  nlohmann::json info_;
  bool locked_ = false;
};

}  // namespace advpara
