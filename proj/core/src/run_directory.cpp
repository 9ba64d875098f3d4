#include "advpara/run_directory.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>

#include "advpara/errors.hpp"
#include "advpara/serialization.hpp"

namespace advpara {

RunDirectory::RunDirectory(std::filesystem::path path, RunConfig cfg, nlohmann::json info)
    : path_(std::move(path)), config_(std::move(cfg)), info_(std::move(info)) {}

RunDirectory::RunDirectory(RunDirectory&& other) noexcept
    : path_(std::move(other.path_)),
      config_(std::move(other.config_)),
      info_(std::move(other.info_)),
      locked_(other.locked_) {
  other.locked_ = false;
}

RunDirectory::~RunDirectory() {
  if (locked_) {
    std::error_code ec;
    std::filesystem::remove(path_ / "LOCK", ec);
  }
}

void RunDirectory::lock() {
  const auto file = path_ / "LOCK";
  const int fd = ::open(file.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) throw Error("run directory " + path_.string() + " is locked by another command (" + file.string() + ")");
  const std::string pid = std::to_string(::getpid()) + "\n";
  if (::write(fd, pid.data(), pid.size()) < 0) {
    ::close(fd);
    throw Error("cannot write " + file.string());
  }
  ::close(fd);
  locked_ = true;
}

RunDirectory RunDirectory::create(const std::filesystem::path& path, const RunConfig& cfg,
                                  const nlohmann::json& run_info) {
  if (std::filesystem::exists(path / "config.json")) {
    throw Error("run directory " + path.string() + " already holds a run");
  }
  std::filesystem::create_directories(path);
  RunDirectory rd(path, validate_config(cfg), run_info);
  rd.lock();
  write_json(path / "config.json", to_json(rd.config_));
  write_json(path / "run.json", run_info);
  std::filesystem::create_directories(path / "checkpoints");
  std::filesystem::create_directories(path / "reports");
  std::filesystem::create_directories(path / "logs");
  std::ofstream(path / "metrics.csv") << metrics_header() << "\n";
  return rd;
}

RunDirectory RunDirectory::open(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path / "config.json")) {
    throw Error("no run found at " + path.string());
  }
  RunDirectory rd(path, validate_config(read_json(path / "config.json")), read_json(path / "run.json"));
  rd.lock();
  return rd;
}

const char* RunDirectory::metrics_header() {
  return "epoch,train_mean_reward,val_asr,unique_bigrams,median_perplexity,stopped_reason";
}

void RunDirectory::append_metrics(const EpochRecord& rec) {
  std::ofstream out(path_ / "metrics.csv", std::ios::app);
  char buf[256];
  if (rec.validated) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.1f,%zu,%.6f,%s", rec.epoch, rec.train.mean_reward,
                  rec.validation.val_asr, rec.validation.unique_bigrams, rec.validation.median_perplexity,
                  rec.decision.reason.c_str());
  } else {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,,,,%s", rec.epoch, rec.train.mean_reward, rec.decision.reason.c_str());
  }
  out << buf << "\n";
  if (!out) throw Error("cannot append to metrics.csv");
}

void RunDirectory::log(const std::string& line) const {
  std::ofstream(path_ / "logs" / "run.log", std::ios::app) << line << "\n";
}

void RunDirectory::write_report(const std::string& name, nlohmann::json report,
                                const std::string& checkpoint_name) const {
  report["checkpoint"] = checkpoint_name;
  write_json(reports_dir() / name, report);
}

}  // namespace advpara
