#pragma once

#include <stdexcept>
#include <string>

namespace advpara {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by config validation; field() names the offending setting.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("invalid config field '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class TokenizerError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace advpara
