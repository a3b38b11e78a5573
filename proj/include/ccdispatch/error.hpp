#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ccd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value. `key()` is the dotted path of the offending
/// entry (e.g. `system.beta_e_c`).
class ConfigError : public Error {
public:
  ConfigError(std::string key, std::string reason)
      : Error(key + ": " + reason), key_(std::move(key)), reason_(std::move(reason)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }
  /// The message without the key.
  [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

  /// Same error with `prefix.` in front of the key.
  [[nodiscard]] ConfigError within(const std::string& prefix) const { return {prefix + "." + key_, reason_}; }

private:
  std::string key_;
  std::string reason_;
};

/// Malformed CSV input; `line()` is 1-based and counts the header.
class CsvError : public Error {
public:
  CsvError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace ccd
