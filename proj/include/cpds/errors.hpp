#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace cpds {

// Error taxonomy shared by the library and the CLI exit-code mapping.
// error_class() is the machine-readable tag emitted by the CLI on failure.
class Error : public std::runtime_error {
 public:
  Error(std::string cls, const std::string& msg)
      : std::runtime_error(msg), class_(std::move(cls)) {}
  const std::string& error_class() const noexcept { return class_; }

 private:
  std::string class_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& msg) : Error("dimension", msg) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& msg) : Error("unsupported", msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& msg) : Error("precondition", msg) {}
};

// Raised when a solution set is empty for the chosen concept (possible for
// pure-strategy Nash). Carries the offending draw index when known so strict
// runs can report which utility draw violated nonemptiness.
class EmptinessError : public Error {
 public:
  explicit EmptinessError(const std::string& msg,
                          std::optional<std::uint64_t> draw = std::nullopt)
      : Error("emptiness", msg), draw_index_(draw) {}
  std::optional<std::uint64_t> draw_index() const noexcept { return draw_index_; }

 private:
  std::optional<std::uint64_t> draw_index_;
};

class IngestionError : public Error {
 public:
  IngestionError(const std::string& msg, long line)
      : Error("ingestion", msg + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace cpds
