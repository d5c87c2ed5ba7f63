#pragma once

#include <stdexcept>
#include <string>

namespace crystal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  /// Short machine-readable tag ("gap-closure", "config", ...).
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DegenerateBasisError : public Error {
 public:
  explicit DegenerateBasisError(const std::string& what) : Error("degenerate-basis", what) {}
};

class GapClosureError : public Error {
 public:
  explicit GapClosureError(const std::string& what) : Error("gap-closure", what) {}
};

class UnitarityBreachError : public Error {
 public:
  explicit UnitarityBreachError(const std::string& what) : Error("unitarity-breach", what) {}
};

class InconsistencyError : public Error {
 public:
  explicit InconsistencyError(const std::string& what) : Error("inconsistency", what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : Error("config", what), line_(line), field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace crystal
