#pragma once

#include <stdexcept>
#include <string>

namespace askin {

/// Failure categories; the CLI maps each to a distinct exit code.
enum class ErrorCategory {
  InvalidInput = 2,
  Config = 3,
  Consistency = 4,
  Io = 5,
  RunAborted = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& what) : Error(ErrorCategory::InvalidInput, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

// Raised when a quantity that the model guarantees (e.g. M(q) invertible) does not hold.
struct ConsistencyError : Error {
  explicit ConsistencyError(const std::string& what) : Error(ErrorCategory::Consistency, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

struct RunAborted : Error {
  explicit RunAborted(const std::string& what) : Error(ErrorCategory::RunAborted, what) {}
};

}  // namespace askin
