#pragma once

#include <stdexcept>
#include <string>

namespace mtmeta {

enum class ErrorKind {
  InvalidInput,
  Alignment,
  Range,
  MissingData,
  DuplicateKey,
  InsufficientData,
  UndefinedCorrelation,
  InvalidMatrix,
  Coverage,
};

const char* to_string(ErrorKind kind);

/// Every failure the library reports is an Error carrying a kind, so callers
/// (notably the CLI) can map input problems to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mtmeta
