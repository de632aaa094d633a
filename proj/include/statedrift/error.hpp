#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace statedrift {

enum class ErrorKind {
  Validation,
  LockHeld,
  CorruptStore,
  DigestMismatch,
  Io,
  NonEmptyStore,
  MissingHistory,
  Sequence,
  Range,
  EmptyState,
  Overflow,
};

std::string_view to_string(ErrorKind kind);

// Process exit code for the CLI. Distinct per kind, never 0.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace statedrift
