#include "statedrift/error.hpp"

namespace statedrift {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::LockHeld: return "lock-held";
    case ErrorKind::CorruptStore: return "corrupt-store";
    case ErrorKind::DigestMismatch: return "digest-mismatch";
    case ErrorKind::Io: return "io";
    case ErrorKind::NonEmptyStore: return "non-empty-store";
    case ErrorKind::MissingHistory: return "missing-history";
    case ErrorKind::Sequence: return "sequence";
    case ErrorKind::Range: return "range";
    case ErrorKind::EmptyState: return "empty-state";
    case ErrorKind::Overflow: return "overflow";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return 2;
    case ErrorKind::LockHeld: return 3;
    case ErrorKind::CorruptStore: return 4;
    case ErrorKind::DigestMismatch: return 5;
    case ErrorKind::Io: return 6;
    case ErrorKind::NonEmptyStore: return 7;
    case ErrorKind::MissingHistory: return 8;
    case ErrorKind::Sequence: return 9;
    case ErrorKind::Range: return 10;
    case ErrorKind::EmptyState: return 11;
    case ErrorKind::Overflow: return 12;
  }
  return 1;
}

}  // namespace statedrift
