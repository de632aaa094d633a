#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "statedrift/history.hpp"
#include "statedrift/state.hpp"

namespace statedrift {

namespace fs = std::filesystem;

struct ManifestEntry {
  std::string digest;  // lowercase hex SHA-256 of the document bytes
  std::uint64_t run_index = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Document id (relative path) -> digest and ingestion run.
using Manifest = std::map<std::string, ManifestEntry, std::less<>>;

inline constexpr std::string_view kStateHeader = "statedrift-state v1";
inline constexpr std::string_view kHistoryHeader =
    "run,timestamp,tokens_seen,vocab_size,similarity,perturbation";

// Canonical text form of a state: header, total, vocab, then one
// "token count" line per key in sorted order.
std::string serialize_state(const StateVector& state);
StateVector parse_state(std::string_view text);

// Absent file -> empty state. Malformed content -> Error{CorruptStore}.
StateVector load_state(const fs::path& path);
// Temp file + rename; the target is either the old or the new content.
void save_state(const fs::path& path, const StateVector& state);

// Locale-independent fixed-point rendering.
std::string format_fixed(double v, int precision);

std::string format_run_record(const RunRecord& record);

// Absent file -> empty log. Bad rows or non-contiguous indices ->
// Error{CorruptStore}.
HistoryLog load_history(const fs::path& path);

// Appends one row, writing the header first if the file is new. Throws
// Error{Sequence} unless record.run_index is last + 1 (or 1).
void append_run_record(const fs::path& path, const RunRecord& record);

// Lines are "digest  run_index  path", sorted by (run_index, path).
std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);
Manifest load_manifest(const fs::path& path);
void save_manifest(const fs::path& path, const Manifest& manifest);

// Writes `content` to `path` via a sibling temp file and rename.
void write_file_atomic(const fs::path& path, std::string_view content);
std::string read_file(const fs::path& path);

/// Exclusive, non-blocking advisory lock (flock) on a lock file. Released on
/// destruction.
class RunLock {
 public:
  // Throws Error{LockHeld} if another holder exists, Error{Io} if the lock
  // file cannot be opened.
  explicit RunLock(const fs::path& lock_file);
  ~RunLock();

  RunLock(RunLock&& other) noexcept;
  RunLock& operator=(RunLock&& other) noexcept;
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

  void release() noexcept;
  bool held() const noexcept { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

inline RunLock acquire_run_lock(const fs::path& lock_file) {
  return RunLock(lock_file);
}

/// Fixed file names inside a store directory.
struct StorePaths {
  explicit StorePaths(fs::path root_dir) : root(std::move(root_dir)) {}

  fs::path root;
  fs::path state() const { return root / "state.v1"; }
  fs::path history() const { return root / "history.csv"; }
  fs::path manifest() const { return root / "manifest.txt"; }
  fs::path lock() const { return root / "run.lock"; }
};

// Creates the directory and empty state/history/manifest files if missing.
// Existing files are left alone.
void init_store(const StorePaths& paths);

}  // namespace statedrift
