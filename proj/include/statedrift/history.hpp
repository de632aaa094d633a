#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace statedrift {

/// One row of the longitudinal history.
struct RunRecord {
  std::uint64_t run_index = 0;
  std::string timestamp;  // ISO-8601 UTC, e.g. 2026-01-31T08:00:00Z
  std::uint64_t tokens_seen = 0;
  std::uint64_t vocab_size = 0;
  double similarity = 0.0;
  bool perturbation = false;
};

// Compares everything except the timestamp.
bool same_content(const RunRecord& a, const RunRecord& b);

using HistoryLog = std::vector<RunRecord>;

}  // namespace statedrift
