#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "statedrift/tokenizer.hpp"

namespace statedrift {

using Count = std::uint64_t;
using CountMap = std::map<std::string, Count, std::less<>>;

/// Unit-length direction of a StateVector. Derived on demand, never stored.
struct NormalizedVector {
  std::map<std::string, double, std::less<>> weights;
};

/// Cumulative token counts. The agent's only internal state.
///
/// Keys iterate in sorted byte order, which fixes the summation order of
/// every derived float quantity. Counts never decrease and zero counts are
/// never stored.
class StateVector {
 public:
  StateVector() = default;

  // Validates counts (all >= 1, keys non-empty with no whitespace) and
  // derives the total. Throws Error{Validation} or Error{Overflow}.
  static StateVector from_counts(CountMap counts);

  // Adds every token of the stream. Throws Error{Overflow} if a count or the
  // total would exceed 64 bits; the state is left untouched in that case.
  void update(std::span<const std::string> tokens);

  // Multiplies every count by k (k >= 1).
  StateVector scaled(Count k) const;

  const CountMap& counts() const noexcept { return counts_; }
  Count total_tokens() const noexcept { return total_; }
  std::size_t vocab_size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return total_ == 0; }

  // 0 for tokens never seen.
  Count count(std::string_view token) const;

  // Euclidean norm of the raw counts, accumulated in key order.
  double l2_norm() const;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  CountMap counts_;
  Count total_ = 0;
};

inline StateVector new_state() { return {}; }

// Returns a copy of `state` updated with `tokens`.
StateVector updated(StateVector state, std::span<const std::string> tokens);

/// weights[t] = counts[t] / ||counts||. Throws Error{EmptyState} on the zero
/// vector.
NormalizedVector normalize(const StateVector& state);

}  // namespace statedrift
