#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "statedrift/history.hpp"
#include "statedrift/state.hpp"

namespace statedrift {

/// Cosine of the angle between two count vectors, aligned over the union of
/// their keys with implicit zeros. Symmetric bit for bit.
///
/// Throws Error{EmptyState} if either vector is zero.
double cosine(const StateVector& a, const StateVector& b);

/// Mean of the stored consecutive similarities for runs t1+1 .. t2.
///
/// Run indices are 1-based and refer to RunRecord::run_index positions in
/// `history`. Throws Error{Range} unless 1 <= t1 < t2 <= history.size().
double stability(std::span<const RunRecord> history, std::uint64_t t1,
                 std::uint64_t t2);

using DriftPoint = std::pair<std::uint64_t, double>;

/// (run index, similarity vs previous) in run order.
std::vector<DriftPoint> drift_series(std::span<const RunRecord> history);

}  // namespace statedrift
