#include "statedrift/metrics.hpp"

#include <string>

#include "statedrift/error.hpp"

namespace statedrift {

double cosine(const StateVector& a, const StateVector& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::EmptyState, "cosine of an empty state is undefined");
  }
  // Keys missing on one side contribute 0 to the dot product, so only the
  // intersection needs visiting.
  double dot = 0.0;
  auto ia = a.counts().begin();
  auto ib = b.counts().begin();
  while (ia != a.counts().end() && ib != b.counts().end()) {
    const int cmp = ia->first.compare(ib->first);
    if (cmp < 0) {
      ++ia;
    } else if (cmp > 0) {
      ++ib;
    } else {
      dot += static_cast<double>(ia->second) * static_cast<double>(ib->second);
      ++ia;
      ++ib;
    }
  }
  return dot / (a.l2_norm() * b.l2_norm());
}

double stability(std::span<const RunRecord> history, std::uint64_t t1,
                 std::uint64_t t2) {
  if (t1 < 1 || t1 >= t2 || t2 > history.size()) {
    throw Error(ErrorKind::Range,
                "stability interval (" + std::to_string(t1) + ", " +
                    std::to_string(t2) + ") outside history of " +
                    std::to_string(history.size()) + " runs");
  }
  double sum = 0.0;
  for (std::uint64_t t = t1 + 1; t <= t2; ++t) {
    const RunRecord& r = history[t - 1];
    if (r.run_index != t) {
      throw Error(ErrorKind::Range, "history is not indexed 1..n");
    }
    sum += r.similarity;
  }
  return sum / static_cast<double>(t2 - t1);
}

std::vector<DriftPoint> drift_series(std::span<const RunRecord> history) {
  std::vector<DriftPoint> out;
  out.reserve(history.size());
  for (const auto& r : history) out.emplace_back(r.run_index, r.similarity);
  return out;
}

}  // namespace statedrift
