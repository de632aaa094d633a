#include "statedrift/state.hpp"

#include <cmath>

#include "statedrift/error.hpp"

namespace statedrift {
namespace {

Count checked_add(Count a, Count b) {
  Count out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorKind::Overflow, "token count exceeds 64 bits");
  }
  return out;
}

bool valid_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

}  // namespace

StateVector StateVector::from_counts(CountMap counts) {
  StateVector s;
  for (const auto& [token, n] : counts) {
    if (!valid_token(token)) {
      throw Error(ErrorKind::Validation, "invalid token '" + token + "'");
    }
    if (n == 0) {
      throw Error(ErrorKind::Validation, "zero count for token '" + token + "'");
    }
    s.total_ = checked_add(s.total_, n);
  }
  s.counts_ = std::move(counts);
  return s;
}

void StateVector::update(std::span<const std::string> tokens) {
  // Aggregate first so an overflow leaves *this unchanged.
  CountMap delta;
  for (const auto& t : tokens) {
    auto [it, inserted] = delta.try_emplace(t, 0);
    it->second = checked_add(it->second, 1);
  }
  Count total = checked_add(total_, static_cast<Count>(tokens.size()));
  for (const auto& [token, n] : delta) {
    checked_add(count(token), n);
  }
  for (auto& [token, n] : delta) {
    counts_[token] += n;
  }
  total_ = total;
}

StateVector StateVector::scaled(Count k) const {
  if (k == 0) throw Error(ErrorKind::Validation, "scale factor must be >= 1");
  CountMap out;
  for (const auto& [token, n] : counts_) {
    Count v = 0;
    if (__builtin_mul_overflow(n, k, &v)) {
      throw Error(ErrorKind::Overflow, "scaled count exceeds 64 bits");
    }
    out.emplace_hint(out.end(), token, v);
  }
  return from_counts(std::move(out));
}

Count StateVector::count(std::string_view token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

double StateVector::l2_norm() const {
  double sum = 0.0;
  for (const auto& [token, n] : counts_) {
    const double v = static_cast<double>(n);
    sum += v * v;
  }
  return std::sqrt(sum);
}

StateVector updated(StateVector state, std::span<const std::string> tokens) {
  state.update(tokens);
  return state;
}

NormalizedVector normalize(const StateVector& state) {
  if (state.empty()) {
    throw Error(ErrorKind::EmptyState, "empty state has no direction");
  }
  const double norm = state.l2_norm();
  NormalizedVector out;
  for (const auto& [token, n] : state.counts()) {
    out.weights.emplace_hint(out.weights.end(), token,
                             static_cast<double>(n) / norm);
  }
  return out;
}

}  // namespace statedrift
