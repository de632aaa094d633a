#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "statedrift/error.hpp"
#include "statedrift/state.hpp"
#include "support.hpp"

using namespace statedrift;

namespace {

StateVector counts(std::initializer_list<std::pair<const std::string, Count>> kv) {
  return StateVector::from_counts(CountMap(kv));
}

TokenStream toks(std::initializer_list<const char*> list) {
  return TokenStream(list.begin(), list.end());
}

}  // namespace

TEST_CASE("new_state is empty") {
  const StateVector s = new_state();
  CHECK(s.counts().empty());
  CHECK(s.total_tokens() == 0);
  CHECK(s.vocab_size() == 0);
  CHECK_THROWS_AS(normalize(s), Error);
  try {
    normalize(s);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyState);
  }
}

TEST_CASE("update: counting examples") {
  CHECK(updated({}, toks({"a", "b", "a"})) == counts({{"a", 2}, {"b", 1}}));
  CHECK(updated({}, toks({"a", "b", "a"})).total_tokens() == 3);

  const StateVector s = updated(counts({{"a", 2}, {"b", 1}}), toks({"b", "c"}));
  CHECK(s == counts({{"a", 2}, {"b", 2}, {"c", 1}}));
  CHECK(s.total_tokens() == 5);

  CHECK(updated(counts({{"a", 1}}), {}) == counts({{"a", 1}}));
}

TEST_CASE("vocab_size and total_tokens") {
  CHECK(new_state().vocab_size() == 0);
  const StateVector s = counts({{"a", 2}, {"b", 1}});
  CHECK(s.vocab_size() == 2);
  CHECK(s.total_tokens() == 3);
}

TEST_CASE("from_counts rejects invalid entries") {
  CHECK_THROWS_AS(counts({{"a", 0}}), Error);
  CHECK_THROWS_AS(counts({{"", 1}}), Error);
  CHECK_THROWS_AS(counts({{"a b", 1}}), Error);
}

TEST_CASE("overflow is detected and leaves state untouched") {
  const Count big = std::numeric_limits<Count>::max() - 1;
  StateVector s = counts({{"a", big}});
  CHECK_THROWS_AS(s.update(toks({"a", "a"})), Error);
  CHECK(s == counts({{"a", big}}));
  s.update(toks({"a"}));
  CHECK(s.count("a") == std::numeric_limits<Count>::max());
  CHECK_THROWS_AS(counts({{"a", big}, {"b", 5}}), Error);
}

TEST_CASE("normalize examples") {
  const auto n34 = normalize(counts({{"a", 3}, {"b", 4}}));
  CHECK(n34.weights.at("a") == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(n34.weights.at("b") == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(normalize(counts({{"a", 7}})).weights.at("a") == 1.0);
  const auto n11 = normalize(counts({{"a", 1}, {"b", 1}}));
  CHECK(std::abs(n11.weights.at("a") - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(n11.weights.at("a") == n11.weights.at("b"));
}

TEST_CASE("properties over random token streams") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(0, 60), tok(0, 40), ndocs(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenStream> docs(ndocs(rng));
    for (auto& d : docs) {
      const int n = len(rng);
      for (int i = 0; i < n; ++i) d.push_back("w" + std::to_string(tok(rng)));
    }

    // Incremental vs batch.
    StateVector folded;
    TokenStream all;
    for (const auto& d : docs) {
      const StateVector before = folded;
      folded.update(d);
      // Monotone growth.
      CHECK(folded.vocab_size() >= before.vocab_size());
      CHECK(folded.total_tokens() == before.total_tokens() + d.size());
      for (const auto& [k, v] : before.counts()) CHECK(folded.count(k) >= v);
      all.insert(all.end(), d.begin(), d.end());
    }
    CHECK(folded == updated({}, all));

    // Order invariance, both across documents and within a stream.
    std::shuffle(docs.begin(), docs.end(), rng);
    StateVector permuted;
    for (const auto& d : docs) permuted.update(d);
    CHECK(permuted == folded);
    std::shuffle(all.begin(), all.end(), rng);
    CHECK(updated({}, all) == folded);

    // Invariants.
    Count sum = 0;
    for (const auto& [k, v] : folded.counts()) {
      CHECK(v >= 1);
      sum += v;
    }
    CHECK(sum == folded.total_tokens());

    if (!folded.empty()) {
      const auto n = normalize(folded);
      double sq = 0.0;
      for (const auto& [k, w] : n.weights) {
        CHECK(w > 0.0);
        CHECK(w <= 1.0);
        sq += w * w;
      }
      CHECK(std::abs(std::sqrt(sq) - 1.0) < 1e-12);
      CHECK(n.weights.size() == folded.vocab_size());
      for (Count k : {2u, 3u, 10u}) {
        const auto nk = normalize(folded.scaled(k));
        for (const auto& [key, w] : n.weights) {
          CHECK(std::abs(nk.weights.at(key) - w) < 1e-15);
        }
      }
    }
  }
}
