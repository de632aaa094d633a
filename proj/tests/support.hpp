#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <string>

#include "statedrift/state.hpp"

namespace statedrift::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("statedrift_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << s;
}

// Random sparse state over a shared alphabet of `universe` tokens, so pairs
// overlap partially.
inline StateVector random_state(std::mt19937_64& rng, std::size_t max_keys,
                                std::size_t universe = 1500,
                                Count max_count = 50) {
  std::uniform_int_distribution<std::size_t> nkeys(1, max_keys);
  std::uniform_int_distribution<std::size_t> key(0, universe - 1);
  std::uniform_int_distribution<Count> cnt(1, max_count);
  CountMap counts;
  const std::size_t n = nkeys(rng);
  for (std::size_t i = 0; i < n; ++i) {
    counts["t" + std::to_string(key(rng))] = cnt(rng);
  }
  return StateVector::from_counts(std::move(counts));
}

// Dense brute-force cosine over the key union, in long double.
inline double dense_cosine(const StateVector& a, const StateVector& b) {
  std::set<std::string> keys;
  for (const auto& [k, v] : a.counts()) keys.insert(k);
  for (const auto& [k, v] : b.counts()) keys.insert(k);
  std::vector<long double> va, vb;
  for (const auto& k : keys) {
    va.push_back(static_cast<long double>(a.count(k)));
    vb.push_back(static_cast<long double>(b.count(k)));
  }
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  return static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

}  // namespace statedrift::testing
