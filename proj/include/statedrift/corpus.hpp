#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "statedrift/store.hpp"

namespace statedrift {

struct Document {
  std::string id;  // '/'-separated path relative to the corpus root
  std::string text;
};

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// Regular `*.txt` files under `corpus_root` whose ids are not in the
/// manifest, sorted by id.
///
/// Every manifest entry is re-hashed first; a changed or vanished document
/// throws Error{DigestMismatch}.
std::vector<Document> scan_new_documents(const fs::path& corpus_root,
                                         const Manifest& manifest);

enum class Pool { Base, Perturbation };

struct RunRecipe {
  std::uint32_t doc_count = 1;
  std::uint32_t tokens_per_doc = 0;
  Pool pool = Pool::Base;
  // Fraction of draws taken from the base pool. Only meaningful for
  // perturbation runs; base runs always draw from the base pool.
  double overlap = 0.0;
};

struct PhaseInterval {
  std::string name;
  std::uint64_t t1 = 0;
  std::uint64_t t2 = 0;
};

struct CorpusSpec {
  std::uint64_t seed = 42;
  std::uint32_t base_pool_size = 300;
  std::uint32_t perturbation_pool_size = 300;
  double base_zipf_exponent = 1.0;
  double perturbation_zipf_exponent = 0.5;
  std::vector<RunRecipe> runs;
  // Stability summary intervals reported by the protocol runner.
  std::vector<PhaseInterval> phases;
};

// The 8-run schedule: four base days, one rho=0 perturbation day, three
// base days, lengths 48/38/33/34/240/37/34/33, default phase intervals.
CorpusSpec default_protocol_spec();

// Throws Error{Validation} describing the first problem found.
void validate(const CorpusSpec& spec);

CorpusSpec parse_corpus_spec(std::string_view json_text);
CorpusSpec load_corpus_spec(const fs::path& path);
std::string to_json(const CorpusSpec& spec);

// Word lists. The two pools share no word (their first letters come from
// disjoint alphabets).
std::vector<std::string> base_pool(std::uint32_t size);
std::vector<std::string> perturbation_pool(std::uint32_t size);

struct GeneratedDocument {
  std::uint64_t run_index = 0;  // 1-based
  Document doc;                 // id is "dayNN_docMM.txt"
};

/// Deterministic in `spec`: same spec, same bytes.
std::vector<GeneratedDocument> generate_corpus(const CorpusSpec& spec);

// Writes each generated document under `out_dir` (created if needed).
void write_corpus(const fs::path& out_dir,
                  const std::vector<GeneratedDocument>& docs);

}  // namespace statedrift
