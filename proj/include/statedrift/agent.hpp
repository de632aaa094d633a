#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "statedrift/corpus.hpp"
#include "statedrift/history.hpp"
#include "statedrift/store.hpp"

namespace statedrift {

struct AgentConfig {
  fs::path corpus_root;
  fs::path store_root;
  // Marks the appended record as a perturbation run. Informational only.
  bool perturbation = false;
};

/// One execution of the learning loop: observe new documents, tokenize,
/// update the persisted state, compare against the previous state, persist.
///
/// Every error is raised before the first write, so a failed run leaves the
/// store byte-identical.
RunRecord run_once(const AgentConfig& config);

struct StabilitySummary {
  PhaseInterval interval;
  double value = 0.0;
};

struct ProtocolResult {
  HistoryLog history;
  std::vector<StabilitySummary> stability;
};

/// Generates the corpus for `spec`, stages each day's documents into
/// `<store>/corpus` and runs the loop once per scheduled run. Requires a
/// fresh store (Error{NonEmptyStore} otherwise).
ProtocolResult run_protocol(const CorpusSpec& spec, const fs::path& store_root);

struct Report {
  std::string table_csv;      // run,tokens_seen,vocab_size,similarity_vs_previous
  std::string series;         // "run similarity" per line
  std::string stability_csv;  // interval,t1,t2,stability
};

/// Renders the stored history. Intervals outside the history are rejected
/// with Error{Range}. Throws Error{MissingHistory} on an empty store.
Report report(const fs::path& store_root,
              const std::vector<PhaseInterval>& intervals);

// "t1:t2" -> interval named "t1:t2".
PhaseInterval parse_interval(std::string_view text);

}  // namespace statedrift
