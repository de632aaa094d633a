#include "statedrift/agent.hpp"

#include <chrono>
#include <ctime>

#include "statedrift/error.hpp"
#include "statedrift/metrics.hpp"
#include "statedrift/tokenizer.hpp"

namespace statedrift {
namespace {

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " +
                                   ec.message());
  }
}

// Cross-file invariants: the last history row describes the stored state and
// no manifest entry claims a run that was never recorded.
void check_consistent(const StateVector& state, const HistoryLog& history,
                      const Manifest& manifest) {
  const Count tokens = history.empty() ? 0 : history.back().tokens_seen;
  const std::size_t vocab = history.empty() ? 0 : history.back().vocab_size;
  if (state.total_tokens() != tokens || state.vocab_size() != vocab) {
    throw Error(ErrorKind::CorruptStore,
                "state file disagrees with the last history row");
  }
  for (const auto& [id, entry] : manifest) {
    if (entry.run_index > history.size()) {
      throw Error(ErrorKind::CorruptStore,
                  "manifest entry " + id + " refers to unrecorded run " +
                      std::to_string(entry.run_index));
    }
  }
}

// The loop body. Caller holds the run lock.
RunRecord run_locked(const AgentConfig& config, const StorePaths& paths) {
  // Observation.
  StateVector previous = load_state(paths.state());
  const HistoryLog history = load_history(paths.history());
  Manifest manifest = load_manifest(paths.manifest());
  check_consistent(previous, history, manifest);
  const auto docs = scan_new_documents(config.corpus_root, manifest);

  // Representation and update.
  StateVector next = previous;
  const std::uint64_t run = history.size() + 1;
  for (const auto& doc : docs) {
    next.update(tokenize(doc.text));
    manifest.emplace(doc.id, ManifestEntry{sha256_hex(doc.text), run});
  }

  // Comparison.
  double similarity = 0.0;
  if (!previous.empty()) {
    similarity = next.total_tokens() == previous.total_tokens()
                     ? 1.0
                     : cosine(previous, next);
  }

  RunRecord record;
  record.run_index = run;
  record.timestamp = utc_now();
  record.tokens_seen = next.total_tokens();
  record.vocab_size = next.vocab_size();
  record.similarity = similarity;
  record.perturbation = config.perturbation;

  // Storage.
  save_manifest(paths.manifest(), manifest);
  save_state(paths.state(), next);
  append_run_record(paths.history(), record);
  return record;
}

bool has_documents(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return false;
  for (const auto& e : fs::recursive_directory_iterator(dir, ec)) {
    if (e.is_regular_file()) return true;
  }
  return false;
}

}  // namespace

RunRecord run_once(const AgentConfig& config) {
  const StorePaths paths(config.store_root);
  ensure_dir(paths.root);
  RunLock lock(paths.lock());
  return run_locked(config, paths);
}

ProtocolResult run_protocol(const CorpusSpec& spec, const fs::path& store_root) {
  validate(spec);
  const StorePaths paths(store_root);
  ensure_dir(paths.root);
  RunLock lock(paths.lock());

  const fs::path staging = paths.root / "corpus";
  if (!load_history(paths.history()).empty() ||
      !load_state(paths.state()).empty() ||
      !load_manifest(paths.manifest()).empty() || has_documents(staging)) {
    throw Error(ErrorKind::NonEmptyStore,
                paths.root.string() + " already holds history; the protocol "
                                      "needs a fresh store");
  }
  init_store(paths);
  ensure_dir(staging);

  const auto corpus = generate_corpus(spec);
  auto next_doc = corpus.begin();
  for (std::size_t i = 0; i < spec.runs.size(); ++i) {
    const std::uint64_t run = i + 1;
    for (; next_doc != corpus.end() && next_doc->run_index == run; ++next_doc) {
      write_file_atomic(staging / next_doc->doc.id, next_doc->doc.text);
    }
    AgentConfig config{staging, paths.root,
                       spec.runs[i].pool == Pool::Perturbation};
    run_locked(config, paths);
  }

  ProtocolResult result;
  result.history = load_history(paths.history());
  for (const auto& phase : spec.phases) {
    result.stability.push_back(
        {phase, stability(result.history, phase.t1, phase.t2)});
  }
  return result;
}

Report report(const fs::path& store_root,
              const std::vector<PhaseInterval>& intervals) {
  const StorePaths paths(store_root);
  const HistoryLog history = load_history(paths.history());
  if (history.empty()) {
    throw Error(ErrorKind::MissingHistory,
                "no run history in " + store_root.string());
  }

  Report out;
  out.table_csv = "run,tokens_seen,vocab_size,similarity_vs_previous\n";
  out.series = "# run similarity\n";
  for (const auto& r : history) {
    out.table_csv += std::to_string(r.run_index) + "," +
                     std::to_string(r.tokens_seen) + "," +
                     std::to_string(r.vocab_size) + "," +
                     format_fixed(r.similarity, 4) + "\n";
  }
  for (const auto& [run, sim] : drift_series(history)) {
    out.series += std::to_string(run) + " " + format_fixed(sim, 6) + "\n";
  }

  std::vector<PhaseInterval> chosen = intervals;
  if (chosen.empty()) {
    for (const auto& p : default_protocol_spec().phases) {
      if (p.t2 <= history.size()) chosen.push_back(p);
    }
  }
  out.stability_csv = "interval,t1,t2,stability\n";
  for (const auto& p : chosen) {
    out.stability_csv += p.name + "," + std::to_string(p.t1) + "," +
                         std::to_string(p.t2) + "," +
                         format_fixed(stability(history, p.t1, p.t2), 6) + "\n";
  }
  return out;
}

PhaseInterval parse_interval(std::string_view text) {
  const std::size_t colon = text.find(':');
  auto bad = [&] {
    return Error(ErrorKind::Validation,
                 "interval '" + std::string(text) + "' is not t1:t2");
  };
  if (colon == std::string_view::npos) throw bad();
  PhaseInterval p;
  p.name = std::string(text);
  try {
    std::size_t used = 0;
    const std::string a(text.substr(0, colon));
    const std::string b(text.substr(colon + 1));
    if (a.empty() || b.empty() || a[0] == '-' || b[0] == '-') throw bad();
    p.t1 = std::stoull(a, &used);
    if (used != a.size()) throw bad();
    p.t2 = std::stoull(b, &used);
    if (used != b.size()) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  return p;
}

}  // namespace statedrift
