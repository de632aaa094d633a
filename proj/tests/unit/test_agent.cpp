#include <doctest.h>

#include "statedrift/agent.hpp"
#include "statedrift/error.hpp"
#include "statedrift/metrics.hpp"
#include "statedrift/tokenizer.hpp"
#include "support.hpp"

using namespace statedrift;
using statedrift::testing::read_bytes;
using statedrift::testing::TempDir;
using statedrift::testing::write_bytes;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

struct Fixture {
  TempDir dir;
  fs::path corpus = dir / "corpus";
  fs::path store = dir / "store";
  StorePaths paths{store};

  Fixture() { fs::create_directories(corpus); }
  AgentConfig config() const { return {corpus, store, false}; }

  std::string snapshot() const {
    return read_bytes(paths.state()) + "|" + read_bytes(paths.history()) + "|" +
           read_bytes(paths.manifest());
  }
};

}  // namespace

TEST_CASE("run_once: first and repeated content") {
  Fixture f;
  write_bytes(f.corpus / "d1.txt", "a b a");
  const RunRecord r1 = run_once(f.config());
  CHECK(r1.run_index == 1);
  CHECK(r1.tokens_seen == 3);
  CHECK(r1.vocab_size == 2);
  CHECK(r1.similarity == 0.0);
  CHECK(r1.timestamp.size() == 20);

  write_bytes(f.corpus / "d2.txt", "a b a");
  const RunRecord r2 = run_once(f.config());
  CHECK(load_state(f.paths.state()) ==
        StateVector::from_counts({{"a", 4}, {"b", 2}}));
  CHECK(format_run_record(r2).ends_with(",6,2,1.000000,0"));

  const auto manifest = load_manifest(f.paths.manifest());
  CHECK(manifest.at("d1.txt").run_index == 1);
  CHECK(manifest.at("d2.txt").run_index == 2);
  CHECK(manifest.at("d2.txt").digest == sha256_hex("a b a"));
}

TEST_CASE("run_once: no new input is a fixed point") {
  Fixture f;
  write_bytes(f.corpus / "d1.txt", "one two three three");
  run_once(f.config());
  const std::string before = read_bytes(f.paths.state());
  const RunRecord r = run_once(f.config());
  CHECK(r.similarity == 1.0);
  CHECK(r.run_index == 2);
  CHECK(read_bytes(f.paths.state()) == before);

  // A new document with no tokens also leaves the direction unchanged.
  write_bytes(f.corpus / "d2.txt", " ... ");
  CHECK(run_once(f.config()).similarity == 1.0);
  CHECK(read_bytes(f.paths.state()) == before);
}

TEST_CASE("run_once: empty corpus on the first run records 0.0") {
  Fixture f;
  const RunRecord r = run_once(f.config());
  CHECK(r.similarity == 0.0);
  CHECK(r.tokens_seen == 0);
  write_bytes(f.corpus / "d.txt", "x");
  CHECK(run_once(f.config()).similarity == 0.0);
}

TEST_CASE("run_once: persisted state equals batch recomputation") {
  Fixture f;
  const char* texts[] = {"the cat sat", "The dog sat on the mat",
                         "a cat, a dog", "", "mat mat mat cat"};
  for (int run = 0; run < 5; ++run) {
    write_bytes(f.corpus / ("r" + std::to_string(run) + "_x.txt"), texts[run]);
    if (run == 2) write_bytes(f.corpus / "r2_y.txt", "extra words here");
    const RunRecord rec = run_once(f.config());

    const auto manifest = load_manifest(f.paths.manifest());
    StateVector batch;
    for (const auto& [id, entry] : manifest) {
      if (entry.run_index <= rec.run_index) {
        batch.update(tokenize(read_bytes(f.corpus / id)));
      }
    }
    CHECK(load_state(f.paths.state()) == batch);
    CHECK(rec.tokens_seen == batch.total_tokens());
  }
}

TEST_CASE("run_once: errors leave the store untouched") {
  Fixture f;
  write_bytes(f.corpus / "d1.txt", "alpha beta");
  run_once(f.config());
  write_bytes(f.corpus / "d2.txt", "gamma");
  const std::string before = f.snapshot();

  SUBCASE("lock held") {
    RunLock other(f.paths.lock());
    CHECK(kind_of([&] { run_once(f.config()); }) == ErrorKind::LockHeld);
  }
  SUBCASE("digest mismatch") {
    write_bytes(f.corpus / "d1.txt", "alpha beta mutated");
    CHECK(kind_of([&] { run_once(f.config()); }) == ErrorKind::DigestMismatch);
  }
  SUBCASE("corrupt state") {
    const std::string bad = "statedrift-state v1\ntotal 9\nvocab 1\nalpha 1\n";
    write_bytes(f.paths.state(), bad);
    const std::string corrupted = f.snapshot();
    CHECK(kind_of([&] { run_once(f.config()); }) == ErrorKind::CorruptStore);
    CHECK(f.snapshot() == corrupted);
    return;
  }
  SUBCASE("state disagrees with history") {
    save_state(f.paths.state(), StateVector::from_counts({{"alpha", 1}}));
    const std::string corrupted = f.snapshot();
    CHECK(kind_of([&] { run_once(f.config()); }) == ErrorKind::CorruptStore);
    CHECK(f.snapshot() == corrupted);
    return;
  }
  CHECK(f.snapshot() == before);
}

TEST_CASE("run_protocol: single run and fresh-store requirement") {
  TempDir dir;
  CorpusSpec spec;
  spec.runs = {{1, 20}};
  const auto result = run_protocol(spec, dir / "store");
  REQUIRE(result.history.size() == 1);
  CHECK(result.history[0].similarity == 0.0);
  CHECK(result.history[0].tokens_seen == 20);
  CHECK(kind_of([&] { run_protocol(spec, dir / "store"); }) ==
        ErrorKind::NonEmptyStore);
}

TEST_CASE("run_protocol: default schedule shape and summaries") {
  TempDir dir;
  const auto spec = default_protocol_spec();
  const auto result = run_protocol(spec, dir / "store");
  REQUIRE(result.history.size() == 8);
  CHECK(result.history[4].perturbation);
  CHECK_FALSE(result.history[3].perturbation);
  CHECK(result.history[4].tokens_seen == 393);
  REQUIRE(result.stability.size() == 4);
  CHECK(result.stability[0].interval.name == "plastic");
  CHECK(result.stability[2].value == result.history[4].similarity);
  CHECK(result.stability[3].value == stability(result.history, 5, 8));
}

TEST_CASE("report") {
  TempDir dir;
  CHECK(kind_of([&] { report(dir / "empty", {}); }) == ErrorKind::MissingHistory);

  const fs::path store = dir / "store";
  fs::create_directories(store);
  write_bytes(StorePaths(store).history(),
              "run,timestamp,tokens_seen,vocab_size,similarity,perturbation\n"
              "1,2026-01-01T00:00:00Z,48,44,0.000000,0\n"
              "2,2026-01-02T00:00:00Z,86,73,0.941100,0\n"
              "3,2026-01-03T00:00:00Z,119,92,0.975500,0\n"
              "4,2026-01-04T00:00:00Z,153,111,0.986800,0\n");
  const Report r = report(store, {parse_interval("1:4")});
  CHECK(r.table_csv ==
        "run,tokens_seen,vocab_size,similarity_vs_previous\n"
        "1,48,44,0.0000\n2,86,73,0.9411\n3,119,92,0.9755\n4,153,111,0.9868\n");
  CHECK(r.series == "# run similarity\n1 0.000000\n2 0.941100\n3 0.975500\n"
                    "4 0.986800\n");
  CHECK(r.stability_csv == "interval,t1,t2,stability\n1:4,1,4,0.967800\n");

  const Report defaults = report(store, {});
  CHECK(defaults.stability_csv ==
        "interval,t1,t2,stability\nplastic,1,3,0.958300\nstable,3,4,0.986800\n");
  CHECK(kind_of([&] { report(store, {parse_interval("2:9")}); }) ==
        ErrorKind::Range);
}

TEST_CASE("parse_interval") {
  const auto p = parse_interval("3:7");
  CHECK(p.t1 == 3);
  CHECK(p.t2 == 7);
  for (const char* bad : {"3", "3:", ":4", "a:b", "-1:3", "1:2x"}) {
    CAPTURE(bad);
    CHECK(kind_of([&] { parse_interval(bad); }) == ErrorKind::Validation);
  }
}

TEST_CASE("run_protocol: protocol shape holds across seeds") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    TempDir dir;
    auto spec = default_protocol_spec();
    spec.seed = seed;
    const auto h = run_protocol(spec, dir.path()).history;
    auto sim = [&](int run) { return h[run - 1].similarity; };
    CHECK(sim(2) < sim(3));
    CHECK(sim(3) < sim(4));
    CHECK(sim(5) <= sim(4) - 0.05);
    CHECK(sim(5) >= 0.5);
    CHECK(sim(6) < sim(7));
    CHECK(sim(7) < sim(8));
    CHECK(sim(8) >= 0.98);
  }
}
