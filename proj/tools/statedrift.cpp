// statedrift: command-line front end for the persistent agent.
//
//   statedrift init <store>
//   statedrift run --corpus <dir> --store <dir> [--perturbation]
//   statedrift gen-corpus [--spec <file>] --out <dir>
//   statedrift protocol [--spec <file>] --store <dir>
//   statedrift report --store <dir> [--csv <path>] [--series <path>]
//                     [--summary <path>] [--interval t1:t2 ...]
//
// STATEDRIFT_STORE supplies the store directory when none is given.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "statedrift/agent.hpp"
#include "statedrift/error.hpp"

namespace sd = statedrift;

namespace {

std::string resolve_store(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("STATEDRIFT_STORE"); env && *env) return env;
  throw sd::Error(sd::ErrorKind::Validation,
                  "no store given (use --store or STATEDRIFT_STORE)");
}

sd::CorpusSpec resolve_spec(const std::string& path) {
  return path.empty() ? sd::default_protocol_spec() : sd::load_corpus_spec(path);
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    sd::write_file_atomic(path, content);
  }
}

void print_record(const sd::RunRecord& r) {
  std::cout << sd::kHistoryHeader << "\n" << sd::format_run_record(r) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistent token-frequency agent and drift measurement"};
  app.require_subcommand(1);

  std::string store, corpus, spec_path, out_dir, csv_path, series_path,
      summary_path;
  std::vector<std::string> intervals;
  bool perturbation = false;

  auto* init = app.add_subcommand("init", "Create an empty store");
  init->add_option("store", store, "Store directory");

  auto* run = app.add_subcommand("run", "Execute one learning-loop iteration");
  run->add_option("--corpus", corpus, "Corpus directory")->required();
  run->add_option("--store", store, "Store directory");
  run->add_flag("--perturbation", perturbation,
                "Mark this run as a perturbation in the history");

  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic corpus");
  gen->add_option("--spec", spec_path, "Corpus spec (JSON); default schedule if omitted");
  gen->add_option("--out", out_dir, "Output directory")->required();

  auto* proto = app.add_subcommand("protocol", "Run a full multi-run protocol");
  proto->add_option("--spec", spec_path, "Corpus spec (JSON); default schedule if omitted");
  proto->add_option("--store", store, "Fresh store directory");

  auto* rep = app.add_subcommand("report", "Emit table, series and stability");
  rep->add_option("--store", store, "Store directory");
  rep->add_option("--csv", csv_path, "Table CSV path (stdout if omitted)");
  rep->add_option("--series", series_path, "Similarity series path");
  rep->add_option("--summary", summary_path, "Stability summary path (stdout if omitted)");
  rep->add_option("--interval", intervals, "Stability interval t1:t2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sd::exit_code(sd::ErrorKind::Validation);
  }

  try {
    if (*init) {
      const sd::StorePaths paths(resolve_store(store));
      sd::init_store(paths);
      std::cout << "initialized " << paths.root.string() << "\n";
    } else if (*run) {
      print_record(sd::run_once({corpus, resolve_store(store), perturbation}));
    } else if (*gen) {
      const auto docs = sd::generate_corpus(resolve_spec(spec_path));
      sd::write_corpus(out_dir, docs);
      std::cout << "wrote " << docs.size() << " documents to " << out_dir << "\n";
    } else if (*proto) {
      const auto result =
          sd::run_protocol(resolve_spec(spec_path), resolve_store(store));
      std::cout << sd::kHistoryHeader << "\n";
      for (const auto& r : result.history) {
        std::cout << sd::format_run_record(r) << "\n";
      }
      for (const auto& s : result.stability) {
        std::cout << "S(" << s.interval.t1 << "," << s.interval.t2 << ") "
                  << s.interval.name << " = " << sd::format_fixed(s.value, 6)
                  << "\n";
      }
    } else if (*rep) {
      std::vector<sd::PhaseInterval> parsed;
      for (const auto& text : intervals) parsed.push_back(sd::parse_interval(text));
      const auto r = sd::report(resolve_store(store), parsed);
      emit(csv_path, r.table_csv);
      if (!series_path.empty()) emit(series_path, r.series);
      emit(summary_path, r.stability_csv);
    }
  } catch (const sd::Error& e) {
    std::cerr << "statedrift: " << sd::to_string(e.kind()) << ": " << e.what()
              << "\n";
    return sd::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "statedrift: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
