#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "statedrift/agent.hpp"
#include "statedrift/error.hpp"
#include "statedrift/metrics.hpp"
#include "statedrift/tokenizer.hpp"

namespace py = pybind11;
namespace sd = statedrift;

PYBIND11_MODULE(_statedrift, m) {
  m.doc() = "Persistent token-frequency agent and drift metrics";

  static py::exception<sd::Error> error(m, "StatedriftError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sd::Error& e) {
      const std::string msg =
          std::string(sd::to_string(e.kind())) + ": " + e.what();
      py::set_error(error, msg.c_str());
    }
  });

  m.def("tokenize", &sd::tokenize, py::arg("text"));

  py::class_<sd::StateVector>(m, "StateVector")
      .def(py::init<>())
      .def_static("from_counts",
                  [](std::map<std::string, sd::Count> counts) {
                    return sd::StateVector::from_counts(
                        sd::CountMap(counts.begin(), counts.end()));
                  })
      .def("update",
           [](sd::StateVector& s, const std::vector<std::string>& tokens) {
             s.update(tokens);
           })
      .def("scaled", &sd::StateVector::scaled)
      .def_property_readonly("counts",
                             [](const sd::StateVector& s) {
                               return std::map<std::string, sd::Count>(
                                   s.counts().begin(), s.counts().end());
                             })
      .def_property_readonly("total_tokens", &sd::StateVector::total_tokens)
      .def_property_readonly("vocab_size", &sd::StateVector::vocab_size)
      .def("__eq__", [](const sd::StateVector& a, const sd::StateVector& b) {
        return a == b;
      })
      .def("__repr__", [](const sd::StateVector& s) {
        return "StateVector(vocab=" + std::to_string(s.vocab_size()) +
               ", total=" + std::to_string(s.total_tokens()) + ")";
      });

  m.def("normalize", [](const sd::StateVector& s) {
    const auto n = sd::normalize(s);
    return std::map<std::string, double>(n.weights.begin(), n.weights.end());
  });
  m.def("cosine", &sd::cosine, py::arg("a"), py::arg("b"));

  py::class_<sd::RunRecord>(m, "RunRecord")
      .def(py::init<>())
      .def_readwrite("run_index", &sd::RunRecord::run_index)
      .def_readwrite("timestamp", &sd::RunRecord::timestamp)
      .def_readwrite("tokens_seen", &sd::RunRecord::tokens_seen)
      .def_readwrite("vocab_size", &sd::RunRecord::vocab_size)
      .def_readwrite("similarity", &sd::RunRecord::similarity)
      .def_readwrite("perturbation", &sd::RunRecord::perturbation)
      .def("__repr__", [](const sd::RunRecord& r) {
        return "RunRecord(" + sd::format_run_record(r) + ")";
      });

  m.def("stability",
        [](const sd::HistoryLog& h, std::uint64_t t1, std::uint64_t t2) {
          return sd::stability(h, t1, t2);
        },
        py::arg("history"), py::arg("t1"), py::arg("t2"));
  m.def("drift_series",
        [](const sd::HistoryLog& h) { return sd::drift_series(h); });

  m.def("load_state", &sd::load_state);
  m.def("save_state", &sd::save_state);
  m.def("load_history", &sd::load_history);

  py::class_<sd::PhaseInterval>(m, "PhaseInterval")
      .def(py::init([](std::string name, std::uint64_t t1, std::uint64_t t2) {
             return sd::PhaseInterval{std::move(name), t1, t2};
           }),
           py::arg("name"), py::arg("t1"), py::arg("t2"))
      .def_readwrite("name", &sd::PhaseInterval::name)
      .def_readwrite("t1", &sd::PhaseInterval::t1)
      .def_readwrite("t2", &sd::PhaseInterval::t2);

  py::class_<sd::CorpusSpec>(m, "CorpusSpec")
      .def_static("default", &sd::default_protocol_spec)
      .def_static("from_json", &sd::parse_corpus_spec)
      .def("to_json", &sd::to_json)
      .def_readwrite("seed", &sd::CorpusSpec::seed)
      .def_readwrite("phases", &sd::CorpusSpec::phases);

  m.def("generate_corpus", [](const sd::CorpusSpec& spec) {
    std::vector<std::tuple<std::uint64_t, std::string, std::string>> out;
    for (const auto& g : sd::generate_corpus(spec)) {
      out.emplace_back(g.run_index, g.doc.id, g.doc.text);
    }
    return out;
  });

  m.def("run_once",
        [](const std::filesystem::path& corpus,
           const std::filesystem::path& store, bool perturbation) {
          return sd::run_once({corpus, store, perturbation});
        },
        py::arg("corpus"), py::arg("store"), py::arg("perturbation") = false);

  py::class_<sd::StabilitySummary>(m, "StabilitySummary")
      .def_readonly("interval", &sd::StabilitySummary::interval)
      .def_readonly("value", &sd::StabilitySummary::value);
  py::class_<sd::ProtocolResult>(m, "ProtocolResult")
      .def_readonly("history", &sd::ProtocolResult::history)
      .def_readonly("stability", &sd::ProtocolResult::stability);
  m.def("run_protocol", &sd::run_protocol, py::arg("spec"), py::arg("store"));

  py::class_<sd::Report>(m, "Report")
      .def_readonly("table_csv", &sd::Report::table_csv)
      .def_readonly("series", &sd::Report::series)
      .def_readonly("stability_csv", &sd::Report::stability_csv);
  m.def("report", &sd::report, py::arg("store"),
        py::arg("intervals") = std::vector<sd::PhaseInterval>{});
}
