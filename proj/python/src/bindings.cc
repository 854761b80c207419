// qasrl/python/src/bindings.cc

// Copyright 2026  QA-SRL Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <sstream>

#include "qasrl/annosvc.h"
#include "qasrl/cli.h"
#include "qasrl/corpus.h"
#include "qasrl/grammar.h"
#include "qasrl/metrics.h"
#include "qasrl/spandet.h"
#include "qasrl/synthetic.h"

namespace py = pybind11;
using namespace qasrl;

namespace {

// Structured values cross the boundary as JSON text; the Python package
// decodes them.
std::string dump(const Json& j) { return j.dump(); }

Slot slot_at(int index) {
  if (index < 0 || index >= kNumSlots) throw ValidationError("slot index out of range");
  return static_cast<Slot>(index);
}

InflectionTable inflections(const std::string& verb) { return inflect(verb, Lexicon::builtin()); }

std::vector<AnswerSpan> to_spans(const std::vector<std::pair<int, int>>& spans) {
  std::vector<AnswerSpan> out;
  for (const auto& [a, b] : spans) out.push_back({a, b});
  return out;
}

Matcher matcher(const std::string& kind, double threshold) {
  if (kind == "exact") return Matcher::exact();
  if (kind == "iou") return Matcher::iou(threshold);
  throw ValidationError("matcher must be 'exact' or 'iou'");
}

}  // namespace

PYBIND11_MODULE(_qasrl, m) {
  m.doc() = "QA-SRL toolkit core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<Grammar>(m, "Grammar")
      .def(py::init<>())
      .def(py::init<std::vector<std::string>>(), py::arg("prepositions"))
      .def("prepositions", &Grammar::prepositions)
      .def("vocabulary_size", [](const Grammar& g, int slot) { return g.vocabulary_size(slot_at(slot)); })
      .def("value_name", [](const Grammar& g, int slot, int code) { return g.value_name(slot_at(slot), code); })
      .def("autocomplete", [](const Grammar& g, const std::vector<int>& prefix) { return g.autocomplete(prefix); })
      .def("accepts_json",
           [](const Grammar& g, const std::string& slots) {
             return g.accepts(question_slots_from_json(Json::parse(slots)));
           })
      .def("render_json",
           [](const Grammar& g, const std::string& slots, const std::string& verb) {
             return g.render(question_slots_from_json(Json::parse(slots)), inflections(verb));
           })
      .def("parse_json", [](const Grammar& g, const std::string& text, const std::string& verb) {
        return dump(to_json(g.parse(text, inflections(verb))));
      });

  m.def("slot_names", [] {
    std::vector<std::string> out;
    for (int i = 0; i < kNumSlots; ++i) out.emplace_back(slot_name(static_cast<Slot>(i)));
    return out;
  });
  m.def("inflect_json", [](const std::string& verb) { return dump(to_json(inflections(verb))); });

  m.def("viterbi_decode", [](const std::vector<std::vector<double>>& rows) {
    // rows: one [B, I, O] triple per token
    Eigen::MatrixXd p(3, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != 3) throw ValidationError("each token needs three probabilities (B, I, O)");
      for (int s = 0; s < 3; ++s) p(s, static_cast<Eigen::Index>(t)) = rows[t][static_cast<std::size_t>(s)];
    }
    std::string tags;
    for (Tag t : viterbi_decode(p).tags) tags += tag_char(t);
    return tags;
  });

  m.def(
      "span_detection_prf",
      [](const std::vector<std::pair<int, int>>& predicted,
         const std::vector<std::vector<std::pair<int, int>>>& gold, const std::string& kind, double threshold) {
        GoldVerb g;
        for (const auto& spans : gold) g.push_back({QuestionSlots{}, to_spans(spans)});
        const PRF prf = span_detection_prf(to_spans(predicted), g, matcher(kind, threshold));
        return py::make_tuple(prf.precision, prf.recall, prf.f1);
      },
      py::arg("predicted"), py::arg("gold"), py::arg("matcher") = "exact", py::arg("threshold") = 0.5);
  m.def("agreement_kappa", &agreement_kappa, py::arg("valid_rate"), py::arg("observed_agreement"));

  m.def("generation_payment", &generation_payment);
  m.def("validation_payment", &validation_payment);
  m.def("expansion_payment", &expansion_payment);

  m.def("load_corpus_json", [](const std::string& path) {
    Json out = Json::array();
    for (const auto& r : load_corpus(path)) out.push_back(to_json(r));
    return dump(out);
  });
  m.def("corpus_stats_json", [](const std::string& path) {
    const Corpus corpus = load_corpus(path);
    Json j = to_json(corpus_stats(corpus));
    j["paymentCents"] = corpus_payments(corpus);
    return dump(j);
  });
  m.def("synthetic_corpus_json", [](int sentences, std::uint64_t seed) {
    Json out = Json::array();
    for (const auto& r : synthetic_corpus(sentences, seed)) out.push_back(to_json(r));
    return dump(out);
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
  // writes straight to the process streams, so long-running commands
  // (serve) report as they go
  m.def("main", [](const std::vector<std::string>& args) {
    py::gil_scoped_release release;
    const int code = run_cli(args, std::cout, std::cerr);
    std::cout.flush();
    return code;
  });
}
