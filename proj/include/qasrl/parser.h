// qasrl/parser.h

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

#ifndef QASRL_PARSER_H_
#define QASRL_PARSER_H_

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qasrl/qgen.h"
#include "qasrl/spandet.h"

namespace qasrl {

/// One (question, span) pair with the detector probability of its span.
struct RankedItem {
  int verb_index = 0;
  QuestionSlots slots;
  AnswerSpan span;
  double prob = 0;
};

/// Spans grouped under one question; prob is the smallest span probability.
struct ParseTuple {
  int verb_index = 0;
  QuestionSlots slots;
  std::vector<AnswerSpan> spans;
  double prob = 0;
  std::vector<double> span_probs;  // parallel to spans; may be empty when read from JSON
};

struct ParseResult {
  std::vector<ParseTuple> tuples;
  /// Items whose question failed the grammaticality check.
  std::vector<RankedItem> rejected;
};

/// Groups items by (verb, exact slot tuple), dropping and reporting
/// ungrammatical questions. Tuples come out by verb, then by the order of
/// their first item.
ParseResult group_items(const std::vector<RankedItem>& items, const Grammar& grammar);

/// Items with prob > tau, order kept.
std::vector<RankedItem> cut_items(const std::vector<RankedItem>& ranked, double tau);

struct RateCutoff {
  double prob = 0;       // keep items with prob >= this
  long questions = 0;    // grammatical questions kept
  long items = 0;
};

/// Highest cutoff along the ranking at which grammatical questions per verb
/// reach `questions_per_verb`; nullopt when the whole ranking stays below.
std::optional<RateCutoff> cutoff_for_rate(const std::vector<RankedItem>& ranked, long num_verbs,
                                          double questions_per_verb, const Grammar& grammar);

/// Span detector plus question generator.
class Parser {
 public:
  Parser(SpanModel<float> detector, std::unique_ptr<QuestionGenerator<float>> generator);
  static Parser load(const std::filesystem::path& span_checkpoint, const std::filesystem::path& qgen_checkpoint);

  /// Items for spans with probability > tau_low, by descending probability
  /// (ties: verb, then span order).
  std::vector<RankedItem> parse_ranked(const std::vector<std::string>& tokens, const std::vector<int>& verbs,
                                       double tau_low);
  ParseResult parse(const std::vector<std::string>& tokens, const std::vector<int>& verbs, double tau);

  /// Verbs from identify_verbs on the record's POS tags.
  std::vector<RankedItem> parse_ranked(const SentenceRecord& sentence, double tau_low);
  ParseResult parse(const SentenceRecord& sentence, double tau);

  const Grammar& grammar() const { return generator_->grammar(); }

 private:
  SpanModel<float> detector_;
  std::unique_ptr<QuestionGenerator<float>> generator_;
};

/// Prediction JSONL: one tuple per line.
Json prediction_to_json(const std::string& sentence_id, const ParseTuple& t);
struct Prediction {
  std::string sentence_id;
  ParseTuple tuple;
};
Prediction prediction_from_json(const Json& j);
std::vector<Prediction> read_predictions(std::istream& in);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);

}  // namespace qasrl

#endif  // QASRL_PARSER_H_
