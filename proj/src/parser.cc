// qasrl/src/parser.cc

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

#include "qasrl/parser.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "qasrl/nn/checkpoint.h"

namespace qasrl {

ParseResult group_items(const std::vector<RankedItem>& items, const Grammar& grammar) {
  ParseResult out;
  std::map<int, std::vector<ParseTuple>> by_verb;
  for (const auto& it : items) {
    if (!it.slots.verb || !grammar.accepts(it.slots)) {
      out.rejected.push_back(it);
      continue;
    }
    auto& tuples = by_verb[it.verb_index];
    auto found = std::find_if(tuples.begin(), tuples.end(), [&](const ParseTuple& t) { return t.slots == it.slots; });
    if (found == tuples.end()) {
      tuples.push_back({it.verb_index, it.slots, {it.span}, it.prob, {it.prob}});
    } else if (std::find(found->spans.begin(), found->spans.end(), it.span) == found->spans.end()) {
      found->spans.push_back(it.span);
      found->span_probs.push_back(it.prob);
      found->prob = std::min(found->prob, it.prob);
    }
  }
  for (auto& [verb, tuples] : by_verb)
    for (auto& t : tuples) out.tuples.push_back(std::move(t));
  return out;
}

std::vector<RankedItem> cut_items(const std::vector<RankedItem>& ranked, double tau) {
  std::vector<RankedItem> out;
  for (const auto& it : ranked)
    if (it.prob > tau) out.push_back(it);
  return out;
}

std::optional<RateCutoff> cutoff_for_rate(const std::vector<RankedItem>& ranked, long num_verbs,
                                          double questions_per_verb, const Grammar& grammar) {
  if (num_verbs <= 0) throw ValidationError("verb count must be positive");
  std::set<std::pair<int, QuestionSlots>> seen;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& it = ranked[i];
    if (it.slots.verb && grammar.accepts(it.slots)) seen.insert({it.verb_index, it.slots});
    // a cutoff sits between distinct probabilities
    if (i + 1 < ranked.size() && ranked[i + 1].prob == it.prob) continue;
    const long q = static_cast<long>(seen.size());
    if (static_cast<double>(q) >= questions_per_verb * static_cast<double>(num_verbs))
      return RateCutoff{it.prob, q, static_cast<long>(i + 1)};
  }
  return std::nullopt;
}

Parser::Parser(SpanModel<float> detector, std::unique_ptr<QuestionGenerator<float>> generator)
    : detector_(std::move(detector)), generator_(std::move(generator)) {
  if (!generator_) throw ValidationError("parser needs a question generator");
}

Parser Parser::load(const std::filesystem::path& span_checkpoint, const std::filesystem::path& qgen_checkpoint) {
  return Parser(SpanModel<float>::from_checkpoint(nn::load_checkpoint(span_checkpoint)),
                load_question_model(nn::load_checkpoint(qgen_checkpoint)));
}

std::vector<RankedItem> Parser::parse_ranked(const std::vector<std::string>& tokens, const std::vector<int>& verbs,
                                             double tau_low) {
  if (!(tau_low >= 0 && tau_low <= 1)) throw ValidationError("tau must be in [0, 1]");
  std::vector<RankedItem> items;
  for (int v : verbs) {
    if (v < 0 || v >= static_cast<int>(tokens.size())) throw ValidationError("verb index out of range");
    std::vector<ScoredSpan> kept;
    for (const auto& s : detector_.span_probabilities(tokens, v))
      if (s.probability > tau_low) kept.push_back(s);
    std::vector<AnswerSpan> spans;
    for (const auto& s : kept) spans.push_back(s.span);
    const auto questions = generator_->generate(tokens, v, spans);
    for (std::size_t k = 0; k < kept.size(); ++k)
      items.push_back({v, grammar().decode(questions[k]), kept[k].span, kept[k].probability});
  }
  std::stable_sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    if (a.verb_index != b.verb_index) return a.verb_index < b.verb_index;
    return a.span < b.span;
  });
  return items;
}

ParseResult Parser::parse(const std::vector<std::string>& tokens, const std::vector<int>& verbs, double tau) {
  return group_items(parse_ranked(tokens, verbs, tau), grammar());
}

std::vector<RankedItem> Parser::parse_ranked(const SentenceRecord& sentence, double tau_low) {
  return parse_ranked(sentence.tokens, identify_verbs(sentence.tokens, sentence.pos_tags), tau_low);
}

ParseResult Parser::parse(const SentenceRecord& sentence, double tau) {
  return parse(sentence.tokens, identify_verbs(sentence.tokens, sentence.pos_tags), tau);
}

Json prediction_to_json(const std::string& sentence_id, const ParseTuple& t) {
  Json spans = Json::array();
  for (const auto& s : t.spans) spans.push_back({s.start, s.end});
  return Json{{"sentenceId", sentence_id},
              {"verbIndex", t.verb_index},
              {"slots", to_json(t.slots)},
              {"spans", spans},
              {"prob", t.prob}};
}

Prediction prediction_from_json(const Json& j) {
  Prediction p;
  try {
    p.sentence_id = j.at("sentenceId").get<std::string>();
    p.tuple.verb_index = j.at("verbIndex").get<int>();
    p.tuple.slots = question_slots_from_json(j.at("slots"));
    for (const auto& s : j.at("spans")) {
      if (!s.is_array() || s.size() != 2) throw ValidationError("span must be an [start, end] pair");
      p.tuple.spans.push_back({s[0].get<int>(), s[1].get<int>()});
      if (p.tuple.spans.back().start < 0 || p.tuple.spans.back().end < p.tuple.spans.back().start)
        throw ValidationError("span end before start");
    }
    p.tuple.prob = j.value("prob", 1.0);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed prediction: ") + e.what());
  }
  return p;
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(prediction_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw CorpusError(std::string("malformed JSON: ") + e.what(), lineno);
    } catch (const ValidationError& e) {
      throw CorpusError(e.what(), lineno);
    }
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open prediction file " + path.string());
  return read_predictions(in);
}

}  // namespace qasrl
