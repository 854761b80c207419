// qasrl/src/synthetic.cc

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

#include "qasrl/synthetic.h"

#include <random>

#include "qasrl/grammar.h"

namespace qasrl {

namespace {

const std::vector<std::vector<std::string>> kPeople{
    {"the", "chef"},  {"a", "teacher"},       {"the", "farmer"}, {"my", "neighbor"},
    {"the", "pilot"}, {"an", "old", "sailor"}, {"the", "nurse"},  {"a", "young", "student"}};
const std::vector<std::vector<std::string>> kThings{
    {"the", "meal"},  {"a", "boat"},          {"the", "fence"},  {"an", "old", "car"},
    {"the", "house"}, {"a", "small", "table"}, {"the", "letter"}, {"the", "garden"}};
const std::vector<std::vector<std::string>> kPlaces{
    {"in", "the", "kitchen"}, {"at", "the", "market"}, {"near", "the", "river"}, {"in", "town"}};
const std::vector<std::vector<std::string>> kTimes{{"yesterday"}, {"on", "monday"}, {"last", "week"}};
const std::vector<std::string> kVerbs{"cook", "paint", "repair", "sell", "buy", "clean", "build", "write"};

std::vector<std::string> tag_phrase(const std::vector<std::string>& words, bool adverbial) {
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (w == "the" || w == "a" || w == "an" || w == "my")
      tags.push_back(w == "my" ? "PRP$" : "DT");
    else if (w == "in" || w == "at" || w == "near" || w == "on")
      tags.push_back("IN");
    else if (w == "old" || w == "young" || w == "small" || w == "last")
      tags.push_back("JJ");
    else if (adverbial && words.size() == 1)
      tags.push_back("RB");
    else
      tags.push_back(w == "monday" ? "NNP" : "NN");
  }
  return tags;
}

QAPair agreed_pair(QuestionSlots slots, AnswerSpan span) {
  QAPair qa;
  qa.slots = std::move(slots);
  for (const char* worker : {"writer", "validator1", "validator2"}) qa.judgments.push_back({worker, true, {span}});
  return qa;
}

}  // namespace

Corpus synthetic_corpus(int sentences, std::uint64_t seed) {
  if (sentences < 0) throw ValidationError("sentence count must be non-negative");
  std::mt19937_64 rng(seed);
  const auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const Lexicon lexicon = Lexicon::builtin();
  const Domain domains[] = {Domain::wikipedia, Domain::wikinews, Domain::science};
  Corpus corpus;
  for (int s = 0; s < sentences; ++s) {
    SentenceRecord r;
    r.sentence_id = "synthetic-" + std::to_string(s);
    r.domain = domains[s % 3];
    const auto append = [&](const std::vector<std::string>& words, bool adverbial) {
      const AnswerSpan span{static_cast<int>(r.tokens.size()), static_cast<int>(r.tokens.size() + words.size()) - 1};
      const auto tags = tag_phrase(words, adverbial);
      r.tokens.insert(r.tokens.end(), words.begin(), words.end());
      r.pos_tags.insert(r.pos_tags.end(), tags.begin(), tags.end());
      return span;
    };
    const AnswerSpan subj = append(kPeople[pick(kPeople.size())], false);
    const InflectionTable inf = inflect(kVerbs[pick(kVerbs.size())], lexicon);
    const int verb_index = static_cast<int>(r.tokens.size());
    r.tokens.push_back(inf.past);
    r.pos_tags.push_back("VBD");
    const AnswerSpan obj = append(kThings[pick(kThings.size())], false);
    std::optional<AnswerSpan> place, time;
    if (rng() % 2) place = append(kPlaces[pick(kPlaces.size())], false);
    if (rng() % 2) time = append(kTimes[pick(kTimes.size())], true);
    r.tokens.push_back(".");
    r.pos_tags.push_back(".");

    VerbEntry v;
    v.verb_index = verb_index;
    v.inflections = inf;
    const VerbSlot past{AuxChain::none, VerbForm::past};
    const VerbSlot stem{AuxChain::none, VerbForm::stem};
    v.qa_pairs.push_back(agreed_pair({Wh::who, "", Placeholder::none, past, Placeholder::something, "", Misc::none}, subj));
    v.qa_pairs.push_back(agreed_pair({Wh::what, "did", Placeholder::someone, stem, Placeholder::none, "", Misc::none}, obj));
    if (place)
      v.qa_pairs.push_back(
          agreed_pair({Wh::where, "did", Placeholder::someone, stem, Placeholder::something, "", Misc::none}, *place));
    if (time)
      v.qa_pairs.push_back(
          agreed_pair({Wh::when, "did", Placeholder::someone, stem, Placeholder::something, "", Misc::none}, *time));
    r.verb_entries.push_back(std::move(v));
    validate_record(r);
    corpus.push_back(std::move(r));
  }
  return corpus;
}

}  // namespace qasrl
