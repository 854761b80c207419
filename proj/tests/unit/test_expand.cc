// qasrl/tests/unit/test_expand.cc

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

#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "qasrl/expand.h"
#include "qasrl/synthetic.h"

using namespace qasrl;

namespace {

const VerbSlot kPast{AuxChain::none, VerbForm::past};
const VerbSlot kStem{AuxChain::none, VerbForm::stem};

QuestionSlots q_who() { return {Wh::who, "", Placeholder::none, kPast, Placeholder::something, "", Misc::none}; }
QuestionSlots q_what() { return {Wh::what, "did", Placeholder::someone, kStem, Placeholder::none, "", Misc::none}; }
QuestionSlots q_why() { return {Wh::why, "did", Placeholder::someone, kStem, Placeholder::something, "", Misc::none}; }
QuestionSlots q_how() { return {Wh::how, "did", Placeholder::someone, kStem, Placeholder::something, "", Misc::none}; }

QAPair pair(QuestionSlots q, std::vector<AnswerSpan> spans, QASource source = QASource::generation,
            bool valid = true) {
  QAPair qa;
  qa.slots = q;
  qa.source = source;
  qa.judgments.push_back({"w", true, spans});
  qa.judgments.push_back({"v1", valid, valid ? spans : std::vector<AnswerSpan>{}});
  qa.judgments.push_back({"v2", true, spans});
  return qa;
}

// "the chef quickly cooked the meal in the kitchen yesterday ."
SentenceRecord record(std::string id = "s") {
  SentenceRecord r;
  r.sentence_id = std::move(id);
  r.tokens = {"the", "chef", "quickly", "cooked", "the", "meal", "in", "the", "kitchen", "yesterday", "."};
  r.pos_tags = {"DT", "NN", "RB", "VBD", "DT", "NN", "IN", "DT", "NN", "NN", "."};
  VerbEntry v;
  v.verb_index = 3;
  v.inflections = {"cook", "cooks", "cooking", "cooked", "cooked"};
  v.qa_pairs.push_back(pair(q_who(), {{0, 1}}));
  v.qa_pairs.push_back(pair(q_what(), {{4, 5}}));
  r.verb_entries.push_back(v);
  return r;
}

CandidateQA candidate(QuestionSlots q, std::vector<AnswerSpan> spans, std::string id = "s") {
  std::vector<double> probs(spans.size(), 0.5);
  return {std::move(id), 3, q, std::move(spans), std::move(probs), "parser", -1};
}

std::vector<Judgment> judgments(int valid, std::vector<AnswerSpan> spans) {
  std::vector<Judgment> out;
  for (int i = 0; i < 3; ++i) {
    const bool ok = i < valid;
    out.push_back({"x" + std::to_string(i), ok, ok ? spans : std::vector<AnswerSpan>{}});
  }
  return out;
}

nn::EncoderConfig tiny_encoder() {
  nn::EncoderConfig e;
  e.embedding_dim = 4;
  e.indicator_dim = 2;
  e.hidden = 5;
  e.layers = 1;
  return e;
}

Parser untrained_parser(const Corpus& corpus) {
  std::vector<std::vector<std::string>> sents;
  for (const auto& r : corpus) sents.push_back(r.tokens);
  const auto vocab = nn::Vocabulary::build(sents);
  ModelConfig sc;
  sc.encoder = tiny_encoder();
  sc.mlp_hidden = 5;
  QgenConfig qc;
  qc.encoder = tiny_encoder();
  qc.mlp_hidden = 5;
  return Parser(SpanModel<float>(vocab, sc), std::make_unique<LocalQuestionModel<float>>(vocab, qc));
}

}  // namespace

TEST_CASE("filter_candidates rule instances") {
  const Corpus existing{record()};
  // overlaps "the meal" by one token
  CHECK(filter_candidates({candidate(q_why(), {{5, 6}})}, existing).empty());
  // same slots as an existing question
  CHECK(filter_candidates({candidate(q_what(), {{6, 8}})}, existing).empty());
  // disjoint span, new question
  CHECK(filter_candidates({candidate(q_why(), {{6, 8}})}, existing).size() == 1);
  // one overlapping span among several is enough
  CHECK(filter_candidates({candidate(q_why(), {{6, 8}, {1, 1}})}, existing).empty());
  // answers of invalid questions do not block
  Corpus with_invalid = existing;
  with_invalid[0].verb_entries[0].qa_pairs.push_back(pair(q_how(), {{9, 9}}, QASource::generation, false));
  CHECK(filter_candidates({candidate(q_why(), {{9, 9}})}, with_invalid).size() == 1);
  // unknown sentence or verb: nothing to compare against
  CHECK(filter_candidates({candidate(q_what(), {{4, 5}}, "other")}, existing).size() == 1);
}

TEST_CASE("filter_candidates properties on random candidates") {
  std::mt19937 rng(17);
  const Corpus existing{record()};
  const QuestionSlots questions[] = {q_who(), q_what(), q_why(), q_how()};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CandidateQA> cands;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int c = 0; c < n; ++c) {
      std::vector<AnswerSpan> spans;
      const int m = 1 + static_cast<int>(rng() % 3);
      for (int s = 0; s < m; ++s) {
        const int a = static_cast<int>(rng() % 11);
        const int b = std::min(10, a + static_cast<int>(rng() % 3));
        spans.push_back({a, b});
      }
      cands.push_back(candidate(questions[rng() % 4], spans));
    }
    const Corpus before = existing;
    const auto once = filter_candidates(cands, existing);
    CHECK(filter_candidates(once, existing) == once);
    CHECK(existing == before);
    for (const auto& c : once) {
      for (const auto& qa : existing[0].verb_entries[0].qa_pairs) {
        CHECK(qa.slots != c.slots);
        for (const auto& a : answer_spans(qa))
          for (const auto& s : c.spans) CHECK_FALSE(a.overlaps(s));
      }
    }
    // kept candidates are a subsequence of the input
    std::size_t k = 0;
    for (const auto& c : cands)
      if (k < once.size() && c == once[k]) ++k;
    CHECK(k == once.size());
  }
}

TEST_CASE("jackknife folds") {
  const auto corpus = synthetic_corpus(10, 3);
  const auto folds = jackknife_folds(corpus, 5, 9);
  REQUIRE(folds.size() == 5);
  std::multiset<std::string> held;
  for (const auto& f : folds) {
    CHECK(f.heldout.size() == 2);
    CHECK(f.train.size() == 8);
    std::set<std::string> train_ids;
    for (const auto& r : f.train) train_ids.insert(r.sentence_id);
    for (const auto& r : f.heldout) {
      held.insert(r.sentence_id);
      CHECK(train_ids.count(r.sentence_id) == 0);
    }
  }
  CHECK(held.size() == 10);
  for (const auto& r : corpus) CHECK(held.count(r.sentence_id) == 1);

  const auto again = jackknife_folds(corpus, 5, 9);
  for (std::size_t i = 0; i < folds.size(); ++i) CHECK(again[i].heldout == folds[i].heldout);

  const auto uneven = jackknife_folds(synthetic_corpus(7, 1), 3, 2);
  for (const auto& f : uneven) CHECK((f.heldout.size() == 2 || f.heldout.size() == 3));

  CHECK_THROWS_AS(jackknife_folds(synthetic_corpus(4, 1), 5), ValidationError);
  CHECK_THROWS_AS(jackknife_folds(corpus, 1), ValidationError);
}

TEST_CASE("merge_validated") {
  const Corpus corpus{record(), record("t")};
  const std::vector<ValidatedCandidate> validated{
      {candidate(q_why(), {{2, 2}}), judgments(3, {{2, 2}})},
      {candidate(q_how(), {{6, 8}}), judgments(2, {{6, 8}})},
      {candidate(q_why(), {{9, 9}}, "t"), judgments(3, {{9, 9}})}};
  const auto result = merge_validated(corpus, validated);
  CHECK(result.merged == 2);
  REQUIRE(result.negatives.size() == 1);
  CHECK(result.negatives[0].candidate.slots == q_how());

  const auto& merged = result.corpus[0].verb_entries[0].qa_pairs;
  REQUIRE(merged.size() == 3);
  CHECK(merged[0] == corpus[0].verb_entries[0].qa_pairs[0]);
  CHECK(merged[1] == corpus[0].verb_entries[0].qa_pairs[1]);
  CHECK(merged[2].source == QASource::expansion);
  CHECK(merged[2].judgments.size() == 4);
  CHECK(merged[2].judgments[0].worker_id == "parser");
  CHECK(qa_is_valid(merged[2]));
  CHECK(result.corpus[1].verb_entries[0].qa_pairs.size() == 3);

  CHECK(merge_validated(corpus, {}).corpus == corpus);

  auto two = validated[0];
  two.judgments.pop_back();
  CHECK_THROWS_AS(merge_validated(corpus, {two}), ValidationError);
  auto stray = validated[0];
  stray.candidate.verb_index = 5;
  CHECK_THROWS_AS(merge_validated(corpus, {stray}), ValidationError);
  auto out_of_range = validated[0];
  out_of_range.judgments = judgments(3, {{20, 21}});
  CHECK_THROWS_AS(merge_validated(corpus, {out_of_range}), CorpusError);
}

TEST_CASE("merge never mutates existing annotations") {
  std::mt19937 rng(4);
  const Corpus corpus{record()};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ValidatedCandidate> validated;
    const int a = 6 + static_cast<int>(rng() % 4);
    validated.push_back({candidate(q_why(), {{a, a}}), judgments(static_cast<int>(rng() % 4), {{a, a}})});
    const auto result = merge_validated(corpus, validated);
    const auto& before = corpus[0].verb_entries[0].qa_pairs;
    const auto& after = result.corpus[0].verb_entries[0].qa_pairs;
    REQUIRE(after.size() >= before.size());
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] == before[i]);
    CHECK(static_cast<long>(after.size() - before.size()) == result.merged);
    CHECK(result.merged + static_cast<long>(result.negatives.size()) == 1);
  }
}

TEST_CASE("paraphrase_filter rule instances") {
  SentenceRecord original = record();
  original.verb_entries[0].qa_pairs = {pair(q_who(), {{0, 1}, {4, 5}}), pair(q_what(), {{7, 8}})};
  SentenceRecord expanded = original;
  auto& qas = expanded.verb_entries[0].qa_pairs;
  // two spans, both overlapping answers of the first question
  qas.push_back(pair(q_why(), {{1, 1}, {5, 5}}, QASource::expansion));
  // two spans overlapping two different questions
  qas.push_back(pair(q_how(), {{0, 0}, {8, 8}}, QASource::expansion));
  // one overlapping span
  QuestionSlots where{Wh::where, "did", Placeholder::someone, kStem, Placeholder::something, "", Misc::none};
  qas.push_back(pair(where, {{4, 4}, {9, 9}}, QASource::expansion));

  const auto out = paraphrase_filter({expanded}, {original});
  const auto& kept = out[0].verb_entries[0].qa_pairs;
  REQUIRE(kept.size() == 4);
  CHECK(kept[0] == qas[0]);
  CHECK(kept[1] == qas[1]);
  CHECK(kept[2].slots == q_how());
  CHECK(kept[3].slots == where);
  // filtering again changes nothing
  CHECK(paraphrase_filter(out, {original}) == out);
}

TEST_CASE("overgenerate monotonicity and provenance") {
  const auto corpus = synthetic_corpus(3, 5);
  auto parser = untrained_parser(corpus);
  CHECK(overgenerate(parser, corpus, 1.0).empty());
  const auto low = overgenerate(parser, corpus, 0.2, "m0", 2);
  const auto high = overgenerate(parser, corpus, 0.5, "m0", 2);
  CHECK_FALSE(low.empty());
  std::set<std::tuple<std::string, int, QuestionSlots, AnswerSpan>> low_items;
  for (const auto& c : low) {
    CHECK(c.model_id == "m0");
    CHECK(c.fold == 2);
    CHECK(parser.grammar().accepts(c.slots));
    REQUIRE(c.span_probs.size() == c.spans.size());
    for (std::size_t i = 0; i < c.spans.size(); ++i) {
      CHECK(c.span_probs[i] > 0.2);
      low_items.insert({c.sentence_id, c.verb_index, c.slots, c.spans[i]});
    }
  }
  for (const auto& c : high)
    for (const auto& s : c.spans) CHECK(low_items.count({c.sentence_id, c.verb_index, c.slots, s}) == 1);
  CHECK(overgenerate(parser, {}, 0.2).empty());
}

TEST_CASE("candidate JSONL round trip") {
  auto c = candidate(q_why(), {{2, 2}, {6, 8}});
  c.fold = 1;
  const ValidatedCandidate v{c, judgments(2, {{2, 2}})};
  std::stringstream ss;
  ss << to_json(c).dump() << "\n" << to_json(candidate(q_how(), {{1, 1}})).dump() << "\n";
  const auto back = read_candidates(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == c);
  CHECK(back[1].fold == -1);

  std::stringstream vs(to_json(v).dump() + "\n");
  const auto vb = read_validated(vs);
  REQUIRE(vb.size() == 1);
  CHECK(vb[0].candidate == c);
  CHECK(vb[0].judgments == v.judgments);

  std::stringstream bad(to_json(c).dump() + "\n" + R"({"sentenceId":"s","verbIndex":3})" + "\n");
  try {
    read_candidates(bad);
    FAIL("expected an error");
  } catch (const CorpusError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_validated("/nonexistent/v.jsonl"), ValidationError);
}
