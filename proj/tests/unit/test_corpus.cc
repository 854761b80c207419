// qasrl/tests/unit/test_corpus.cc

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

#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qasrl/corpus.h"
#include "qasrl/synthetic.h"

using namespace qasrl;

namespace {

const std::string kFixture = std::string(QASRL_TEST_DATA_DIR) + "/fixture3.jsonl";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string first_line() {
  std::ifstream in(kFixture);
  std::string line;
  std::getline(in, line);
  return line;
}

std::vector<Judgment> marks(std::initializer_list<bool> valid) {
  std::vector<Judgment> out;
  for (bool v : valid) out.push_back({"w" + std::to_string(out.size()), v, v ? std::vector<AnswerSpan>{{0, 0}} : std::vector<AnswerSpan>{}});
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

}  // namespace

TEST_CASE("fixture round trip is byte identical") {
  const auto corpus = load_corpus(kFixture);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].sentence_id == "fx-0");
  CHECK(corpus[1].verb_entries.size() == 2);
  CHECK(corpus[1].verb_entries[1].qa_pairs[1].source == QASource::expansion);
  CHECK(corpus[2].verb_entries.empty());
  std::ostringstream out;
  write_corpus(out, corpus);
  CHECK(out.str() == slurp(kFixture));

  std::istringstream again(out.str());
  CHECK(read_corpus(again) == corpus);
}

TEST_CASE("synthetic corpora round trip") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto corpus = synthetic_corpus(12, seed);
    for (const auto& r : corpus) validate_record(r);
    std::stringstream ss;
    write_corpus(ss, corpus);
    CHECK(read_corpus(ss) == corpus);
  }
  std::stringstream empty;
  CHECK(read_corpus(empty).empty());
}

TEST_CASE("load errors carry line numbers and sentence ids") {
  const std::string good = first_line();
  SUBCASE("malformed JSON") {
    std::istringstream in(good + "\n{not json\n");
    try {
      read_corpus(in);
      FAIL("expected an error");
    } catch (const CorpusError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("span end before start") {
    std::string bad = good;
    bad.replace(bad.find("[[3,4]]"), 7, "[[4,3]]");
    std::istringstream in("\n" + bad + "\n");
    try {
      read_corpus(in);
      FAIL("expected an error");
    } catch (const CorpusError& e) {
      CHECK(e.sentence_id() == "fx-0");
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("fx-0") != std::string::npos);
    }
  }
  SUBCASE("span out of bounds") {
    std::string bad = good;
    bad.replace(bad.find("[[5,7]]"), 7, "[[5,9]]");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_corpus(in), CorpusError);
  }
  SUBCASE("overlapping answers by one worker") {
    std::string bad = good;
    bad.replace(bad.find("[[3,4]]"), 7, "[[1,4]]");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_corpus(in), CorpusError);
  }
  SUBCASE("valid judgment without spans") {
    std::string bad = good;
    bad.replace(bad.find("\"isValid\":false,\"spans\":[]"), 26, "\"isValid\":true,\"spans\":[]");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_corpus(in), CorpusError);
  }
  SUBCASE("verb not tagged VB") {
    std::string bad = good;
    bad.replace(bad.find("\"VBD\""), 5, "\"NN\"");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_corpus(in), CorpusError);
  }
  SUBCASE("tag count mismatch") {
    std::string bad = good;
    bad.replace(bad.find(",\".\"]"), 5, "]");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_corpus(in), CorpusError);
  }
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), ValidationError);
}

TEST_CASE("identify_verbs") {
  CHECK(identify_verbs(split("She was blamed ."), split("PRP VBD VBN .")) == std::vector<int>{2});
  CHECK(identify_verbs(split("They have finished ."), split("PRP VBP VBN .")) == std::vector<int>{2});
  CHECK(identify_verbs(split("They have a dog ."), split("PRP VBP DT NN .")) == std::vector<int>{1});
  CHECK(identify_verbs(split("He did not go ."), split("PRP VBD RB VB .")) == std::vector<int>{3});
  CHECK(identify_verbs(split("He did it ."), split("PRP VBD PRP .")) == std::vector<int>{1});
  CHECK(identify_verbs(split("She can swim ."), split("PRP MD VB .")) == std::vector<int>{2});
  // the auxiliary test stops at sentence-final punctuation
  CHECK(identify_verbs(split("They have . Done"), split("PRP VBP . VBN")) == std::vector<int>{1, 3});
  CHECK_THROWS_AS(identify_verbs(split("a b"), split("DT")), ValidationError);

  std::mt19937 rng(3);
  const std::vector<std::string> words{"is", "ran", "have", "do", "been", "cat", "the", "made", "."};
  const std::vector<std::string> tags{"VB", "VBD", "VBZ", "VBN", "VBP", "VBG", "NN", "DT", "."};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> t, p;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      t.push_back(words[rng() % words.size()]);
      p.push_back(tags[rng() % tags.size()]);
    }
    for (int i : identify_verbs(t, p)) {
      CHECK(p[static_cast<std::size_t>(i)].rfind("VB", 0) == 0);
      CHECK(t[static_cast<std::size_t>(i)] != "is");
      CHECK(t[static_cast<std::size_t>(i)] != "been");
    }
  }
}

TEST_CASE("validity aggregation") {
  CHECK(aggregate_validity(marks({true, true}), AggregationRule::all_of(2)));
  CHECK_FALSE(aggregate_validity(marks({true, false}), AggregationRule::all_of(2)));
  CHECK(aggregate_validity(marks({true, true, true}), AggregationRule::all_of(3)));
  CHECK_FALSE(aggregate_validity(marks({true, true, false}), AggregationRule::all_of(3)));
  CHECK(aggregate_validity(marks({true, true, false, true, true, true}), AggregationRule::k_of_n(5, 6)));
  CHECK_FALSE(aggregate_validity(marks({true, false, false, true, true, true}), AggregationRule::k_of_n(5, 6)));
  CHECK_THROWS_AS(aggregate_validity({}, AggregationRule::all_of(2)), ValidationError);
  CHECK_THROWS_AS(aggregate_validity(marks({true}), AggregationRule::all_of(2)), ValidationError);
  CHECK_THROWS_AS(aggregate_validity(marks({true, true}), AggregationRule::k_of_n(3, 2)), ValidationError);

  // all-of-n is non-increasing in n
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Judgment> js;
    for (int i = 0; i < 6; ++i) js.push_back(marks({rng() % 4 != 0})[0]);
    for (int n = 1; n < 6; ++n)
      if (!aggregate_validity(js, AggregationRule::all_of(n))) CHECK_FALSE(aggregate_validity(js, AggregationRule::all_of(n + 1)));
  }

  QAPair qa;
  qa.judgments = marks({true});
  CHECK(qa_is_valid(qa));
  qa.judgments = marks({true, true, false});
  CHECK_FALSE(qa_is_valid(qa));
  CHECK(qa_is_valid(qa, AggregationRule::k_of_n(1, 2)));
}

TEST_CASE("corpus statistics") {
  const auto corpus = load_corpus(kFixture);
  const auto stats = corpus_stats(corpus);
  CHECK(stats.total == CountStats{3, 3, 6, 4});
  CHECK(stats.by_domain.at(Domain::wikipedia) == CountStats{1, 1, 3, 2});
  CHECK(stats.by_domain.at(Domain::wikinews) == CountStats{1, 2, 3, 2});
  CHECK(stats.by_domain.at(Domain::science) == CountStats{1, 0, 0, 0});
  CHECK(stats.questions_per_verb() == doctest::Approx(2.0));
  CHECK(stats.valid_questions_per_verb() == doctest::Approx(4.0 / 3));
  CHECK(stats.valid_questions_per_sentence() == doctest::Approx(4.0 / 3));
  // a lenient rule counts more questions as valid
  CHECK(corpus_stats(corpus, AggregationRule::k_of_n(1, 2)).total.valid_questions == 5);

  const auto empty = corpus_stats({});
  CHECK(empty.total == CountStats{});
  CHECK(empty.questions_per_verb() == 0);
  CHECK(empty.valid_questions_per_sentence() == 0);

  const auto json = to_json(stats);
  CHECK(json.at("sentences") == 3);
  CHECK(json.at("byDomain").at("wikinews").at("verbs") == 2);

  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto s = corpus_stats(synthetic_corpus(20, seed));
    CountStats sum;
    for (const auto& [d, c] : s.by_domain) sum += c;
    CHECK(sum == s.total);
    CHECK(s.total.sentences == 20);
  }
}

TEST_CASE("rough tagger feeds identify_verbs") {
  const auto t = rough_tag("the chef cooked a meal .");
  REQUIRE(t.tokens.size() == t.pos_tags.size());
  CHECK(t.tokens.size() == 6);
  CHECK(identify_verbs(t.tokens, t.pos_tags) == std::vector<int>{2});
}
