// qasrl/corpus.h

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

#ifndef QASRL_CORPUS_H_
#define QASRL_CORPUS_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qasrl/error.h"
#include "qasrl/slots.h"

namespace qasrl {

using Json = nlohmann::ordered_json;

enum class Domain : std::uint8_t { wikipedia, wikinews, science, other };
std::string_view to_string(Domain d);
Domain domain_from_string(std::string_view s);

/// Inclusive token interval [start, end].
struct AnswerSpan {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool overlaps(const AnswerSpan& o) const { return start <= o.end && o.start <= end; }
  auto operator<=>(const AnswerSpan&) const = default;
};

enum class QASource : std::uint8_t { generation, expansion, parser };
std::string_view to_string(QASource s);
QASource qa_source_from_string(std::string_view s);

struct Judgment {
  std::string worker_id;
  bool is_valid = false;
  std::vector<AnswerSpan> spans;  // empty iff !is_valid
  bool operator==(const Judgment&) const = default;
};

/// judgments[0] is the writer of the question (a crowd worker, or the parser
/// for expansion candidates); the remaining entries are validators.
struct QAPair {
  QuestionSlots slots;
  std::vector<Judgment> judgments;
  QASource source = QASource::generation;
  bool operator==(const QAPair&) const = default;
};

struct VerbEntry {
  int verb_index = 0;
  InflectionTable inflections;
  std::vector<QAPair> qa_pairs;
  bool operator==(const VerbEntry&) const = default;
};

struct SentenceRecord {
  std::string sentence_id;
  Domain domain = Domain::other;
  std::vector<std::string> tokens;
  std::vector<std::string> pos_tags;
  std::vector<VerbEntry> verb_entries;
  bool operator==(const SentenceRecord&) const = default;

  const VerbEntry* find_verb(int verb_index) const;
  VerbEntry* find_verb(int verb_index);
};

using Corpus = std::vector<SentenceRecord>;

/// k-of-n validity aggregation over the first `total` validator judgments.
struct AggregationRule {
  int required = 2;
  int total = 2;

  static AggregationRule all_of(int n) { return {n, n}; }
  static AggregationRule k_of_n(int k, int n) { return {k, n}; }
  bool operator==(const AggregationRule&) const = default;
};

/// Throws ValidationError when fewer than rule.total judgments are given.
bool aggregate_validity(std::span<const Judgment> judgments, AggregationRule rule);

/// Validity of a stored QA pair: the validators (judgments after the first)
/// are aggregated with `rule`, or all-of-them when no rule is given. A pair
/// without validators counts as valid.
bool qa_is_valid(const QAPair& qa, std::optional<AggregationRule> rule = std::nullopt);

/// Sorted, de-duplicated union of spans from every judgment marking it valid.
std::vector<AnswerSpan> answer_spans(const QAPair& qa);

/// Throws CorpusError naming the sentence when a record invariant is violated.
void validate_record(const SentenceRecord& record);

/// Spans as [[start, end], ...].
Json spans_to_json(const std::vector<AnswerSpan>& spans);
std::vector<AnswerSpan> spans_from_json(const Json& j);
Json to_json(const Judgment& j);
Judgment judgment_from_json(const Json& j);
Json to_json(const QuestionSlots& q);
QuestionSlots question_slots_from_json(const Json& j);
Json to_json(const InflectionTable& t);
InflectionTable inflection_table_from_json(const Json& j);
Json to_json(const SentenceRecord& r);
SentenceRecord sentence_record_from_json(const Json& j);

Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);
std::string serialize_record(const SentenceRecord& r);

struct CountStats {
  std::int64_t sentences = 0;
  std::int64_t verbs = 0;
  std::int64_t questions = 0;
  std::int64_t valid_questions = 0;

  CountStats& operator+=(const CountStats& o);
  bool operator==(const CountStats&) const = default;
};

struct CorpusStats {
  CountStats total;
  std::map<Domain, CountStats> by_domain;

  double questions_per_verb() const;
  double valid_questions_per_verb() const;
  double questions_per_sentence() const;
  double valid_questions_per_sentence() const;
};

CorpusStats corpus_stats(const Corpus& corpus,
                         std::optional<AggregationRule> rule = std::nullopt);
Json to_json(const CorpusStats& stats);

/// Predicate indices: VB* tags minus forms of "be" and auxiliary uses of
/// "have" / "do". Throws ValidationError on a length mismatch.
std::vector<int> identify_verbs(std::span<const std::string> tokens,
                                std::span<const std::string> pos_tags);

/// Whitespace tokenizer plus a tiny suffix/lexicon POS tagger. Low quality,
/// only intended for demos on raw text.
struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> pos_tags;
};
TaggedSentence rough_tag(std::string_view text);

}  // namespace qasrl

#endif  // QASRL_CORPUS_H_
