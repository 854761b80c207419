// qasrl/expand.h

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

#ifndef QASRL_EXPAND_H_
#define QASRL_EXPAND_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qasrl/corpus.h"
#include "qasrl/parser.h"

namespace qasrl {

/// A machine-proposed question for an annotated verb.
struct CandidateQA {
  std::string sentence_id;
  int verb_index = 0;
  QuestionSlots slots;
  std::vector<AnswerSpan> spans;
  std::vector<double> span_probs;
  std::string model_id;
  int fold = -1;  // -1 when no jackknife fold applies
  bool operator==(const CandidateQA&) const = default;
};

/// Parser output above tau for every annotated verb of the corpus.
std::vector<CandidateQA> overgenerate(Parser& parser, const Corpus& corpus, double tau = 0.2,
                                      const std::string& model_id = "parser", int fold = -1);

/// Drops candidates with a span overlapping a valid answer of the same verb,
/// or whose slots equal any existing question of that verb.
std::vector<CandidateQA> filter_candidates(const std::vector<CandidateQA>& candidates, const Corpus& existing);

struct Fold {
  Corpus train;
  Corpus heldout;
};

/// Seeded sentence-level partition into k folds of near-equal size.
std::vector<Fold> jackknife_folds(const Corpus& corpus, int k = 5, std::uint64_t seed = 1);

struct ValidatedCandidate {
  CandidateQA candidate;
  std::vector<Judgment> judgments;  // validators only
};

struct MergeResult {
  Corpus corpus;
  std::vector<ValidatedCandidate> negatives;
  long merged = 0;
};

/// Appends candidates valid under all-of-3 as source=expansion pairs whose
/// first judgment is the proposing model. Existing pairs are untouched.
MergeResult merge_validated(const Corpus& corpus, const std::vector<ValidatedCandidate>& validated);

/// Removes non-generation questions that have two or more answer spans
/// overlapping the answers of one original question of the same verb.
Corpus paraphrase_filter(const Corpus& expanded, const Corpus& original);

Json to_json(const CandidateQA& c);
CandidateQA candidate_from_json(const Json& j);
Json to_json(const ValidatedCandidate& v);
ValidatedCandidate validated_candidate_from_json(const Json& j);

std::vector<CandidateQA> read_candidates(std::istream& in);
std::vector<ValidatedCandidate> read_validated(std::istream& in);
std::vector<CandidateQA> load_candidates(const std::filesystem::path& path);
std::vector<ValidatedCandidate> load_validated(const std::filesystem::path& path);

}  // namespace qasrl

#endif  // QASRL_EXPAND_H_
