// qasrl/metrics.h

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

#ifndef QASRL_METRICS_H_
#define QASRL_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include "qasrl/corpus.h"

namespace qasrl {

struct Matcher {
  enum class Kind { exact, iou };
  Kind kind = Kind::exact;
  double iou_threshold = 0.5;

  static Matcher exact() { return {}; }
  static Matcher iou(double threshold = 0.5);
  std::string name() const;
};

double span_iou(const AnswerSpan& a, const AnswerSpan& b);
/// Exact equality, or IOU >= threshold.
bool span_match(const AnswerSpan& a, const AnswerSpan& b, const Matcher& m);

struct PRF {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Counts that aggregate across verbs (micro-averaging).
struct MatchCounts {
  long predicted = 0;
  long predicted_correct = 0;
  long gold = 0;
  long matched = 0;

  MatchCounts& operator+=(const MatchCounts& o);
  /// No predictions: P = 1, R = 0, F = 0.
  PRF prf() const;
};

double f1_score(double precision, double recall);

/// Size of a maximum matching; adj[l] lists right vertices adjacent to l.
int maximum_bipartite_matching(const std::vector<std::vector<int>>& adj, int right_size);

struct GoldQuestion {
  QuestionSlots slots;
  std::vector<AnswerSpan> spans;
};
using GoldVerb = std::vector<GoldQuestion>;

/// Gold questions of one verb entry: valid questions (all-of-validators or
/// `rule`) with their pooled answer spans.
GoldVerb gold_questions(const VerbEntry& entry, std::optional<AggregationRule> rule = std::nullopt);

/// Precision counts predicted spans matching any gold answer; recall is a
/// maximum matching between predicted spans and gold questions.
MatchCounts span_detection_counts(const std::vector<AnswerSpan>& predicted, const GoldVerb& gold,
                                  const Matcher& m);
PRF span_detection_prf(const std::vector<AnswerSpan>& predicted, const GoldVerb& gold,
                       const Matcher& m);

struct QuestionAccuracy {
  bool exact = false;
  bool partial = false;      // wh, subj, obj and misc agree
  double slot_accuracy = 0;  // fraction of the 7 slots that agree
};
QuestionAccuracy question_accuracy(const QuestionSlots& predicted, const QuestionSlots& gold);

struct PredictedItem {
  QuestionSlots slots;
  AnswerSpan span;
};

/// An item is correct when some gold question has identical slots and an
/// answer span matching the item's span; recall by maximum matching.
MatchCounts joint_counts(const std::vector<PredictedItem>& predicted, const GoldVerb& gold,
                         const Matcher& m = Matcher::exact());
PRF joint_prf(const std::vector<PredictedItem>& predicted, const GoldVerb& gold,
              const Matcher& m = Matcher::exact());

/// Kappa with chance agreement p^2 + (1-p)^2 for a binary valid/invalid
/// label with positive rate p. Throws ValidationError when chance
/// agreement is 1.
double agreement_kappa(double valid_rate, double observed_agreement);

/// Fleiss' kappa from an items x categories matrix of rating counts; every
/// item must have the same number (>= 2) of ratings.
double fleiss_kappa(const std::vector<std::vector<int>>& counts);

/// Per question, the span sets given by each annotator. Returns the
/// fraction of all given spans that exactly match a span from a different
/// annotator of the same question.
double span_agreement_rate(const std::vector<std::vector<std::vector<AnswerSpan>>>& questions);

struct HumanEvalItem {
  double prob = 0;
  std::vector<AnswerSpan> spans;
  std::vector<Judgment> judgments;  // validators only
};

struct CurvePoint {
  double cutoff = 0;
  long questions = 0;
  double questions_per_verb = 0;
  double question_accuracy = 0;
  double span_accuracy = 0;
};

/// Accuracy of the top-ranked predictions at every distinct probability
/// cutoff. A question is correct when `rule` holds over its judgments; a
/// span is correct when its question is and some validator selected it.
std::vector<CurvePoint> human_eval_curves(std::vector<HumanEvalItem> items, long num_verbs,
                                          AggregationRule rule = AggregationRule::k_of_n(5, 6));

/// Last curve point with at most `questions_per_verb` questions per verb.
std::optional<CurvePoint> curve_at(const std::vector<CurvePoint>& curve, double questions_per_verb);
std::string curve_csv(const std::vector<CurvePoint>& curve);

Json to_json(const PRF& p);
Json to_json(const MatchCounts& c);

}  // namespace qasrl

#endif  // QASRL_METRICS_H_
