// qasrl/src/metrics.cc

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

#include "qasrl/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

namespace qasrl {

Matcher Matcher::iou(double threshold) {
  if (!(threshold > 0 && threshold <= 1)) throw ValidationError("IOU threshold must be in (0, 1]");
  return {Kind::iou, threshold};
}

std::string Matcher::name() const {
  if (kind == Kind::exact) return "exact";
  std::ostringstream out;
  out << "iou@" << iou_threshold;
  return out.str();
}

double span_iou(const AnswerSpan& a, const AnswerSpan& b) {
  const int inter = std::max(0, std::min(a.end, b.end) - std::max(a.start, b.start) + 1);
  const int uni = a.length() + b.length() - inter;
  return static_cast<double>(inter) / uni;
}

bool span_match(const AnswerSpan& a, const AnswerSpan& b, const Matcher& m) {
  if (m.kind == Matcher::Kind::exact) return a == b;
  return span_iou(a, b) >= m.iou_threshold;
}

double f1_score(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

MatchCounts& MatchCounts::operator+=(const MatchCounts& o) {
  predicted += o.predicted;
  predicted_correct += o.predicted_correct;
  gold += o.gold;
  matched += o.matched;
  return *this;
}

PRF MatchCounts::prf() const {
  PRF out;
  if (predicted == 0) {
    out.precision = 1.0;
    out.recall = 0.0;
    out.f1 = 0.0;
    return out;
  }
  out.precision = static_cast<double>(predicted_correct) / static_cast<double>(predicted);
  out.recall = gold > 0 ? static_cast<double>(matched) / static_cast<double>(gold) : 1.0;
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

int maximum_bipartite_matching(const std::vector<std::vector<int>>& adj, int right_size) {
  std::vector<int> match_right(static_cast<std::size_t>(right_size), -1);
  std::vector<char> seen;
  std::function<bool(int)> augment = [&](int l) {
    for (int r : adj[static_cast<std::size_t>(l)]) {
      if (seen[static_cast<std::size_t>(r)]) continue;
      seen[static_cast<std::size_t>(r)] = 1;
      if (match_right[static_cast<std::size_t>(r)] < 0 || augment(match_right[static_cast<std::size_t>(r)])) {
        match_right[static_cast<std::size_t>(r)] = l;
        return true;
      }
    }
    return false;
  };
  int size = 0;
  for (int l = 0; l < static_cast<int>(adj.size()); ++l) {
    seen.assign(static_cast<std::size_t>(right_size), 0);
    if (augment(l)) ++size;
  }
  return size;
}

GoldVerb gold_questions(const VerbEntry& entry, std::optional<AggregationRule> rule) {
  GoldVerb out;
  for (const auto& qa : entry.qa_pairs) {
    if (!qa_is_valid(qa, rule)) continue;
    auto spans = answer_spans(qa);
    if (spans.empty()) continue;
    out.push_back({qa.slots, std::move(spans)});
  }
  return out;
}

MatchCounts span_detection_counts(const std::vector<AnswerSpan>& predicted, const GoldVerb& gold,
                                  const Matcher& m) {
  MatchCounts c;
  c.predicted = static_cast<long>(predicted.size());
  c.gold = static_cast<long>(gold.size());
  std::vector<std::vector<int>> adj(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t q = 0; q < gold.size(); ++q) {
      const auto& spans = gold[q].spans;
      if (std::any_of(spans.begin(), spans.end(), [&](const auto& g) { return span_match(predicted[i], g, m); }))
        adj[i].push_back(static_cast<int>(q));
    }
    if (!adj[i].empty()) ++c.predicted_correct;
  }
  c.matched = maximum_bipartite_matching(adj, static_cast<int>(gold.size()));
  return c;
}

PRF span_detection_prf(const std::vector<AnswerSpan>& predicted, const GoldVerb& gold, const Matcher& m) {
  return span_detection_counts(predicted, gold, m).prf();
}

QuestionAccuracy question_accuracy(const QuestionSlots& p, const QuestionSlots& g) {
  const bool eq[kNumSlots] = {p.wh == g.wh,   p.aux == g.aux,   p.subj == g.subj, p.verb == g.verb,
                              p.obj == g.obj, p.prep == g.prep, p.misc == g.misc};
  QuestionAccuracy a;
  const int n = static_cast<int>(std::count(std::begin(eq), std::end(eq), true));
  a.exact = n == kNumSlots;
  a.partial = eq[0] && eq[2] && eq[4] && eq[6];
  a.slot_accuracy = static_cast<double>(n) / kNumSlots;
  return a;
}

MatchCounts joint_counts(const std::vector<PredictedItem>& predicted, const GoldVerb& gold, const Matcher& m) {
  MatchCounts c;
  c.predicted = static_cast<long>(predicted.size());
  c.gold = static_cast<long>(gold.size());
  std::vector<std::vector<int>> adj(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t q = 0; q < gold.size(); ++q) {
      if (gold[q].slots != predicted[i].slots) continue;
      const auto& spans = gold[q].spans;
      if (std::any_of(spans.begin(), spans.end(), [&](const auto& g) { return span_match(predicted[i].span, g, m); }))
        adj[i].push_back(static_cast<int>(q));
    }
    if (!adj[i].empty()) ++c.predicted_correct;
  }
  c.matched = maximum_bipartite_matching(adj, static_cast<int>(gold.size()));
  return c;
}

PRF joint_prf(const std::vector<PredictedItem>& predicted, const GoldVerb& gold, const Matcher& m) {
  return joint_counts(predicted, gold, m).prf();
}

double agreement_kappa(double p, double observed) {
  if (p < 0 || p > 1 || observed < 0 || observed > 1) throw ValidationError("rates must lie in [0, 1]");
  const double pe = p * p + (1 - p) * (1 - p);
  if (pe >= 1.0) throw ValidationError("kappa is undefined when chance agreement is 1");
  return (observed - pe) / (1 - pe);
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.empty()) throw ValidationError("fleiss kappa needs at least one item");
  const std::size_t k = counts[0].size();
  long n = -1;
  std::vector<double> category_total(k, 0.0);
  double mean_pi = 0;
  for (const auto& row : counts) {
    if (row.size() != k) throw ValidationError("ragged rating matrix");
    long r = 0;
    for (int c : row) {
      if (c < 0) throw ValidationError("negative rating count");
      r += c;
    }
    if (n < 0) n = r;
    if (r != n || n < 2) throw ValidationError("every item needs the same number (>= 2) of ratings");
    double agree = 0;
    for (std::size_t j = 0; j < k; ++j) {
      agree += static_cast<double>(row[j]) * (row[j] - 1);
      category_total[j] += row[j];
    }
    mean_pi += agree / (static_cast<double>(n) * (n - 1));
  }
  const double items = static_cast<double>(counts.size());
  mean_pi /= items;
  double pe = 0;
  for (double t : category_total) {
    const double pj = t / (items * static_cast<double>(n));
    pe += pj * pj;
  }
  if (pe >= 1.0) throw ValidationError("kappa is undefined when chance agreement is 1");
  return (mean_pi - pe) / (1 - pe);
}

double span_agreement_rate(const std::vector<std::vector<std::vector<AnswerSpan>>>& questions) {
  long total = 0;
  long hits = 0;
  for (const auto& annotators : questions) {
    if (annotators.size() < 2) throw ValidationError("span agreement needs at least 2 annotators");
    for (std::size_t a = 0; a < annotators.size(); ++a)
      for (const auto& s : annotators[a]) {
        ++total;
        bool hit = false;
        for (std::size_t b = 0; b < annotators.size() && !hit; ++b)
          if (b != a && std::find(annotators[b].begin(), annotators[b].end(), s) != annotators[b].end())
            hit = true;
        if (hit) ++hits;
      }
  }
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

std::vector<CurvePoint> human_eval_curves(std::vector<HumanEvalItem> items, long num_verbs,
                                          AggregationRule rule) {
  if (num_verbs <= 0) throw ValidationError("human evaluation needs a positive verb count");
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.prob > b.prob; });
  std::vector<CurvePoint> curve;
  long questions = 0, correct_q = 0, spans = 0, correct_s = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    const bool valid = aggregate_validity(it.judgments, rule);
    ++questions;
    if (valid) ++correct_q;
    std::set<AnswerSpan> selected;
    for (const auto& j : it.judgments)
      if (j.is_valid) selected.insert(j.spans.begin(), j.spans.end());
    for (const auto& s : it.spans) {
      ++spans;
      if (valid && selected.count(s)) ++correct_s;
    }
    if (i + 1 < items.size() && items[i + 1].prob == it.prob) continue;
    CurvePoint p;
    p.cutoff = it.prob;
    p.questions = questions;
    p.questions_per_verb = static_cast<double>(questions) / static_cast<double>(num_verbs);
    p.question_accuracy = static_cast<double>(correct_q) / static_cast<double>(questions);
    p.span_accuracy = spans > 0 ? static_cast<double>(correct_s) / static_cast<double>(spans) : 0.0;
    curve.push_back(p);
  }
  return curve;
}

std::optional<CurvePoint> curve_at(const std::vector<CurvePoint>& curve, double qpv) {
  std::optional<CurvePoint> out;
  for (const auto& p : curve)
    if (p.questions_per_verb <= qpv + 1e-12) out = p;
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "cutoff,questions,questions_per_verb,question_accuracy,span_accuracy\n";
  out << std::setprecision(6);
  for (const auto& p : curve)
    out << p.cutoff << ',' << p.questions << ',' << p.questions_per_verb << ',' << p.question_accuracy
        << ',' << p.span_accuracy << '\n';
  return out.str();
}

Json to_json(const PRF& p) {
  return Json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

Json to_json(const MatchCounts& c) {
  return Json{{"predicted", c.predicted},
              {"predictedCorrect", c.predicted_correct},
              {"gold", c.gold},
              {"matched", c.matched}};
}

}  // namespace qasrl
