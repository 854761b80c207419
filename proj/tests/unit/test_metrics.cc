// qasrl/tests/unit/test_metrics.cc

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

#include <algorithm>
#include <random>

#include "doctest.h"
#include "qasrl/metrics.h"

using namespace qasrl;

namespace {

// Largest number of left vertices assignable to distinct right vertices,
// by trying every injective assignment.
int brute_force_matching(const std::vector<std::vector<int>>& adj, std::size_t l, std::vector<bool>& used) {
  if (l == adj.size()) return 0;
  int best = brute_force_matching(adj, l + 1, used);
  for (int r : adj[l]) {
    if (used[static_cast<std::size_t>(r)]) continue;
    used[static_cast<std::size_t>(r)] = true;
    best = std::max(best, 1 + brute_force_matching(adj, l + 1, used));
    used[static_cast<std::size_t>(r)] = false;
  }
  return best;
}

QuestionSlots question(Wh wh, std::string aux, Placeholder subj, VerbSlot verb, Placeholder obj = Placeholder::none,
                       std::string prep = "", Misc misc = Misc::none) {
  QuestionSlots q;
  q.wh = wh;
  q.aux = std::move(aux);
  q.subj = subj;
  q.verb = verb;
  q.obj = obj;
  q.prep = std::move(prep);
  q.misc = misc;
  return q;
}

AnswerSpan random_span(std::mt19937& rng, int n) {
  const int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
  const int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
  return {std::min(a, b), std::max(a, b)};
}

void check_prf_identity(const PRF& p) {
  CHECK(p.precision >= 0);
  CHECK(p.precision <= 1);
  CHECK(p.recall >= 0);
  CHECK(p.recall <= 1);
  CHECK(p.f1 == doctest::Approx(f1_score(p.precision, p.recall)));
}

Judgment judge(bool valid, std::vector<AnswerSpan> spans = {}) { return {"w", valid, std::move(spans)}; }

}  // namespace

TEST_CASE("span matching") {
  CHECK(span_iou({2, 5}, {2, 5}) == 1.0);
  CHECK(span_match({2, 5}, {2, 5}, Matcher::iou()));
  CHECK(span_iou({0, 3}, {2, 5}) == doctest::Approx(2.0 / 6.0));
  CHECK_FALSE(span_match({0, 3}, {2, 5}, Matcher::iou(0.5)));
  CHECK(span_iou({1, 4}, {2, 4}) == doctest::Approx(0.75));
  CHECK(span_match({1, 4}, {2, 4}, Matcher::iou(0.5)));
  CHECK_FALSE(span_match({1, 4}, {2, 4}, Matcher::exact()));
  CHECK(span_iou({0, 1}, {4, 5}) == 0.0);
  // inclusive threshold: (0,1) vs (0,3) is exactly 0.5
  CHECK(span_match({0, 1}, {0, 3}, Matcher::iou(0.5)));
  CHECK_THROWS_AS(Matcher::iou(0.0), ValidationError);
  CHECK_THROWS_AS(Matcher::iou(1.5), ValidationError);
  CHECK(Matcher::exact().name() == "exact");
  CHECK(Matcher::iou(0.5).name() == "iou@0.5");
}

TEST_CASE("span detection prf fixtures") {
  const VerbSlot past{AuxChain::none, VerbForm::past};
  GoldVerb gold{{question(Wh::who, "", Placeholder::none, past, Placeholder::someone), {{0, 1}}},
                {question(Wh::what, "did", Placeholder::someone, {}), {{3, 4}, {6, 6}}}};

  SUBCASE("one gold answer per question") {
    const PRF p = span_detection_prf({{0, 1}, {6, 6}}, gold, Matcher::exact());
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 1.0);
    CHECK(p.f1 == 1.0);
  }
  SUBCASE("one span matching both questions") {
    GoldVerb shared{{gold[0].slots, {{2, 3}}}, {gold[1].slots, {{2, 3}}}};
    const PRF p = span_detection_prf({{2, 3}}, shared, Matcher::exact());
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 0.5);
  }
  SUBCASE("no predictions") {
    const PRF p = span_detection_prf({}, gold, Matcher::exact());
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 0.0);
    CHECK(p.f1 == 0.0);
  }
  SUBCASE("iou credit") {
    const auto c = span_detection_counts({{0, 2}, {9, 9}}, gold, Matcher::iou());
    CHECK(c.predicted == 2);
    CHECK(c.predicted_correct == 1);
    CHECK(c.matched == 1);
    CHECK(c.gold == 2);
  }
  SUBCASE("predictions without gold") {
    const PRF p = span_detection_prf({{0, 0}}, {}, Matcher::exact());
    CHECK(p.precision == 0.0);
    CHECK(p.recall == 1.0);
  }
}

TEST_CASE("bipartite matching equals exhaustive assignment search") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int left = std::uniform_int_distribution<int>(0, 6)(rng);
    const int right = std::uniform_int_distribution<int>(0, 6)(rng);
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(left));
    for (auto& row : adj)
      for (int r = 0; r < right; ++r)
        if (std::bernoulli_distribution(0.35)(rng)) row.push_back(r);
    std::vector<bool> used(static_cast<std::size_t>(right), false);
    REQUIRE(maximum_bipartite_matching(adj, right) == brute_force_matching(adj, 0, used));
  }
}

TEST_CASE("span detection recall equals exhaustive search on random instances") {
  std::mt19937 rng(11);
  const VerbSlot past{AuxChain::none, VerbForm::past};
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 8;
    GoldVerb gold;
    const int nq = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int q = 0; q < nq; ++q) {
      GoldQuestion g{question(Wh::who, "", Placeholder::none, past), {}};
      const int ns = std::uniform_int_distribution<int>(1, 2)(rng);
      for (int s = 0; s < ns; ++s) g.spans.push_back(random_span(rng, n));
      gold.push_back(g);
    }
    std::vector<AnswerSpan> pred;
    const int np = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int p = 0; p < np; ++p) pred.push_back(random_span(rng, n));
    const Matcher m = trial % 2 ? Matcher::exact() : Matcher::iou();

    std::vector<std::vector<int>> adj(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
      for (std::size_t q = 0; q < gold.size(); ++q)
        for (const auto& s : gold[q].spans)
          if (span_match(pred[i], s, m)) {
            adj[i].push_back(static_cast<int>(q));
            break;
          }
    std::vector<bool> used(gold.size(), false);
    const auto c = span_detection_counts(pred, gold, m);
    REQUIRE(c.matched == brute_force_matching(adj, 0, used));
    check_prf_identity(c.prf());
  }
}

TEST_CASE("gold answers as predictions give perfect scores") {
  std::mt19937 rng(3);
  const VerbSlot past{AuxChain::none, VerbForm::past};
  for (int trial = 0; trial < 100; ++trial) {
    GoldVerb gold;
    std::vector<AnswerSpan> pred;
    const int nq = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int q = 0; q < nq; ++q) {
      // disjoint spans so that each question owns its answers
      GoldQuestion g{question(Wh::who, "", Placeholder::none, past), {{3 * q, 3 * q + 1}}};
      pred.push_back(g.spans[0]);
      gold.push_back(g);
    }
    const PRF p = span_detection_prf(pred, gold, Matcher::exact());
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 1.0);
  }
}

TEST_CASE("question accuracy") {
  const VerbSlot stem{AuxChain::none, VerbForm::stem};
  const VerbSlot pp{AuxChain::none, VerbForm::past_participle};
  const auto a = question(Wh::who, "did", Placeholder::someone, stem, Placeholder::something, "on");
  auto r = question_accuracy(a, a);
  CHECK(r.exact);
  CHECK(r.partial);
  CHECK(r.slot_accuracy == 1.0);

  auto b = a;
  b.aux = "does";
  r = question_accuracy(b, a);
  CHECK_FALSE(r.exact);
  CHECK(r.partial);
  CHECK(r.slot_accuracy == doctest::Approx(6.0 / 7.0));

  // a rephrasing of the same role is not an exact match
  const auto passive = question(Wh::who, "was", Placeholder::none, pp, Placeholder::none, "for", Misc::something);
  r = question_accuracy(passive, a);
  CHECK_FALSE(r.exact);
  CHECK_FALSE(r.partial);
}

TEST_CASE("joint metrics") {
  const VerbSlot past{AuxChain::none, VerbForm::past};
  const auto q1 = question(Wh::who, "", Placeholder::none, past, Placeholder::someone);
  const auto q2 = question(Wh::what, "", Placeholder::none, past, Placeholder::someone);
  GoldVerb gold{{q1, {{0, 0}}}, {q2, {{2, 3}}}};

  PRF p = joint_prf({{q1, {0, 0}}, {q2, {2, 3}}}, gold);
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);

  p = joint_prf({{q2, {0, 0}}}, gold);
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);

  std::mt19937 rng(5);
  const std::vector<QuestionSlots> pool{q1, q2};
  for (int trial = 0; trial < 300; ++trial) {
    GoldVerb g;
    for (int q = std::uniform_int_distribution<int>(0, 5)(rng); q > 0; --q)
      g.push_back({pool[rng() % 2], {random_span(rng, 5)}});
    std::vector<PredictedItem> pred;
    for (int k = std::uniform_int_distribution<int>(0, 5)(rng); k > 0; --k)
      pred.push_back({pool[rng() % 2], random_span(rng, 5)});
    std::vector<std::vector<int>> adj(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
      for (std::size_t q = 0; q < g.size(); ++q)
        if (g[q].slots == pred[i].slots && g[q].spans[0] == pred[i].span) adj[i].push_back(static_cast<int>(q));
    std::vector<bool> used(g.size(), false);
    REQUIRE(joint_counts(pred, g).matched == brute_force_matching(adj, 0, used));
  }
}

TEST_CASE("agreement kappa") {
  CHECK(std::abs(agreement_kappa(0.895, 0.909) - 0.51) <= 0.01);
  CHECK(std::abs(agreement_kappa(0.765, 0.837) - 0.55) <= 0.01);
  // chance level
  const double p = 0.7;
  CHECK(agreement_kappa(p, p * p + (1 - p) * (1 - p)) == doctest::Approx(0.0));
  CHECK(agreement_kappa(0.5, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(agreement_kappa(1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(agreement_kappa(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(agreement_kappa(-0.1, 0.5), ValidationError);
}

TEST_CASE("fleiss kappa") {
  // 10 items, 14 raters, 5 categories; published value 0.210
  const std::vector<std::vector<int>> table{{0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
                                            {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
                                            {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7}};
  CHECK(fleiss_kappa(table) == doctest::Approx(0.2099).epsilon(1e-3));

  // two categories: same as the rate-based formula
  std::mt19937 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<int>> counts;
    double valid = 0, agree = 0;
    const int raters = 3;
    for (int i = 0; i < 20; ++i) {
      const int v = std::uniform_int_distribution<int>(0, raters)(rng);
      counts.push_back({v, raters - v});
      valid += v;
      agree += (v * (v - 1.0) + (raters - v) * (raters - v - 1.0)) / (raters * (raters - 1.0));
    }
    const double p = valid / (20.0 * raters);
    if (p == 0.0 || p == 1.0) continue;
    CHECK(fleiss_kappa(counts) == doctest::Approx(agreement_kappa(p, agree / 20.0)));
  }

  CHECK_THROWS_AS(fleiss_kappa({}), ValidationError);
  CHECK_THROWS_AS(fleiss_kappa({{1, 1}, {2, 1}}), ValidationError);
  CHECK_THROWS_AS(fleiss_kappa({{2, 0}, {2, 0}}), ValidationError);
}

TEST_CASE("span agreement rate") {
  CHECK(span_agreement_rate({{{{0, 1}}, {{0, 1}}, {{0, 1}}}}) == 1.0);
  CHECK(span_agreement_rate({{{{0, 1}}, {{2, 3}}}}) == 0.0);
  // hand count: q1 has 2 of 4 spans matched, q2 has 3 of 4
  const std::vector<std::vector<std::vector<AnswerSpan>>> fixture{
      {{{0, 1}, {3, 4}}, {{0, 1}}, {{3, 5}}},
      {{{2, 2}}, {{2, 2}}, {{2, 2}, {6, 7}}},
  };
  CHECK(span_agreement_rate(fixture) == doctest::Approx(5.0 / 8.0));
  CHECK_THROWS_AS(span_agreement_rate({{{{0, 1}}}}), ValidationError);
}

TEST_CASE("human evaluation curves") {
  // valid items: 0 1 3 4 6 8 9; item 3's span was not selected by validators
  const std::vector<double> probs{0.9, 0.8, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  const std::vector<bool> valid{true, true, false, true, true, false, true, false, true, true};
  std::vector<HumanEvalItem> items;
  for (int i = 0; i < 10; ++i) {
    HumanEvalItem it;
    it.prob = probs[static_cast<std::size_t>(i)];
    it.spans = {{i, i}};
    const AnswerSpan chosen = i == 3 ? AnswerSpan{i, i + 1} : AnswerSpan{i, i};
    const int yes = valid[static_cast<std::size_t>(i)] ? 5 + (i % 2) : 4 - (i % 3);
    for (int k = 0; k < 6; ++k) it.judgments.push_back(k < yes ? judge(true, {chosen}) : judge(false));
    items.push_back(it);
  }
  std::shuffle(items.begin(), items.end(), std::mt19937(1));
  const auto curve = human_eval_curves(items, 5);

  const std::vector<double> cut{0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  const std::vector<long> n{1, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<int> q_ok{1, 2, 3, 4, 4, 5, 5, 6, 7};
  const std::vector<int> s_ok{1, 2, 2, 3, 3, 4, 4, 5, 6};
  REQUIRE(curve.size() == cut.size());
  for (std::size_t k = 0; k < cut.size(); ++k) {
    CHECK(curve[k].cutoff == cut[k]);
    CHECK(curve[k].questions == n[k]);
    CHECK(curve[k].questions_per_verb == doctest::Approx(n[k] / 5.0));
    CHECK(curve[k].question_accuracy == doctest::Approx(static_cast<double>(q_ok[k]) / n[k]));
    CHECK(curve[k].span_accuracy == doctest::Approx(static_cast<double>(s_ok[k]) / n[k]));
  }
  const auto at2 = curve_at(curve, 2.0);
  REQUIRE(at2.has_value());
  CHECK(at2->questions == 10);
  CHECK(curve_at(curve, 0.1) == std::nullopt);
  const auto at1 = curve_at(curve, 1.0);
  REQUIRE(at1.has_value());
  CHECK(at1->questions == 5);
  CHECK(curve_csv(curve).rfind("cutoff,questions,", 0) == 0);

  SUBCASE("all valid with matching spans") {
    std::vector<HumanEvalItem> good;
    for (int i = 0; i < 4; ++i) {
      HumanEvalItem it{1.0 - i * 0.1, {{i, i}}, {}};
      for (int k = 0; k < 6; ++k) it.judgments.push_back(judge(true, {{i, i}}));
      good.push_back(it);
    }
    for (const auto& p : human_eval_curves(good, 2)) {
      CHECK(p.question_accuracy == 1.0);
      CHECK(p.span_accuracy == 1.0);
    }
  }
  SUBCASE("insufficient judgments") {
    std::vector<HumanEvalItem> bad{{0.5, {{0, 0}}, {judge(true, {{0, 0}})}}};
    CHECK_THROWS_AS(human_eval_curves(bad, 1), ValidationError);
    CHECK_THROWS_AS(human_eval_curves({}, 0), ValidationError);
  }
}

TEST_CASE("prf conventions and json") {
  MatchCounts c;
  c.predicted = 4;
  c.predicted_correct = 3;
  c.gold = 6;
  c.matched = 2;
  const PRF p = c.prf();
  CHECK(p.precision == 0.75);
  CHECK(p.recall == doctest::Approx(1.0 / 3.0));
  check_prf_identity(p);
  MatchCounts d = c;
  d += c;
  CHECK(d.predicted == 8);
  CHECK(d.matched == 4);
  CHECK(to_json(c)["predictedCorrect"] == 3);
  CHECK(to_json(p)["precision"] == 0.75);
  CHECK(f1_score(0, 0) == 0.0);
}
