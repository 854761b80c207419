// qasrl/tests/unit/test_spandet.cc

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

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "qasrl/nn/gradcheck.h"
#include "qasrl/spandet.h"
#include "qasrl/synthetic.h"

using namespace qasrl;

namespace {

// Exhaustive search over all 3^n tag sequences allowed by the BIO rules.
std::vector<Tag> brute_force_decode(const Eigen::MatrixXd& probs) {
  const int n = static_cast<int>(probs.cols());
  int total = 1;
  for (int t = 0; t < n; ++t) total *= 3;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Tag> arg;
  for (int code = 0; code < total; ++code) {
    std::vector<int> seq(static_cast<std::size_t>(n));
    for (int t = 0, c = code; t < n; ++t, c /= 3) seq[static_cast<std::size_t>(t)] = c % 3;
    bool ok = true;
    double score = 0;
    for (int t = 0; t < n && ok; ++t) {
      const int s = seq[static_cast<std::size_t>(t)];
      if (s == 1 && (t == 0 || seq[static_cast<std::size_t>(t - 1)] == 2)) ok = false;
      score += std::log(probs(s, t));
    }
    if (ok && score > best) {
      best = score;
      arg.clear();
      for (int s : seq) arg.push_back(static_cast<Tag>(s));
    }
  }
  return arg;
}

Eigen::MatrixXd random_distributions(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Eigen::MatrixXd p(3, n);
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < 3; ++s) p(s, t) = u(rng);
    p.col(t) /= p.col(t).sum();
  }
  return p;
}

nn::EncoderConfig tiny_encoder() {
  nn::EncoderConfig c;
  c.embedding_dim = 6;
  c.indicator_dim = 3;
  c.hidden = 6;
  c.layers = 2;
  c.recurrent_dropout = 0.1;
  return c;
}

ModelConfig tiny_model(std::uint64_t seed = 1) {
  ModelConfig c;
  c.encoder = tiny_encoder();
  c.mlp_hidden = 5;
  c.seed = seed;
  return c;
}

VerbInstance instance(std::vector<std::string> tokens, int verb, std::vector<std::vector<AnswerSpan>> answers) {
  VerbInstance v;
  v.sentence_id = "s";
  v.tokens = std::move(tokens);
  v.verb_index = verb;
  for (auto& a : answers) v.gold.push_back({QuestionSlots{}, std::move(a)});
  return v;
}

template <class P>
void zero_prefix(nn::ParameterSet<P>& ps, const std::string& prefix) {
  for (auto& [name, p] : ps)
    if (name.rfind(prefix, 0) == 0) p.value.setZero();
}

}  // namespace

TEST_CASE("viterbi matches exhaustive search") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 8;
    const auto p = random_distributions(rng, n);
    const auto decoded = viterbi_decode(p);
    REQUIRE(decoded.tags == brute_force_decode(p));
    for (int t = 0; t < n; ++t)
      CHECK(decoded.log_probs[static_cast<std::size_t>(t)] ==
            doctest::Approx(std::log(p(static_cast<int>(decoded.tags[static_cast<std::size_t>(t)]), t))));
  }
}

TEST_CASE("viterbi fixtures") {
  Eigen::MatrixXd o(3, 4);
  o.setConstant(0.1);
  o.row(2).setConstant(0.8);
  for (Tag t : viterbi_decode(o).tags) CHECK(t == Tag::O);

  // I dominant at position 0: B or O, whichever scores higher
  Eigen::MatrixXd p(3, 2);
  p << 0.3, 0.1, 0.6, 0.1, 0.1, 0.8;
  auto tags = viterbi_decode(p).tags;
  CHECK(tags[0] == Tag::B);
  p << 0.1, 0.1, 0.6, 0.1, 0.3, 0.8;
  tags = viterbi_decode(p).tags;
  CHECK(tags[0] == Tag::O);

  // exact ties prefer O, then B
  Eigen::MatrixXd tie(3, 1);
  tie << 0.4, 0.2, 0.4;
  CHECK(viterbi_decode(tie).tags[0] == Tag::O);
  tie << 0.45, 0.1, 0.45;
  CHECK(viterbi_decode(tie).tags[0] == Tag::O);
  Eigen::MatrixXd tie2(3, 1);
  tie2 << 0.5, 0.5, 0.0;
  CHECK(viterbi_decode(tie2).tags[0] == Tag::B);

  CHECK(viterbi_decode(Eigen::MatrixXd(3, 0)).tags.empty());
  CHECK_THROWS_AS(viterbi_decode(Eigen::MatrixXd(2, 3)), ValidationError);
}

TEST_CASE("decoded sequences respect the BIO rules") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tags = viterbi_decode(random_distributions(rng, 12)).tags;
    CHECK(tags[0] != Tag::I);
    for (std::size_t t = 1; t < tags.size(); ++t)
      if (tags[t] == Tag::I) CHECK(tags[t - 1] != Tag::O);
  }
}

TEST_CASE("tags and spans") {
  using enum Tag;
  CHECK(tags_to_spans({B, I, I, O, B}) == std::vector<AnswerSpan>{{0, 2}, {4, 4}});
  CHECK(tags_to_spans({O, O, O}).empty());
  CHECK(tags_to_spans({B, B, I}) == std::vector<AnswerSpan>{{0, 0}, {1, 2}});
  CHECK(tags_to_spans({O, I, I}) == std::vector<AnswerSpan>{{1, 2}});
  CHECK(spans_to_tags({{0, 2}, {4, 4}}, 5) == std::vector<Tag>{B, I, I, O, B});
  CHECK_THROWS_AS(spans_to_tags({{0, 2}, {2, 3}}, 5), ValidationError);
  CHECK_THROWS_AS(spans_to_tags({{3, 5}}, 5), ValidationError);
  CHECK(std::string{tag_char(B), tag_char(I), tag_char(O)} == "BIO");

  std::mt19937 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<AnswerSpan> spans;
    for (int t = 0; t < n;) {
      const int len = 1 + static_cast<int>(rng() % 3);
      if (rng() % 2 && t + len <= n) spans.push_back({t, t + len - 1});
      t += len;
    }
    REQUIRE(tags_to_spans(spans_to_tags(spans, n)) == spans);
  }
}

TEST_CASE("canonical projection") {
  const auto kept = canonical_projection({{3, 4}, {0, 1}, {0, 2}, {2, 5}, {6, 6}});
  CHECK(kept == std::vector<AnswerSpan>{{0, 2}, {3, 4}, {6, 6}});
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j) CHECK_FALSE(kept[i].overlaps(kept[j]));
}

TEST_CASE("span selection") {
  const std::vector<ScoredSpan> scored{{{0, 0}, 0.9}, {{1, 2}, 0.6}, {{3, 3}, 0.4}};
  CHECK(select_spans(scored, 0.5) == std::vector<AnswerSpan>{{0, 0}, {1, 2}});
  CHECK(select_spans(scored, 1.0).empty());
  CHECK(select_spans(scored, 0.0).size() == 3);
  CHECK(all_spans(4).size() == 10);
  CHECK(all_spans(4)[4] == AnswerSpan{1, 1});

  std::mt19937 rng(2);
  std::vector<ScoredSpan> random;
  for (const auto& s : all_spans(6)) random.push_back({s, std::uniform_real_distribution<double>(0, 1)(rng)});
  for (double lo = 0; lo <= 1.0; lo += 0.05)
    for (double hi = lo; hi <= 1.0; hi += 0.05) {
      const auto a = select_spans(random, lo), b = select_spans(random, hi);
      CHECK(std::includes(a.begin(), a.end(), b.begin(), b.end()));
    }
}

TEST_CASE("threshold tuning") {
  const std::vector<std::vector<ScoredSpan>> scored{{{{0, 0}, 0.7}, {{1, 1}, 0.4}, {{2, 3}, 0.35}, {{4, 4}, 0.2}}};
  const std::vector<GoldVerb> gold{{{QuestionSlots{}, {{0, 0}}}, {QuestionSlots{}, {{2, 3}}}}};
  const auto r = tune_threshold(scored, gold, Matcher::exact());
  CHECK(r.tau == doctest::Approx(0.2));
  CHECK(r.prf.f1 == doctest::Approx(0.8));

  // never worse than any grid point
  std::mt19937 rng(6);
  std::vector<std::vector<ScoredSpan>> many;
  std::vector<GoldVerb> golds;
  for (int v = 0; v < 8; ++v) {
    std::vector<ScoredSpan> s;
    for (const auto& sp : all_spans(5)) s.push_back({sp, std::uniform_real_distribution<double>(0, 1)(rng)});
    many.push_back(s);
    golds.push_back({{QuestionSlots{}, {{0, static_cast<int>(rng() % 3)}}}, {QuestionSlots{}, {{4, 4}}}});
  }
  const auto best = tune_threshold(many, golds, Matcher::iou());
  for (int k = 0; k <= 100; ++k) {
    std::vector<std::vector<AnswerSpan>> pred;
    for (const auto& s : many) pred.push_back(select_spans(s, k * 0.01));
    CHECK(evaluate_spans(pred, golds, Matcher::iou()).prf().f1 <= best.prf.f1 + 1e-12);
  }
  CHECK_THROWS_AS(tune_threshold({}, {}, Matcher::exact()), ValidationError);
}

TEST_CASE("verb instances from a corpus") {
  const Corpus corpus = synthetic_corpus(4, 3);
  const auto inst = verb_instances(corpus);
  REQUIRE(inst.size() == 4);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    CHECK(inst[i].sentence_id == corpus[i].sentence_id);
    CHECK(inst[i].gold.size() == corpus[i].verb_entries[0].qa_pairs.size());
    CHECK(inst[i].gold_spans().size() == inst[i].gold.size());
  }
}

TEST_CASE("bio head distributions") {
  const auto vocab = nn::Vocabulary::build({{"the", "cat", "sat", "down"}});
  BioModel<double> model(vocab, tiny_model());
  const auto p = model.tag_probabilities({"the", "cat", "sat", "down", "now"}, 2);
  REQUIRE(p.rows() == 3);
  REQUIRE(p.cols() == 5);
  for (int t = 0; t < 5; ++t) CHECK(p.col(t).sum() == doctest::Approx(1.0).epsilon(1e-9));

  zero_prefix(model.params, "bio.");
  const auto u = model.tag_probabilities({"the", "cat"}, 1);
  for (int t = 0; t < 2; ++t)
    for (int s = 0; s < 3; ++s) CHECK(u(s, t) == doctest::Approx(1.0 / 3.0));

  Eigen::MatrixXd z(3, 2);
  z << 2, 0, 0, 2, 0, 0;
  const Eigen::MatrixXd sm = nn::softmax_cols(z);
  const double e2 = std::exp(2.0);
  CHECK(sm(0, 0) == doctest::Approx(e2 / (e2 + 2)));
  CHECK(sm(1, 0) == doctest::Approx(1 / (e2 + 2)));
  CHECK(sm(1, 1) == doctest::Approx(e2 / (e2 + 2)));
}

TEST_CASE("span scorer shapes and zero head") {
  const auto vocab = nn::Vocabulary::build({{"a", "b", "c", "d"}});
  SpanModel<double> model(vocab, tiny_model());
  const auto scored = model.span_probabilities({"a", "b", "c", "d"}, 1);
  CHECK(scored.size() == 10);
  for (const auto& s : scored) CHECK(std::isfinite(s.probability));
  zero_prefix(model.params, "span.");
  for (const auto& s : model.span_probabilities({"a", "b", "c", "d"}, 1)) CHECK(s.probability == 0.5);
}

TEST_CASE("span detection heads pass gradient checks") {
  const auto vocab = nn::Vocabulary::build({{"w0", "w1", "w2", "w3", "w4", "w5"}});
  std::mt19937 rng(12);
  int checked_bio = 0, checked_span = 0;
  for (int trial = 0; trial < 12 && (checked_bio < 3 || checked_span < 3); ++trial) {
    const int n = 3 + trial % 3;
    std::vector<std::string> tokens;
    for (int t = 0; t < n; ++t) tokens.push_back("w" + std::to_string(rng() % 7));
    const auto ex = instance(tokens, static_cast<int>(rng() % n), {{{0, 1}}, {{n - 1, n - 1}, {1, 2}}});

    // instances with a relu input within reach of the finite-difference
    // step are skipped: the loss is not differentiable there
    BioModel<double> bio(vocab, tiny_model(10 + trial));
    auto r = nn::gradient_check(bio.params, [&](nn::Tape<double>& t) { return bio.loss(t, ex, nullptr); });
    if (!r.near_kink) {
      CHECK_MESSAGE(r.passed(1e-4), "bio " << r.worst_parameter << " " << r.max_relative_error);
      ++checked_bio;
    }
    SpanModel<double> span(vocab, tiny_model(20 + trial));
    r = nn::gradient_check(span.params, [&](nn::Tape<double>& t) { return span.loss(t, ex, nullptr); });
    if (!r.near_kink) {
      CHECK_MESSAGE(r.passed(1e-4), "span " << r.worst_parameter << " " << r.max_relative_error);
      ++checked_span;
    }
  }
  CHECK(checked_bio >= 3);
  CHECK(checked_span >= 3);
}

TEST_CASE("span scorer overfits one sentence") {
  const auto ex = instance({"the", "chef", "cooked", "a", "meal", "."}, 2, {{{3, 4}}});
  const auto vocab = nn::Vocabulary::build({ex.tokens});
  SpanModel<float> model(vocab, tiny_model(5));
  nn::TrainConfig cfg;
  cfg.max_epochs = 400;
  cfg.batch_size = 1;
  const auto report = train_span(model, {ex}, {}, cfg);
  for (int e = 1; e < 10; ++e) CHECK(report.train_loss[static_cast<std::size_t>(e)] < report.train_loss[0]);
  for (const auto& s : model.span_probabilities(ex.tokens, ex.verb_index)) {
    if (s.span == AnswerSpan{3, 4})
      CHECK(s.probability > 0.99);
    else
      CHECK(s.probability < 0.01);
  }
}

TEST_CASE("bio model learns and checkpoints round trip") {
  const auto ex = instance({"the", "chef", "cooked", "a", "meal", "."}, 2, {{{0, 1}}, {{3, 4}}});
  const auto vocab = nn::Vocabulary::build({ex.tokens});
  BioModel<float> model(vocab, tiny_model(2));
  nn::TrainConfig cfg;
  cfg.max_epochs = 150;
  cfg.batch_size = 1;
  train_bio(model, {ex}, {}, cfg);
  CHECK(model.predict(ex.tokens, ex.verb_index) == std::vector<AnswerSpan>{{0, 1}, {3, 4}});

  const auto back = BioModel<float>::from_checkpoint(model.to_checkpoint());
  auto copy = back;
  CHECK(copy.tag_probabilities(ex.tokens, 2).isApprox(model.tag_probabilities(ex.tokens, 2)));
  CHECK_THROWS_AS(SpanModel<float>::from_checkpoint(model.to_checkpoint()), ValidationError);

  auto ck = model.to_checkpoint();
  ck.params.get("bio.tag.W").value.resize(1, 1);
  CHECK_THROWS_AS(BioModel<float>::from_checkpoint(ck), ValidationError);
}

TEST_CASE("training is deterministic under a fixed seed") {
  const auto corpus = synthetic_corpus(3, 1);
  const auto data = verb_instances(corpus);
  std::vector<std::vector<std::string>> sents;
  for (const auto& r : corpus) sents.push_back(r.tokens);
  const auto vocab = nn::Vocabulary::build(sents);
  nn::TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.batch_size = 2;
  SpanModel<float> a(vocab, tiny_model(3)), b(vocab, tiny_model(3));
  const auto ra = train_span(a, data, data, cfg);
  const auto rb = train_span(b, data, data, cfg);
  CHECK(ra.train_loss == rb.train_loss);
  CHECK(ra.dev_score == rb.dev_score);
}
