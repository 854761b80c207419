// qasrl/tests/unit/test_qgen.cc

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

#include "doctest.h"
#include "qasrl/nn/gradcheck.h"
#include "qasrl/qgen.h"
#include "qasrl/synthetic.h"

using namespace qasrl;

namespace {

QgenConfig tiny_config(std::uint64_t seed = 1) {
  QgenConfig c;
  c.encoder.embedding_dim = 6;
  c.encoder.indicator_dim = 3;
  c.encoder.hidden = 6;
  c.encoder.layers = 1;
  c.mlp_hidden = 8;
  c.decoder_layers = 2;
  c.decoder_hidden = 6;
  c.slot_embedding = 4;
  c.prepositions = {"on", "for", "to", "with"};
  c.seed = seed;
  return c;
}

QuestionSlots make(Wh wh, std::string aux, Placeholder subj, VerbSlot verb, Placeholder obj, std::string prep = "",
                   Misc misc = Misc::none) {
  return {wh, std::move(aux), subj, verb, obj, std::move(prep), misc};
}

const VerbSlot kPast{AuxChain::none, VerbForm::past};
const VerbSlot kStem{AuxChain::none, VerbForm::stem};

QgenInstance toy_instance(const Grammar& g) {
  QgenInstance ex;
  ex.tokens = {"the", "chef", "blamed", "the", "cook", "for", "the", "fire", "."};
  ex.verb_index = 2;
  ex.spans = {{0, 1}, {3, 4}, {6, 7}};
  ex.targets = {g.encode(make(Wh::who, "", Placeholder::none, kPast, Placeholder::someone)),
                g.encode(make(Wh::who, "did", Placeholder::someone, kStem, Placeholder::none)),
                g.encode(make(Wh::what, "did", Placeholder::someone, kStem, Placeholder::someone, "for"))};
  return ex;
}

template <class P>
void zero_prefix(nn::ParameterSet<P>& ps, const std::string& prefix) {
  for (auto& [name, p] : ps)
    if (name.rfind(prefix, 0) == 0) p.value.setZero();
}

nn::Vocabulary vocab_of(const std::vector<QgenInstance>& data) {
  std::vector<std::vector<std::string>> sents;
  for (const auto& d : data) sents.push_back(d.tokens);
  return nn::Vocabulary::build(sents);
}

}  // namespace

TEST_CASE("slot vocabularies and config") {
  const auto cfg = tiny_config();
  LocalQuestionModel<double> m(nn::Vocabulary(), cfg);
  const auto sizes = m.slot_sizes();
  CHECK(sizes[0] == kNumWh);
  CHECK(sizes[3] == 13);
  CHECK(sizes[5] == 5);
  CHECK(sizes[6] == kNumMisc);
  const auto back = QgenConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.prepositions == cfg.prepositions);
}

TEST_CASE("local model distributions") {
  const auto cfg = tiny_config();
  const Grammar g(cfg.prepositions);
  const auto ex = toy_instance(g);
  LocalQuestionModel<double> m(vocab_of({ex}), cfg);
  const auto dists = m.distributions(ex.tokens, ex.verb_index, ex.spans);
  REQUIRE(dists.size() == 3);
  for (const auto& d : dists) {
    CHECK(d.probs.size() == kNumSlots);
    for (int k = 0; k < kNumSlots; ++k) CHECK(d.probs[static_cast<std::size_t>(k)].sum() == doctest::Approx(1.0));
  }
  // decomposability: generated question is the per-slot argmax
  const auto gen = m.generate(ex.tokens, ex.verb_index, ex.spans);
  for (std::size_t i = 0; i < gen.size(); ++i) CHECK(gen[i] == dists[i].argmax());

  zero_prefix(m.params, "local.");
  for (const auto& d : m.distributions(ex.tokens, ex.verb_index, ex.spans))
    for (const auto& p : d.probs) CHECK((p.array() - 1.0 / static_cast<double>(p.size())).abs().maxCoeff() < 1e-12);

  CHECK(m.generate(ex.tokens, ex.verb_index, {}).empty());
  CHECK_THROWS_AS(m.generate(ex.tokens, ex.verb_index, {{3, 20}}), ValidationError);
}

TEST_CASE("question models pass gradient checks") {
  const auto cfg = tiny_config();
  const Grammar g(cfg.prepositions);
  const auto base = toy_instance(g);
  std::mt19937 rng(5);
  int checked_local = 0, checked_seq = 0;
  for (int trial = 0; trial < 12 && (checked_local < 3 || checked_seq < 3); ++trial) {
    QgenInstance ex = base;
    ex.tokens.resize(static_cast<std::size_t>(5 + trial % 4));
    ex.spans = {{0, 1}, {3, 4}};
    ex.targets = {base.targets[rng() % 3], base.targets[rng() % 3]};
    ex.verb_index = 2;

    LocalQuestionModel<double> local(vocab_of({base}), tiny_config(30 + trial));
    auto r = nn::gradient_check(local.params, [&](nn::Tape<double>& t) { return local.loss(t, ex, nullptr); });
    if (!r.near_kink) {
      CHECK_MESSAGE(r.passed(1e-4), "local " << r.worst_parameter << " " << r.max_relative_error);
      ++checked_local;
    }
    SequentialQuestionModel<double> seq(vocab_of({base}), tiny_config(40 + trial));
    r = nn::gradient_check(seq.params, [&](nn::Tape<double>& t) { return seq.loss(t, ex, nullptr); });
    if (!r.near_kink) {
      CHECK_MESSAGE(r.passed(1e-4), "seq " << r.worst_parameter << " " << r.max_relative_error);
      ++checked_seq;
    }
  }
  CHECK(checked_local >= 3);
  CHECK(checked_seq >= 3);
}

TEST_CASE("local model overfits one span") {
  const auto cfg = tiny_config(2);
  const Grammar g(cfg.prepositions);
  auto ex = toy_instance(g);
  ex.spans.resize(1);
  ex.targets.resize(1);
  LocalQuestionModel<float> m(vocab_of({ex}), cfg);
  nn::TrainConfig tc;
  tc.max_epochs = 150;
  tc.batch_size = 1;
  train_qgen(m, {ex}, {}, tc);
  CHECK(m.generate(ex.tokens, ex.verb_index, ex.spans)[0] == ex.targets[0]);
}

TEST_CASE("sequential model memorizes a toy set") {
  const auto cfg = tiny_config(3);
  const Grammar g(cfg.prepositions);
  const auto base = toy_instance(g);
  std::vector<QgenInstance> data;
  for (int i = 0; i < 5; ++i) {
    QgenInstance ex;
    ex.tokens = base.tokens;
    ex.tokens[1] = i % 2 ? "chef" : "boss";
    ex.verb_index = 2;
    ex.spans = {base.spans[static_cast<std::size_t>(i % 3)]};
    ex.targets = {base.targets[static_cast<std::size_t>(i % 3)]};
    data.push_back(ex);
  }
  SequentialQuestionModel<float> m(vocab_of(data), cfg);
  nn::TrainConfig tc;
  tc.max_epochs = 200;
  tc.batch_size = 1;
  const auto report = train_qgen(m, data, {}, tc);
  CHECK(report.train_loss.back() < report.train_loss.front());
  const auto scores = evaluate_questions(m, data);
  CHECK(scores.questions == 5);
  CHECK(scores.exact_match == 1.0);
  CHECK(scores.slot_accuracy == 1.0);

  // teacher-forced likelihood of a memorized example
  const auto& ex = data[0];
  const auto forced = m.forced_distributions(ex.tokens, ex.verb_index, ex.spans, ex.targets);
  double nll = 0;
  for (int k = 0; k < kNumSlots; ++k)
    nll -= std::log(forced[0].probs[static_cast<std::size_t>(k)](ex.targets[0][static_cast<std::size_t>(k)]));
  CHECK(nll / kNumSlots < 0.01);
  CHECK_THROWS_AS(m.forced_distributions(ex.tokens, ex.verb_index, ex.spans, {}), ValidationError);

  // greedy decoding is deterministic
  CHECK(m.generate(ex.tokens, 2, base.spans) == m.generate(ex.tokens, 2, base.spans));

  // checkpoint round trip through the generic loader
  const auto loaded = load_question_model(m.to_checkpoint());
  CHECK(std::string(loaded->kind()) == SequentialQuestionModel<float>::kKind);
  CHECK(loaded->generate(ex.tokens, 2, base.spans) == m.generate(ex.tokens, 2, base.spans));
  CHECK(loaded->config.prepositions == cfg.prepositions);
}

TEST_CASE("training reproducibility, early stopping and errors") {
  const Grammar g;
  const auto corpus = synthetic_corpus(6, 2);
  const auto data = qgen_instances(verb_instances(corpus), g);
  REQUIRE(data.size() == 6);
  for (const auto& d : data) CHECK(d.spans.size() == d.targets.size());

  auto cfg = tiny_config(4);
  cfg.prepositions = default_prepositions();
  nn::TrainConfig tc;
  tc.max_epochs = 40;
  tc.patience = 2;
  tc.batch_size = 3;
  LocalQuestionModel<float> a(vocab_of(data), cfg), b(vocab_of(data), cfg);
  const auto ra = train_qgen(a, data, data, tc);
  const auto rb = train_qgen(b, data, data, tc);
  CHECK(ra.train_loss == rb.train_loss);
  CHECK(ra.epochs_run <= 40);
  CHECK(to_json(evaluate_questions(a, data)).contains("exactMatch"));

  CHECK_THROWS_AS(train_qgen(a, {}, {}, tc), ValidationError);
  auto ck = a.to_checkpoint();
  ck.kind = "span-bio";
  CHECK_THROWS_AS(load_question_model(ck), ValidationError);

  // prepositions outside the configured list cannot be encoded
  QuestionSlots q = make(Wh::what, "did", Placeholder::someone, kStem, Placeholder::someone, "about");
  CHECK_THROWS(Grammar({"on"}).encode(q));
}
