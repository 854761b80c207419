// qasrl/src/selfcheck.cc

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

#include "qasrl/selfcheck.h"

#include <algorithm>
#include <random>

#include "qasrl/qgen.h"
#include "qasrl/spandet.h"

namespace qasrl {

namespace {

nn::EncoderConfig micro_encoder(std::mt19937_64& rng) {
  nn::EncoderConfig c;
  c.embedding_dim = 3 + static_cast<int>(rng() % 3);
  c.indicator_dim = 2;
  c.hidden = 3 + static_cast<int>(rng() % 3);
  c.layers = 1 + static_cast<int>(rng() % 2);
  c.recurrent_dropout = 0.1;
  return c;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, int n) {
  std::vector<std::string> t;
  for (int i = 0; i < n; ++i) t.push_back("w" + std::to_string(rng() % 8));
  return t;
}

AnswerSpan random_span(std::mt19937_64& rng, int n) {
  const int a = static_cast<int>(rng() % static_cast<unsigned>(n));
  const int b = static_cast<int>(rng() % static_cast<unsigned>(n));
  return {std::min(a, b), std::max(a, b)};
}

nn::Vocabulary micro_vocab() {
  std::vector<std::string> words;
  for (int i = 0; i < 6; ++i) words.push_back("w" + std::to_string(i));
  return nn::Vocabulary::build({words});
}

VerbInstance span_instance(std::mt19937_64& rng) {
  VerbInstance v;
  const int n = 3 + static_cast<int>(rng() % 4);
  v.sentence_id = "micro";
  v.tokens = random_tokens(rng, n);
  v.verb_index = static_cast<int>(rng() % static_cast<unsigned>(n));
  // gold spans of distinct questions kept disjoint so BIO tags exist
  std::vector<AnswerSpan> used;
  const int questions = 1 + static_cast<int>(rng() % 3);
  for (int q = 0; q < questions; ++q) {
    const AnswerSpan s = random_span(rng, n);
    if (std::any_of(used.begin(), used.end(), [&](const AnswerSpan& u) { return u.overlaps(s); })) continue;
    used.push_back(s);
    v.gold.push_back({QuestionSlots{}, {s}});
  }
  return v;
}

QgenInstance qgen_instance(std::mt19937_64& rng, const Grammar& grammar) {
  QgenInstance ex;
  const int n = 3 + static_cast<int>(rng() % 4);
  ex.tokens = random_tokens(rng, n);
  ex.verb_index = static_cast<int>(rng() % static_cast<unsigned>(n));
  const int spans = 1 + static_cast<int>(rng() % 2);
  for (int s = 0; s < spans; ++s) {
    ex.spans.push_back(random_span(rng, n));
    ex.targets.push_back(random_question(grammar, rng));
  }
  return ex;
}

nn::GradCheckReport check_one(const std::string& head, std::mt19937_64& rng) {
  const std::uint64_t seed = rng();
  if (head == "encoder") {
    nn::ParameterSet<double> ps;
    nn::Rng init(seed);
    const auto cfg = micro_encoder(rng);
    init_encoder(ps, cfg, micro_vocab().size(), init);
    const auto tokens = random_tokens(rng, 3 + static_cast<int>(rng() % 4));
    const auto ids = micro_vocab().ids(tokens);
    const int verb = static_cast<int>(rng() % tokens.size());
    nn::Matrix<double> weights = nn::uniform<double>(cfg.hidden, static_cast<int>(tokens.size()), 1.0, init);
    return nn::gradient_check(ps, [&](nn::Tape<double>& t) {
      const nn::Var h = nn::encode(t, ps, cfg, ids, verb, nullptr);
      return t.sum(t.mul(h, t.input(weights)));
    });
  }
  if (head == "bio" || head == "span") {
    ModelConfig cfg;
    cfg.encoder = micro_encoder(rng);
    cfg.mlp_hidden = 4 + static_cast<int>(rng() % 3);
    cfg.seed = seed;
    const auto ex = span_instance(rng);
    if (head == "bio") {
      BioModel<double> m(micro_vocab(), cfg);
      return nn::gradient_check(m.params, [&](nn::Tape<double>& t) { return m.loss(t, ex, nullptr); });
    }
    SpanModel<double> m(micro_vocab(), cfg);
    return nn::gradient_check(m.params, [&](nn::Tape<double>& t) { return m.loss(t, ex, nullptr); });
  }
  QgenConfig cfg;
  cfg.encoder = micro_encoder(rng);
  cfg.mlp_hidden = 4 + static_cast<int>(rng() % 3);
  cfg.decoder_layers = 1 + static_cast<int>(rng() % 2);
  cfg.decoder_hidden = 4;
  cfg.slot_embedding = 3;
  cfg.prepositions = {"on", "for", "to"};
  cfg.seed = seed;
  const Grammar grammar(cfg.prepositions);
  const auto ex = qgen_instance(rng, grammar);
  if (head == "qgen-local") {
    LocalQuestionModel<double> m(micro_vocab(), cfg);
    return nn::gradient_check(m.params, [&](nn::Tape<double>& t) { return m.loss(t, ex, nullptr); });
  }
  SequentialQuestionModel<double> m(micro_vocab(), cfg);
  return nn::gradient_check(m.params, [&](nn::Tape<double>& t) { return m.loss(t, ex, nullptr); });
}

}  // namespace

const std::vector<std::string>& trainable_heads() {
  static const std::vector<std::string> heads{"encoder", "bio", "span", "qgen-local", "qgen-seq"};
  return heads;
}

std::vector<HeadGradCheck> gradient_check_heads(int instances, std::uint64_t seed, double tolerance,
                                                const std::vector<std::string>& heads) {
  if (instances < 1) throw ValidationError("need at least one instance per head");
  const auto& names = heads.empty() ? trainable_heads() : heads;
  std::vector<HeadGradCheck> out;
  for (const auto& head : names) {
    if (std::find(trainable_heads().begin(), trainable_heads().end(), head) == trainable_heads().end())
      throw ValidationError("unknown head '" + head + "'");
    HeadGradCheck h;
    h.head = head;
    std::mt19937_64 rng(seed * 1000003 + static_cast<std::uint64_t>(head.size()) * 7919 + static_cast<unsigned char>(head.back()));
    for (int attempt = 0; attempt < 4 * instances && h.checked < instances; ++attempt) {
      const auto r = check_one(head, rng);
      if (r.near_kink) {
        ++h.skipped_near_kink;
        continue;
      }
      ++h.checked;
      if (r.passed(tolerance)) ++h.passed;
      if (r.max_relative_error >= h.max_relative_error) {
        h.max_relative_error = r.max_relative_error;
        h.worst_parameter = r.worst_parameter;
      }
    }
    out.push_back(h);
  }
  return out;
}

Json to_json(const HeadGradCheck& h) {
  return {{"head", h.head},
          {"checked", h.checked},
          {"passed", h.passed},
          {"skippedNearKink", h.skipped_near_kink},
          {"maxRelativeError", h.max_relative_error},
          {"worstParameter", h.worst_parameter}};
}

}  // namespace qasrl
