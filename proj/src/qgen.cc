// qasrl/src/qgen.cc

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

#include "qasrl/qgen.h"

#include <cmath>

namespace qasrl {

using nn::Matrix;
using nn::Tape;
using nn::Var;

nn::Json QgenConfig::to_json() const {
  return nn::Json{{"encoder", encoder.to_json()},    {"mlpHidden", mlp_hidden},
                  {"decoderLayers", decoder_layers}, {"decoderHidden", decoder_hidden},
                  {"slotEmbedding", slot_embedding}, {"prepositions", prepositions},
                  {"seed", seed}};
}

QgenConfig QgenConfig::from_json(const nn::Json& j) {
  QgenConfig c;
  c.encoder = nn::EncoderConfig::from_json(j.at("encoder"));
  c.mlp_hidden = j.at("mlpHidden").get<int>();
  c.decoder_layers = j.at("decoderLayers").get<int>();
  c.decoder_hidden = j.at("decoderHidden").get<int>();
  c.slot_embedding = j.at("slotEmbedding").get<int>();
  c.prepositions = j.at("prepositions").get<std::vector<std::string>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

SlotCodes SlotDistributions::argmax() const {
  SlotCodes c{};
  for (int k = 0; k < kNumSlots; ++k) {
    Eigen::Index i = 0;
    probs[static_cast<std::size_t>(k)].maxCoeff(&i);
    c[static_cast<std::size_t>(k)] = static_cast<int>(i);
  }
  return c;
}

std::vector<QgenInstance> qgen_instances(const std::vector<VerbInstance>& verbs, const Grammar& grammar) {
  std::vector<QgenInstance> out;
  for (const auto& v : verbs) {
    QgenInstance inst;
    inst.tokens = v.tokens;
    inst.verb_index = v.verb_index;
    for (const auto& q : v.gold) {
      const SlotCodes codes = grammar.encode(q.slots);
      for (const auto& s : q.spans) {
        inst.spans.push_back(s);
        inst.targets.push_back(codes);
      }
    }
    if (!inst.spans.empty()) out.push_back(std::move(inst));
  }
  return out;
}

namespace {

std::string slot_key(int k) { return "slot" + std::to_string(k); }

template <class T>
std::vector<SlotDistributions> to_distributions(const std::array<Matrix<T>, kNumSlots>& logits) {
  const auto n = logits[0].cols();
  std::vector<SlotDistributions> out(static_cast<std::size_t>(n));
  for (int k = 0; k < kNumSlots; ++k) {
    const Eigen::MatrixXd p = nn::softmax_cols(Matrix<T>(logits[static_cast<std::size_t>(k)])).template cast<double>();
    for (Eigen::Index j = 0; j < n; ++j) out[static_cast<std::size_t>(j)].probs[static_cast<std::size_t>(k)] = p.col(j);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Base

template <class T>
QuestionGenerator<T>::QuestionGenerator(nn::Vocabulary v, QgenConfig cfg)
    : vocab(std::move(v)), config(std::move(cfg)), grammar_(config.prepositions) {
  nn::Rng rng(config.seed);
  nn::init_encoder(params, config.encoder, vocab.size(), rng);
}

template <class T>
std::array<int, kNumSlots> QuestionGenerator<T>::slot_sizes() const {
  std::array<int, kNumSlots> out{};
  for (int k = 0; k < kNumSlots; ++k) out[static_cast<std::size_t>(k)] = grammar_.vocabulary_size(static_cast<Slot>(k));
  return out;
}

template <class T>
Var QuestionGenerator<T>::span_repr(Tape<T>& tape, const std::vector<std::string>& tokens, int verb_index,
                                    const std::vector<AnswerSpan>& spans, nn::Rng* dropout) {
  const auto ids = vocab.ids(tokens);
  const Var h = nn::encode(tape, params, config.encoder, ids, verb_index, dropout);
  std::vector<int> starts, ends;
  for (const auto& s : spans) {
    if (s.start < 0 || s.end < s.start || s.end >= static_cast<int>(tokens.size()))
      throw ValidationError("span out of range for question generation");
    starts.push_back(s.start);
    ends.push_back(s.end);
  }
  return tape.concat_rows(std::vector<Var>{tape.gather_cols(h, starts), tape.gather_cols(h, ends)});
}

template <class T>
nn::Checkpoint QuestionGenerator<T>::to_checkpoint() const {
  nn::Checkpoint ck;
  ck.kind = kind();
  ck.hyperparameters = config.to_json();
  ck.vocabulary = vocab.to_json();
  ck.params = params.template cast<float>();
  return ck;
}

// ---------------------------------------------------------------------------
// Local model

template <class T>
LocalQuestionModel<T>::LocalQuestionModel(nn::Vocabulary v, QgenConfig cfg)
    : QuestionGenerator<T>(std::move(v), std::move(cfg)) {
  nn::Rng rng(this->config.seed + 1);
  std::vector<std::pair<std::string, int>> outputs;
  const auto sizes = this->slot_sizes();
  for (int k = 0; k < kNumSlots; ++k) outputs.emplace_back(slot_key(k), sizes[static_cast<std::size_t>(k)]);
  nn::init_mlp<T>(this->params, "local.", 2 * this->config.encoder.hidden, this->config.mlp_hidden, outputs, rng);
}

template <class T>
Var LocalQuestionModel<T>::loss(Tape<T>& tape, const QgenInstance& ex, nn::Rng* dropout) {
  const Var repr = this->span_repr(tape, ex.tokens, ex.verb_index, ex.spans, dropout);
  const Var hidden = nn::mlp_hidden(tape, this->params, "local.", repr);
  std::vector<Var> losses;
  for (int k = 0; k < kNumSlots; ++k) {
    std::vector<int> t;
    for (const auto& c : ex.targets) t.push_back(c[static_cast<std::size_t>(k)]);
    losses.push_back(tape.softmax_xent(nn::mlp_output(tape, this->params, "local.", slot_key(k), hidden), t));
  }
  return tape.sum(tape.concat_rows(losses));
}

template <class T>
std::vector<SlotDistributions> LocalQuestionModel<T>::distributions(const std::vector<std::string>& tokens,
                                                                    int verb_index,
                                                                    const std::vector<AnswerSpan>& spans) {
  if (spans.empty()) return {};
  Tape<T> tape;
  const Var repr = this->span_repr(tape, tokens, verb_index, spans, nullptr);
  // one column at a time, so a span's question does not depend on which
  // other spans share the call
  std::vector<SlotDistributions> out;
  for (int j = 0; j < static_cast<int>(spans.size()); ++j) {
    const Var hidden = nn::mlp_hidden(tape, this->params, "local.", tape.col(repr, j));
    std::array<Matrix<T>, kNumSlots> logits;
    for (int k = 0; k < kNumSlots; ++k)
      logits[static_cast<std::size_t>(k)] = tape.value(nn::mlp_output(tape, this->params, "local.", slot_key(k), hidden));
    out.push_back(to_distributions<T>(logits)[0]);
  }
  return out;
}

template <class T>
std::vector<SlotCodes> LocalQuestionModel<T>::generate(const std::vector<std::string>& tokens, int verb_index,
                                                       const std::vector<AnswerSpan>& spans) {
  std::vector<SlotCodes> out;
  for (const auto& d : distributions(tokens, verb_index, spans)) out.push_back(d.argmax());
  return out;
}

// ---------------------------------------------------------------------------
// Sequential model

template <class T>
SequentialQuestionModel<T>::SequentialQuestionModel(nn::Vocabulary v, QgenConfig cfg)
    : QuestionGenerator<T>(std::move(v), std::move(cfg)) {
  nn::Rng rng(this->config.seed + 2);
  const auto& c = this->config;
  const auto sizes = this->slot_sizes();
  const int e = c.slot_embedding;
  this->params.add("seq.start", e, 1).value = nn::uniform<T>(e, 1, 0.1, rng);
  for (int k = 0; k + 1 < kNumSlots; ++k)
    this->params.add("seq.embed" + std::to_string(k), e, sizes[static_cast<std::size_t>(k)]).value =
        nn::uniform<T>(e, sizes[static_cast<std::size_t>(k)], 0.1, rng);
  for (int k = 0; k < kNumSlots; ++k)
    for (int l = 0; l < c.decoder_layers; ++l)
      nn::init_lstm_cell<T>(this->params, "seq." + slot_key(k) + ".layer" + std::to_string(l) + ".",
                            l == 0 ? 2 * c.encoder.hidden + e : c.decoder_hidden, c.decoder_hidden, rng);
  std::vector<std::pair<std::string, int>> outputs;
  for (int k = 0; k < kNumSlots; ++k) outputs.emplace_back(slot_key(k), sizes[static_cast<std::size_t>(k)]);
  nn::init_mlp<T>(this->params, "seq.mlp.", c.decoder_hidden, c.mlp_hidden, outputs, rng);
}

template <class T>
std::array<Var, kNumSlots> SequentialQuestionModel<T>::run(Tape<T>& tape, Var repr,
                                                           const std::vector<SlotCodes>* previous,
                                                           std::vector<SlotCodes>* decoded) {
  auto& ps = this->params;
  const auto& c = this->config;
  const int n = static_cast<int>(tape.value(repr).cols());
  std::vector<Var> h(static_cast<std::size_t>(c.decoder_layers)), cell(static_cast<std::size_t>(c.decoder_layers));
  for (int l = 0; l < c.decoder_layers; ++l) {
    h[static_cast<std::size_t>(l)] = tape.input(Matrix<T>::Zero(c.decoder_hidden, n));
    cell[static_cast<std::size_t>(l)] = tape.input(Matrix<T>::Zero(c.decoder_hidden, n));
  }
  if (decoded) decoded->assign(static_cast<std::size_t>(n), SlotCodes{});
  std::array<Var, kNumSlots> logits;
  Var prev = tape.broadcast_cols(tape.param(ps.get("seq.start")), n);
  for (int k = 0; k < kNumSlots; ++k) {
    Var x = tape.concat_rows(std::vector<Var>{repr, prev});
    for (int l = 0; l < c.decoder_layers; ++l) {
      auto [hn, cn] = nn::lstm_cell(tape, ps, "seq." + slot_key(k) + ".layer" + std::to_string(l) + ".", x,
                                    h[static_cast<std::size_t>(l)], cell[static_cast<std::size_t>(l)]);
      h[static_cast<std::size_t>(l)] = hn;
      cell[static_cast<std::size_t>(l)] = cn;
      x = hn;
    }
    const Var z = nn::mlp_output(tape, ps, "seq.mlp.", slot_key(k), nn::mlp_hidden(tape, ps, "seq.mlp.", x));
    logits[static_cast<std::size_t>(k)] = z;
    if (k + 1 == kNumSlots) break;
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      int v;
      if (previous) {
        v = (*previous)[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      } else {
        Eigen::Index arg = 0;
        tape.value(z).col(j).maxCoeff(&arg);
        v = static_cast<int>(arg);
      }
      ids[static_cast<std::size_t>(j)] = v;
      if (decoded) (*decoded)[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = v;
    }
    prev = tape.lookup(ps.get("seq.embed" + std::to_string(k)), ids);
  }
  if (decoded && !previous)
    for (int j = 0; j < n; ++j) {
      Eigen::Index arg = 0;
      tape.value(logits[kNumSlots - 1]).col(j).maxCoeff(&arg);
      (*decoded)[static_cast<std::size_t>(j)][kNumSlots - 1] = static_cast<int>(arg);
    }
  return logits;
}

template <class T>
Var SequentialQuestionModel<T>::loss(Tape<T>& tape, const QgenInstance& ex, nn::Rng* dropout) {
  const Var repr = this->span_repr(tape, ex.tokens, ex.verb_index, ex.spans, dropout);
  const auto logits = run(tape, repr, &ex.targets, nullptr);
  std::vector<Var> losses;
  for (int k = 0; k < kNumSlots; ++k) {
    std::vector<int> t;
    for (const auto& c : ex.targets) t.push_back(c[static_cast<std::size_t>(k)]);
    losses.push_back(tape.softmax_xent(logits[static_cast<std::size_t>(k)], t));
  }
  return tape.sum(tape.concat_rows(losses));
}

template <class T>
std::vector<SlotCodes> SequentialQuestionModel<T>::generate(const std::vector<std::string>& tokens, int verb_index,
                                                            const std::vector<AnswerSpan>& spans) {
  if (spans.empty()) return {};
  Tape<T> tape;
  const Var repr = this->span_repr(tape, tokens, verb_index, spans, nullptr);
  std::vector<SlotCodes> out;
  for (int j = 0; j < static_cast<int>(spans.size()); ++j) {
    std::vector<SlotCodes> decoded;
    run(tape, tape.col(repr, j), nullptr, &decoded);
    out.push_back(decoded[0]);
  }
  return out;
}

template <class T>
std::vector<SlotDistributions> SequentialQuestionModel<T>::forced_distributions(
    const std::vector<std::string>& tokens, int verb_index, const std::vector<AnswerSpan>& spans,
    const std::vector<SlotCodes>& targets) {
  if (spans.size() != targets.size()) throw ValidationError("one target per span required");
  if (spans.empty()) return {};
  Tape<T> tape;
  const auto logits = run(tape, this->span_repr(tape, tokens, verb_index, spans, nullptr), &targets, nullptr);
  std::array<Matrix<T>, kNumSlots> values;
  for (int k = 0; k < kNumSlots; ++k) values[static_cast<std::size_t>(k)] = tape.value(logits[static_cast<std::size_t>(k)]);
  return to_distributions<T>(values);
}

template class QuestionGenerator<float>;
template class QuestionGenerator<double>;
template class LocalQuestionModel<float>;
template class LocalQuestionModel<double>;
template class SequentialQuestionModel<float>;
template class SequentialQuestionModel<double>;

std::unique_ptr<QuestionGenerator<float>> load_question_model(const nn::Checkpoint& ck) {
  const auto vocab = nn::Vocabulary::from_json(ck.vocabulary);
  const auto cfg = QgenConfig::from_json(ck.hyperparameters);
  std::unique_ptr<QuestionGenerator<float>> model;
  if (ck.kind == LocalQuestionModel<float>::kKind)
    model = std::make_unique<LocalQuestionModel<float>>(vocab, cfg);
  else if (ck.kind == SequentialQuestionModel<float>::kKind)
    model = std::make_unique<SequentialQuestionModel<float>>(vocab, cfg);
  else
    throw ValidationError("expected a question-generation checkpoint, got " + ck.kind);
  if (model->params.size() != ck.params.size()) throw ValidationError("checkpoint does not match the model layout");
  for (auto& [name, p] : model->params) {
    const auto& q = ck.params.get(name);
    if (q.value.rows() != p.value.rows() || q.value.cols() != p.value.cols())
      throw ValidationError("checkpoint shape mismatch for " + name);
    p.value = q.value;
  }
  return model;
}

QuestionScores evaluate_questions(QuestionGenerator<float>& model, const std::vector<QgenInstance>& data) {
  QuestionScores s;
  const Grammar& g = model.grammar();
  for (const auto& ex : data) {
    const auto pred = model.generate(ex.tokens, ex.verb_index, ex.spans);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const auto a = question_accuracy(g.decode(pred[i]), g.decode(ex.targets[i]));
      ++s.questions;
      s.exact_match += a.exact;
      s.partial_match += a.partial;
      s.slot_accuracy += a.slot_accuracy;
    }
  }
  if (s.questions > 0) {
    s.exact_match /= static_cast<double>(s.questions);
    s.partial_match /= static_cast<double>(s.questions);
    s.slot_accuracy /= static_cast<double>(s.questions);
  }
  return s;
}

nn::Json to_json(const QuestionScores& s) {
  return nn::Json{{"questions", s.questions},
                  {"exactMatch", s.exact_match},
                  {"partialMatch", s.partial_match},
                  {"slotAccuracy", s.slot_accuracy}};
}

nn::TrainReport train_qgen(QuestionGenerator<float>& model, const std::vector<QgenInstance>& train,
                           const std::vector<QgenInstance>& dev, const nn::TrainConfig& cfg) {
  std::function<double()> dev_score;
  if (!dev.empty()) dev_score = [&] { return evaluate_questions(model, dev).exact_match; };
  return nn::train<float>(
      model.params, train.size(),
      [&](Tape<float>& tape, std::size_t k, nn::Rng& rng) { return model.loss(tape, train[k], &rng); }, cfg,
      dev_score);
}

}  // namespace qasrl
