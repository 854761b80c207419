// qasrl/src/spandet.cc

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

#include "qasrl/spandet.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace qasrl {

using nn::Matrix;
using nn::Tape;
using nn::Var;

char tag_char(Tag t) {
  switch (t) {
    case Tag::B: return 'B';
    case Tag::I: return 'I';
    case Tag::O: return 'O';
  }
  return '?';
}

TagSequence viterbi_decode(const Eigen::MatrixXd& probs) {
  if (probs.rows() != 3) throw ValidationError("tag distributions must have 3 rows");
  const int n = static_cast<int>(probs.cols());
  TagSequence out;
  if (n == 0) return out;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const auto lp = [&](int s, int t) { return std::log(std::max(probs(s, t), 1e-300)); };
  // preference order used to break ties
  constexpr int kOrder[3] = {2, 0, 1};  // O, B, I
  std::vector<std::array<double, 3>> score(static_cast<std::size_t>(n));
  std::vector<std::array<int, 3>> back(static_cast<std::size_t>(n));
  for (int s = 0; s < 3; ++s) score[0][s] = s == 1 ? neg_inf : lp(s, 0);
  for (int t = 1; t < n; ++t) {
    for (int s = 0; s < 3; ++s) {
      double best = neg_inf;
      int arg = -1;
      for (int p : kOrder) {
        if (s == 1 && p == 2) continue;  // O -> I
        if (score[t - 1][p] > best) {
          best = score[t - 1][p];
          arg = p;
        }
      }
      score[t][s] = arg < 0 ? neg_inf : best + lp(s, t);
      back[t][s] = arg;
    }
  }
  int state = -1;
  double best = neg_inf;
  for (int s : kOrder)
    if (state < 0 || score[n - 1][s] > best) {
      best = score[n - 1][s];
      state = s;
    }
  out.tags.resize(static_cast<std::size_t>(n));
  out.log_probs.resize(static_cast<std::size_t>(n));
  for (int t = n - 1; t >= 0; --t) {
    out.tags[static_cast<std::size_t>(t)] = static_cast<Tag>(state);
    out.log_probs[static_cast<std::size_t>(t)] = lp(state, t);
    if (t > 0) state = back[t][state];
  }
  return out;
}

std::vector<AnswerSpan> tags_to_spans(const std::vector<Tag>& tags) {
  std::vector<AnswerSpan> out;
  int start = -1;
  const int n = static_cast<int>(tags.size());
  for (int t = 0; t <= n; ++t) {
    const Tag tag = t < n ? tags[static_cast<std::size_t>(t)] : Tag::O;
    if (tag == Tag::I && start >= 0) continue;
    if (start >= 0) out.push_back({start, t - 1});
    start = -1;
    if (tag == Tag::B) start = t;
    if (tag == Tag::I) start = t;  // stray I opens a span, as B would
  }
  return out;
}

std::vector<Tag> spans_to_tags(const std::vector<AnswerSpan>& spans, int length) {
  std::vector<Tag> tags(static_cast<std::size_t>(length), Tag::O);
  std::vector<bool> used(static_cast<std::size_t>(length), false);
  for (const auto& s : spans) {
    if (s.start < 0 || s.end < s.start || s.end >= length)
      throw ValidationError("span out of range for tag conversion");
    for (int t = s.start; t <= s.end; ++t) {
      if (used[static_cast<std::size_t>(t)]) throw ValidationError("overlapping spans cannot be BIO-encoded");
      used[static_cast<std::size_t>(t)] = true;
      tags[static_cast<std::size_t>(t)] = t == s.start ? Tag::B : Tag::I;
    }
  }
  return tags;
}

std::vector<AnswerSpan> canonical_projection(std::vector<AnswerSpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const AnswerSpan& a, const AnswerSpan& b) {
    return a.start != b.start ? a.start < b.start : a.end > b.end;
  });
  std::vector<AnswerSpan> kept;
  for (const auto& s : spans)
    if (std::none_of(kept.begin(), kept.end(), [&](const auto& k) { return k.overlaps(s); })) kept.push_back(s);
  return kept;
}

std::vector<AnswerSpan> select_spans(const std::vector<ScoredSpan>& scored, double tau) {
  std::vector<AnswerSpan> out;
  for (const auto& s : scored)
    if (s.probability > tau) out.push_back(s.span);
  return out;
}

std::vector<AnswerSpan> all_spans(int n) {
  std::vector<AnswerSpan> out;
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.push_back({i, j});
  return out;
}

std::vector<AnswerSpan> VerbInstance::gold_spans() const {
  std::set<AnswerSpan> s;
  for (const auto& q : gold) s.insert(q.spans.begin(), q.spans.end());
  return {s.begin(), s.end()};
}

std::vector<VerbInstance> verb_instances(const Corpus& corpus, std::optional<AggregationRule> rule) {
  std::vector<VerbInstance> out;
  for (const auto& r : corpus)
    for (const auto& v : r.verb_entries) out.push_back({r.sentence_id, r.tokens, v.verb_index, gold_questions(v, rule)});
  return out;
}

nn::Json ModelConfig::to_json() const {
  return nn::Json{{"encoder", encoder.to_json()}, {"mlpHidden", mlp_hidden}, {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nn::Json& j) {
  ModelConfig c;
  c.encoder = nn::EncoderConfig::from_json(j.at("encoder"));
  c.mlp_hidden = j.at("mlpHidden").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

namespace {

template <class Model>
nn::Checkpoint checkpoint_of(const Model& m, const char* kind) {
  nn::Checkpoint ck;
  ck.kind = kind;
  ck.hyperparameters = m.config.to_json();
  ck.vocabulary = m.vocab.to_json();
  ck.params = m.params.template cast<float>();
  return ck;
}

template <class T>
void load_params(nn::ParameterSet<T>& dst, const nn::ParameterSet<float>& src) {
  if (dst.size() != src.size()) throw ValidationError("checkpoint does not match the model layout");
  for (auto& [name, p] : dst) {
    const auto& q = src.get(name);
    if (q.value.rows() != p.value.rows() || q.value.cols() != p.value.cols())
      throw ValidationError("checkpoint shape mismatch for " + name);
    p.value = q.value.template cast<T>();
  }
}

void check_kind(const nn::Checkpoint& ck, const char* kind) {
  if (ck.kind != kind) throw ValidationError("expected a " + std::string(kind) + " checkpoint, got " + ck.kind);
}

}  // namespace

// ---------------------------------------------------------------------------
// BIO model

template <class T>
BioModel<T>::BioModel(nn::Vocabulary v, ModelConfig cfg) : vocab(std::move(v)), config(cfg) {
  nn::Rng rng(config.seed);
  nn::init_encoder(params, config.encoder, vocab.size(), rng);
  nn::init_mlp<T>(params, "bio.", config.encoder.hidden, config.mlp_hidden, {{"tag", 3}}, rng);
}

template <class T>
Var BioModel<T>::logits(Tape<T>& tape, std::span<const int> ids, int verb, nn::Rng* dropout) {
  const Var h = nn::encode(tape, params, config.encoder, ids, verb, dropout);
  return nn::mlp_output(tape, params, "bio.", "tag", nn::mlp_hidden(tape, params, "bio.", h));
}

template <class T>
Var BioModel<T>::loss(Tape<T>& tape, const VerbInstance& ex, nn::Rng* dropout) {
  const auto ids = vocab.ids(ex.tokens);
  const auto tags = spans_to_tags(canonical_projection(ex.gold_spans()), static_cast<int>(ids.size()));
  std::vector<int> targets;
  for (Tag t : tags) targets.push_back(static_cast<int>(t));
  return tape.softmax_xent(logits(tape, ids, ex.verb_index, dropout), targets);
}

template <class T>
Eigen::MatrixXd BioModel<T>::tag_probabilities(const std::vector<std::string>& tokens, int verb_index) {
  Tape<T> tape;
  const auto ids = vocab.ids(tokens);
  return nn::softmax_cols(Matrix<T>(tape.value(logits(tape, ids, verb_index, nullptr)))).template cast<double>();
}

template <class T>
std::vector<AnswerSpan> BioModel<T>::predict(const std::vector<std::string>& tokens, int verb_index) {
  return tags_to_spans(viterbi_decode(tag_probabilities(tokens, verb_index)).tags);
}

template <class T>
nn::Checkpoint BioModel<T>::to_checkpoint() const {
  return checkpoint_of(*this, kKind);
}

template <class T>
BioModel<T> BioModel<T>::from_checkpoint(const nn::Checkpoint& ck) {
  check_kind(ck, kKind);
  BioModel m(nn::Vocabulary::from_json(ck.vocabulary), ModelConfig::from_json(ck.hyperparameters));
  load_params(m.params, ck.params);
  return m;
}

// ---------------------------------------------------------------------------
// Span model

template <class T>
SpanModel<T>::SpanModel(nn::Vocabulary v, ModelConfig cfg) : vocab(std::move(v)), config(cfg) {
  nn::Rng rng(config.seed);
  nn::init_encoder(params, config.encoder, vocab.size(), rng);
  nn::init_mlp<T>(params, "span.", 2 * config.encoder.hidden, config.mlp_hidden, {{"score", 1}}, rng);
}

template <class T>
Var SpanModel<T>::logits(Tape<T>& tape, std::span<const int> ids, int verb, nn::Rng* dropout) {
  const Var h = nn::encode(tape, params, config.encoder, ids, verb, dropout);
  std::vector<int> starts, ends;
  for (const auto& s : all_spans(static_cast<int>(ids.size()))) {
    starts.push_back(s.start);
    ends.push_back(s.end);
  }
  const Var repr = tape.concat_rows(std::vector<Var>{tape.gather_cols(h, starts), tape.gather_cols(h, ends)});
  return nn::mlp_output(tape, params, "span.", "score", nn::mlp_hidden(tape, params, "span.", repr));
}

template <class T>
Var SpanModel<T>::loss(Tape<T>& tape, const VerbInstance& ex, nn::Rng* dropout) {
  const auto ids = vocab.ids(ex.tokens);
  const auto gold = ex.gold_spans();
  std::vector<T> targets;
  for (const auto& s : all_spans(static_cast<int>(ids.size())))
    targets.push_back(std::binary_search(gold.begin(), gold.end(), s) ? T(1) : T(0));
  return tape.bce_logits(logits(tape, ids, ex.verb_index, dropout), targets);
}

template <class T>
std::vector<ScoredSpan> SpanModel<T>::span_probabilities(const std::vector<std::string>& tokens, int verb_index) {
  Tape<T> tape;
  const auto ids = vocab.ids(tokens);
  const Matrix<T> z = tape.value(logits(tape, ids, verb_index, nullptr));
  const auto spans = all_spans(static_cast<int>(ids.size()));
  std::vector<ScoredSpan> out;
  out.reserve(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k)
    out.push_back({spans[k], 1.0 / (1.0 + std::exp(-static_cast<double>(z(0, static_cast<Eigen::Index>(k)))))});
  return out;
}

template <class T>
nn::Checkpoint SpanModel<T>::to_checkpoint() const {
  return checkpoint_of(*this, kKind);
}

template <class T>
SpanModel<T> SpanModel<T>::from_checkpoint(const nn::Checkpoint& ck) {
  check_kind(ck, kKind);
  SpanModel m(nn::Vocabulary::from_json(ck.vocabulary), ModelConfig::from_json(ck.hyperparameters));
  load_params(m.params, ck.params);
  return m;
}

template class BioModel<float>;
template class BioModel<double>;
template class SpanModel<float>;
template class SpanModel<double>;

// ---------------------------------------------------------------------------
// Thresholds, evaluation, training

MatchCounts evaluate_spans(const std::vector<std::vector<AnswerSpan>>& predicted,
                           const std::vector<GoldVerb>& gold, const Matcher& m) {
  if (predicted.size() != gold.size()) throw ValidationError("prediction and gold counts differ");
  MatchCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) c += span_detection_counts(predicted[i], gold[i], m);
  return c;
}

ThresholdResult tune_threshold(const std::vector<std::vector<ScoredSpan>>& scored,
                               const std::vector<GoldVerb>& gold, const Matcher& m, double step) {
  if (gold.empty()) throw ValidationError("threshold tuning needs a non-empty dev set");
  if (scored.size() != gold.size()) throw ValidationError("prediction and gold counts differ");
  if (!(step > 0 && step <= 1)) throw ValidationError("grid step must be in (0, 1]");
  ThresholdResult best;
  bool first = true;
  const int steps = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double tau = std::min(1.0, k * step);
    std::vector<std::vector<AnswerSpan>> pred;
    pred.reserve(scored.size());
    for (const auto& s : scored) pred.push_back(select_spans(s, tau));
    const PRF prf = evaluate_spans(pred, gold, m).prf();
    if (first || prf.f1 > best.prf.f1) {
      best = {tau, prf};
      first = false;
    }
  }
  return best;
}

nn::TrainReport train_bio(BioModel<float>& model, const std::vector<VerbInstance>& train,
                          const std::vector<VerbInstance>& dev, const nn::TrainConfig& cfg) {
  std::function<double()> dev_score;
  if (!dev.empty())
    dev_score = [&] {
      std::vector<std::vector<AnswerSpan>> pred;
      std::vector<GoldVerb> gold;
      for (const auto& ex : dev) {
        pred.push_back(model.predict(ex.tokens, ex.verb_index));
        gold.push_back(ex.gold);
      }
      return evaluate_spans(pred, gold, Matcher::exact()).prf().f1;
    };
  return nn::train<float>(
      model.params, train.size(),
      [&](Tape<float>& tape, std::size_t k, nn::Rng& rng) { return model.loss(tape, train[k], &rng); }, cfg,
      dev_score);
}

nn::TrainReport train_span(SpanModel<float>& model, const std::vector<VerbInstance>& train,
                           const std::vector<VerbInstance>& dev, const nn::TrainConfig& cfg, double tau) {
  std::function<double()> dev_score;
  if (!dev.empty())
    dev_score = [&, tau] {
      std::vector<std::vector<AnswerSpan>> pred;
      std::vector<GoldVerb> gold;
      for (const auto& ex : dev) {
        pred.push_back(select_spans(model.span_probabilities(ex.tokens, ex.verb_index), tau));
        gold.push_back(ex.gold);
      }
      return evaluate_spans(pred, gold, Matcher::exact()).prf().f1;
    };
  return nn::train<float>(
      model.params, train.size(),
      [&](Tape<float>& tape, std::size_t k, nn::Rng& rng) { return model.loss(tape, train[k], &rng); }, cfg,
      dev_score);
}

}  // namespace qasrl
