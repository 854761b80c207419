// qasrl/spandet.h

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

#ifndef QASRL_SPANDET_H_
#define QASRL_SPANDET_H_

#include <optional>
#include <string>
#include <vector>

#include "qasrl/corpus.h"
#include "qasrl/metrics.h"
#include "qasrl/nn/checkpoint.h"
#include "qasrl/nn/layers.h"
#include "qasrl/nn/optim.h"

namespace qasrl {

enum class Tag : std::uint8_t { B = 0, I = 1, O = 2 };
char tag_char(Tag t);

struct TagSequence {
  std::vector<Tag> tags;
  std::vector<double> log_probs;  // of the chosen tag, per token
};

/// Most probable tag sequence in which I only follows B or I. `probs` is
/// (3 x tokens) with rows B, I, O. Ties prefer O, then B.
TagSequence viterbi_decode(const Eigen::MatrixXd& probs);

std::vector<AnswerSpan> tags_to_spans(const std::vector<Tag>& tags);
/// Throws ValidationError on overlapping or out-of-range spans.
std::vector<Tag> spans_to_tags(const std::vector<AnswerSpan>& spans, int length);

/// Non-overlapping subset: by start, longer first, dropping conflicts.
std::vector<AnswerSpan> canonical_projection(std::vector<AnswerSpan> spans);

struct ScoredSpan {
  AnswerSpan span;
  double probability = 0;
};

/// All spans with probability strictly greater than tau.
std::vector<AnswerSpan> select_spans(const std::vector<ScoredSpan>& scored, double tau);

/// Every (i, j) with i <= j < n, ordered by i then j.
std::vector<AnswerSpan> all_spans(int n);

/// One training or evaluation instance: a verb in a sentence.
struct VerbInstance {
  std::string sentence_id;
  std::vector<std::string> tokens;
  int verb_index = 0;
  GoldVerb gold;

  std::vector<AnswerSpan> gold_spans() const;
};

std::vector<VerbInstance> verb_instances(const Corpus& corpus,
                                         std::optional<AggregationRule> rule = std::nullopt);

struct ModelConfig {
  nn::EncoderConfig encoder;
  int mlp_hidden = 100;
  std::uint64_t seed = 1;

  nn::Json to_json() const;
  static ModelConfig from_json(const nn::Json& j);
};

/// Per-token B/I/O classifier over encoder states.
template <class T>
class BioModel {
 public:
  static constexpr const char* kKind = "span-bio";

  BioModel(nn::Vocabulary vocab, ModelConfig cfg);

  nn::Var loss(nn::Tape<T>& tape, const VerbInstance& ex, nn::Rng* dropout);
  /// (3 x tokens) tag distributions.
  Eigen::MatrixXd tag_probabilities(const std::vector<std::string>& tokens, int verb_index);
  std::vector<AnswerSpan> predict(const std::vector<std::string>& tokens, int verb_index);

  nn::Checkpoint to_checkpoint() const;
  static BioModel from_checkpoint(const nn::Checkpoint& ckpt);

  nn::Vocabulary vocab;
  ModelConfig config;
  nn::ParameterSet<T> params;

 private:
  nn::Var logits(nn::Tape<T>& tape, std::span<const int> ids, int verb, nn::Rng* dropout);
};

/// Independent sigmoid score for every span from its endpoint states.
template <class T>
class SpanModel {
 public:
  static constexpr const char* kKind = "span-scorer";

  SpanModel(nn::Vocabulary vocab, ModelConfig cfg);

  nn::Var loss(nn::Tape<T>& tape, const VerbInstance& ex, nn::Rng* dropout);
  std::vector<ScoredSpan> span_probabilities(const std::vector<std::string>& tokens, int verb_index);

  nn::Checkpoint to_checkpoint() const;
  static SpanModel from_checkpoint(const nn::Checkpoint& ckpt);

  nn::Vocabulary vocab;
  ModelConfig config;
  nn::ParameterSet<T> params;

 private:
  nn::Var logits(nn::Tape<T>& tape, std::span<const int> ids, int verb, nn::Rng* dropout);
};

extern template class BioModel<float>;
extern template class BioModel<double>;
extern template class SpanModel<float>;
extern template class SpanModel<double>;

struct ThresholdResult {
  double tau = 0.5;
  PRF prf;
};

/// Grid search for the F1-maximizing threshold over micro-aggregated
/// counts; the smallest tau wins ties.
ThresholdResult tune_threshold(const std::vector<std::vector<ScoredSpan>>& scored,
                               const std::vector<GoldVerb>& gold, const Matcher& m,
                               double step = 0.01);

/// Micro-averaged span detection over instances.
MatchCounts evaluate_spans(const std::vector<std::vector<AnswerSpan>>& predicted,
                           const std::vector<GoldVerb>& gold, const Matcher& m);

/// Trains with early stopping on dev exact-match F1 (training F1 when no
/// dev set is given, for which early stopping is disabled).
nn::TrainReport train_bio(BioModel<float>& model, const std::vector<VerbInstance>& train,
                          const std::vector<VerbInstance>& dev, const nn::TrainConfig& cfg);
nn::TrainReport train_span(SpanModel<float>& model, const std::vector<VerbInstance>& train,
                           const std::vector<VerbInstance>& dev, const nn::TrainConfig& cfg,
                           double tau = 0.5);

}  // namespace qasrl

#endif  // QASRL_SPANDET_H_
