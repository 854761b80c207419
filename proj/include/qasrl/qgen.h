// qasrl/qgen.h

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

#ifndef QASRL_QGEN_H_
#define QASRL_QGEN_H_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "qasrl/grammar.h"
#include "qasrl/spandet.h"

namespace qasrl {

struct QgenConfig {
  nn::EncoderConfig encoder;
  int mlp_hidden = 100;
  int decoder_layers = 4;
  int decoder_hidden = 200;
  int slot_embedding = 100;
  std::vector<std::string> prepositions = default_prepositions();
  std::uint64_t seed = 1;

  nn::Json to_json() const;
  static QgenConfig from_json(const nn::Json& j);
};

/// Per-slot distributions, each over that slot's vocabulary.
struct SlotDistributions {
  std::array<Eigen::VectorXd, kNumSlots> probs;

  SlotCodes argmax() const;
};

/// Gold questions of one verb, one entry per (question, answer span).
struct QgenInstance {
  std::vector<std::string> tokens;
  int verb_index = 0;
  std::vector<AnswerSpan> spans;
  std::vector<SlotCodes> targets;
};

/// Throws ValidationError when a gold question is outside the grammar.
std::vector<QgenInstance> qgen_instances(const std::vector<VerbInstance>& verbs, const Grammar& grammar);

template <class T>
class QuestionGenerator {
 public:
  QuestionGenerator(nn::Vocabulary vocab, QgenConfig cfg);
  virtual ~QuestionGenerator() = default;

  virtual const char* kind() const = 0;
  /// Summed negative log-likelihood of the gold slot values.
  virtual nn::Var loss(nn::Tape<T>& tape, const QgenInstance& ex, nn::Rng* dropout) = 0;
  /// One question per span; each span is decoded on its own.
  virtual std::vector<SlotCodes> generate(const std::vector<std::string>& tokens, int verb_index,
                                          const std::vector<AnswerSpan>& spans) = 0;

  nn::Checkpoint to_checkpoint() const;

  const Grammar& grammar() const { return grammar_; }
  std::array<int, kNumSlots> slot_sizes() const;

  nn::Vocabulary vocab;
  QgenConfig config;
  nn::ParameterSet<T> params;

 protected:
  /// [h_i; h_j] for every span, (2H x spans).
  nn::Var span_repr(nn::Tape<T>& tape, const std::vector<std::string>& tokens, int verb_index,
                    const std::vector<AnswerSpan>& spans, nn::Rng* dropout);

  Grammar grammar_;
};

/// Independent softmax per slot over a shared hidden layer.
template <class T>
class LocalQuestionModel : public QuestionGenerator<T> {
 public:
  static constexpr const char* kKind = "qgen-local";

  LocalQuestionModel(nn::Vocabulary vocab, QgenConfig cfg);

  const char* kind() const override { return kKind; }
  nn::Var loss(nn::Tape<T>& tape, const QgenInstance& ex, nn::Rng* dropout) override;
  std::vector<SlotCodes> generate(const std::vector<std::string>& tokens, int verb_index,
                                  const std::vector<AnswerSpan>& spans) override;
  std::vector<SlotDistributions> distributions(const std::vector<std::string>& tokens, int verb_index,
                                               const std::vector<AnswerSpan>& spans);
};

/// Slot-by-slot decoder with stacked LSTM cells, separate weights per slot,
/// fed the previous slot value (gold in training, predicted otherwise).
template <class T>
class SequentialQuestionModel : public QuestionGenerator<T> {
 public:
  static constexpr const char* kKind = "qgen-seq";

  SequentialQuestionModel(nn::Vocabulary vocab, QgenConfig cfg);

  const char* kind() const override { return kKind; }
  nn::Var loss(nn::Tape<T>& tape, const QgenInstance& ex, nn::Rng* dropout) override;
  std::vector<SlotCodes> generate(const std::vector<std::string>& tokens, int verb_index,
                                  const std::vector<AnswerSpan>& spans) override;
  /// Teacher-forced slot distributions for given previous values.
  std::vector<SlotDistributions> forced_distributions(const std::vector<std::string>& tokens, int verb_index,
                                                      const std::vector<AnswerSpan>& spans,
                                                      const std::vector<SlotCodes>& targets);

 private:
  /// Logits of every slot; `previous` supplies the input value per slot
  /// (teacher forcing) or is null for greedy decoding into `decoded`.
  std::array<nn::Var, kNumSlots> run(nn::Tape<T>& tape, nn::Var repr, const std::vector<SlotCodes>* previous,
                                     std::vector<SlotCodes>* decoded);
};

extern template class QuestionGenerator<float>;
extern template class QuestionGenerator<double>;
extern template class LocalQuestionModel<float>;
extern template class LocalQuestionModel<double>;
extern template class SequentialQuestionModel<float>;
extern template class SequentialQuestionModel<double>;

/// Builds the model a checkpoint describes (local or sequential).
std::unique_ptr<QuestionGenerator<float>> load_question_model(const nn::Checkpoint& ckpt);

struct QuestionScores {
  long questions = 0;
  double exact_match = 0;
  double partial_match = 0;
  double slot_accuracy = 0;
};

/// Accuracy of one generated question per gold span against that span's
/// gold question.
QuestionScores evaluate_questions(QuestionGenerator<float>& model, const std::vector<QgenInstance>& data);
nn::Json to_json(const QuestionScores& s);

/// Early stopping on dev exact match when a dev set is given.
nn::TrainReport train_qgen(QuestionGenerator<float>& model, const std::vector<QgenInstance>& train,
                           const std::vector<QgenInstance>& dev, const nn::TrainConfig& cfg);

}  // namespace qasrl

#endif  // QASRL_QGEN_H_
