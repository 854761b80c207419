// qasrl/nn/layers.h

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

#ifndef QASRL_NN_LAYERS_H_
#define QASRL_NN_LAYERS_H_

#include <filesystem>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qasrl/nn/tape.h"

namespace qasrl::nn {

using Rng = std::mt19937_64;
using Json = nlohmann::ordered_json;

/// Lower-cased token vocabulary; id 0 is the unknown token.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;

  Vocabulary();
  /// Tokens seen at least `min_count` times, in first-seen order.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences, int min_count = 1);

  int add(const std::string& token);
  int id(const std::string& token) const;
  std::vector<int> ids(const std::vector<std::string>& tokens) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  Json to_json() const;
  static Vocabulary from_json(const Json& j);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Copies vectors from a whitespace-separated "token v1 v2 ..." file into
/// columns of `table` for tokens in the vocabulary. Returns the number of
/// vocabulary entries covered.
int load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                               Matrix<float>& table);

/// Random (semi-)orthonormal matrix: rows or columns orthonormal.
template <class T>
Matrix<T> orthonormal(int rows, int cols, Rng& rng);
template <class T>
Matrix<T> uniform(int rows, int cols, double scale, Rng& rng);
/// Inverted dropout mask: entries 0 or 1 / (1 - rate).
template <class T>
Matrix<T> dropout_mask(int rows, int cols, double rate, Rng& rng);

struct EncoderConfig {
  int embedding_dim = 100;
  int indicator_dim = 100;
  int hidden = 300;
  int layers = 4;
  double recurrent_dropout = 0.1;

  Json to_json() const;
  static EncoderConfig from_json(const Json& j);
  bool operator==(const EncoderConfig&) const = default;
};

template <class T>
void init_encoder(ParameterSet<T>& ps, const EncoderConfig& cfg, int vocab_size, Rng& rng,
                  const std::string& prefix = "encoder.");

/// One highway LSTM layer over the columns of `x`, right-to-left when
/// `reverse`. `w` is (6H x D): input, forget, output, candidate, highway
/// gate and highway projection blocks; `u` is (5H x H); `b` is (6H x 1).
/// `mask` (H x 1) multiplies the previous hidden state at every step.
template <class T>
Var highway_lstm_layer(Tape<T>& tape, Var x, Var w, Var u, Var b, bool reverse,
                       const Matrix<T>* mask);

/// Stacked alternating highway LSTM over token embeddings concatenated with
/// the embedded predicate indicator. Returns (hidden x tokens). Dropout is
/// applied only when `dropout_rng` is given.
template <class T>
Var encode(Tape<T>& tape, ParameterSet<T>& ps, const EncoderConfig& cfg,
           std::span<const int> token_ids, int verb_index, Rng* dropout_rng,
           const std::string& prefix = "encoder.");

/// Feed-forward head: one ReLU hidden layer shared by named affine outputs.
template <class T>
void init_mlp(ParameterSet<T>& ps, const std::string& prefix, int input_dim, int hidden_dim,
              const std::vector<std::pair<std::string, int>>& outputs, Rng& rng);
template <class T>
Var mlp_hidden(Tape<T>& tape, ParameterSet<T>& ps, const std::string& prefix, Var x);
template <class T>
Var mlp_output(Tape<T>& tape, ParameterSet<T>& ps, const std::string& prefix,
               const std::string& output, Var hidden);

/// Plain LSTM cell. `w` (4H x D), `u` (4H x H), `b` (4H x 1); gate order
/// input, forget, output, candidate.
template <class T>
void init_lstm_cell(ParameterSet<T>& ps, const std::string& prefix, int input_dim, int hidden,
                    Rng& rng);
template <class T>
std::pair<Var, Var> lstm_cell(Tape<T>& tape, ParameterSet<T>& ps, const std::string& prefix, Var x,
                              Var h, Var c);

}  // namespace qasrl::nn

#endif  // QASRL_NN_LAYERS_H_
