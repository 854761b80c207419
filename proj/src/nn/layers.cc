// qasrl/src/nn/layers.cc

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

#include "qasrl/nn/layers.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace qasrl::nn {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() { add("<unk>"); }

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences, int min_count) {
  std::unordered_map<std::string, int> counts;
  std::vector<std::string> order;
  for (const auto& s : sentences)
    for (const auto& t : s) {
      const std::string w = lower(t);
      if (counts[w]++ == 0) order.push_back(w);
    }
  Vocabulary v;
  for (const auto& w : order)
    if (counts[w] >= min_count) v.add(w);
  return v;
}

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(lower(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::ids(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

Json Vocabulary::to_json() const { return Json(tokens_); }

Vocabulary Vocabulary::from_json(const Json& j) {
  Vocabulary v;
  const auto tokens = j.get<std::vector<std::string>>();
  if (tokens.empty() || tokens[0] != "<unk>") throw ValidationError("vocabulary must start with <unk>");
  for (const auto& t : tokens) v.add(t);
  return v;
}

int load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                               Matrix<float>& table) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embeddings file " + path.string());
  std::vector<bool> seen(static_cast<std::size_t>(vocab.size()), false);
  int covered = 0;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    const int id = vocab.id(token);
    if (id == Vocabulary::kUnk && lower(token) != "<unk>") continue;
    std::vector<float> v;
    float x;
    while (ss >> x) v.push_back(x);
    if (static_cast<Eigen::Index>(v.size()) != table.rows())
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(table.rows()) + " values, got " + std::to_string(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) table(static_cast<Eigen::Index>(k), id) = v[k];
    if (!seen[static_cast<std::size_t>(id)]) {
      seen[static_cast<std::size_t>(id)] = true;
      ++covered;
    }
  }
  return covered;
}

// ---------------------------------------------------------------------------
// Initialization

template <class T>
Matrix<T> orthonormal(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = std::max(rows, cols);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  // sign correction makes the distribution uniform over orthogonal matrices
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q.topLeftCorner(rows, cols).template cast<T>();
}

template <class T>
Matrix<T> uniform(int rows, int cols, double scale, Rng& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix<T> m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = static_cast<T>(u(rng));
  return m;
}

template <class T>
Matrix<T> dropout_mask(int rows, int cols, double rate, Rng& rng) {
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix<T> m(rows, cols);
  const T s = static_cast<T>(1.0 / (1.0 - rate));
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = keep(rng) ? s : T(0);
  return m;
}

// ---------------------------------------------------------------------------
// Encoder

Json EncoderConfig::to_json() const {
  return Json{{"embeddingDim", embedding_dim}, {"indicatorDim", indicator_dim}, {"hidden", hidden},
              {"layers", layers}, {"recurrentDropout", recurrent_dropout}};
}

EncoderConfig EncoderConfig::from_json(const Json& j) {
  EncoderConfig c;
  c.embedding_dim = j.at("embeddingDim").get<int>();
  c.indicator_dim = j.at("indicatorDim").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.layers = j.at("layers").get<int>();
  c.recurrent_dropout = j.at("recurrentDropout").get<double>();
  return c;
}

template <class T>
void init_encoder(ParameterSet<T>& ps, const EncoderConfig& cfg, int vocab_size, Rng& rng,
                  const std::string& prefix) {
  ps.add(prefix + "embedding", cfg.embedding_dim, vocab_size).value =
      uniform<T>(cfg.embedding_dim, vocab_size, 0.1, rng);
  ps.add(prefix + "indicator", cfg.indicator_dim, 2).value = uniform<T>(cfg.indicator_dim, 2, 0.1, rng);
  const int h = cfg.hidden;
  int d = cfg.embedding_dim + cfg.indicator_dim;
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string p = prefix + "layer" + std::to_string(l) + ".";
    auto& w = ps.add(p + "W", 6 * h, d);
    for (int k = 0; k < 6; ++k) w.value.middleRows(k * h, h) = orthonormal<T>(h, d, rng);
    auto& u = ps.add(p + "U", 5 * h, h);
    for (int k = 0; k < 5; ++k) u.value.middleRows(k * h, h) = orthonormal<T>(h, h, rng);
    auto& b = ps.add(p + "b", 6 * h, 1);
    b.value.middleRows(h, h).setOnes();  // forget gate
    d = h;
  }
}

template <class T>
Var highway_lstm_layer(Tape<T>& tape, Var x, Var w, Var u, Var b, bool reverse,
                       const Matrix<T>* mask) {
  const int h = static_cast<int>(tape.value(u).cols());
  const int n = static_cast<int>(tape.value(x).cols());
  if (tape.value(w).rows() != 6 * h || tape.value(u).rows() != 5 * h ||
      tape.value(w).cols() != tape.value(x).rows())
    throw ValidationError("dimension mismatch in highway LSTM layer");
  const Var wx = tape.add_col(tape.matmul(w, x), b);
  Var hp = tape.input(Matrix<T>::Zero(h, 1));
  Var cp = tape.input(Matrix<T>::Zero(h, 1));
  std::vector<Var> out(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const int t = reverse ? n - 1 - s : s;
    const Var z = tape.col(wx, t);
    const Var rec = tape.matmul(u, mask ? tape.mask(hp, *mask) : hp);
    const Var gates = tape.add(tape.rows(z, 0, 5 * h), rec);
    const Var i = tape.sigmoid(tape.rows(gates, 0, h));
    const Var f = tape.sigmoid(tape.rows(gates, h, h));
    const Var o = tape.sigmoid(tape.rows(gates, 2 * h, h));
    const Var g = tape.tanh(tape.rows(gates, 3 * h, h));
    const Var r = tape.sigmoid(tape.rows(gates, 4 * h, h));
    const Var proj = tape.rows(z, 5 * h, h);
    const Var c = tape.add(tape.mul(i, g), tape.mul(f, cp));
    const Var lstm_out = tape.mul(o, tape.tanh(c));
    const Var hn = tape.add(tape.mul(r, lstm_out), tape.mul(tape.one_minus(r), proj));
    out[static_cast<std::size_t>(t)] = hn;
    hp = hn;
    cp = c;
  }
  return tape.concat_cols(out);
}

template <class T>
Var encode(Tape<T>& tape, ParameterSet<T>& ps, const EncoderConfig& cfg,
           std::span<const int> token_ids, int verb_index, Rng* dropout_rng, const std::string& prefix) {
  const int n = static_cast<int>(token_ids.size());
  if (n == 0) throw ValidationError("cannot encode an empty sentence");
  if (verb_index < 0 || verb_index >= n) throw ValidationError("verb index out of range");
  std::vector<int> indicator(static_cast<std::size_t>(n), 0);
  indicator[static_cast<std::size_t>(verb_index)] = 1;
  const Var words = tape.lookup(ps.get(prefix + "embedding"), token_ids);
  const Var ind = tape.lookup(ps.get(prefix + "indicator"), indicator);
  const std::vector<Var> parts{words, ind};
  Var x = tape.concat_rows(parts);
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string p = prefix + "layer" + std::to_string(l) + ".";
    Matrix<T> mask;
    if (dropout_rng && cfg.recurrent_dropout > 0)
      mask = dropout_mask<T>(cfg.hidden, 1, cfg.recurrent_dropout, *dropout_rng);
    x = highway_lstm_layer(tape, x, tape.param(ps.get(p + "W")), tape.param(ps.get(p + "U")),
                           tape.param(ps.get(p + "b")), l % 2 == 1, mask.size() ? &mask : nullptr);
  }
  return x;
}

// ---------------------------------------------------------------------------
// MLP and LSTM cell

template <class T>
void init_mlp(ParameterSet<T>& ps, const std::string& prefix, int input_dim, int hidden_dim,
              const std::vector<std::pair<std::string, int>>& outputs, Rng& rng) {
  const double s1 = std::sqrt(6.0 / (input_dim + hidden_dim));
  ps.add(prefix + "hidden.W", hidden_dim, input_dim).value = uniform<T>(hidden_dim, input_dim, s1, rng);
  ps.add(prefix + "hidden.b", hidden_dim, 1);
  for (const auto& [name, size] : outputs) {
    const double s2 = std::sqrt(6.0 / (hidden_dim + size));
    ps.add(prefix + name + ".W", size, hidden_dim).value = uniform<T>(size, hidden_dim, s2, rng);
    ps.add(prefix + name + ".b", size, 1);
  }
}

template <class T>
Var mlp_hidden(Tape<T>& tape, ParameterSet<T>& ps, const std::string& prefix, Var x) {
  const Var w = tape.param(ps.get(prefix + "hidden.W"));
  const Var b = tape.param(ps.get(prefix + "hidden.b"));
  return tape.relu(tape.add_col(tape.matmul(w, x), b));
}

template <class T>
Var mlp_output(Tape<T>& tape, ParameterSet<T>& ps, const std::string& prefix,
               const std::string& output, Var hidden) {
  const Var w = tape.param(ps.get(prefix + output + ".W"));
  const Var b = tape.param(ps.get(prefix + output + ".b"));
  return tape.add_col(tape.matmul(w, hidden), b);
}

template <class T>
void init_lstm_cell(ParameterSet<T>& ps, const std::string& prefix, int input_dim, int hidden,
                    Rng& rng) {
  auto& w = ps.add(prefix + "W", 4 * hidden, input_dim);
  for (int k = 0; k < 4; ++k) w.value.middleRows(k * hidden, hidden) = orthonormal<T>(hidden, input_dim, rng);
  auto& u = ps.add(prefix + "U", 4 * hidden, hidden);
  for (int k = 0; k < 4; ++k) u.value.middleRows(k * hidden, hidden) = orthonormal<T>(hidden, hidden, rng);
  auto& b = ps.add(prefix + "b", 4 * hidden, 1);
  b.value.middleRows(hidden, hidden).setOnes();
}

template <class T>
std::pair<Var, Var> lstm_cell(Tape<T>& tape, ParameterSet<T>& ps, const std::string& prefix, Var x,
                              Var h, Var c) {
  const Var w = tape.param(ps.get(prefix + "W"));
  const Var u = tape.param(ps.get(prefix + "U"));
  const Var b = tape.param(ps.get(prefix + "b"));
  const int hs = static_cast<int>(tape.value(u).cols());
  const Var z = tape.add_col(tape.add(tape.matmul(w, x), tape.matmul(u, h)), b);
  const Var i = tape.sigmoid(tape.rows(z, 0, hs));
  const Var f = tape.sigmoid(tape.rows(z, hs, hs));
  const Var o = tape.sigmoid(tape.rows(z, 2 * hs, hs));
  const Var g = tape.tanh(tape.rows(z, 3 * hs, hs));
  const Var cn = tape.add(tape.mul(i, g), tape.mul(f, c));
  const Var hn = tape.mul(o, tape.tanh(cn));
  return {hn, cn};
}

#define QASRL_INSTANTIATE_LAYERS(T)                                                                 \
  template Matrix<T> orthonormal<T>(int, int, Rng&);                                                \
  template Matrix<T> uniform<T>(int, int, double, Rng&);                                            \
  template Matrix<T> dropout_mask<T>(int, int, double, Rng&);                                       \
  template void init_encoder<T>(ParameterSet<T>&, const EncoderConfig&, int, Rng&,                  \
                                const std::string&);                                                \
  template Var highway_lstm_layer<T>(Tape<T>&, Var, Var, Var, Var, bool, const Matrix<T>*);         \
  template Var encode<T>(Tape<T>&, ParameterSet<T>&, const EncoderConfig&, std::span<const int>,    \
                         int, Rng*, const std::string&);                                            \
  template void init_mlp<T>(ParameterSet<T>&, const std::string&, int, int,                         \
                            const std::vector<std::pair<std::string, int>>&, Rng&);                 \
  template Var mlp_hidden<T>(Tape<T>&, ParameterSet<T>&, const std::string&, Var);                  \
  template Var mlp_output<T>(Tape<T>&, ParameterSet<T>&, const std::string&, const std::string&,    \
                             Var);                                                                  \
  template void init_lstm_cell<T>(ParameterSet<T>&, const std::string&, int, int, Rng&);            \
  template std::pair<Var, Var> lstm_cell<T>(Tape<T>&, ParameterSet<T>&, const std::string&, Var,    \
                                            Var, Var);

QASRL_INSTANTIATE_LAYERS(float)
QASRL_INSTANTIATE_LAYERS(double)

}  // namespace qasrl::nn
