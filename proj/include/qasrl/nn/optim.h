// qasrl/nn/optim.h

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

#ifndef QASRL_NN_OPTIM_H_
#define QASRL_NN_OPTIM_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qasrl/nn/layers.h"

namespace qasrl::nn {

struct AdadeltaConfig {
  double rho = 0.95;
  double epsilon = 1e-6;
  double learning_rate = 1.0;
};

template <class T>
class Adadelta {
 public:
  explicit Adadelta(AdadeltaConfig cfg = {}) : cfg_(cfg) {}

  /// x += lr * dx with dx = -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g.
  void step(ParameterSet<T>& ps);

  struct State {
    Matrix<T> mean_sq_grad;
    Matrix<T> mean_sq_delta;
  };
  const std::map<std::string, State>& state() const { return state_; }

 private:
  AdadeltaConfig cfg_;
  std::map<std::string, State> state_;
};

/// Rescales all gradients so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
template <class T>
double clip_global_norm(ParameterSet<T>& ps, double max_norm);

struct TrainConfig {
  int max_epochs = 40;
  int patience = 10;
  int batch_size = 80;
  double clip_norm = 1.0;
  std::uint64_t seed = 1;
  AdadeltaConfig optimizer;
};

struct TrainReport {
  int epochs_run = 0;
  int best_epoch = 0;
  bool early_stopped = false;
  std::vector<double> train_loss;  // mean loss per example, per epoch
  std::vector<double> dev_score;   // higher is better
};

/// Example loss on a fresh tape; the Rng drives dropout.
template <class T>
using ExampleLoss = std::function<Var(Tape<T>&, std::size_t example, Rng& rng)>;

/// Mini-batch Adadelta with gradient clipping. When `dev_score` is given,
/// training stops after `patience` epochs without improvement and the best
/// parameters are restored. Examples are shuffled with a seeded Rng.
template <class T>
TrainReport train(ParameterSet<T>& ps, std::size_t num_examples, const ExampleLoss<T>& loss,
                  const TrainConfig& cfg, const std::function<double()>& dev_score = {},
                  const std::function<void(int, double)>& on_epoch = {});

}  // namespace qasrl::nn

#endif  // QASRL_NN_OPTIM_H_
