// qasrl/src/nn/optim.cc

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

#include "qasrl/nn/optim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qasrl::nn {

template <class T>
void Adadelta<T>::step(ParameterSet<T>& ps) {
  const T rho = static_cast<T>(cfg_.rho);
  const T eps = static_cast<T>(cfg_.epsilon);
  const T lr = static_cast<T>(cfg_.learning_rate);
  for (auto& [name, p] : ps) {
    auto it = state_.find(name);
    if (it == state_.end()) {
      it = state_.emplace(name, State{Matrix<T>::Zero(p.value.rows(), p.value.cols()),
                                      Matrix<T>::Zero(p.value.rows(), p.value.cols())})
               .first;
    }
    auto& s = it->second;
    if (s.mean_sq_grad.rows() != p.grad.rows() || s.mean_sq_grad.cols() != p.grad.cols())
      throw ValidationError("optimizer state shape mismatch for " + name);
    auto g = p.grad.array();
    s.mean_sq_grad.array() = rho * s.mean_sq_grad.array() + (T(1) - rho) * g.square();
    const Matrix<T> delta =
        (-(s.mean_sq_delta.array() + eps).sqrt() / (s.mean_sq_grad.array() + eps).sqrt() * g).matrix();
    s.mean_sq_delta.array() = rho * s.mean_sq_delta.array() + (T(1) - rho) * delta.array().square();
    p.value += lr * delta;
  }
}

template <class T>
double clip_global_norm(ParameterSet<T>& ps, double max_norm) {
  double sq = 0;
  for (const auto& [name, p] : ps) sq += static_cast<double>(p.grad.squaredNorm());
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0) {
    const T s = static_cast<T>(max_norm / norm);
    for (auto& [name, p] : ps) p.grad *= s;
  }
  return norm;
}

template <class T>
TrainReport train(ParameterSet<T>& ps, std::size_t num_examples, const ExampleLoss<T>& loss,
                  const TrainConfig& cfg, const std::function<double()>& dev_score,
                  const std::function<void(int, double)>& on_epoch) {
  if (num_examples == 0) throw ValidationError("empty training set");
  if (cfg.batch_size <= 0) throw ValidationError("batch size must be positive");
  Rng rng(cfg.seed);
  Adadelta<T> opt(cfg.optimizer);
  TrainReport report;
  std::vector<std::size_t> order(num_examples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::optional<ParameterSet<T>> best;
  double best_score = -std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (std::size_t start = 0; start < num_examples; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(num_examples, start + static_cast<std::size_t>(cfg.batch_size));
      ps.zero_grad();
      for (std::size_t k = start; k < stop; ++k) {
        Tape<T> tape;
        const Var l = loss(tape, order[k], rng);
        const double lv = static_cast<double>(tape.scalar(l));
        if (!std::isfinite(lv)) throw std::runtime_error("non-finite training loss");
        total += lv;
        tape.backward(l);
      }
      const T inv = static_cast<T>(1.0 / static_cast<double>(stop - start));
      for (auto& [name, p] : ps) p.grad *= inv;
      clip_global_norm(ps, cfg.clip_norm);
      opt.step(ps);
    }
    const double mean = total / static_cast<double>(num_examples);
    report.train_loss.push_back(mean);
    report.epochs_run = epoch;
    if (on_epoch) on_epoch(epoch, mean);
    if (dev_score) {
      const double score = dev_score();
      report.dev_score.push_back(score);
      if (score > best_score) {
        best_score = score;
        best = ps;
        report.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        report.early_stopped = true;
        break;
      }
    } else {
      report.best_epoch = epoch;
    }
  }
  if (best) ps = std::move(*best);
  return report;
}

template class Adadelta<float>;
template class Adadelta<double>;
template double clip_global_norm<float>(ParameterSet<float>&, double);
template double clip_global_norm<double>(ParameterSet<double>&, double);
template TrainReport train<float>(ParameterSet<float>&, std::size_t, const ExampleLoss<float>&,
                                  const TrainConfig&, const std::function<double()>&,
                                  const std::function<void(int, double)>&);
template TrainReport train<double>(ParameterSet<double>&, std::size_t, const ExampleLoss<double>&,
                                   const TrainConfig&, const std::function<double()>&,
                                   const std::function<void(int, double)>&);

}  // namespace qasrl::nn
