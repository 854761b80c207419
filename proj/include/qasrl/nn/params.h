// qasrl/nn/params.h

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

#ifndef QASRL_NN_PARAMS_H_
#define QASRL_NN_PARAMS_H_

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qasrl/error.h"

namespace qasrl::nn {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
struct Parameter {
  Matrix<T> value;
  Matrix<T> grad;
};

/// Named trainable tensors. Entries have stable addresses (std::map), so
/// references survive later insertions.
template <class T>
class ParameterSet {
 public:
  Parameter<T>& add(const std::string& name, int rows, int cols) {
    if (entries_.count(name)) throw ValidationError("duplicate parameter " + name);
    auto& p = entries_[name];
    p.value = Matrix<T>::Zero(rows, cols);
    p.grad = Matrix<T>::Zero(rows, cols);
    return p;
  }

  Parameter<T>& get(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ValidationError("missing parameter " + name);
    return it->second;
  }
  const Parameter<T>& get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ValidationError("missing parameter " + name);
    return it->second;
  }
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }

  void zero_grad() {
    for (auto& [name, p] : entries_) p.grad.setZero();
  }

  std::size_t num_values() const {
    std::size_t n = 0;
    for (const auto& [name, p] : entries_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

  template <class U>
  ParameterSet<U> cast() const {
    ParameterSet<U> out;
    for (const auto& [name, p] : entries_) {
      auto& q = out.add(name, static_cast<int>(p.value.rows()), static_cast<int>(p.value.cols()));
      q.value = p.value.template cast<U>();
    }
    return out;
  }

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Parameter<T>> entries_;
};

}  // namespace qasrl::nn

#endif  // QASRL_NN_PARAMS_H_
