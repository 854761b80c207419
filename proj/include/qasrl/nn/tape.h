// qasrl/nn/tape.h

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

#ifndef QASRL_NN_TAPE_H_
#define QASRL_NN_TAPE_H_

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "qasrl/nn/params.h"

namespace qasrl::nn {

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

/// Reverse-mode automatic differentiation over dense matrices. Vectors are
/// columns; a sentence is a (features x tokens) matrix. Gradients of
/// parameter leaves are accumulated into Parameter::grad by backward().
template <class T>
class Tape {
 public:
  using Mat = Matrix<T>;

  Var input(Mat value);
  Var param(Parameter<T>& p);
  /// Columns `ids` of an embedding table (dim x vocab); sparse gradient.
  Var lookup(Parameter<T>& table, std::span<const int> ids);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  /// Adds column vector `bias` to every column of `a`.
  Var add_col(Var a, Var bias);
  Var mul(Var a, Var b);
  /// Elementwise product with a constant matrix (dropout masks).
  Var mask(Var a, const Mat& m);
  Var scale(Var a, T s);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var one_minus(Var a);
  Var rows(Var a, int start, int count);
  Var cols(Var a, int start, int count);
  Var col(Var a, int j) { return cols(a, j, 1); }
  Var concat_rows(std::span<const Var> parts);
  Var concat_cols(std::span<const Var> parts);
  Var gather_cols(Var a, std::span<const int> index);
  /// Repeats a column vector `n` times.
  Var broadcast_cols(Var a, int n);
  Var sum(Var a);

  /// Summed softmax cross-entropy; logits are (classes x items).
  Var softmax_xent(Var logits, std::span<const int> targets);
  /// Summed binary cross-entropy on logits (1 x items or items x 1).
  Var bce_logits(Var logits, std::span<const T> targets);

  const Mat& value(Var v) const { return nodes_[v.id].value; }
  const Mat& grad(Var v) const { return nodes_[v.id].grad; }
  T scalar(Var v) const { return nodes_[v.id].value(0, 0); }
  std::size_t size() const { return nodes_.size(); }
  /// Smallest |input| seen by relu on this tape (distance to the kink).
  double relu_margin() const { return relu_margin_; }

  /// Seeds d(loss)/d(loss) = 1 and runs all backward closures.
  void backward(Var loss);

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    std::function<void()> back;
  };

  Var push(Mat value, bool needs_grad);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  Mat& g(Var v);

  std::vector<Node> nodes_;
  double relu_margin_ = std::numeric_limits<double>::infinity();
};

extern template class Tape<float>;
extern template class Tape<double>;

Matrix<float> softmax_cols(const Matrix<float>& logits);
Matrix<double> softmax_cols(const Matrix<double>& logits);

}  // namespace qasrl::nn

#endif  // QASRL_NN_TAPE_H_
