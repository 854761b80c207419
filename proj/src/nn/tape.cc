// qasrl/src/nn/tape.cc

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

#include "qasrl/nn/tape.h"

#include <cmath>

namespace qasrl::nn {

namespace {

template <class T>
void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(std::string("dimension mismatch in ") + what);
}

template <class T>
Matrix<T> softmax_cols_impl(const Matrix<T>& logits) {
  Matrix<T> out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const T m = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - m).exp().matrix();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

}  // namespace

Matrix<float> softmax_cols(const Matrix<float>& logits) { return softmax_cols_impl(logits); }
Matrix<double> softmax_cols(const Matrix<double>& logits) { return softmax_cols_impl(logits); }

template <class T>
Var Tape<T>::push(Mat value, bool needs_grad) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

template <class T>
typename Tape<T>::Mat& Tape<T>::g(Var v) {
  auto& n = nodes_[v.id];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

template <class T>
Var Tape<T>::input(Mat value) {
  return push(std::move(value), false);
}

template <class T>
Var Tape<T>::param(Parameter<T>& p) {
  Var v = push(p.value, true);
  nodes_[v.id].back = [this, v, &p] { p.grad += nodes_[v.id].grad; };
  return v;
}

template <class T>
Var Tape<T>::lookup(Parameter<T>& table, std::span<const int> ids) {
  Mat out(table.value.rows(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) {
    require<T>(ids[j] >= 0 && ids[j] < table.value.cols(), "lookup");
    out.col(static_cast<Eigen::Index>(j)) = table.value.col(ids[j]);
  }
  Var v = push(std::move(out), true);
  std::vector<int> idx(ids.begin(), ids.end());
  nodes_[v.id].back = [this, v, &table, idx = std::move(idx)] {
    const auto& gr = nodes_[v.id].grad;
    for (std::size_t j = 0; j < idx.size(); ++j)
      table.grad.col(idx[j]) += gr.col(static_cast<Eigen::Index>(j));
  };
  return v;
}

template <class T>
Var Tape<T>::matmul(Var a, Var b) {
  require<T>(value(a).cols() == value(b).rows(), "matmul");
  Var v = push(value(a) * value(b), needs(a) || needs(b));
  nodes_[v.id].back = [this, v, a, b] {
    const auto& gr = nodes_[v.id].grad;
    if (needs(a)) g(a).noalias() += gr * nodes_[b.id].value.transpose();
    if (needs(b)) g(b).noalias() += nodes_[a.id].value.transpose() * gr;
  };
  return v;
}

template <class T>
Var Tape<T>::add(Var a, Var b) {
  require<T>(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "add");
  Var v = push(value(a) + value(b), needs(a) || needs(b));
  nodes_[v.id].back = [this, v, a, b] {
    const auto& gr = nodes_[v.id].grad;
    if (needs(a)) g(a) += gr;
    if (needs(b)) g(b) += gr;
  };
  return v;
}

template <class T>
Var Tape<T>::sub(Var a, Var b) {
  require<T>(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "sub");
  Var v = push(value(a) - value(b), needs(a) || needs(b));
  nodes_[v.id].back = [this, v, a, b] {
    const auto& gr = nodes_[v.id].grad;
    if (needs(a)) g(a) += gr;
    if (needs(b)) g(b) -= gr;
  };
  return v;
}

template <class T>
Var Tape<T>::add_col(Var a, Var bias) {
  require<T>(value(bias).cols() == 1 && value(bias).rows() == value(a).rows(), "add_col");
  Mat out = value(a);
  out.colwise() += value(bias).col(0);
  Var v = push(std::move(out), needs(a) || needs(bias));
  nodes_[v.id].back = [this, v, a, bias] {
    const auto& gr = nodes_[v.id].grad;
    if (needs(a)) g(a) += gr;
    if (needs(bias)) g(bias) += gr.rowwise().sum();
  };
  return v;
}

template <class T>
Var Tape<T>::mul(Var a, Var b) {
  require<T>(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "mul");
  Var v = push(value(a).cwiseProduct(value(b)), needs(a) || needs(b));
  nodes_[v.id].back = [this, v, a, b] {
    const auto& gr = nodes_[v.id].grad;
    if (needs(a)) g(a) += gr.cwiseProduct(nodes_[b.id].value);
    if (needs(b)) g(b) += gr.cwiseProduct(nodes_[a.id].value);
  };
  return v;
}

template <class T>
Var Tape<T>::mask(Var a, const Mat& m) {
  require<T>(value(a).rows() == m.rows() && value(a).cols() == m.cols(), "mask");
  Var v = push(value(a).cwiseProduct(m), needs(a));
  nodes_[v.id].back = [this, v, a, m] {
    if (needs(a)) g(a) += nodes_[v.id].grad.cwiseProduct(m);
  };
  return v;
}

template <class T>
Var Tape<T>::scale(Var a, T s) {
  Var v = push(value(a) * s, needs(a));
  nodes_[v.id].back = [this, v, a, s] {
    if (needs(a)) g(a) += nodes_[v.id].grad * s;
  };
  return v;
}

template <class T>
Var Tape<T>::sigmoid(Var a) {
  Mat out = value(a).unaryExpr([](T x) { return T(1) / (T(1) + std::exp(-x)); });
  Var v = push(std::move(out), needs(a));
  nodes_[v.id].back = [this, v, a] {
    const auto& y = nodes_[v.id].value;
    g(a) += nodes_[v.id].grad.cwiseProduct(y.cwiseProduct((T(1) - y.array()).matrix()));
  };
  return v;
}

template <class T>
Var Tape<T>::tanh(Var a) {
  Var v = push(value(a).array().tanh().matrix(), needs(a));
  nodes_[v.id].back = [this, v, a] {
    const auto& y = nodes_[v.id].value;
    g(a) += nodes_[v.id].grad.cwiseProduct((T(1) - y.array().square()).matrix());
  };
  return v;
}

template <class T>
Var Tape<T>::relu(Var a) {
  if (value(a).size() > 0)
    relu_margin_ = std::min(relu_margin_, static_cast<double>(value(a).cwiseAbs().minCoeff()));
  Var v = push(value(a).cwiseMax(T(0)), needs(a));
  nodes_[v.id].back = [this, v, a] {
    const auto& x = nodes_[a.id].value;
    g(a) += (x.array() > T(0)).select(nodes_[v.id].grad, T(0)).matrix();
  };
  return v;
}

template <class T>
Var Tape<T>::one_minus(Var a) {
  Var v = push((T(1) - value(a).array()).matrix(), needs(a));
  nodes_[v.id].back = [this, v, a] { g(a) -= nodes_[v.id].grad; };
  return v;
}

template <class T>
Var Tape<T>::rows(Var a, int start, int count) {
  require<T>(start >= 0 && count >= 0 && start + count <= value(a).rows(), "rows");
  Var v = push(value(a).middleRows(start, count), needs(a));
  nodes_[v.id].back = [this, v, a, start, count] {
    g(a).middleRows(start, count) += nodes_[v.id].grad;
  };
  return v;
}

template <class T>
Var Tape<T>::cols(Var a, int start, int count) {
  require<T>(start >= 0 && count >= 0 && start + count <= value(a).cols(), "cols");
  Var v = push(value(a).middleCols(start, count), needs(a));
  nodes_[v.id].back = [this, v, a, start, count] {
    g(a).middleCols(start, count) += nodes_[v.id].grad;
  };
  return v;
}

template <class T>
Var Tape<T>::concat_rows(std::span<const Var> parts) {
  require<T>(!parts.empty(), "concat_rows");
  Eigen::Index r = 0;
  const Eigen::Index c = value(parts[0]).cols();
  bool ng = false;
  for (Var p : parts) {
    require<T>(value(p).cols() == c, "concat_rows");
    r += value(p).rows();
    ng = ng || needs(p);
  }
  Mat out(r, c);
  r = 0;
  for (Var p : parts) {
    out.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  Var v = push(std::move(out), ng);
  std::vector<Var> ps(parts.begin(), parts.end());
  nodes_[v.id].back = [this, v, ps = std::move(ps)] {
    Eigen::Index off = 0;
    for (Var p : ps) {
      const auto n = nodes_[p.id].value.rows();
      if (needs(p)) g(p) += nodes_[v.id].grad.middleRows(off, n);
      off += n;
    }
  };
  return v;
}

template <class T>
Var Tape<T>::concat_cols(std::span<const Var> parts) {
  require<T>(!parts.empty(), "concat_cols");
  const Eigen::Index r = value(parts[0]).rows();
  Eigen::Index c = 0;
  bool ng = false;
  for (Var p : parts) {
    require<T>(value(p).rows() == r, "concat_cols");
    c += value(p).cols();
    ng = ng || needs(p);
  }
  Mat out(r, c);
  c = 0;
  for (Var p : parts) {
    out.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
  }
  Var v = push(std::move(out), ng);
  std::vector<Var> ps(parts.begin(), parts.end());
  nodes_[v.id].back = [this, v, ps = std::move(ps)] {
    Eigen::Index off = 0;
    for (Var p : ps) {
      const auto n = nodes_[p.id].value.cols();
      if (needs(p)) g(p) += nodes_[v.id].grad.middleCols(off, n);
      off += n;
    }
  };
  return v;
}

template <class T>
Var Tape<T>::gather_cols(Var a, std::span<const int> index) {
  const Mat& x = value(a);
  Mat out(x.rows(), static_cast<Eigen::Index>(index.size()));
  for (std::size_t j = 0; j < index.size(); ++j) {
    require<T>(index[j] >= 0 && index[j] < x.cols(), "gather_cols");
    out.col(static_cast<Eigen::Index>(j)) = x.col(index[j]);
  }
  Var v = push(std::move(out), needs(a));
  std::vector<int> idx(index.begin(), index.end());
  nodes_[v.id].back = [this, v, a, idx = std::move(idx)] {
    auto& ga = g(a);
    const auto& gr = nodes_[v.id].grad;
    for (std::size_t j = 0; j < idx.size(); ++j) ga.col(idx[j]) += gr.col(static_cast<Eigen::Index>(j));
  };
  return v;
}

template <class T>
Var Tape<T>::broadcast_cols(Var a, int n) {
  require<T>(value(a).cols() == 1, "broadcast_cols");
  Var v = push(value(a).replicate(1, n), needs(a));
  nodes_[v.id].back = [this, v, a] { g(a) += nodes_[v.id].grad.rowwise().sum(); };
  return v;
}

template <class T>
Var Tape<T>::sum(Var a) {
  Mat out(1, 1);
  out(0, 0) = value(a).sum();
  Var v = push(std::move(out), needs(a));
  nodes_[v.id].back = [this, v, a] { g(a).array() += nodes_[v.id].grad(0, 0); };
  return v;
}

template <class T>
Var Tape<T>::softmax_xent(Var logits, std::span<const int> targets) {
  const Mat& z = value(logits);
  require<T>(static_cast<std::size_t>(z.cols()) == targets.size(), "softmax_xent");
  Mat p = softmax_cols_impl(z);
  T loss = 0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    require<T>(targets[j] >= 0 && targets[j] < z.rows(), "softmax_xent target");
    const auto c = static_cast<Eigen::Index>(j);
    const T m = z.col(c).maxCoeff();
    const T lse = m + std::log((z.col(c).array() - m).exp().sum());
    loss += lse - z(targets[j], c);
  }
  Mat out(1, 1);
  out(0, 0) = loss;
  Var v = push(std::move(out), needs(logits));
  std::vector<int> t(targets.begin(), targets.end());
  nodes_[v.id].back = [this, v, logits, p = std::move(p), t = std::move(t)] {
    Mat d = p;
    for (std::size_t j = 0; j < t.size(); ++j) d(t[j], static_cast<Eigen::Index>(j)) -= T(1);
    g(logits) += d * nodes_[v.id].grad(0, 0);
  };
  return v;
}

template <class T>
Var Tape<T>::bce_logits(Var logits, std::span<const T> targets) {
  const Mat& z = value(logits);
  require<T>(static_cast<std::size_t>(z.size()) == targets.size(), "bce_logits");
  Mat d(z.rows(), z.cols());
  T loss = 0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const T x = z(k);
    const T y = targets[static_cast<std::size_t>(k)];
    // log(1 + exp(-|x|)) + max(x, 0) - x y
    loss += std::log1p(std::exp(-std::abs(x))) + std::max(x, T(0)) - x * y;
    d(k) = T(1) / (T(1) + std::exp(-x)) - y;
  }
  Mat out(1, 1);
  out(0, 0) = loss;
  Var v = push(std::move(out), needs(logits));
  nodes_[v.id].back = [this, v, logits, d = std::move(d)] { g(logits) += d * nodes_[v.id].grad(0, 0); };
  return v;
}

template <class T>
void Tape<T>::backward(Var loss) {
  require<T>(value(loss).size() == 1, "backward (loss must be scalar)");
  g(loss).setOnes();
  for (int i = loss.id; i >= 0; --i) {
    auto& n = nodes_[i];
    if (!n.needs_grad || n.grad.size() == 0 || !n.back) continue;
    n.back();
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace qasrl::nn
