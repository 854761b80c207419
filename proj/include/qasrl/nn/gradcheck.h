// qasrl/nn/gradcheck.h

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

#ifndef QASRL_NN_GRADCHECK_H_
#define QASRL_NN_GRADCHECK_H_

#include <functional>
#include <string>

#include "qasrl/nn/tape.h"

namespace qasrl::nn {

struct GradCheckReport {
  double max_relative_error = 0;
  std::string worst_parameter;
  std::size_t entries_checked = 0;
  /// Closest relu input to zero; finite differences are meaningless when
  /// this is within the step size.
  double relu_margin = 0;
  /// relu_margin is below twice the step: the result says nothing about
  /// the analytic gradient.
  bool near_kink = false;

  bool passed(double tolerance) const { return max_relative_error < tolerance; }
};

struct GradCheckOptions {
  double step = 1e-5;
  /// Denominator floor: |a - n| / max(|a| + |n|, floor). Below it the
  /// comparison is effectively absolute, since finite differences of a sum
  /// over many terms carry round-off of roughly 1e-10.
  double floor = 1e-5;
  /// Entries per parameter tensor (0 = all); chosen with a fixed stride.
  std::size_t max_entries_per_parameter = 0;
};

/// Compares tape gradients of a deterministic scalar loss with central
/// finite differences. Throws std::runtime_error on a non-finite loss.
GradCheckReport gradient_check(ParameterSet<double>& ps,
                               const std::function<Var(Tape<double>&)>& loss,
                               const GradCheckOptions& options = {});

}  // namespace qasrl::nn

#endif  // QASRL_NN_GRADCHECK_H_
