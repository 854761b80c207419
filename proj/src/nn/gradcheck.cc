// qasrl/src/nn/gradcheck.cc

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

#include "qasrl/nn/gradcheck.h"

#include <cmath>
#include <stdexcept>

namespace qasrl::nn {

namespace {

double eval(ParameterSet<double>& ps, const std::function<Var(Tape<double>&)>& loss) {
  Tape<double> tape;
  const double v = tape.scalar(loss(tape));
  if (!std::isfinite(v)) throw std::runtime_error("non-finite loss during gradient check");
  (void)ps;
  return v;
}

}  // namespace

GradCheckReport gradient_check(ParameterSet<double>& ps,
                               const std::function<Var(Tape<double>&)>& loss,
                               const GradCheckOptions& options) {
  ps.zero_grad();
  double margin = 0;
  {
    Tape<double> tape;
    const Var l = loss(tape);
    if (!std::isfinite(tape.scalar(l))) throw std::runtime_error("non-finite loss during gradient check");
    tape.backward(l);
    margin = tape.relu_margin();
  }
  GradCheckReport report;
  report.relu_margin = margin;
  report.near_kink = margin < 2 * options.step;
  for (auto& [name, p] : ps) {
    const auto n = static_cast<std::size_t>(p.value.size());
    std::size_t stride = 1;
    if (options.max_entries_per_parameter > 0 && n > options.max_entries_per_parameter)
      stride = (n + options.max_entries_per_parameter - 1) / options.max_entries_per_parameter;
    for (std::size_t k = 0; k < n; k += stride) {
      double& x = p.value.data()[k];
      const double saved = x;
      x = saved + options.step;
      const double up = eval(ps, loss);
      x = saved - options.step;
      const double down = eval(ps, loss);
      x = saved;
      const double numeric = (up - down) / (2 * options.step);
      const double analytic = p.grad.data()[k];
      const double err =
          std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), options.floor);
      ++report.entries_checked;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_parameter = name + "[" + std::to_string(k) + "]";
      }
    }
  }
  return report;
}

}  // namespace qasrl::nn
