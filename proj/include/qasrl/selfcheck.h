// qasrl/selfcheck.h

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

#ifndef QASRL_SELFCHECK_H_
#define QASRL_SELFCHECK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "qasrl/corpus.h"
#include "qasrl/grammar.h"
#include "qasrl/nn/gradcheck.h"

namespace qasrl {

struct HeadGradCheck {
  std::string head;
  int checked = 0;           // instances compared (near-kink ones excluded)
  int passed = 0;
  int skipped_near_kink = 0;
  double max_relative_error = 0;
  std::string worst_parameter;

  bool ok(int required) const { return checked >= required && passed == checked; }
};

/// Names of the heads gradient_check_heads covers.
const std::vector<std::string>& trainable_heads();

/// Finite-difference checks in double precision on random micro-instances
/// (tiny sizes, random tokens, spans and grammatical questions) until
/// `instances` non-kink instances per head have been compared, or
/// 4 * instances attempts. `heads` empty means all of them.
std::vector<HeadGradCheck> gradient_check_heads(int instances, std::uint64_t seed, double tolerance = 1e-4,
                                                const std::vector<std::string>& heads = {});

/// A grammatical question drawn by walking the automaton with uniform
/// choices among the allowed values of each slot.
template <class URBG>
SlotCodes random_question(const Grammar& grammar, URBG& rng) {
  std::vector<int> prefix;
  while (prefix.size() < static_cast<std::size_t>(kNumSlots)) {
    const auto options = grammar.autocomplete(prefix);
    prefix.push_back(options[static_cast<std::size_t>(rng() % options.size())]);
  }
  SlotCodes codes{};
  std::copy(prefix.begin(), prefix.end(), codes.begin());
  return codes;
}

Json to_json(const HeadGradCheck& h);

}  // namespace qasrl

#endif  // QASRL_SELFCHECK_H_
