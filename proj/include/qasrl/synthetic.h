// qasrl/synthetic.h

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

#ifndef QASRL_SYNTHETIC_H_
#define QASRL_SYNTHETIC_H_

#include <cstdint>

#include "qasrl/corpus.h"

namespace qasrl {

/// Template sentences "<subject> <verb> <object> [<place>] [<time>] ." with
/// one annotated verb each and rule-determined QA pairs: who (subject), what
/// (object), where (place phrase) and when (time phrase). Every QA pair has
/// a writer and two validators agreeing on the same span.
Corpus synthetic_corpus(int sentences, std::uint64_t seed);

}  // namespace qasrl

#endif  // QASRL_SYNTHETIC_H_
