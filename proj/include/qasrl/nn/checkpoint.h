// qasrl/nn/checkpoint.h

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

#ifndef QASRL_NN_CHECKPOINT_H_
#define QASRL_NN_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qasrl/nn/params.h"

namespace qasrl::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// A trained model on disk: a JSON manifest (model kind, hyperparameters,
/// vocabulary, tensor table) followed by float32 payloads. See
/// docs/checkpoint-format.md.
struct Checkpoint {
  std::string kind;
  nlohmann::ordered_json hyperparameters;
  nlohmann::ordered_json vocabulary;
  ParameterSet<float> params;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws ValidationError on a malformed or truncated file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qasrl::nn

#endif  // QASRL_NN_CHECKPOINT_H_
