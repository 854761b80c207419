// qasrl/src/nn/checkpoint.cc

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

#include "qasrl/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "qasrl/error.h"

namespace qasrl::nn {

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'R', 'L', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

template <class U>
void write_raw(std::ostream& out, U v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(U));
}

template <class U>
U read_raw(std::istream& in, const std::string& what) {
  U v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(U)))
    throw ValidationError("truncated checkpoint (" + what + ")");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, p] : ckpt.params) {
    tensors.push_back({{"name", name}, {"shape", {p.value.rows(), p.value.cols()}}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(p.value.size()) * sizeof(float);
  }
  const nlohmann::ordered_json manifest{{"formatVersion", kCheckpointVersion},
                                        {"kind", ckpt.kind},
                                        {"hyperparameters", ckpt.hyperparameters},
                                        {"vocabulary", ckpt.vocabulary},
                                        {"tensors", tensors}};
  const std::string text = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_raw<std::uint32_t>(out, kCheckpointVersion);
  write_raw<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, p] : ckpt.params) {
    // row-major payload
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = p.value;
    out.write(reinterpret_cast<const char*>(rm.data()),
              static_cast<std::streamsize>(rm.size() * sizeof(float)));
  }
  if (!out) throw ValidationError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ValidationError(path.string() + " is not a checkpoint file");
  const auto version = read_raw<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion)
    throw ValidationError("unsupported checkpoint version " + std::to_string(version));
  const auto length = read_raw<std::uint64_t>(in, "manifest length");
  if (length > (1ull << 32)) throw ValidationError("implausible checkpoint manifest length");
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length)))
    throw ValidationError("truncated checkpoint (manifest)");
  nlohmann::ordered_json manifest;
  try {
    manifest = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad checkpoint manifest: ") + e.what());
  }
  const std::streamoff payload_start = in.tellg();
  Checkpoint ckpt;
  try {
    ckpt.kind = manifest.at("kind").get<std::string>();
    ckpt.hyperparameters = manifest.at("hyperparameters");
    ckpt.vocabulary = manifest.at("vocabulary");
    for (const auto& t : manifest.at("tensors")) {
      const auto name = t.at("name").get<std::string>();
      const int rows = t.at("shape").at(0).get<int>();
      const int cols = t.at("shape").at(1).get<int>();
      const auto offset = t.at("offset").get<std::uint64_t>();
      if (rows < 0 || cols < 0) throw ValidationError("negative tensor shape for " + name);
      Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
      in.seekg(payload_start + static_cast<std::streamoff>(offset));
      if (!in.read(reinterpret_cast<char*>(rm.data()),
                   static_cast<std::streamsize>(rm.size() * sizeof(float))))
        throw ValidationError("truncated checkpoint (tensor " + name + ")");
      ckpt.params.add(name, rows, cols).value = rm;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad checkpoint manifest: ") + e.what());
  }
  return ckpt;
}

}  // namespace qasrl::nn
