// Copyright 2026 The RDA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDA_CHECKPOINT_H_
#define RDA_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rda/tensor.h"

namespace rda {

inline constexpr uint32_t kCheckpointFormatVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor value;
};

// Versioned parameter container.
//
// Layout (all integers little-endian):
//   magic "RDACKPT\0" | u32 format_version | u64 seed
//   | u64 metadata length | metadata bytes (UTF-8 JSON)
//   | u32 tensor count
//   | per tensor: u32 name length, name, u64 rows, u64 cols
//   | per tensor: rows*cols float64 values, row-major
// Shapes all precede the data blocks. Identical content serialises to
// identical bytes.
struct Checkpoint {
  uint32_t format_version = kCheckpointFormatVersion;
  uint64_t seed = 0;
  std::string metadata;
  std::vector<NamedTensor> tensors;

  const Tensor& Get(const std::string& name) const;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint DeserializeCheckpoint(const std::string& bytes,
                                 const std::string& origin = "<memory>");

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

}  // namespace rda

#endif  // RDA_CHECKPOINT_H_
