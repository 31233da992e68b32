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

#include "rda/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rda/error.h"

namespace rda {
namespace {

constexpr char kMagic[8] = {'R', 'D', 'A', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void PutLe(std::string& out, T v) {
  static_assert(std::is_unsigned_v<T>);
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  template <typename T>
  T GetLe() {
    Need(sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  std::string GetBytes(size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(origin_ + ": checkpoint " + what + " at byte " +
                     std::to_string(pos_));
  }

 private:
  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) Fail("truncated");
  }

  const std::string& bytes_;
  const std::string& origin_;
  size_t pos_ = 0;
};

}  // namespace

const Tensor& Checkpoint::Get(const std::string& name) const {
  for (const NamedTensor& t : tensors) {
    if (t.name == name) return t.value;
  }
  throw DataError("checkpoint: no tensor named '" + name + "'");
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, sizeof(kMagic));
  PutLe<uint32_t>(out, ckpt.format_version);
  PutLe<uint64_t>(out, ckpt.seed);
  PutLe<uint64_t>(out, ckpt.metadata.size());
  out += ckpt.metadata;
  PutLe<uint32_t>(out, static_cast<uint32_t>(ckpt.tensors.size()));
  for (const NamedTensor& t : ckpt.tensors) {
    PutLe<uint32_t>(out, static_cast<uint32_t>(t.name.size()));
    out += t.name;
    PutLe<uint64_t>(out, static_cast<uint64_t>(t.value.rows()));
    PutLe<uint64_t>(out, static_cast<uint64_t>(t.value.cols()));
  }
  for (const NamedTensor& t : ckpt.tensors) {
    for (Eigen::Index i = 0; i < t.value.size(); ++i) {
      PutLe<uint64_t>(out, std::bit_cast<uint64_t>(t.value.data()[i]));
    }
  }
  return out;
}

Checkpoint DeserializeCheckpoint(const std::string& bytes,
                                 const std::string& origin) {
  Reader r(bytes, origin);
  if (r.GetBytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    r.Fail("bad magic");
  }
  Checkpoint ckpt;
  ckpt.format_version = r.GetLe<uint32_t>();
  if (ckpt.format_version != kCheckpointFormatVersion) {
    r.Fail("unsupported format version " +
           std::to_string(ckpt.format_version));
  }
  ckpt.seed = r.GetLe<uint64_t>();
  ckpt.metadata = r.GetBytes(r.GetLe<uint64_t>());
  const uint32_t count = r.GetLe<uint32_t>();
  for (uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.GetBytes(r.GetLe<uint32_t>());
    const uint64_t rows = r.GetLe<uint64_t>();
    const uint64_t cols = r.GetLe<uint64_t>();
    if (rows > (1ULL << 28) || cols > (1ULL << 28)) r.Fail("implausible shape");
    t.value.resize(static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
    ckpt.tensors.push_back(std::move(t));
  }
  for (NamedTensor& t : ckpt.tensors) {
    for (Eigen::Index i = 0; i < t.value.size(); ++i) {
      t.value.data()[i] = std::bit_cast<double>(r.GetLe<uint64_t>());
    }
  }
  if (!r.AtEnd()) r.Fail("trailing bytes");
  return ckpt;
}

void WriteCheckpoint(const std::filesystem::path& path,
                     const Checkpoint& ckpt) {
  const std::string bytes = SerializeCheckpoint(ckpt);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return DeserializeCheckpoint(ss.str(), path.string());
}

}  // namespace rda
