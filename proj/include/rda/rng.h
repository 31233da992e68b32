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

#ifndef RDA_RNG_H_
#define RDA_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rda {

// Seeded 64-bit generator with named, independent substreams.
//
// A substream's seed is a hash of (parent seed, name, index) and never
// depends on how many draws the parent has made, so "policy-init" of epoch
// 3 is the same sequence no matter what ran before it.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0);

  Rng Substream(std::string_view name, uint64_t index = 0) const;

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform in [0, n). n must be positive.
  uint64_t UniformIndex(uint64_t n);
  bool Bernoulli(double p) { return Uniform() < p; }
  // Index drawn from an unnormalised nonnegative weight vector.
  size_t Categorical(const std::vector<double>& weights);
  // k distinct indices from [0, n), returned in ascending order.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

uint64_t SplitMix64(uint64_t x);
uint64_t Fnv1a64(std::string_view s);

}  // namespace rda

#endif  // RDA_RNG_H_
