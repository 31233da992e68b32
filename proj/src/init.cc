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

#include "rda/init.h"

#include <cmath>

namespace rda {

void UniformInit(Tensor& t, double limit, Rng& rng) {
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    t.data()[i] = rng.Uniform(-limit, limit);
  }
}

void XavierUniformInit(Tensor& t, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
  UniformInit(t, limit, rng);
}

Tensor DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate,
                   Rng& rng) {
  Tensor mask(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.Bernoulli(rate) ? 0.0 : keep;
  }
  return mask;
}

}  // namespace rda
