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

#ifndef RDA_ADAM_H_
#define RDA_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rda/tensor.h"

namespace rda {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global L2 norm the gradients are clipped to before each step; <= 0
  // disables clipping.
  double clip_norm = 5.0;
};

// ADAM with bias correction. Moments are bound to the parameter list seen
// on the first Step(); later calls must pass parameters of the same shapes
// in the same order.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // Throws NonFiniteError (leaving every parameter untouched) if any
  // gradient is NaN/Inf, and if an update produces a non-finite value.
  void Step(std::span<Parameter* const> params);

  int64_t step_count() const { return step_; }
  const AdamOptions& options() const { return options_; }

 private:
  AdamOptions options_;
  int64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

// Global L2 norm over all gradients.
double GradientNorm(std::span<Parameter* const> params);

}  // namespace rda

#endif  // RDA_ADAM_H_
