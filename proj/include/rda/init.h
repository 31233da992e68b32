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

#ifndef RDA_INIT_H_
#define RDA_INIT_H_

#include "rda/rng.h"
#include "rda/tensor.h"

namespace rda {

void UniformInit(Tensor& t, double limit, Rng& rng);
// Glorot/Xavier uniform: limit = sqrt(6 / (fan_in + fan_out)), with
// fan_in = rows and fan_out = cols.
void XavierUniformInit(Tensor& t, Rng& rng);

// Inverted-dropout mask: each entry is 0 with probability `rate`, else
// 1 / (1 - rate).
Tensor DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

}  // namespace rda

#endif  // RDA_INIT_H_
