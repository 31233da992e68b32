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

#ifndef RDA_TENSOR_H_
#define RDA_TENSOR_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rda {

// Dense 2-D float64 tensor, row-major. Vectors are 1 x n rows.
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

// A trainable tensor with its gradient accumulator.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(name)),
        value(Tensor::Zero(rows, cols)),
        grad(Tensor::Zero(rows, cols)) {}

  void ZeroGrad() { grad.setZero(value.rows(), value.cols()); }

  std::string name;
  Tensor value;
  Tensor grad;
};

inline bool AllFinite(const Tensor& t) { return t.allFinite(); }

inline std::string ShapeString(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

}  // namespace rda

#endif  // RDA_TENSOR_H_
