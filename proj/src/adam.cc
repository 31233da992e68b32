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

#include "rda/adam.h"

#include <cmath>
#include <string>

#include "rda/error.h"

namespace rda {

double GradientNorm(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

void Adam::Step(std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    if (!p->grad.allFinite()) {
      throw NonFiniteError("adam: gradient of '" + p->name +
                           "' is not finite at step " +
                           std::to_string(step_ + 1));
    }
  }
  if (m_.empty()) {
    for (const Parameter* p : params) {
      m_.push_back(Tensor::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Tensor::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (m_.size() != params.size()) {
    throw ShapeError("adam: expected " + std::to_string(m_.size()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (m_[i].rows() != params[i]->value.rows() ||
        m_[i].cols() != params[i]->value.cols()) {
      throw ShapeError("adam: moment shape " + ShapeString(m_[i]) +
                       " does not match '" + params[i]->name + "' " +
                       ShapeString(params[i]->value));
    }
  }

  double scale = 1.0;
  if (options_.clip_norm > 0.0) {
    const double norm = GradientNorm(params);
    if (norm > options_.clip_norm) scale = options_.clip_norm / norm;
  }

  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = options_.learning_rate;
  const double eps = options_.epsilon;
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    auto g = (p.grad * scale).array();
    m_[i].array() = b1 * m_[i].array() + (1.0 - b1) * g;
    v_[i].array() = b2 * v_[i].array() + (1.0 - b2) * g.square();
    p.value.array() -=
        lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
    if (!p.value.allFinite()) {
      throw NonFiniteError("adam: parameter '" + p.name +
                           "' became non-finite at step " +
                           std::to_string(step_));
    }
  }
}

}  // namespace rda
