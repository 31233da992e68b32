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

#ifndef RDA_GRAPH_H_
#define RDA_GRAPH_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rda/tensor.h"

namespace rda {

// Handle to a node of a Graph.
struct Var {
  int id = -1;
};

// Define-by-run reverse-mode autodiff tape.
//
// Every builder method computes its node's value immediately, so building
// the graph *is* the forward pass. Nodes are appended in creation order,
// which is a topological order; Backward() walks it in reverse and visits
// each node once. Building never writes to a Parameter; Backward()
// accumulates into Parameter::grad, so parameters must outlive the graph.
//
// Broadcasting is limited to adding a 1 x n row to an m x n matrix.
class Graph {
 public:
  enum class Op {
    kInput,
    kParam,
    kGather,
    kMatMul,
    kAdd,
    kSub,
    kMul,
    kScale,
    kConcatCols,
    kConcatRows,
    kRow,
    kMeanRows,
    kSum,
    kSigmoid,
    kTanh,
    kLog,
    kDropout,
    kBceWithLogits,
    kPick,
    kRecurrent,
  };

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Input(Tensor value, std::string_view name = {});
  Var Param(Parameter& param);
  // Rows `rows` of `table` stacked into a rows.size() x cols matrix.
  Var Gather(Parameter& table, std::span<const int> rows);

  Var MatMul(Var a, Var b);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double factor);
  Var ConcatCols(std::span<const Var> parts);
  Var ConcatRows(std::span<const Var> parts);
  Var Row(Var a, int row);
  Var MeanRows(Var a);
  Var Sum(Var a);
  Var Sigmoid(Var a);
  Var Tanh(Var a);
  Var Log(Var a);
  // Elementwise product with a constant mask (inverted dropout scaling is
  // baked into the mask by the caller).
  Var Dropout(Var a, Tensor mask);
  // Sum over elements of the numerically stable binary cross-entropy of
  // sigmoid(logits) against `targets`.
  Var BceWithLogits(Var logits, Tensor targets);
  Var Pick(Var a, int row, int col);
  // Elman recurrence over the rows of `inputs` (n x h):
  // h_t = tanh(inputs_t + h_{t-1} * weight), h_{-1} = 0, visiting rows
  // last-to-first when `reverse`. Returns the n x h states in row order.
  Var Recurrent(Var inputs, Var weight, bool reverse);

  const Tensor& Value(Var v) const;
  // Gradient of the last Backward() loss w.r.t. a node; empty if the node
  // was unreachable.
  const Tensor& Grad(Var v) const;

  // Reverse pass from a 1 x 1 loss node.
  void Backward(Var loss);

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Op op = Op::kInput;
    std::string name;
    int a = -1;
    int b = -1;
    std::vector<int> parents;
    std::vector<int> indices;
    Tensor value;
    Tensor grad;
    Tensor aux;
    Parameter* param = nullptr;
    double scalar = 0.0;
  };

  const Node& node(Var v) const;
  Var Push(Node n);
  [[noreturn]] void ShapeFail(std::string_view op, const std::string& detail)
      const;

  std::vector<Node> nodes_;
};

std::string_view OpName(Graph::Op op);

}  // namespace rda

#endif  // RDA_GRAPH_H_
