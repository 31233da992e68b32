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

#include "rda/graph.h"

#include <cmath>
#include <string>
#include <utility>

#include "rda/error.h"

namespace rda {

std::string_view OpName(Graph::Op op) {
  switch (op) {
    case Graph::Op::kInput: return "input";
    case Graph::Op::kParam: return "param";
    case Graph::Op::kGather: return "gather";
    case Graph::Op::kMatMul: return "matmul";
    case Graph::Op::kAdd: return "add";
    case Graph::Op::kSub: return "sub";
    case Graph::Op::kMul: return "mul";
    case Graph::Op::kScale: return "scale";
    case Graph::Op::kConcatCols: return "concat_cols";
    case Graph::Op::kConcatRows: return "concat_rows";
    case Graph::Op::kRow: return "row";
    case Graph::Op::kMeanRows: return "mean_rows";
    case Graph::Op::kSum: return "sum";
    case Graph::Op::kSigmoid: return "sigmoid";
    case Graph::Op::kTanh: return "tanh";
    case Graph::Op::kLog: return "log";
    case Graph::Op::kDropout: return "dropout";
    case Graph::Op::kBceWithLogits: return "bce_with_logits";
    case Graph::Op::kPick: return "pick";
    case Graph::Op::kRecurrent: return "recurrent";
  }
  return "?";
}

namespace {

double StableSigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// tanh through the vectorised exp; std::tanh is scalar and dominated the
// encoder's run time.
// out = x * y, routing single-row and single-column operands to
// matrix-vector kernels; the general kernel packs its operands on every
// call, which is wasted work for a vector.
template <typename X, typename Y>
void MultiplyInto(const X& x, const Y& y, Tensor& out) {
  out.resize(x.rows(), y.cols());
  if (x.rows() == 1 && y.cols() == 1) {
    out(0, 0) = x.row(0).dot(y.col(0));
  } else if (x.rows() == 1) {
    out.row(0).noalias() = x.row(0) * y;
  } else if (y.cols() == 1) {
    out.col(0).noalias() = x * y.col(0);
  } else if (x.cols() == 1) {
    out.noalias() = x.col(0) * y.row(0);
  } else {
    out.noalias() = x * y;
  }
}

template <typename Derived>
auto FastTanh(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 - 2.0 / ((2.0 * x).exp() + 1.0);
}

}  // namespace

const Graph::Node& Graph::node(Var v) const {
  if (v.id < 0 || v.id >= size()) {
    throw ShapeError("graph: invalid node handle " + std::to_string(v.id));
  }
  return nodes_[v.id];
}

const Tensor& Graph::Value(Var v) const {
  const Node& n = node(v);
  return n.op == Op::kParam ? n.param->value : n.value;
}

const Tensor& Graph::Grad(Var v) const { return node(v).grad; }

void Graph::ShapeFail(std::string_view op, const std::string& detail) const {
  throw ShapeError(std::string(op) + " node #" + std::to_string(size()) +
                   ": " + detail);
}

Var Graph::Push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{size() - 1};
}

Var Graph::Input(Tensor value, std::string_view name) {
  Node n;
  n.op = Op::kInput;
  n.name = std::string(name);
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Graph::Param(Parameter& param) {
  Node n;
  n.op = Op::kParam;
  n.name = param.name;
  n.param = &param;
  return Push(std::move(n));
}

Var Graph::Gather(Parameter& table, std::span<const int> rows) {
  Node n;
  n.op = Op::kGather;
  n.name = table.name;
  n.param = &table;
  n.indices.assign(rows.begin(), rows.end());
  n.value.resize(static_cast<Eigen::Index>(rows.size()), table.value.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= table.value.rows()) {
      ShapeFail("gather", "row " + std::to_string(rows[i]) +
                              " out of range for '" + table.name + "' " +
                              ShapeString(table.value));
    }
    n.value.row(static_cast<Eigen::Index>(i)) = table.value.row(rows[i]);
  }
  return Push(std::move(n));
}

Var Graph::MatMul(Var a, Var b) {
  const Tensor& x = Value(a);
  const Tensor& y = Value(b);
  if (x.cols() != y.rows()) {
    ShapeFail("matmul", ShapeString(x) + " * " + ShapeString(y));
  }
  Node n;
  n.op = Op::kMatMul;
  n.a = a.id;
  n.b = b.id;
  MultiplyInto(x, y, n.value);
  return Push(std::move(n));
}

Var Graph::Add(Var a, Var b) {
  const Tensor& x = Value(a);
  const Tensor& y = Value(b);
  Node n;
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  if (x.rows() == y.rows() && x.cols() == y.cols()) {
    n.value = x + y;
  } else if (y.rows() == 1 && x.cols() == y.cols()) {
    n.value = x.rowwise() + y.row(0);
  } else {
    ShapeFail("add", ShapeString(x) + " + " + ShapeString(y));
  }
  return Push(std::move(n));
}

Var Graph::Sub(Var a, Var b) {
  const Tensor& x = Value(a);
  const Tensor& y = Value(b);
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    ShapeFail("sub", ShapeString(x) + " - " + ShapeString(y));
  }
  Node n;
  n.op = Op::kSub;
  n.a = a.id;
  n.b = b.id;
  n.value = x - y;
  return Push(std::move(n));
}

Var Graph::Mul(Var a, Var b) {
  const Tensor& x = Value(a);
  const Tensor& y = Value(b);
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    ShapeFail("mul", ShapeString(x) + " o " + ShapeString(y));
  }
  Node n;
  n.op = Op::kMul;
  n.a = a.id;
  n.b = b.id;
  n.value = x.cwiseProduct(y);
  return Push(std::move(n));
}

Var Graph::Scale(Var a, double factor) {
  Node n;
  n.op = Op::kScale;
  n.a = a.id;
  n.scalar = factor;
  n.value = Value(a) * factor;
  return Push(std::move(n));
}

Var Graph::ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) ShapeFail("concat_cols", "no operands");
  const Eigen::Index rows = Value(parts[0]).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    if (Value(p).rows() != rows) {
      ShapeFail("concat_cols", "row mismatch " + ShapeString(Value(p)) +
                                   " vs " + std::to_string(rows) + " rows");
    }
    cols += Value(p).cols();
  }
  Node n;
  n.op = Op::kConcatCols;
  n.value.resize(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    const Tensor& v = Value(p);
    n.value.middleCols(at, v.cols()) = v;
    at += v.cols();
    n.parents.push_back(p.id);
  }
  return Push(std::move(n));
}

Var Graph::ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) ShapeFail("concat_rows", "no operands");
  const Eigen::Index cols = Value(parts[0]).cols();
  Eigen::Index rows = 0;
  for (Var p : parts) {
    if (Value(p).cols() != cols) {
      ShapeFail("concat_rows", "column mismatch " + ShapeString(Value(p)) +
                                   " vs " + std::to_string(cols) + " cols");
    }
    rows += Value(p).rows();
  }
  Node n;
  n.op = Op::kConcatRows;
  n.value.resize(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    const Tensor& v = Value(p);
    n.value.middleRows(at, v.rows()) = v;
    at += v.rows();
    n.parents.push_back(p.id);
  }
  return Push(std::move(n));
}

Var Graph::Row(Var a, int row) {
  const Tensor& x = Value(a);
  if (row < 0 || row >= x.rows()) {
    ShapeFail("row", "index " + std::to_string(row) + " of " + ShapeString(x));
  }
  Node n;
  n.op = Op::kRow;
  n.a = a.id;
  n.indices = {row};
  n.value = x.row(row);
  return Push(std::move(n));
}

Var Graph::MeanRows(Var a) {
  const Tensor& x = Value(a);
  if (x.rows() == 0) ShapeFail("mean_rows", "empty operand");
  Node n;
  n.op = Op::kMeanRows;
  n.a = a.id;
  n.value = x.colwise().mean();
  return Push(std::move(n));
}

Var Graph::Sum(Var a) {
  Node n;
  n.op = Op::kSum;
  n.a = a.id;
  n.value = Tensor::Constant(1, 1, Value(a).sum());
  return Push(std::move(n));
}

Var Graph::Sigmoid(Var a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a.id;
  n.value = Value(a).unaryExpr([](double z) { return StableSigmoid(z); });
  return Push(std::move(n));
}

Var Graph::Tanh(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a.id;
  n.value = FastTanh(Value(a).array()).matrix();
  return Push(std::move(n));
}

Var Graph::Log(Var a) {
  Node n;
  n.op = Op::kLog;
  n.a = a.id;
  n.value = Value(a).array().log().matrix();
  return Push(std::move(n));
}

Var Graph::Dropout(Var a, Tensor mask) {
  const Tensor& x = Value(a);
  if (mask.rows() != x.rows() || mask.cols() != x.cols()) {
    ShapeFail("dropout", "mask " + ShapeString(mask) + " vs " + ShapeString(x));
  }
  Node n;
  n.op = Op::kDropout;
  n.a = a.id;
  n.value = x.cwiseProduct(mask);
  n.aux = std::move(mask);
  return Push(std::move(n));
}

Var Graph::BceWithLogits(Var logits, Tensor targets) {
  const Tensor& z = Value(logits);
  if (targets.rows() != z.rows() || targets.cols() != z.cols()) {
    ShapeFail("bce_with_logits",
              "targets " + ShapeString(targets) + " vs " + ShapeString(z));
  }
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double x = z.data()[i];
    const double t = targets.data()[i];
    loss += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
  }
  Node n;
  n.op = Op::kBceWithLogits;
  n.a = logits.id;
  n.aux = std::move(targets);
  n.value = Tensor::Constant(1, 1, loss);
  return Push(std::move(n));
}

Var Graph::Pick(Var a, int row, int col) {
  const Tensor& x = Value(a);
  if (row < 0 || row >= x.rows() || col < 0 || col >= x.cols()) {
    ShapeFail("pick", "(" + std::to_string(row) + "," + std::to_string(col) +
                          ") of " + ShapeString(x));
  }
  Node n;
  n.op = Op::kPick;
  n.a = a.id;
  n.indices = {row, col};
  n.value = Tensor::Constant(1, 1, x(row, col));
  return Push(std::move(n));
}

Var Graph::Recurrent(Var inputs, Var weight, bool reverse) {
  const Tensor& x = Value(inputs);
  const Tensor& w = Value(weight);
  if (w.rows() != w.cols() || w.cols() != x.cols()) {
    ShapeFail("recurrent", ShapeString(x) + " with weight " + ShapeString(w));
  }
  Node n;
  n.op = Op::kRecurrent;
  n.a = inputs.id;
  n.b = weight.id;
  n.scalar = reverse ? 1.0 : 0.0;
  const Eigen::Index len = x.rows();
  n.value.resize(len, x.cols());
  RowVector prev;
  for (Eigen::Index k = 0; k < len; ++k) {
    const Eigen::Index t = reverse ? len - 1 - k : k;
    RowVector pre = x.row(t);
    if (k > 0) pre.noalias() += prev * w;
    prev = FastTanh(pre.array()).matrix();
    n.value.row(t) = prev;
  }
  return Push(std::move(n));
}

void Graph::Backward(Var loss) {
  const Node& root = node(loss);
  if (root.value.rows() != 1 || root.value.cols() != 1) {
    throw ShapeError("backward: loss node #" + std::to_string(loss.id) + " (" +
                     std::string(OpName(root.op)) + ") is " +
                     ShapeString(root.value) + ", expected a 1x1 scalar");
  }
  for (Node& n : nodes_) {
    n.grad.resize(0, 0);
    Parameter* p = n.param;
    if (p != nullptr && (p->grad.rows() != p->value.rows() ||
                         p->grad.cols() != p->value.cols())) {
      p->ZeroGrad();
    }
  }
  nodes_[loss.id].grad = Tensor::Ones(1, 1);

  auto accumulate = [this](int id, const auto& g) {
    Node& p = nodes_[id];
    if (p.grad.size() == 0) {
      p.grad = g;
    } else {
      p.grad += g;
    }
  };

  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad.size() == 0) continue;
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParam:
        n.param->grad += g;
        break;
      case Op::kGather:
        for (size_t k = 0; k < n.indices.size(); ++k) {
          n.param->grad.row(n.indices[k]) += g.row(static_cast<Eigen::Index>(k));
        }
        break;
      case Op::kMatMul: {
        const Tensor& x = Value(Var{n.a});
        const Tensor& y = Value(Var{n.b});
        Tensor ga;
        Tensor gb;
        MultiplyInto(g, y.transpose(), ga);
        MultiplyInto(x.transpose(), g, gb);
        accumulate(n.a, ga);
        accumulate(n.b, gb);
        break;
      }
      case Op::kAdd: {
        accumulate(n.a, g);
        const Tensor& y = Value(Var{n.b});
        if (y.rows() == g.rows()) {
          accumulate(n.b, g);
        } else {
          Tensor gb = g.colwise().sum();
          accumulate(n.b, gb);
        }
        break;
      }
      case Op::kSub: {
        accumulate(n.a, g);
        Tensor gb = -g;
        accumulate(n.b, gb);
        break;
      }
      case Op::kMul: {
        Tensor ga = g.cwiseProduct(Value(Var{n.b}));
        Tensor gb = g.cwiseProduct(Value(Var{n.a}));
        accumulate(n.a, ga);
        accumulate(n.b, gb);
        break;
      }
      case Op::kScale: {
        Tensor ga = g * n.scalar;
        accumulate(n.a, ga);
        break;
      }
      case Op::kConcatCols: {
        Eigen::Index at = 0;
        for (int p : n.parents) {
          const Eigen::Index c = Value(Var{p}).cols();
          Tensor gp = g.middleCols(at, c);
          accumulate(p, gp);
          at += c;
        }
        break;
      }
      case Op::kConcatRows: {
        Eigen::Index at = 0;
        for (int p : n.parents) {
          const Eigen::Index r = Value(Var{p}).rows();
          Tensor gp = g.middleRows(at, r);
          accumulate(p, gp);
          at += r;
        }
        break;
      }
      case Op::kRow: {
        const Tensor& x = Value(Var{n.a});
        Node& p = nodes_[n.a];
        if (p.grad.size() == 0) p.grad = Tensor::Zero(x.rows(), x.cols());
        p.grad.row(n.indices[0]) += g.row(0);
        break;
      }
      case Op::kMeanRows: {
        const Tensor& x = Value(Var{n.a});
        Tensor ga = g.replicate(x.rows(), 1) / static_cast<double>(x.rows());
        accumulate(n.a, ga);
        break;
      }
      case Op::kSum: {
        const Tensor& x = Value(Var{n.a});
        Tensor ga = Tensor::Constant(x.rows(), x.cols(), g(0, 0));
        accumulate(n.a, ga);
        break;
      }
      case Op::kSigmoid: {
        const Tensor& y = n.value;
        Tensor ga = g.array() * y.array() * (1.0 - y.array());
        accumulate(n.a, ga);
        break;
      }
      case Op::kTanh: {
        const Tensor& y = n.value;
        Tensor ga = g.array() * (1.0 - y.array().square());
        accumulate(n.a, ga);
        break;
      }
      case Op::kLog: {
        Tensor ga = g.array() / Value(Var{n.a}).array();
        accumulate(n.a, ga);
        break;
      }
      case Op::kDropout: {
        Tensor ga = g.cwiseProduct(n.aux);
        accumulate(n.a, ga);
        break;
      }
      case Op::kBceWithLogits: {
        const Tensor& z = Value(Var{n.a});
        Tensor ga(z.rows(), z.cols());
        for (Eigen::Index k = 0; k < z.size(); ++k) {
          ga.data()[k] = g(0, 0) * (StableSigmoid(z.data()[k]) - n.aux.data()[k]);
        }
        accumulate(n.a, ga);
        break;
      }
      case Op::kPick: {
        const Tensor& x = Value(Var{n.a});
        Node& p = nodes_[n.a];
        if (p.grad.size() == 0) p.grad = Tensor::Zero(x.rows(), x.cols());
        p.grad(n.indices[0], n.indices[1]) += g(0, 0);
        break;
      }
      case Op::kRecurrent: {
        const Tensor& y = n.value;
        const Tensor& w = Value(Var{n.b});
        const Eigen::Index len = y.rows();
        const bool reverse = n.scalar != 0.0;
        auto at = [&](Eigen::Index k) { return reverse ? len - 1 - k : k; };
        Tensor gx(len, y.cols());
        Tensor previous = Tensor::Zero(len, y.cols());
        RowVector carry = RowVector::Zero(y.cols());
        for (Eigen::Index k = len - 1; k >= 0; --k) {
          const Eigen::Index t = at(k);
          const RowVector dpre =
              (g.row(t) + carry).array() * (1.0 - y.row(t).array().square());
          gx.row(t) = dpre;
          if (k > 0) {
            previous.row(t) = y.row(at(k - 1));
            carry.noalias() = dpre * w.transpose();
          }
        }
        Tensor gw = previous.transpose() * gx;
        accumulate(n.a, gx);
        accumulate(n.b, gw);
        break;
      }
    }
  }
}

}  // namespace rda
