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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <vector>

#include "rda/adam.h"
#include "rda/checkpoint.h"
#include "rda/error.h"
#include "rda/graph.h"
#include "rda/init.h"
#include "rda/rng.h"
#include "test_util.h"

namespace rda {
namespace {

Tensor RandomTensor(int rows, int cols, Rng& rng, double limit = 1.0) {
  Tensor t(rows, cols);
  UniformInit(t, limit, rng);
  return t;
}

TEST(GraphForwardTest, SigmoidOfZeroIsHalf) {
  Graph g;
  const Var y = g.Sigmoid(g.Input(Tensor::Zero(1, 3)));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(g.Value(y)(0, i), 0.5);
}

TEST(GraphForwardTest, IdentityMatMulKeepsVector) {
  Rng rng(1);
  Graph g;
  const Tensor v = RandomTensor(4, 1, rng);
  const Var y = g.MatMul(g.Input(Tensor::Identity(4, 4)), g.Input(v));
  EXPECT_EQ(g.Value(y), v);
  const Tensor row = v.transpose();
  const Var z = g.MatMul(g.Input(row), g.Input(Tensor::Identity(4, 4)));
  EXPECT_EQ(g.Value(z), row);
}

// Straight-line recomputation of tanh(x W1 + b1) W2 + b2 without the graph.
TEST(GraphForwardTest, TwoLayerNetMatchesStraightLineOracle) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Tensor x = RandomTensor(3, 5, rng);
    const Tensor w1 = RandomTensor(5, 4, rng);
    const Tensor b1 = RandomTensor(1, 4, rng);
    const Tensor w2 = RandomTensor(4, 1, rng);
    const double b2 = rng.Uniform(-1, 1);
    Graph g;
    const Var h = g.Tanh(g.Add(g.MatMul(g.Input(x), g.Input(w1)), g.Input(b1)));
    const Var y = g.Add(g.MatMul(h, g.Input(w2)), g.Input(Tensor::Constant(1, 1, b2)));
    ASSERT_EQ(g.Value(y).rows(), 3);
    for (int r = 0; r < 3; ++r) {
      double out = b2;
      for (int j = 0; j < 4; ++j) {
        double pre = b1(0, j);
        for (int k = 0; k < 5; ++k) pre += x(r, k) * w1(k, j);
        out += std::tanh(pre) * w2(j, 0);
      }
      EXPECT_NEAR(g.Value(y)(r, 0), out, 1e-12);
    }
  }
}

TEST(GraphForwardTest, ShapeMismatchNamesTheOp) {
  Graph g;
  const Var a = g.Input(Tensor::Zero(2, 3));
  const Var b = g.Input(Tensor::Zero(2, 3));
  try {
    g.MatMul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("matmul"), std::string::npos);
  }
  EXPECT_THROW(g.Add(a, g.Input(Tensor::Zero(3, 3))), ShapeError);
}

TEST(GraphBackwardTest, SumGradientIsOnes) {
  Parameter w("w", 3, 2);
  Graph g;
  g.Backward(g.Sum(g.Param(w)));
  EXPECT_EQ(w.grad, Tensor::Ones(3, 2));
}

TEST(GraphBackwardTest, SigmoidSlopeAtZero) {
  Parameter x("x", 1, 1);
  Graph g;
  g.Backward(g.Sigmoid(g.Param(x)));
  EXPECT_DOUBLE_EQ(x.grad(0, 0), 0.25);
}

TEST(GraphBackwardTest, NonScalarLossIsRejected) {
  Parameter w("w", 2, 2);
  Graph g;
  const Var y = g.Param(w);
  EXPECT_THROW(g.Backward(y), ShapeError);
}

TEST(GraphBackwardTest, SharedNodeAccumulatesGradient) {
  // loss = sum(w o w) has gradient 2w even though w is used twice.
  Rng rng(3);
  Parameter w("w", 2, 3);
  w.value = RandomTensor(2, 3, rng);
  Graph g;
  const Var p = g.Param(w);
  g.Backward(g.Sum(g.Mul(p, p)));
  EXPECT_TRUE(w.grad.isApprox(2.0 * w.value, 1e-14));
}

TEST(GraphBackwardTest, DropoutMaskScalesGradient) {
  Parameter w("w", 1, 4);
  w.value.setOnes();
  Tensor mask(1, 4);
  mask << 0.0, 1.25, 1.25, 0.0;
  Graph g;
  g.Backward(g.Sum(g.Dropout(g.Param(w), mask)));
  EXPECT_EQ(w.grad, mask);
}

TEST(DropoutTest, MaskRateAndInvertedScale) {
  Rng rng(7);
  const Tensor mask = DropoutMask(200, 100, 0.2, rng);
  int zeros = 0;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    const double m = mask.data()[i];
    if (m == 0.0) {
      ++zeros;
    } else {
      EXPECT_DOUBLE_EQ(m, 1.0 / 0.8);
    }
  }
  // 20000 Bernoulli(0.2) draws: sd = 0.0028.
  EXPECT_NEAR(zeros / 20000.0, 0.2, 0.012);
}

TEST(AdamTest, ZeroGradientLeavesParametersButCountsStep) {
  Rng rng(1);
  Parameter w("w", 2, 2);
  w.value = RandomTensor(2, 2, rng);
  const Tensor before = w.value;
  Adam adam;
  std::vector<Parameter*> params = {&w};
  adam.Step(params);
  EXPECT_EQ(w.value, before);
  EXPECT_EQ(adam.step_count(), 1);
}

TEST(AdamTest, FirstStepMovesByLearningRateAgainstSign) {
  Parameter w("w", 1, 3);
  w.grad << 0.3, -2.0, 1e-3;
  Adam adam;
  std::vector<Parameter*> params = {&w};
  adam.Step(params);
  EXPECT_NEAR(w.value(0, 0), -1e-3, 1e-9);
  EXPECT_NEAR(w.value(0, 1), 1e-3, 1e-9);
  EXPECT_NEAR(w.value(0, 2), -1e-3, 1e-8);
}

TEST(AdamTest, ScalarQuadraticDescends) {
  Parameter w("w", 1, 1);
  w.value(0, 0) = 1.0;
  AdamOptions options;
  options.learning_rate = 0.05;
  Adam adam(options);
  std::vector<Parameter*> params = {&w};
  double prev = 1.0;
  for (int i = 0; i < 10; ++i) {
    w.grad(0, 0) = 2.0 * w.value(0, 0);
    adam.Step(params);
    const double f = w.value(0, 0) * w.value(0, 0);
    EXPECT_LT(f, prev);
    prev = f;
  }
}

TEST(AdamTest, ClipsToGlobalNorm) {
  // A clipped (300, 400) step must act exactly like an unclipped (3, 4) one.
  auto run = [](double first_scale, double clip) {
    Parameter a("a", 1, 1);
    Parameter b("b", 1, 1);
    AdamOptions options;
    options.clip_norm = clip;
    Adam adam(options);
    std::vector<Parameter*> params = {&a, &b};
    a.grad(0, 0) = 3.0 * first_scale;
    b.grad(0, 0) = 4.0 * first_scale;
    if (first_scale == 100.0) EXPECT_DOUBLE_EQ(GradientNorm(params), 500.0);
    adam.Step(params);
    a.grad(0, 0) = 1.0;
    b.grad(0, 0) = -1.0;
    adam.Step(params);
    return std::pair(a.value(0, 0), b.value(0, 0));
  };
  const auto clipped = run(100.0, 5.0);
  const auto plain = run(1.0, 0.0);
  EXPECT_NEAR(clipped.first, plain.first, 1e-15);
  EXPECT_NEAR(clipped.second, plain.second, 1e-15);
  const auto unclipped = run(100.0, 0.0);
  EXPECT_NE(unclipped.first, plain.first);
}

TEST(AdamTest, NonFiniteGradientAbortsWithName) {
  Parameter w("the-weight", 1, 2);
  w.grad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  Adam adam;
  std::vector<Parameter*> params = {&w};
  try {
    adam.Step(params);
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("the-weight"), std::string::npos);
  }
  EXPECT_EQ(adam.step_count(), 0);
  EXPECT_EQ(w.value, Tensor::Zero(1, 2));
}

TEST(AdamTest, SameSeedSameParametersAfterSteps) {
  auto run = [] {
    Rng rng(11);
    Parameter w("w", 3, 3);
    w.value = RandomTensor(3, 3, rng);
    Adam adam;
    std::vector<Parameter*> params = {&w};
    for (int k = 0; k < 20; ++k) {
      w.grad = RandomTensor(3, 3, rng);
      adam.Step(params);
    }
    return w.value;
  };
  const Tensor a = run();
  const Tensor b = run();
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * a.size()));
}

TEST(RngTest, SameSeedAndNameSameSequence) {
  Rng a = Rng(42).Substream("policy-init");
  Rng b = Rng(42).Substream("policy-init");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, SubstreamsDiffer) {
  const Rng root(42);
  const std::vector<Rng> streams = {
      root.Substream("tracker-init"), root.Substream("policy-init"),
      root.Substream("bag-sampling"), root.Substream("dropout"),
      root.Substream("validation-subsample"), root.Substream("bag", 1),
      Rng(43).Substream("policy-init")};
  std::set<uint64_t> first;
  for (Rng r : streams) first.insert(r.NextU64());
  EXPECT_EQ(first.size(), streams.size());
}

TEST(RngTest, UniformIndexIsInRangeAndCoversAll) {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const uint64_t k = rng.UniformIndex(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 1000, 150);
}

TEST(RngTest, SampleWithoutReplacementIsDistinct) {
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = rng.SampleWithoutReplacement(20, 8);
    ASSERT_EQ(s.size(), 8u);
    std::set<size_t> d(s.begin(), s.end());
    EXPECT_EQ(d.size(), 8u);
    for (size_t v : s) EXPECT_LT(v, 20u);
  }
}

TEST(CheckpointTest, RoundTripAndDeterministicBytes) {
  Rng rng(2);
  Checkpoint c;
  c.seed = 77;
  c.metadata = "{\"kind\":\"test\"}";
  c.tensors.push_back({"a", RandomTensor(3, 4, rng)});
  c.tensors.push_back({"b", RandomTensor(1, 1, rng)});
  const std::string bytes = SerializeCheckpoint(c);
  EXPECT_EQ(bytes.substr(0, 8), std::string("RDACKPT\0", 8));
  EXPECT_EQ(SerializeCheckpoint(c), bytes);
  const Checkpoint back = DeserializeCheckpoint(bytes);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.metadata, c.metadata);
  EXPECT_EQ(back.format_version, kCheckpointFormatVersion);
  EXPECT_EQ(back.Get("a"), c.tensors[0].value);
  EXPECT_EQ(back.Get("b"), c.tensors[1].value);
  EXPECT_THROW(back.Get("zzz"), Error);

  const auto dir = testing::TempDir("ckpt");
  WriteCheckpoint(dir / "c.bin", c);
  EXPECT_EQ(testing::ReadFile(dir / "c.bin"), bytes);
  EXPECT_EQ(ReadCheckpoint(dir / "c.bin").Get("a"), c.tensors[0].value);
}

TEST(CheckpointTest, CorruptInputIsRejected) {
  Checkpoint c;
  c.tensors.push_back({"a", Tensor::Ones(2, 2)});
  const std::string bytes = SerializeCheckpoint(c);
  EXPECT_THROW(DeserializeCheckpoint("not a checkpoint"), Error);
  EXPECT_THROW(DeserializeCheckpoint(bytes.substr(0, bytes.size() - 3)), Error);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_THROW(DeserializeCheckpoint(bad_version), Error);
}

}  // namespace
}  // namespace rda
