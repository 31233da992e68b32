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

#include "rda/rewards.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "rda/error.h"
#include "rda/rng.h"

namespace rda {
namespace {

using Doubles = std::vector<double>;

TEST(BagRewardsTest, TwoBagsMapToEndpoints) {
  EXPECT_EQ(BagRewards(Doubles{0.45, 0.55}), (Doubles{-1.0, 1.0}));
}

TEST(BagRewardsTest, ThreeBagsAreLinear) {
  EXPECT_EQ(BagRewards(Doubles{0.5, 0.6, 0.7}), (Doubles{-1.0, 0.0, 1.0}));
}

TEST(BagRewardsTest, AllEqualGivesZero) {
  EXPECT_EQ(BagRewards(Doubles{0.6, 0.6}), (Doubles{0.0, 0.0}));
  EXPECT_EQ(BagRewards(Doubles{0.3}), (Doubles{0.0}));
}

TEST(InstanceRewardTest, FourCaseTableIsExact) {
  EXPECT_EQ(InstanceReward(0.3, true, 0.5), 0.5);
  EXPECT_EQ(InstanceReward(0.0, false, 0.5), 0.25);
  EXPECT_EQ(InstanceReward(-0.2, true, 0.5), -0.5);
  EXPECT_EQ(InstanceReward(-0.2, false, 0.5), -0.25);
  EXPECT_EQ(InstanceReward(0.0, true, 0.5), 0.5);
  EXPECT_EQ(InstanceReward(1.0, false), 0.25);
}

TEST(TotalRewardsTest, Examples) {
  RewardRecord r;
  r.bag_rewards = {1.0};
  r.instance_rewards = {{0.5}};
  EXPECT_EQ(TotalRewards(r), (std::vector<Doubles>{{1.5}}));

  RewardRecord degenerate;
  degenerate.performances = {0.4, 0.4};
  degenerate.li_flags = {{true, false}, {false, true}};
  ComputeRewards(degenerate);
  EXPECT_EQ(TotalRewards(degenerate),
            (std::vector<Doubles>{{0.5, 0.25}, {0.25, 0.5}}));
}

TEST(TotalRewardsTest, SizeMismatchIsAnError) {
  RewardRecord r;
  r.bag_rewards = {1.0, -1.0};
  r.instance_rewards = {{0.5}};
  EXPECT_THROW(TotalRewards(r), DataError);
  RewardRecord s;
  s.performances = {0.1, 0.2};
  s.li_flags = {{true}};
  EXPECT_THROW(ComputeRewards(s), DataError);
}

// Random records: totals against an elementwise recomputation, the bound
// invariants, endpoint, monotonicity and shift invariance.
TEST(RewardPropertyTest, RandomRecords) {
  for (uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed);
    RewardRecord r;
    const size_t m = 1 + rng.UniformIndex(5);
    for (size_t j = 0; j < m; ++j) {
      // Coarse grid so ties occur.
      r.performances.push_back(static_cast<double>(rng.UniformIndex(6)) / 5.0);
      std::vector<bool> flags;
      const size_t t = 1 + rng.UniformIndex(6);
      for (size_t i = 0; i < t; ++i) flags.push_back(rng.Bernoulli(0.5));
      r.li_flags.push_back(flags);
    }
    ComputeRewards(r);
    const auto totals = TotalRewards(r);
    const double lo = *std::min_element(r.performances.begin(), r.performances.end());
    const double hi = *std::max_element(r.performances.begin(), r.performances.end());
    for (size_t j = 0; j < m; ++j) {
      const double rb = r.bag_rewards[j];
      ASSERT_GE(rb, -1.0);
      ASSERT_LE(rb, 1.0);
      if (hi > lo) {
        if (r.performances[j] == hi) EXPECT_EQ(rb, 1.0);
        if (r.performances[j] == lo) EXPECT_EQ(rb, -1.0);
      } else {
        EXPECT_EQ(rb, 0.0);
      }
      for (size_t k = 0; k < m; ++k) {
        if (r.performances[j] >= r.performances[k]) {
          EXPECT_GE(rb, r.bag_rewards[k]);
        }
      }
      for (size_t i = 0; i < r.li_flags[j].size(); ++i) {
        const double ri = r.instance_rewards[j][i];
        const bool li = r.li_flags[j][i];
        const double expected = (rb >= 0 ? 1.0 : -1.0) * (li ? 0.5 : 0.25);
        EXPECT_EQ(ri, expected);
        EXPECT_EQ(totals[j][i], rb + ri);
        EXPECT_LE(std::abs(totals[j][i]), 1.5);
      }
    }
    Doubles shifted = r.performances;
    for (double& u : shifted) u += 0.125;
    const Doubles again = BagRewards(shifted);
    for (size_t j = 0; j < m; ++j) EXPECT_NEAR(again[j], r.bag_rewards[j], 1e-12);
  }
}

}  // namespace
}  // namespace rda
