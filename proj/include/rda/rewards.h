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

#ifndef RDA_REWARDS_H_
#define RDA_REWARDS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace rda {

inline constexpr double kDefaultInstanceRewardScale = 0.5;

// Min-max scales bag performances to [-1, 1]: the best bag gets 1 and the
// worst -1. If every bag performed the same, every reward is 0.
std::vector<double> BagRewards(std::span<const double> performances);

// Instance reward from the sign of its bag reward and whether the
// generated instance is a large-loss instance (LI):
//   bag >= 0:  LI -> c,   not LI -> c/2
//   bag <  0:  LI -> -c,  not LI -> -c/2
double InstanceReward(double bag_reward, bool is_large_loss,
                      double c = kDefaultInstanceRewardScale);

// Per-bag reward bookkeeping for one generator iteration. Index j is the
// bag, index i the instance inside the bag.
struct RewardRecord {
  double c = kDefaultInstanceRewardScale;
  std::vector<double> performances;                // U'_j
  std::vector<double> bag_rewards;                 // R^B_j
  std::vector<std::vector<bool>> li_flags;         // I_LI(x'_ij, y'_ij)
  std::vector<std::vector<double>> instance_rewards;  // R^I_ij
};

// Fills bag_rewards and instance_rewards from performances and li_flags.
void ComputeRewards(RewardRecord& record);

// R_ij = R^B_j + R^I_ij. Throws DataError on size mismatches.
std::vector<std::vector<double>> TotalRewards(const RewardRecord& record);

}  // namespace rda

#endif  // RDA_REWARDS_H_
