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

#include <algorithm>
#include <string>

#include "rda/error.h"

namespace rda {

std::vector<double> BagRewards(std::span<const double> performances) {
  std::vector<double> rewards(performances.size(), 0.0);
  if (performances.empty()) return rewards;
  const auto [lo, hi] =
      std::minmax_element(performances.begin(), performances.end());
  const double min = *lo;
  const double max = *hi;
  if (!(max > min)) return rewards;
  for (size_t j = 0; j < performances.size(); ++j) {
    rewards[j] = 2.0 * (performances[j] - min) / (max - min) - 1.0;
  }
  return rewards;
}

double InstanceReward(double bag_reward, bool is_large_loss, double c) {
  if (bag_reward >= 0.0) return is_large_loss ? c : c / 2.0;
  return is_large_loss ? -c : -c / 2.0;
}

void ComputeRewards(RewardRecord& record) {
  if (record.li_flags.size() != record.performances.size()) {
    throw DataError("rewards: " + std::to_string(record.performances.size()) +
                    " performances but " +
                    std::to_string(record.li_flags.size()) + " LI flag lists");
  }
  record.bag_rewards = BagRewards(record.performances);
  record.instance_rewards.assign(record.li_flags.size(), {});
  for (size_t j = 0; j < record.li_flags.size(); ++j) {
    for (bool li : record.li_flags[j]) {
      record.instance_rewards[j].push_back(
          InstanceReward(record.bag_rewards[j], li, record.c));
    }
  }
}

std::vector<std::vector<double>> TotalRewards(const RewardRecord& record) {
  if (record.bag_rewards.size() != record.instance_rewards.size()) {
    throw DataError("rewards: " + std::to_string(record.bag_rewards.size()) +
                    " bag rewards but " +
                    std::to_string(record.instance_rewards.size()) +
                    " instance reward lists");
  }
  std::vector<std::vector<double>> totals(record.bag_rewards.size());
  for (size_t j = 0; j < totals.size(); ++j) {
    for (double r : record.instance_rewards[j]) {
      totals[j].push_back(record.bag_rewards[j] + r);
    }
  }
  return totals;
}

}  // namespace rda
