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

#ifndef RDA_TRAINLOOP_H_
#define RDA_TRAINLOOP_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rda/augment.h"
#include "rda/corpus.h"
#include "rda/policy.h"
#include "rda/rewards.h"
#include "rda/rng.h"
#include "rda/tracker.h"

namespace rda {

struct TrainConfig {
  int alternate_epochs = 5;          // L
  int generator_epochs = 200;        // N
  int bag_samples = 2;               // M
  int bag_size = 25;                 // T
  double instance_reward_scale = 0.5;  // c
  int augmentation_multiplier = 5;   // n
  double augmented_sample_ratio = 0.4;
  double validation_subsample_ratio = 0.3;
  int pretrain_epochs = 20;
  int retrain_epochs = 5;
  int tracker_batch_size = 16;
  int fine_tune_passes = 1;
  // Gradient-descent step size when scoring a bag.
  double fine_tune_learning_rate = 0.1;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  double threshold = 0.5;
  double dropout = 0.2;
  int embedding_dim = 50;
  int hidden_dim = 200;
  int scorer_dim = 200;
  int policy_hidden_dim = kPolicyHiddenDim;
  uint64_t seed = 0;
  // Coarse-grained augmentation: uniform candidate choice, no generator
  // learning and no min-probability filter.
  bool da_only = false;
  // Worker threads for the M bag evaluations of an iteration.
  int threads = 1;

  // Throws ConfigError.
  void Validate() const;
  TrackerOptions Tracker() const;
  AdamOptions PolicyAdam() const;
  FineTuneOptions FineTune() const;

  nlohmann::json ToJson() const;
  // Overlays `j` on `base`; unknown keys throw ConfigError.
  static TrainConfig FromJson(const nlohmann::json& j, TrainConfig base);
  static TrainConfig FromJson(const nlohmann::json& j);
};

// T site ids drawn with replacement from the span-text groups.
using Bag = std::vector<size_t>;

// Two-step draw, T times: a span text uniformly, then a site uniformly
// among the sites holding that span text. Throws DataError if there are no
// sites.
Bag SampleBag(const SiteIndex& index, int bag_size, Rng& rng);

// B'_j: one sampled replacement per bag instance.
struct SampledBag {
  Bag sites;
  std::vector<size_t> actions;
  std::vector<double> log_probabilities;
  std::vector<Turn> turns;  // materialised (x', y')
};

SampledBag SampleReplacements(const PolicyNet& policy, const Bag& bag,
                              const SiteIndex& index,
                              std::span<const Tensor> site_states,
                              const Corpus& corpus, Rng& rng);

// M independent SampledBags from the current policy; bag j uses substream
// ("bag", j) of `rng`.
std::vector<SampledBag> SampleBags(const PolicyNet& policy, const Bag& bag,
                                   int num_bags, const SiteIndex& index,
                                   std::span<const Tensor> site_states,
                                   const Corpus& corpus, const Rng& rng);

// U'_j: joint goal accuracy on `validation` of a copy of `snapshot`
// fine-tuned on the bag's turns. `snapshot` is not modified.
double EvaluateBag(const TrackerModel& snapshot, const SampledBag& bag,
                   std::span<const Dialogue> validation,
                   const FineTuneOptions& options, Rng rng,
                   TrainStats* stats = nullptr);

// Validation dialogues subsampled uniformly without replacement; at least
// one dialogue is kept.
std::vector<Dialogue> SubsampleDialogues(std::span<const Dialogue> dialogues,
                                         double ratio, Rng& rng);

// One line of rewards.jsonl.
struct RewardTrace {
  int epoch = 0;
  int iteration = 0;
  int bag = 0;
  double performance = 0.0;
  double bag_reward = 0.0;
  double mean_instance_reward = 0.0;

  nlohmann::json ToJson() const;
};

// Everything a generator-learning epoch reads; all of it stays fixed for
// the epoch.
struct GeneratorContext {
  const Corpus* train = nullptr;
  const SiteIndex* sites = nullptr;
  const std::vector<Tensor>* site_states = nullptr;
  const TrackerModel* tracker = nullptr;  // frozen snapshot theta_r
  std::span<const Dialogue> validation;   // full validation split
  const TrainConfig* config = nullptr;
  int epoch = 0;  // alternate epoch, for traces
};

// Observes the per-iteration bookkeeping of a generator epoch.
struct IterationRecord {
  int iteration = 0;
  std::vector<SampledBag> bags;
  RewardRecord rewards;
  std::vector<std::vector<double>> totals;
};

// N iterations of: sample a bag, resample it M times with the policy,
// score each resample on a validation subsample, compute bag and instance
// rewards, and take one policy-gradient step. Errors are re-thrown with the
// iteration number.
PolicyNet GeneratorLearningEpoch(
    const GeneratorContext& ctx, PolicyNet policy, Rng rng,
    const std::function<void(const RewardTrace&)>& on_trace = {},
    const std::function<void(const IterationRecord&)>& on_iteration = {});

struct AugmentedInstance {
  Turn turn;
  size_t site = 0;
  size_t candidate = 0;
  double probability = 0.0;
};

struct AugmentedSet {
  size_t drawn = 0;  // instances generated before filtering
  std::vector<AugmentedInstance> instances;

  nlohmann::json ToJson(const SiteIndex& index) const;
};

// Draws n * |train turns| (site, replacement) pairs with the two-step site
// sampler. With a policy, replacements follow the policy and an instance is
// dropped when its candidate has the minimum probability in a C_p whose
// probabilities are not all equal. Without a policy (coarse-grained DA)
// replacements are uniform over C_p and nothing is dropped.
AugmentedSet GenerateAugmentedData(const PolicyNet* policy,
                                   const SiteIndex& index,
                                   std::span<const Tensor> site_states,
                                   const Corpus& train,
                                   const TrainConfig& config, Rng rng);

// Run directory: config.json, metrics.jsonl, rewards.jsonl,
// checkpoints/epoch_<l>.bin, checkpoints/policy_<l>.bin, augmented_<l>.json.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path TrackerCheckpoint(int epoch) const;
  std::filesystem::path PolicyCheckpoint(int epoch) const;
  std::filesystem::path Augmented(int epoch) const;
  std::filesystem::path Metrics() const { return root_ / "metrics.jsonl"; }
  std::filesystem::path Rewards() const { return root_ / "rewards.jsonl"; }
  std::filesystem::path Config() const { return root_ / "config.json"; }

  void WriteConfig(const nlohmann::json& config) const;
  void AppendMetric(const nlohmann::json& record) const;
  void AppendReward(const RewardTrace& trace) const;
  // Drops metrics/reward lines whose "epoch" exceeds `epoch`.
  void TruncateAfter(int epoch) const;
  std::vector<nlohmann::json> ReadMetrics() const;
  // Largest l with checkpoints/epoch_<l>.bin, or -1.
  int LastTrackerCheckpoint() const;

 private:
  std::filesystem::path root_;
};

struct AlternateResult {
  TrackerModel best;
  int best_epoch = 0;
  // Full-validation joint goal accuracy after each alternate epoch.
  std::vector<double> epoch_accuracies;
  std::optional<PolicyNet> last_policy;
};

struct AlternateOptions {
  RunDirectory* run = nullptr;  // optional artifacts + crash recovery
  bool resume = false;
  std::function<void(const std::string&)> log;
};

// For l = 1..L: fresh policy, one generator-learning epoch against the
// current tracker, generate D', retrain the tracker on D plus a sampled
// subset of D' (starting from the current tracker), and score it on the
// full validation split. Returns the best of the L epochs; with L = 0 the
// pre-trained tracker itself.
AlternateResult AlternateLearning(const Corpus& train,
                                  std::span<const Dialogue> validation,
                                  const CandidateStore& store,
                                  const TrainConfig& config,
                                  const TrackerModel& pretrained,
                                  const AlternateOptions& options = {});

// Fresh tracker for `train` (vocabulary includes the store's candidates).
TrackerModel InitTracker(const Corpus& train, const CandidateStore* store,
                         const TrainConfig& config);

}  // namespace rda

#endif  // RDA_TRAINLOOP_H_
