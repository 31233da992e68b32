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

#include "rda/trainloop.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "rda/error.h"

namespace rda {

using nlohmann::json;

// ------------------------------------------------------------------ config

void TrainConfig::Validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
  };
  auto nonneg = [](int v, const char* name) {
    if (v < 0) throw ConfigError(std::string(name) + " must be >= 0");
  };
  auto ratio = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw ConfigError(std::string(name) + " must be in (0, 1]");
    }
  };
  nonneg(alternate_epochs, "alternate_epochs");
  nonneg(generator_epochs, "generator_epochs");
  positive(bag_samples, "bag_samples");
  positive(bag_size, "bag_size");
  positive(augmentation_multiplier, "augmentation_multiplier");
  nonneg(pretrain_epochs, "pretrain_epochs");
  nonneg(retrain_epochs, "retrain_epochs");
  positive(tracker_batch_size, "tracker_batch_size");
  nonneg(fine_tune_passes, "fine_tune_passes");
  positive(embedding_dim, "embedding_dim");
  positive(hidden_dim, "hidden_dim");
  positive(scorer_dim, "scorer_dim");
  positive(policy_hidden_dim, "policy_hidden_dim");
  positive(threads, "threads");
  ratio(augmented_sample_ratio, "augmented_sample_ratio");
  ratio(validation_subsample_ratio, "validation_subsample_ratio");
  if (!(instance_reward_scale > 0.0)) {
    throw ConfigError("instance_reward_scale must be > 0");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(fine_tune_learning_rate > 0.0)) {
    throw ConfigError("fine_tune_learning_rate must be > 0");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("threshold must be in (0, 1)");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must be in [0, 1)");
  }
  if (hidden_dim % 2 != 0) throw ConfigError("hidden_dim must be even");
}

TrackerOptions TrainConfig::Tracker() const {
  TrackerOptions o;
  o.embedding_dim = embedding_dim;
  o.hidden_dim = hidden_dim;
  o.scorer_dim = scorer_dim;
  o.dropout = dropout;
  o.threshold = threshold;
  o.batch_size = tracker_batch_size;
  o.adam.learning_rate = learning_rate;
  o.adam.clip_norm = clip_norm;
  return o;
}

FineTuneOptions TrainConfig::FineTune() const {
  FineTuneOptions o;
  o.passes = fine_tune_passes;
  o.batch_size = tracker_batch_size;
  o.learning_rate = fine_tune_learning_rate;
  o.clip_norm = clip_norm;
  return o;
}

AdamOptions TrainConfig::PolicyAdam() const {
  AdamOptions o;
  o.learning_rate = learning_rate;
  o.clip_norm = clip_norm;
  return o;
}

json TrainConfig::ToJson() const {
  return {{"alternate_epochs", alternate_epochs},
          {"generator_epochs", generator_epochs},
          {"bag_samples", bag_samples},
          {"bag_size", bag_size},
          {"instance_reward_scale", instance_reward_scale},
          {"augmentation_multiplier", augmentation_multiplier},
          {"augmented_sample_ratio", augmented_sample_ratio},
          {"validation_subsample_ratio", validation_subsample_ratio},
          {"pretrain_epochs", pretrain_epochs},
          {"retrain_epochs", retrain_epochs},
          {"tracker_batch_size", tracker_batch_size},
          {"fine_tune_passes", fine_tune_passes},
          {"fine_tune_learning_rate", fine_tune_learning_rate},
          {"learning_rate", learning_rate},
          {"clip_norm", clip_norm},
          {"threshold", threshold},
          {"dropout", dropout},
          {"embedding_dim", embedding_dim},
          {"hidden_dim", hidden_dim},
          {"scorer_dim", scorer_dim},
          {"policy_hidden_dim", policy_hidden_dim},
          {"seed", seed},
          {"da_only", da_only},
          {"threads", threads}};
}

TrainConfig TrainConfig::FromJson(const json& j, TrainConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "alternate_epochs") c.alternate_epochs = v.get<int>();
      else if (key == "generator_epochs") c.generator_epochs = v.get<int>();
      else if (key == "bag_samples") c.bag_samples = v.get<int>();
      else if (key == "bag_size") c.bag_size = v.get<int>();
      else if (key == "instance_reward_scale") c.instance_reward_scale = v.get<double>();
      else if (key == "augmentation_multiplier") c.augmentation_multiplier = v.get<int>();
      else if (key == "augmented_sample_ratio") c.augmented_sample_ratio = v.get<double>();
      else if (key == "validation_subsample_ratio") c.validation_subsample_ratio = v.get<double>();
      else if (key == "pretrain_epochs") c.pretrain_epochs = v.get<int>();
      else if (key == "retrain_epochs") c.retrain_epochs = v.get<int>();
      else if (key == "tracker_batch_size") c.tracker_batch_size = v.get<int>();
      else if (key == "fine_tune_passes") c.fine_tune_passes = v.get<int>();
      else if (key == "fine_tune_learning_rate") c.fine_tune_learning_rate = v.get<double>();
      else if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "clip_norm") c.clip_norm = v.get<double>();
      else if (key == "threshold") c.threshold = v.get<double>();
      else if (key == "dropout") c.dropout = v.get<double>();
      else if (key == "embedding_dim") c.embedding_dim = v.get<int>();
      else if (key == "hidden_dim") c.hidden_dim = v.get<int>();
      else if (key == "scorer_dim") c.scorer_dim = v.get<int>();
      else if (key == "policy_hidden_dim") c.policy_hidden_dim = v.get<int>();
      else if (key == "seed") c.seed = v.get<uint64_t>();
      else if (key == "da_only") c.da_only = v.get<bool>();
      else if (key == "threads") c.threads = v.get<int>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

TrainConfig TrainConfig::FromJson(const json& j) {
  return FromJson(j, TrainConfig{});
}

// ----------------------------------------------------------------- sampling

Bag SampleBag(const SiteIndex& index, int bag_size, Rng& rng) {
  if (index.groups.empty()) throw DataError("sample bag: no augmentation sites");
  Bag bag;
  bag.reserve(static_cast<size_t>(bag_size));
  for (int i = 0; i < bag_size; ++i) {
    const auto& group = index.groups[rng.UniformIndex(index.groups.size())];
    bag.push_back(group[rng.UniformIndex(group.size())]);
  }
  return bag;
}

SampledBag SampleReplacements(const PolicyNet& policy, const Bag& bag,
                              const SiteIndex& index,
                              std::span<const Tensor> site_states,
                              const Corpus& corpus, Rng& rng) {
  SampledBag out;
  out.sites = bag;
  for (size_t s : bag) {
    const SampledCandidate pick = SampleCandidate(policy, site_states[s], rng);
    const AugmentationSite& site = index.sites[s];
    out.actions.push_back(pick.index);
    out.log_probabilities.push_back(pick.log_probability);
    out.turns.push_back(
        ApplyReplacement(corpus, site, site.candidates[pick.index]).turn);
  }
  return out;
}

std::vector<SampledBag> SampleBags(const PolicyNet& policy, const Bag& bag,
                                   int num_bags, const SiteIndex& index,
                                   std::span<const Tensor> site_states,
                                   const Corpus& corpus, const Rng& rng) {
  if (num_bags < 1) throw ConfigError("sample bags: M must be >= 1");
  std::vector<SampledBag> out;
  for (int j = 0; j < num_bags; ++j) {
    Rng r = rng.Substream("bag", static_cast<uint64_t>(j));
    out.push_back(SampleReplacements(policy, bag, index, site_states, corpus, r));
  }
  return out;
}

double EvaluateBag(const TrackerModel& snapshot, const SampledBag& bag,
                   std::span<const Dialogue> validation,
                   const FineTuneOptions& options, Rng rng, TrainStats* stats) {
  std::vector<const Turn*> turns;
  for (const Turn& t : bag.turns) turns.push_back(&t);
  const TrackerModel tuned = FineTune(snapshot, turns, options, rng, stats);
  return JointGoalAccuracy(tuned, validation);
}

std::vector<Dialogue> SubsampleDialogues(std::span<const Dialogue> dialogues,
                                         double ratio, Rng& rng) {
  if (dialogues.empty()) throw DataError("validation set is empty");
  const size_t k = std::clamp<size_t>(
      static_cast<size_t>(std::llround(ratio * static_cast<double>(dialogues.size()))),
      1, dialogues.size());
  std::vector<Dialogue> out;
  for (size_t i : rng.SampleWithoutReplacement(dialogues.size(), k)) {
    out.push_back(dialogues[i]);
  }
  return out;
}

json RewardTrace::ToJson() const {
  return {{"epoch", epoch},
          {"n", iteration},
          {"j", bag},
          {"U", performance},
          {"R_bag", bag_reward},
          {"mean_R_instance", mean_instance_reward}};
}

// --------------------------------------------------------- generator epoch

PolicyNet GeneratorLearningEpoch(
    const GeneratorContext& ctx, PolicyNet policy, Rng rng,
    const std::function<void(const RewardTrace&)>& on_trace,
    const std::function<void(const IterationRecord&)>& on_iteration) {
  const TrainConfig& cfg = *ctx.config;
  if (cfg.generator_epochs == 0) return policy;
  const TrackerModel& snapshot = *ctx.tracker;
  Rng subsample_rng = rng.Substream("validation-subsample");
  const std::vector<Dialogue> val =
      SubsampleDialogues(ctx.validation, cfg.validation_subsample_ratio,
                         subsample_rng);
  Adam optimizer(cfg.PolicyAdam());
  const FineTuneOptions fine_tune = cfg.FineTune();
  // The snapshot is frozen for the whole epoch, so LI flags are memoised
  // per (site, candidate).
  std::map<std::pair<size_t, size_t>, bool> li_cache;

  for (int n = 1; n <= cfg.generator_epochs; ++n) {
    try {
      Rng it = rng.Substream("iteration", static_cast<uint64_t>(n));
      Rng bag_rng = it.Substream("bag-sampling");
      const Bag bag = SampleBag(*ctx.sites, cfg.bag_size, bag_rng);
      IterationRecord record;
      record.iteration = n;
      record.bags = SampleBags(policy, bag, cfg.bag_samples, *ctx.sites,
                               *ctx.site_states, *ctx.train,
                               it.Substream("replacements"));
      const int m = cfg.bag_samples;
      record.rewards.c = cfg.instance_reward_scale;
      record.rewards.performances.assign(static_cast<size_t>(m), 0.0);
      // Every bag of the iteration is fine-tuned with the same dropout masks
      // and batch order, so the U' differences come from the replacements.
      auto evaluate = [&](int j) {
        return EvaluateBag(snapshot, record.bags[static_cast<size_t>(j)], val,
                           fine_tune, it.Substream("fine-tune"));
      };
      if (cfg.threads > 1 && m > 1) {
        std::vector<std::future<double>> futures;
        for (int j = 0; j < m; ++j) {
          futures.push_back(std::async(std::launch::async, evaluate, j));
        }
        for (int j = 0; j < m; ++j) {
          record.rewards.performances[static_cast<size_t>(j)] =
              futures[static_cast<size_t>(j)].get();
        }
      } else {
        for (int j = 0; j < m; ++j) {
          record.rewards.performances[static_cast<size_t>(j)] = evaluate(j);
        }
      }

      for (const SampledBag& b : record.bags) {
        std::vector<bool> flags;
        for (size_t i = 0; i < b.sites.size(); ++i) {
          const auto key = std::make_pair(b.sites[i], b.actions[i]);
          auto hit = li_cache.find(key);
          if (hit == li_cache.end()) {
            hit = li_cache.emplace(key, IsLargeLoss(snapshot, b.turns[i])).first;
          }
          flags.push_back(hit->second);
        }
        record.rewards.li_flags.push_back(std::move(flags));
      }
      ComputeRewards(record.rewards);
      record.totals = TotalRewards(record.rewards);

      std::vector<PolicyExample> examples;
      for (size_t j = 0; j < record.bags.size(); ++j) {
        const SampledBag& b = record.bags[j];
        for (size_t i = 0; i < b.sites.size(); ++i) {
          examples.push_back({&(*ctx.site_states)[b.sites[i]], b.actions[i],
                              record.totals[j][i]});
        }
      }
      PolicyGradientStep(policy, optimizer, examples, m);

      if (on_trace) {
        for (size_t j = 0; j < record.bags.size(); ++j) {
          const auto& ri = record.rewards.instance_rewards[j];
          double mean = 0.0;
          for (double r : ri) mean += r;
          if (!ri.empty()) mean /= static_cast<double>(ri.size());
          on_trace({ctx.epoch, n, static_cast<int>(j) + 1,
                    record.rewards.performances[j],
                    record.rewards.bag_rewards[j], mean});
        }
      }
      if (on_iteration) on_iteration(record);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("generator iteration " + std::to_string(n) + ": " +
                           e.what());
    } catch (const DataError& e) {
      throw DataError("generator iteration " + std::to_string(n) + ": " +
                      e.what());
    }
  }
  return policy;
}

// ------------------------------------------------------------ augmentation

json AugmentedSet::ToJson(const SiteIndex& index) const {
  json items = json::array();
  for (const AugmentedInstance& a : instances) {
    const AugmentationSite& site = index.sites[a.site];
    const Candidate& c = site.candidates[a.candidate];
    json label = json::array();
    for (const SlotValue& sv : a.turn.turn_label) label.push_back({sv.slot, sv.value});
    items.push_back({{"system", Detokenize(a.turn.system)},
                     {"user", Detokenize(a.turn.user)},
                     {"turn_label", label},
                     {"source_dialogue", site.dialogue_id},
                     {"source_turn", site.turn_index},
                     {"span", site.span_text},
                     {"candidate", c.text},
                     {"candidate_source", SourceName(c.source)},
                     {"probability", a.probability}});
  }
  return {{"drawn", drawn}, {"kept", instances.size()}, {"instances", items}};
}

AugmentedSet GenerateAugmentedData(const PolicyNet* policy,
                                   const SiteIndex& index,
                                   std::span<const Tensor> site_states,
                                   const Corpus& train,
                                   const TrainConfig& config, Rng rng) {
  AugmentedSet out;
  if (index.empty()) return out;
  const size_t target = static_cast<size_t>(config.augmentation_multiplier) *
                        train.TurnCount();
  Rng site_rng = rng.Substream("sites");
  Rng choice_rng = rng.Substream("choices");
  std::map<size_t, std::vector<double>> dist_cache;
  for (size_t k = 0; k < target; ++k) {
    const size_t s = SampleBag(index, 1, site_rng).front();
    const AugmentationSite& site = index.sites[s];
    std::vector<double> probs;
    if (policy != nullptr) {
      auto it = dist_cache.find(s);
      if (it == dist_cache.end()) {
        it = dist_cache.emplace(s, CandidateDistribution(*policy, site_states[s]))
                 .first;
      }
      probs = it->second;
    } else {
      probs.assign(site.candidates.size(),
                   1.0 / static_cast<double>(site.candidates.size()));
    }
    const size_t choice = choice_rng.Categorical(probs);
    ++out.drawn;
    if (policy != nullptr && probs.size() > 1) {
      const auto [lo, hi] = std::minmax_element(probs.begin(), probs.end());
      if (*lo < *hi && probs[choice] == *lo) continue;
    }
    out.instances.push_back(
        {ApplyReplacement(train, site, site.candidates[choice]).turn, s, choice,
         probs[choice]});
  }
  return out;
}

// ------------------------------------------------------------ run directory

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_ / "checkpoints");
}

std::filesystem::path RunDirectory::TrackerCheckpoint(int epoch) const {
  return root_ / "checkpoints" / ("epoch_" + std::to_string(epoch) + ".bin");
}

std::filesystem::path RunDirectory::PolicyCheckpoint(int epoch) const {
  return root_ / "checkpoints" / ("policy_" + std::to_string(epoch) + ".bin");
}

std::filesystem::path RunDirectory::Augmented(int epoch) const {
  return root_ / ("augmented_" + std::to_string(epoch) + ".json");
}

void RunDirectory::WriteConfig(const json& config) const {
  std::ofstream out(Config(), std::ios::trunc);
  if (!out) throw Error("cannot write " + Config().string());
  out << config.dump(2) << "\n";
}

namespace {

void AppendLine(const std::filesystem::path& path, const json& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot append to " + path.string());
  out << record.dump() << "\n";
}

std::vector<json> ReadJsonLines(const std::filesystem::path& path) {
  std::vector<json> out;
  std::ifstream in(path);
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void KeepEpochs(const std::filesystem::path& path, int epoch) {
  if (!std::filesystem::exists(path)) return;
  std::vector<json> lines = ReadJsonLines(path);
  std::ofstream out(path, std::ios::trunc);
  for (const json& j : lines) {
    if (j.value("epoch", 0) <= epoch) out << j.dump() << "\n";
  }
}

}  // namespace

void RunDirectory::AppendMetric(const json& record) const {
  AppendLine(Metrics(), record);
}

void RunDirectory::AppendReward(const RewardTrace& trace) const {
  AppendLine(Rewards(), trace.ToJson());
}

void RunDirectory::TruncateAfter(int epoch) const {
  KeepEpochs(Metrics(), epoch);
  KeepEpochs(Rewards(), epoch);
}

std::vector<json> RunDirectory::ReadMetrics() const {
  return ReadJsonLines(Metrics());
}

int RunDirectory::LastTrackerCheckpoint() const {
  int last = -1;
  for (int l = 0; std::filesystem::exists(TrackerCheckpoint(l)); ++l) last = l;
  return last;
}

// -------------------------------------------------------- alternate learning

TrackerModel InitTracker(const Corpus& train, const CandidateStore* store,
                         const TrainConfig& config) {
  return TrackerModel(Vocabulary::Build(train, store), train.ontology,
                      config.Tracker(), Rng(config.seed).Substream("tracker"));
}

AlternateResult AlternateLearning(const Corpus& train,
                                  std::span<const Dialogue> validation,
                                  const CandidateStore& store,
                                  const TrainConfig& config,
                                  const TrackerModel& pretrained,
                                  const AlternateOptions& options) {
  config.Validate();
  if (validation.empty()) throw DataError("alternate learning: empty validation set");
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };
  const SiteIndex index = IndexSites(train, store);
  if (index.empty() && config.alternate_epochs > 0) {
    throw DataError("alternate learning: no augmentation sites in the training data");
  }
  const Rng root(config.seed);

  TrackerModel current = pretrained;
  AlternateResult result{pretrained, 0, {}, std::nullopt};
  double best_accuracy = -1.0;
  int start = 1;

  RunDirectory* run = options.run;
  if (run != nullptr && options.resume) {
    const int last = run->LastTrackerCheckpoint();
    if (last >= 1) {
      current = TrackerModel::FromCheckpoint(ReadCheckpoint(run->TrackerCheckpoint(last)));
      run->TruncateAfter(last);
      for (const json& m : run->ReadMetrics()) {
        result.epoch_accuracies.push_back(m.at("joint_goal_accuracy").get<double>());
      }
      if (static_cast<int>(result.epoch_accuracies.size()) != last) {
        throw DataError("resume: metrics.jsonl has " +
                        std::to_string(result.epoch_accuracies.size()) +
                        " records but the last checkpoint is epoch " +
                        std::to_string(last));
      }
      for (int l = 1; l <= last; ++l) {
        if (result.epoch_accuracies[l - 1] > best_accuracy) {
          best_accuracy = result.epoch_accuracies[l - 1];
          result.best_epoch = l;
        }
      }
      result.best = TrackerModel::FromCheckpoint(
          ReadCheckpoint(run->TrackerCheckpoint(result.best_epoch)));
      if (std::filesystem::exists(run->PolicyCheckpoint(last))) {
        result.last_policy =
            PolicyNet::FromCheckpoint(ReadCheckpoint(run->PolicyCheckpoint(last)));
      }
      start = last + 1;
      log("resuming after alternate epoch " + std::to_string(last));
    } else {
      run->TruncateAfter(0);
    }
  }
  if (run != nullptr && start == 1) {
    WriteCheckpoint(run->TrackerCheckpoint(0), current.ToCheckpoint(config.seed));
  }

  for (int l = start; l <= config.alternate_epochs; ++l) {
    const Rng epoch_rng = root.Substream("alternate", static_cast<uint64_t>(l));
    const std::vector<Tensor> states = AllSiteStates(current, train, index);

    std::optional<PolicyNet> policy;
    if (!config.da_only) {
      policy = ReinitializePolicy(PolicyStateDim(current), epoch_rng,
                                  config.policy_hidden_dim);
      GeneratorContext ctx;
      ctx.train = &train;
      ctx.sites = &index;
      ctx.site_states = &states;
      ctx.tracker = &current;
      ctx.validation = validation;
      ctx.config = &config;
      ctx.epoch = l;
      policy = GeneratorLearningEpoch(
          ctx, std::move(*policy), epoch_rng.Substream("generator"),
          [run](const RewardTrace& t) {
            if (run != nullptr) run->AppendReward(t);
          });
    }

    const AugmentedSet augmented =
        GenerateAugmentedData(policy ? &*policy : nullptr, index, states, train,
                              config, epoch_rng.Substream("augment"));
    Rng subset_rng = epoch_rng.Substream("augmented-subset");
    const size_t take = static_cast<size_t>(std::llround(
        config.augmented_sample_ratio * static_cast<double>(augmented.instances.size())));
    std::vector<const Turn*> examples = TurnPointers(train);
    for (size_t i : subset_rng.SampleWithoutReplacement(augmented.instances.size(),
                                                        take)) {
      examples.push_back(&augmented.instances[i].turn);
    }

    TrainTrackerOptions retrain;
    retrain.epochs = config.retrain_epochs;
    retrain.batch_size = config.tracker_batch_size;
    double last_loss = std::nan("");
    current = TrainTracker(current, examples, validation, retrain,
                           epoch_rng.Substream("retrain"),
                           [&last_loss](const EpochReport& r) { last_loss = r.loss; });
    const double accuracy = JointGoalAccuracy(current, validation);
    result.epoch_accuracies.push_back(accuracy);
    if (accuracy > best_accuracy) {
      best_accuracy = accuracy;
      result.best = current;
      result.best_epoch = l;
    }
    if (policy) result.last_policy = *policy;
    log("alternate epoch " + std::to_string(l) + ": kept " +
        std::to_string(augmented.instances.size()) + "/" +
        std::to_string(augmented.drawn) + " augmented, used " +
        std::to_string(take) + ", validation JGA " + std::to_string(accuracy));

    if (run != nullptr) {
      json metric = {{"epoch", l},
                     {"split", "validation"},
                     {"joint_goal_accuracy", accuracy},
                     {"loss", std::isfinite(last_loss) ? json(last_loss) : json()}};
      run->AppendMetric(metric);
      std::ofstream aug(run->Augmented(l), std::ios::trunc);
      aug << augmented.ToJson(index).dump(1) << "\n";
      if (policy) {
        WriteCheckpoint(run->PolicyCheckpoint(l), policy->ToCheckpoint(config.seed));
      }
      WriteCheckpoint(run->TrackerCheckpoint(l), current.ToCheckpoint(config.seed));
    }
  }
  return result;
}

}  // namespace rda
