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

#include "rda/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "rda/augment.h"
#include "rda/checkpoint.h"
#include "rda/corpus.h"
#include "rda/error.h"
#include "rda/policy.h"
#include "rda/synthetic.h"
#include "rda/tracker.h"
#include "rda/trainloop.h"

namespace rda {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Args {
  // data
  std::string train, validation, data, ontology, candidates;
  std::string split = "test";
  // artifacts
  std::string out, checkpoint, policy, tracker, output, config;
  // config overrides
  std::optional<int> alternate_epochs, generator_epochs, bag_samples, bag_size,
      multiplier, pretrain_epochs, retrain_epochs, batch_size, threads,
      fine_tune_passes;
  std::optional<double> augmented_ratio, validation_ratio, learning_rate, c,
      fine_tune_learning_rate;
  std::optional<uint64_t> seed;
  bool da_only = false;
  bool pretrain = false;
  bool resume = false;
  int verbose = 0;
  // train-tracker
  std::optional<int> epochs;
  // inspect-policy
  int limit = 0;
  // make-synthetic
  std::string kind = "planted";
  int train_dialogues = 400, validation_dialogues = 100, test_dialogues = 200;
  double train_fraction = 1.0;
};

class Logger {
 public:
  Logger(std::ostream& err, int verbose) : err_(err), verbose_(verbose) {}
  void operator()(const std::string& msg) const {
    if (verbose_ > 0) err_ << msg << "\n";
  }

 private:
  std::ostream& err_;
  int verbose_;
};

void AddConfigOptions(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config, "JSON config file; flags override it")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->add_option("--batch-size", a.batch_size, "Tracker batch size");
  cmd->add_option("--learning-rate", a.learning_rate, "ADAM learning rate");
  cmd->add_option("--threads", a.threads, "Worker threads for bag evaluation");
}

void AddRdaOptions(CLI::App* cmd, Args& a) {
  cmd->add_option("-L,--alternate-epochs", a.alternate_epochs, "Alternate epochs");
  cmd->add_option("-N,--generator-epochs", a.generator_epochs,
                  "Generator iterations per alternate epoch");
  cmd->add_option("-M,--bag-samples", a.bag_samples, "Bag resamples per iteration");
  cmd->add_option("-T,--bag-size", a.bag_size, "Instances per bag");
  cmd->add_option("-n,--multiplier", a.multiplier,
                  "Augmented instances per training turn");
  cmd->add_option("-c,--instance-reward", a.c, "Instance reward scale");
  cmd->add_option("--augmented-ratio", a.augmented_ratio,
                  "Fraction of augmented data used for retraining");
  cmd->add_option("--validation-ratio", a.validation_ratio,
                  "Validation subsample ratio for bag rewards");
  cmd->add_option("--pretrain-epochs", a.pretrain_epochs, "Tracker pre-training epochs");
  cmd->add_option("--retrain-epochs", a.retrain_epochs,
                  "Tracker epochs per alternate epoch");
  cmd->add_option("--fine-tune-passes", a.fine_tune_passes,
                  "Passes over a bag when scoring it");
  cmd->add_option("--fine-tune-learning-rate", a.fine_tune_learning_rate,
                  "Gradient-descent step size when scoring a bag");
}

TrainConfig ResolveConfig(const Args& a) {
  TrainConfig c;
  if (!a.config.empty()) c = TrainConfig::FromJson(ReadJsonFile(a.config), c);
  auto set = [](auto& field, const auto& flag) {
    if (flag) field = *flag;
  };
  set(c.alternate_epochs, a.alternate_epochs);
  set(c.generator_epochs, a.generator_epochs);
  set(c.bag_samples, a.bag_samples);
  set(c.bag_size, a.bag_size);
  set(c.augmentation_multiplier, a.multiplier);
  set(c.instance_reward_scale, a.c);
  set(c.augmented_sample_ratio, a.augmented_ratio);
  set(c.validation_subsample_ratio, a.validation_ratio);
  set(c.pretrain_epochs, a.pretrain_epochs);
  set(c.retrain_epochs, a.retrain_epochs);
  set(c.tracker_batch_size, a.batch_size);
  set(c.fine_tune_passes, a.fine_tune_passes);
  set(c.fine_tune_learning_rate, a.fine_tune_learning_rate);
  set(c.learning_rate, a.learning_rate);
  set(c.threads, a.threads);
  set(c.seed, a.seed);
  if (a.da_only) c.da_only = true;
  c.Validate();
  return c;
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void Emit(const Args& a, const json& doc, std::ostream& out) {
  if (a.output.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    WriteText(a.output, doc.dump(2) + "\n");
  }
}

Corpus LoadSplit(const std::string& path, Split split, const Args& a) {
  return LoadDataset(path, split, a.ontology);
}

TrackerModel LoadTracker(const std::string& path) {
  return TrackerModel::FromCheckpoint(ReadCheckpoint(path));
}

// ---------------------------------------------------------------- commands

int TrainTrackerCommand(const Args& a, std::ostream& out, const Logger& log) {
  TrainConfig config = ResolveConfig(a);
  if (a.epochs) config.pretrain_epochs = *a.epochs;
  config.Validate();
  const Corpus train = LoadSplit(a.train, Split::kTrain, a);
  std::optional<Corpus> validation;
  if (!a.validation.empty()) validation = LoadSplit(a.validation, Split::kValidation, a);
  std::optional<CandidateStore> store;
  if (!a.candidates.empty()) store = LoadCandidates(a.candidates, train.ontology, train);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  json resolved = config.ToJson();
  resolved["command"] = "train-tracker";
  WriteText(dir / "config.json", resolved.dump(2) + "\n");
  WriteText(dir / "metrics.jsonl", "");

  const TrackerModel init = InitTracker(train, store ? &*store : nullptr, config);
  TrainTrackerOptions options;
  options.epochs = config.pretrain_epochs;
  options.batch_size = config.tracker_batch_size;
  const std::vector<const Turn*> examples = TurnPointers(train);
  std::span<const Dialogue> val;
  if (validation) val = validation->dialogues;
  const fs::path metrics = dir / "metrics.jsonl";
  const TrackerModel model = TrainTracker(
      init, examples, val, options, Rng(config.seed).Substream("pretrain"),
      [&](const EpochReport& r) {
        json line = {{"epoch", r.epoch},
                     {"split", validation ? "validation" : "train"},
                     {"joint_goal_accuracy", r.validation_accuracy
                                                 ? json(*r.validation_accuracy)
                                                 : json()},
                     {"loss", r.loss}};
        std::ofstream(metrics, std::ios::app) << line.dump() << "\n";
        log("epoch " + std::to_string(r.epoch) + ": loss " + std::to_string(r.loss));
      });
  WriteCheckpoint(dir / "tracker.bin", model.ToCheckpoint(config.seed));
  json summary = {{"checkpoint", (dir / "tracker.bin").string()},
                  {"epochs", config.pretrain_epochs}};
  if (validation) summary["validation_joint_goal_accuracy"] =
      JointGoalAccuracy(model, validation->dialogues);
  out << summary.dump() << "\n";
  return kExitOk;
}

int TrainRdaCommand(const Args& a, std::ostream& out, const Logger& log) {
  const TrainConfig config = ResolveConfig(a);
  if (a.checkpoint.empty() && !a.pretrain) {
    throw ConfigError("train-rda needs --pretrained CHECKPOINT or --pretrain");
  }
  const Corpus train = LoadSplit(a.train, Split::kTrain, a);
  const Corpus validation = LoadSplit(a.validation, Split::kValidation, a);
  if (validation.dialogues.empty()) throw ConfigError("validation split is empty");
  const CandidateStore store = LoadCandidates(a.candidates, train.ontology, train);

  RunDirectory run(a.out);
  json resolved = config.ToJson();
  run.WriteConfig(resolved);

  std::optional<TrackerModel> pretrained;
  if (!a.checkpoint.empty()) {
    pretrained = LoadTracker(a.checkpoint);
  } else if (a.resume && fs::exists(run.TrackerCheckpoint(0))) {
    pretrained = LoadTracker(run.TrackerCheckpoint(0).string());
  } else {
    log("pre-training tracker for " + std::to_string(config.pretrain_epochs) +
        " epochs");
    TrainTrackerOptions options;
    options.epochs = config.pretrain_epochs;
    options.batch_size = config.tracker_batch_size;
    pretrained = TrainTracker(InitTracker(train, &store, config), TurnPointers(train),
                              validation.dialogues, options,
                              Rng(config.seed).Substream("pretrain"));
  }
  if (pretrained->ontology() != train.ontology) {
    throw DataError("checkpoint ontology does not match the training data");
  }

  AlternateOptions options;
  options.run = &run;
  options.resume = a.resume;
  options.log = log;
  const AlternateResult result =
      AlternateLearning(train, validation.dialogues, store, config, *pretrained, options);
  WriteCheckpoint(run.root() / "checkpoints" / "best.bin",
                  result.best.ToCheckpoint(config.seed));
  json summary = {{"best_epoch", result.best_epoch},
                  {"epoch_accuracies", result.epoch_accuracies},
                  {"best_validation_joint_goal_accuracy",
                   result.epoch_accuracies.empty()
                       ? JointGoalAccuracy(result.best, validation.dialogues)
                       : result.epoch_accuracies[result.best_epoch - 1]},
                  {"checkpoint", (run.root() / "checkpoints" / "best.bin").string()}};
  out << summary.dump() << "\n";
  return kExitOk;
}

int EvalCommand(const Args& a, std::ostream& out) {
  const TrackerModel model = LoadTracker(a.checkpoint);
  const Split split = ParseSplit(a.split);
  Corpus data = LoadDataset(a.data, split, a.ontology);
  if (data.TurnCount() == 0) throw ConfigError("split '" + a.split + "' is empty");
  if (data.ontology != model.ontology()) {
    throw DataError("checkpoint ontology does not match " + a.data);
  }
  json result = {{"split", SplitName(split)},
                 {"dialogues", data.dialogues.size()},
                 {"turns", data.TurnCount()},
                 {"joint_goal_accuracy", JointGoalAccuracy(model, data.dialogues)}};
  Emit(a, result, out);
  return kExitOk;
}

int AugmentCommand(const Args& a, std::ostream& out) {
  TrainConfig config = ResolveConfig(a);
  const TrackerModel tracker = LoadTracker(a.checkpoint);
  const Corpus train = LoadSplit(a.train, Split::kTrain, a);
  const CandidateStore store = LoadCandidates(a.candidates, train.ontology, train);
  const SiteIndex index = IndexSites(train, store);
  std::optional<PolicyNet> policy;
  if (!a.policy.empty()) policy = PolicyNet::FromCheckpoint(ReadCheckpoint(a.policy));
  const std::vector<Tensor> states = AllSiteStates(tracker, train, index);
  const AugmentedSet set =
      GenerateAugmentedData(policy ? &*policy : nullptr, index, states, train, config,
                            Rng(config.seed).Substream("augment"));
  Emit(a, set.ToJson(index), out);
  return kExitOk;
}

int InspectPolicyCommand(const Args& a, std::ostream& out) {
  const TrackerModel tracker = LoadTracker(a.tracker);
  const PolicyNet policy = PolicyNet::FromCheckpoint(ReadCheckpoint(a.policy));
  const Corpus train = LoadSplit(a.train, Split::kTrain, a);
  const CandidateStore store = LoadCandidates(a.candidates, train.ontology, train);
  const SiteIndex index = IndexSites(train, store);
  const std::vector<Tensor> states = AllSiteStates(tracker, train, index);
  json doc = json::array();
  const size_t count = a.limit > 0 ? std::min<size_t>(a.limit, index.sites.size())
                                   : index.sites.size();
  for (size_t s = 0; s < count; ++s) {
    const AugmentationSite& site = index.sites[s];
    const std::vector<double> probs = CandidateDistribution(policy, states[s]);
    std::vector<size_t> order(probs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t x, size_t y) { return probs[x] > probs[y]; });
    json cands = json::array();
    for (size_t rank = 0; rank < order.size(); ++rank) {
      const size_t i = order[rank];
      const Candidate& c = site.candidates[i];
      cands.push_back({{"text", c.text},
                       {"source", SourceName(c.source)},
                       {"probability", probs[i]},
                       {"max", probs[i] == probs[order.front()]},
                       {"min", probs[i] == probs[order.back()]}});
    }
    doc.push_back({{"sentence", Detokenize(SiteTurn(train, site).user)},
                   {"dialogue_id", site.dialogue_id},
                   {"turn_index", site.turn_index},
                   {"span", site.span_text},
                   {"candidates", cands}});
  }
  Emit(a, doc, out);
  return kExitOk;
}

int MakeSyntheticCommand(const Args& a, std::ostream& out) {
  SyntheticOptions options;
  options.kind = ParseSyntheticKind(a.kind);
  options.train_dialogues = a.train_dialogues;
  options.validation_dialogues = a.validation_dialogues;
  options.test_dialogues = a.test_dialogues;
  options.train_fraction = a.train_fraction;
  options.seed = a.seed.value_or(0);
  const SyntheticCorpus corpus = MakeSynthetic(options);
  WriteSynthetic(corpus, a.out);
  out << json({{"directory", a.out},
               {"kind", a.kind},
               {"train_dialogues", corpus.train.dialogues.size()},
               {"validation_dialogues", corpus.validation.dialogues.size()},
               {"test_dialogues", corpus.test.dialogues.size()}})
             .dump()
      << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  // One Args per subcommand: CLI11 resets flag targets shared between
  // subcommands that were not invoked.
  Args targs, rargs, eargs, aargs, iargs, margs;
  CLI::App app{"Reinforced data augmentation for dialog state tracking", "rda"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto data_opts = [](CLI::App* cmd, Args& a, bool candidates_required) {
    cmd->add_option("--train", a.train, "Training split (dataset JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--ontology", a.ontology, "Ontology JSON overriding the dataset's")
        ->check(CLI::ExistingFile);
    auto* c = cmd->add_option("--candidates", a.candidates, "Paraphrase candidate TSV")
                  ->check(CLI::ExistingFile);
    if (candidates_required) c->required();
    cmd->add_flag("-v,--verbose", a.verbose, "Progress messages on stderr");
  };

  CLI::App* tt = app.add_subcommand("train-tracker", "Train the baseline tracker");
  data_opts(tt, targs, false);
  tt->add_option("--validation", targs.validation, "Validation split for model selection")
      ->check(CLI::ExistingFile);
  tt->add_option("--out", targs.out, "Output directory")->required();
  tt->add_option("--epochs", targs.epochs, "Training epochs");
  AddConfigOptions(tt, targs);

  CLI::App* rda = app.add_subcommand("train-rda", "Alternate generator and tracker learning");
  data_opts(rda, rargs, true);
  rda->add_option("--validation", rargs.validation, "Validation split")
      ->required()
      ->check(CLI::ExistingFile);
  rda->add_option("--out", rargs.out, "Run directory")->required();
  rda->add_option("--pretrained", rargs.checkpoint, "Pre-trained tracker checkpoint")
      ->check(CLI::ExistingFile);
  rda->add_flag("--pretrain", rargs.pretrain, "Pre-train the tracker first");
  rda->add_flag("--resume", rargs.resume, "Continue from the run directory's checkpoints");
  rda->add_flag("--da-only", rargs.da_only, "Uniform candidate choice, no generator learning");
  AddConfigOptions(rda, rargs);
  AddRdaOptions(rda, rargs);

  CLI::App* ev = app.add_subcommand("eval", "Joint goal accuracy of a checkpoint");
  ev->add_option("--checkpoint", eargs.checkpoint, "Tracker checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--data", eargs.data, "Dataset JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("--split", eargs.split, "Split name recorded in the output");
  ev->add_option("--ontology", eargs.ontology, "Ontology JSON")->check(CLI::ExistingFile);
  ev->add_option("--output", eargs.output, "Write the result here instead of stdout");

  CLI::App* au = app.add_subcommand("augment", "Export an augmented dataset");
  data_opts(au, aargs, true);
  au->add_option("--checkpoint", aargs.checkpoint, "Tracker checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  au->add_option("--policy", aargs.policy, "Policy checkpoint; uniform choice if absent")
      ->check(CLI::ExistingFile);
  au->add_option("--output", aargs.output, "Write the result here instead of stdout");
  AddConfigOptions(au, aargs);
  AddRdaOptions(au, aargs);

  CLI::App* ip = app.add_subcommand("inspect-policy", "Candidate probabilities per site");
  data_opts(ip, iargs, true);
  ip->add_option("--policy", iargs.policy, "Policy checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  ip->add_option("--tracker", iargs.tracker, "Tracker checkpoint the policy was trained with")
      ->required()
      ->check(CLI::ExistingFile);
  ip->add_option("--limit", iargs.limit, "Only the first K sites");
  ip->add_option("--output", iargs.output, "Write the result here instead of stdout");

  CLI::App* ms = app.add_subcommand("make-synthetic", "Write a fixture corpus");
  ms->add_option("--kind", margs.kind, "rule or planted");
  ms->add_option("--out", margs.out, "Output directory")->required();
  ms->add_option("--seed", margs.seed, "Random seed");
  ms->add_option("--train-dialogues", margs.train_dialogues, "Full training split size");
  ms->add_option("--validation-dialogues", margs.validation_dialogues, "Validation size");
  ms->add_option("--test-dialogues", margs.test_dialogues, "Test size");
  ms->add_option("--train-fraction", margs.train_fraction,
                 "Keep this fraction of the training split");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (tt->parsed()) {
      return TrainTrackerCommand(targs, out, Logger(err, targs.verbose));
    }
    if (rda->parsed()) {
      return TrainRdaCommand(rargs, out, Logger(err, rargs.verbose));
    }
    if (ev->parsed()) return EvalCommand(eargs, out);
    if (au->parsed()) return AugmentCommand(aargs, out);
    if (ip->parsed()) return InspectPolicyCommand(iargs, out);
    if (ms->parsed()) return MakeSyntheticCommand(margs, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonFiniteError& e) {
    err << "error: training diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace rda
