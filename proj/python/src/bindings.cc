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

// Python module `rda`: the CLI entry point plus the small pure pieces that
// are handy from a notebook.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "rda/checkpoint.h"
#include "rda/cli.h"
#include "rda/error.h"
#include "rda/policy.h"
#include "rda/rewards.h"
#include "rda/synthetic.h"
#include "rda/tokenize.h"
#include "rda/tracker.h"

namespace py = pybind11;

namespace rda {
namespace {

py::tuple RunCliPy(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code;
  {
    py::gil_scoped_release release;
    code = RunCli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

py::object MakeSyntheticPy(const std::filesystem::path& out, const std::string& kind,
                           int train_dialogues, int validation_dialogues,
                           int test_dialogues, double train_fraction, uint64_t seed) {
  SyntheticOptions options;
  options.kind = ParseSyntheticKind(kind);
  options.train_dialogues = train_dialogues;
  options.validation_dialogues = validation_dialogues;
  options.test_dialogues = test_dialogues;
  options.train_fraction = train_fraction;
  options.seed = seed;
  const SyntheticCorpus corpus = MakeSynthetic(options);
  WriteSynthetic(corpus, out);
  return py::module_::import("json").attr("loads")(corpus.manifest.dump());
}

double JointGoalAccuracyPy(const std::filesystem::path& checkpoint,
                           const std::filesystem::path& data) {
  const TrackerModel model = TrackerModel::FromCheckpoint(ReadCheckpoint(checkpoint));
  const Corpus corpus = LoadDataset(data, Split::kTest);
  return JointGoalAccuracy(model, corpus.dialogues);
}

std::vector<double> PolicyDistributionPy(const std::filesystem::path& policy,
                                         const Tensor& states) {
  return CandidateDistribution(PolicyNet::FromCheckpoint(ReadCheckpoint(policy)), states);
}

std::vector<double> FreshPolicyDistributionPy(const Tensor& states, uint64_t seed) {
  const PolicyNet policy = ReinitializePolicy(static_cast<int>(states.cols()), Rng(seed));
  return CandidateDistribution(policy, states);
}

}  // namespace
}  // namespace rda

PYBIND11_MODULE(rda, m) {
  using namespace rda;
  m.doc() = "Reinforced data augmentation for dialogue state tracking.";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<NonFiniteError>(m, "NonFiniteError", error.ptr());

  m.attr("EXIT_OK") = kExitOk;
  m.attr("EXIT_USAGE") = kExitUsage;
  m.attr("EXIT_DATA") = kExitData;
  m.attr("EXIT_DIVERGENCE") = kExitDivergence;

  m.def("run_cli", &RunCliPy, py::arg("args"),
        "Run one subcommand in-process; returns (exit_code, stdout, stderr).");
  m.def("tokenize", &Tokenize, py::arg("text"));
  m.def("detokenize",
        [](const std::vector<std::string>& tokens) { return Detokenize(tokens); },
        py::arg("tokens"));
  m.def("bag_rewards",
        [](const std::vector<double>& performances) { return BagRewards(performances); },
        py::arg("performances"));
  m.def("instance_reward", &InstanceReward, py::arg("bag_reward"),
        py::arg("is_large_loss"), py::arg("c") = 0.5);
  m.def("make_synthetic", &MakeSyntheticPy, py::arg("out"), py::arg("kind") = "rule",
        py::arg("train_dialogues") = 400, py::arg("validation_dialogues") = 100,
        py::arg("test_dialogues") = 200, py::arg("train_fraction") = 1.0,
        py::arg("seed") = 0,
        "Write a synthetic corpus to `out`; returns its manifest.");
  m.def("joint_goal_accuracy", &JointGoalAccuracyPy, py::arg("checkpoint"),
        py::arg("data"));
  m.def("policy_distribution", &PolicyDistributionPy, py::arg("policy"),
        py::arg("states"), "pi over the rows of a |C_p| x state_dim matrix.");
  m.def("fresh_policy_distribution", &FreshPolicyDistributionPy, py::arg("states"),
        py::arg("seed") = 0);
}
