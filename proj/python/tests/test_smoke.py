# Copyright 2026 The RDA Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json

import numpy as np
import pytest

import rda


def test_tokenize_round_trip():
    tokens = rda.tokenize("I'd like a cheap restaurant, please.")
    assert tokens == rda.tokenize(rda.detokenize(tokens))
    assert "cheap" in tokens


def test_rewards():
    assert rda.bag_rewards([0.45, 0.55]) == [-1.0, 1.0]
    assert rda.bag_rewards([0.6, 0.6]) == [0.0, 0.0]
    assert rda.instance_reward(0.0, True) == 0.5
    assert rda.instance_reward(-0.2, False, c=0.5) == -0.25


def test_fresh_policy_distribution_sums_to_one():
    states = np.random.default_rng(0).uniform(-1, 1, size=(4, 350))
    pi = rda.fresh_policy_distribution(states, seed=3)
    assert len(pi) == 4
    assert sum(pi) == pytest.approx(1.0, abs=1e-12)
    assert rda.fresh_policy_distribution(states[:1], seed=3) == [1.0]


def test_usage_error_exit_code():
    code, _, err = rda.run_cli(["train-tracker"])
    assert code == rda.EXIT_USAGE
    assert err


def test_config_error_is_raised():
    with pytest.raises(rda.ConfigError):
        rda.make_synthetic("/nonexistent", kind="random")


def test_end_to_end(tmp_path):
    data = tmp_path / "data"
    manifest = rda.make_synthetic(data, kind="planted", train_dialogues=20,
                                  validation_dialogues=8, test_dialogues=8, seed=1)
    assert manifest["planted"]
    common = ["--train", str(data / "train.json"),
              "--candidates", str(data / "candidates.tsv"), "--seed", "2"]
    code, out, err = rda.run_cli(
        ["train-tracker", "--out", str(tmp_path / "pre"), "--epochs", "2"] + common)
    assert code == rda.EXIT_OK, err
    code, out, err = rda.run_cli(
        ["train-rda", "--out", str(tmp_path / "run"),
         "--validation", str(data / "validation.json"),
         "--pretrained", str(tmp_path / "pre" / "tracker.bin"),
         "-L", "1", "-N", "2", "-T", "5", "--retrain-epochs", "1"] + common)
    assert code == rda.EXIT_OK, err
    best = tmp_path / "run" / "checkpoints" / "best.bin"
    code, out, _ = rda.run_cli(["eval", "--checkpoint", str(best),
                                "--data", str(data / "test.json")])
    assert code == rda.EXIT_OK
    reported = json.loads(out)["joint_goal_accuracy"]
    assert rda.joint_goal_accuracy(best, data / "test.json") == reported
    assert 0.0 <= reported <= 1.0


def test_missing_checkpoint_is_data_error(tmp_path):
    with pytest.raises(rda.Error):
        rda.joint_goal_accuracy(tmp_path / "none.bin", tmp_path / "none.json")
