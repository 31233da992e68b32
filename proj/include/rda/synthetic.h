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

#ifndef RDA_SYNTHETIC_H_
#define RDA_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "rda/corpus.h"

namespace rda {

// Fixture corpora with a known generating rule.
//
// kRule: every slot value is cued by its own name ("italian", "cheap"), so
// a bag-of-words rule labels every turn exactly.
//
// kPlanted: every value is cued by four synonyms drawn with skewed
// frequencies, and value names never occur verbatim. The candidate file
// gives each cue one label-preserving candidate (another synonym of the
// same value) and one label-flipping candidate (a cue of a different
// value of the same slot); applying the latter leaves the turn mislabeled.
enum class SyntheticKind { kRule, kPlanted };

std::string SyntheticKindName(SyntheticKind kind);
SyntheticKind ParseSyntheticKind(const std::string& name);  // ConfigError

struct SyntheticOptions {
  SyntheticKind kind = SyntheticKind::kPlanted;
  int train_dialogues = 400;
  int validation_dialogues = 100;
  int test_dialogues = 200;
  // Keeps the first ceil(fraction * train_dialogues) training dialogues.
  double train_fraction = 1.0;
  uint64_t seed = 0;
};

struct PlantedRow {
  std::string span;
  std::string good;  // label-preserving
  std::string bad;   // label-flipping
  std::string slot;
  std::string value;
};

struct SyntheticCorpus {
  Corpus train;
  Corpus validation;
  Corpus test;
  std::string candidates_tsv;
  std::vector<PlantedRow> planted;  // empty for kRule
  nlohmann::json manifest;
};

// Throws ConfigError on bad options.
SyntheticCorpus MakeSynthetic(const SyntheticOptions& options);

// train.json, validation.json, test.json, ontology.json, candidates.tsv and
// manifest.json under `dir`.
void WriteSynthetic(const SyntheticCorpus& corpus,
                    const std::filesystem::path& dir);

// The generating rule: the (slot, value) pairs cued by `user`.
TurnLabel SyntheticRuleLabel(SyntheticKind kind, const Tokens& user);

// Cue words per slot and value, most frequent first.
const std::map<std::string, std::map<std::string, std::vector<std::string>>>&
SyntheticCues(SyntheticKind kind);

}  // namespace rda

#endif  // RDA_SYNTHETIC_H_
