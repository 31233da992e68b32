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

#ifndef RDA_CORPUS_H_
#define RDA_CORPUS_H_

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rda/tokenize.h"

namespace rda {

inline constexpr char kNoneValue[] = "none";

struct SlotValue {
  std::string slot;
  std::string value;

  auto operator<=>(const SlotValue&) const = default;
};

// Sorted, at most one value per slot.
using TurnLabel = std::vector<SlotValue>;
// slot -> value; an absent slot means "none".
using DialogState = std::map<std::string, std::string>;

// slot -> ordered values. Every slot carries the reserved value "none".
class Ontology {
 public:
  Ontology() = default;
  // Validates the invariants and appends "none" to slots that lack it.
  explicit Ontology(std::map<std::string, std::vector<std::string>> slots);

  static Ontology FromJson(const nlohmann::json& j, const std::string& origin);
  nlohmann::json ToJson() const;

  bool HasSlot(const std::string& slot) const;
  bool Contains(const std::string& slot, const std::string& value) const;
  const std::vector<std::string>& Values(const std::string& slot) const;
  const std::map<std::string, std::vector<std::string>>& slots() const {
    return slots_;
  }
  // All (slot, value) pairs in slot order, then value order.
  std::vector<SlotValue> Pairs() const;

  bool operator==(const Ontology&) const = default;

 private:
  std::map<std::string, std::vector<std::string>> slots_;
};

struct Turn {
  Tokens system;
  Tokens user;
  TurnLabel turn_label;
  DialogState gold_state;

  bool operator==(const Turn&) const = default;
};

struct Dialogue {
  std::string id;
  std::vector<Turn> turns;

  bool operator==(const Dialogue&) const = default;
};

enum class Split { kTrain, kValidation, kTest };

std::string SplitName(Split split);
Split ParseSplit(const std::string& name);

struct Corpus {
  std::vector<Dialogue> dialogues;
  Split split = Split::kTrain;
  Ontology ontology;

  size_t TurnCount() const;
};

// `prev` updated with a turn label. A "none" value leaves its slot as it
// was, the same rule the tracker's state update follows.
DialogState ApplyTurnLabel(const DialogState& prev, const TurnLabel& label);

// Recomputes every turn's gold_state from its turn_label.
void ReplayGoldStates(Dialogue& dialogue);

// Sorts the label and checks it against the ontology and the
// one-value-per-slot rule. `where` prefixes error messages.
void ValidateTurnLabel(TurnLabel& label, const Ontology& ontology,
                       const std::string& where);

// Checks turn labels against the ontology and the replay property.
void ValidateDialogue(const Dialogue& dialogue, const Ontology& ontology);

// Parses the dataset JSON. The ontology comes from `ontology_override` if
// given, else from the document's "ontology" key.
Corpus ParseDataset(const nlohmann::json& doc, Split split,
                    const std::optional<Ontology>& ontology_override,
                    const std::string& origin);

// Reads a dataset file. If `ontology_path` is non-empty the ontology is read
// from that file instead (either a bare {slot: [values]} object or a
// document with an "ontology" key).
Corpus LoadDataset(const std::filesystem::path& path, Split split,
                   const std::filesystem::path& ontology_path = {});

Ontology LoadOntology(const std::filesystem::path& path);

// Inverse of ParseDataset; gold states are not written.
nlohmann::json DatasetToJson(const Corpus& corpus);
void SaveDataset(const std::filesystem::path& path, const Corpus& corpus);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);

}  // namespace rda

#endif  // RDA_CORPUS_H_
