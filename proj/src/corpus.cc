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

#include "rda/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "rda/error.h"

namespace rda {

using nlohmann::json;

Ontology::Ontology(std::map<std::string, std::vector<std::string>> slots)
    : slots_(std::move(slots)) {
  for (auto& [slot, values] : slots_) {
    if (slot.empty()) throw DataError("ontology: empty slot name");
    std::set<std::string> seen;
    for (const std::string& v : values) {
      if (!seen.insert(v).second) {
        throw DataError("ontology: duplicate value '" + v + "' in slot '" +
                        slot + "'");
      }
    }
    if (!seen.contains(kNoneValue)) values.emplace_back(kNoneValue);
  }
}

Ontology Ontology::FromJson(const json& j, const std::string& origin) {
  if (!j.is_object()) {
    throw ParseError(origin + ": ontology must be an object of slot -> [values]");
  }
  std::map<std::string, std::vector<std::string>> slots;
  for (const auto& [slot, values] : j.items()) {
    if (!values.is_array()) {
      throw ParseError(origin + ": ontology slot '" + slot +
                       "' must map to an array");
    }
    std::vector<std::string>& out = slots[slot];
    for (const json& v : values) {
      if (!v.is_string()) {
        throw ParseError(origin + ": ontology slot '" + slot +
                         "' has a non-string value");
      }
      out.push_back(v.get<std::string>());
    }
  }
  try {
    return Ontology(std::move(slots));
  } catch (const DataError& e) {
    throw DataError(origin + ": " + e.what());
  }
}

json Ontology::ToJson() const {
  json j = json::object();
  for (const auto& [slot, values] : slots_) j[slot] = values;
  return j;
}

bool Ontology::HasSlot(const std::string& slot) const {
  return slots_.contains(slot);
}

bool Ontology::Contains(const std::string& slot,
                        const std::string& value) const {
  auto it = slots_.find(slot);
  if (it == slots_.end()) return false;
  return std::find(it->second.begin(), it->second.end(), value) !=
         it->second.end();
}

const std::vector<std::string>& Ontology::Values(
    const std::string& slot) const {
  auto it = slots_.find(slot);
  if (it == slots_.end()) throw DataError("unknown slot '" + slot + "'");
  return it->second;
}

std::vector<SlotValue> Ontology::Pairs() const {
  std::vector<SlotValue> pairs;
  for (const auto& [slot, values] : slots_) {
    for (const std::string& v : values) pairs.push_back({slot, v});
  }
  return pairs;
}

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "?";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation" || name == "dev") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + name + "'");
}

size_t Corpus::TurnCount() const {
  size_t n = 0;
  for (const Dialogue& d : dialogues) n += d.turns.size();
  return n;
}

DialogState ApplyTurnLabel(const DialogState& prev, const TurnLabel& label) {
  DialogState next = prev;
  for (const SlotValue& sv : label) {
    if (sv.value != kNoneValue) next[sv.slot] = sv.value;
  }
  return next;
}

void ReplayGoldStates(Dialogue& dialogue) {
  DialogState state;
  for (Turn& t : dialogue.turns) {
    state = ApplyTurnLabel(state, t.turn_label);
    t.gold_state = state;
  }
}

void ValidateTurnLabel(TurnLabel& label, const Ontology& ontology,
                       const std::string& where) {
  std::sort(label.begin(), label.end());
  label.erase(std::unique(label.begin(), label.end()), label.end());
  for (size_t i = 0; i < label.size(); ++i) {
    const SlotValue& sv = label[i];
    if (!ontology.HasSlot(sv.slot)) {
      throw DataError(where + ": unknown slot '" + sv.slot + "'");
    }
    if (!ontology.Contains(sv.slot, sv.value)) {
      throw DataError(where + ": unknown value '" + sv.value + "' for slot '" +
                      sv.slot + "'");
    }
    if (i > 0 && label[i - 1].slot == sv.slot) {
      throw DataError(where + ": slot '" + sv.slot +
                      "' has more than one value in the turn label");
    }
  }
}

void ValidateDialogue(const Dialogue& dialogue, const Ontology& ontology) {
  DialogState state;
  for (size_t t = 0; t < dialogue.turns.size(); ++t) {
    const Turn& turn = dialogue.turns[t];
    const std::string where =
        "dialogue '" + dialogue.id + "' turn " + std::to_string(t);
    TurnLabel label = turn.turn_label;
    ValidateTurnLabel(label, ontology, where);
    if (label != turn.turn_label) {
      throw DataError(where + ": turn label is not in canonical order");
    }
    state = ApplyTurnLabel(state, turn.turn_label);
    if (state != turn.gold_state) {
      throw DataError(where + ": gold state does not match turn-label replay");
    }
    for (const auto& [slot, value] : turn.gold_state) {
      if (!ontology.Contains(slot, value)) {
        throw DataError(where + ": gold state value '" + value +
                        "' not in ontology slot '" + slot + "'");
      }
    }
  }
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace {

const json& Field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing \"" + key + "\"");
  }
  return obj.at(key);
}

std::string StringField(const json& obj, const char* key,
                        const std::string& where) {
  const json& v = Field(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": \"" + key + "\" not a string");
  return v.get<std::string>();
}

}  // namespace

Corpus ParseDataset(const json& doc, Split split,
                    const std::optional<Ontology>& ontology_override,
                    const std::string& origin) {
  Corpus corpus;
  corpus.split = split;
  if (ontology_override) {
    corpus.ontology = *ontology_override;
  } else {
    corpus.ontology =
        Ontology::FromJson(Field(doc, "ontology", origin), origin + " ontology");
  }
  const json& dialogues = Field(doc, "dialogues", origin);
  if (!dialogues.is_array()) {
    throw ParseError(origin + ": \"dialogues\" must be an array");
  }
  std::set<std::string> ids;
  for (size_t d = 0; d < dialogues.size(); ++d) {
    const std::string where_d = origin + " dialogues[" + std::to_string(d) + "]";
    Dialogue dialogue;
    dialogue.id = StringField(dialogues[d], "id", where_d);
    if (!ids.insert(dialogue.id).second) {
      throw DataError(where_d + ": duplicate dialogue id '" + dialogue.id + "'");
    }
    const json& turns = Field(dialogues[d], "turns", where_d);
    if (!turns.is_array()) throw ParseError(where_d + ": \"turns\" not an array");
    for (size_t t = 0; t < turns.size(); ++t) {
      const std::string where_t = where_d + ".turns[" + std::to_string(t) + "]";
      Turn turn;
      turn.system = Tokenize(StringField(turns[t], "system", where_t));
      turn.user = Tokenize(StringField(turns[t], "user", where_t));
      const json& label = Field(turns[t], "turn_label", where_t);
      if (!label.is_array()) {
        throw ParseError(where_t + ": \"turn_label\" not an array");
      }
      for (const json& pair : label) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
            !pair[1].is_string()) {
          throw ParseError(where_t + ": turn_label entries must be [slot, value]");
        }
        turn.turn_label.push_back(
            {pair[0].get<std::string>(), pair[1].get<std::string>()});
      }
      ValidateTurnLabel(turn.turn_label, corpus.ontology,
                        "dialogue '" + dialogue.id + "' turn " +
                            std::to_string(t));
      dialogue.turns.push_back(std::move(turn));
    }
    ReplayGoldStates(dialogue);
    ValidateDialogue(dialogue, corpus.ontology);
    corpus.dialogues.push_back(std::move(dialogue));
  }
  return corpus;
}

Ontology LoadOntology(const std::filesystem::path& path) {
  const json doc = ReadJsonFile(path);
  if (doc.is_object() && doc.contains("ontology")) {
    return Ontology::FromJson(doc.at("ontology"), path.string());
  }
  return Ontology::FromJson(doc, path.string());
}

Corpus LoadDataset(const std::filesystem::path& path, Split split,
                   const std::filesystem::path& ontology_path) {
  std::optional<Ontology> ontology;
  if (!ontology_path.empty()) ontology = LoadOntology(ontology_path);
  return ParseDataset(ReadJsonFile(path), split, ontology, path.string());
}

json DatasetToJson(const Corpus& corpus) {
  json dialogues = json::array();
  for (const Dialogue& d : corpus.dialogues) {
    json turns = json::array();
    for (const Turn& t : d.turns) {
      json label = json::array();
      for (const SlotValue& sv : t.turn_label) {
        label.push_back({sv.slot, sv.value});
      }
      turns.push_back({{"system", Detokenize(t.system)},
                       {"user", Detokenize(t.user)},
                       {"turn_label", label}});
    }
    dialogues.push_back({{"id", d.id}, {"turns", turns}});
  }
  return {{"ontology", corpus.ontology.ToJson()}, {"dialogues", dialogues}};
}

void SaveDataset(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << DatasetToJson(corpus).dump(1) << "\n";
}

}  // namespace rda
