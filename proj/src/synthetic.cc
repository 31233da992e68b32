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

#include "rda/synthetic.h"

#include <cmath>
#include <fstream>
#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "rda/error.h"
#include "rda/rng.h"
#include "rda/tokenize.h"

namespace rda {

namespace {

using CueTable = std::map<std::string, std::map<std::string, std::vector<std::string>>>;

const CueTable& PlantedCues() {
  static const CueTable table = {
      {"food",
       {{"italian", {"pasta", "pizza", "risotto", "lasagna"}},
        {"chinese", {"noodles", "dumplings", "wonton", "dimsum"}},
        {"indian", {"curry", "tandoori", "masala", "biryani"}},
        {"mexican", {"tacos", "burritos", "enchiladas", "quesadillas"}}}},
      {"price",
       {{"cheap", {"budget", "inexpensive", "affordable", "thrifty"}},
        {"moderate", {"midrange", "reasonable", "average", "fair"}},
        {"expensive", {"pricey", "upscale", "luxurious", "fancy"}}}},
      {"area",
       {{"north", {"northern", "uptown", "northside", "boreal"}},
        {"south", {"southern", "downtown", "southside", "austral"}},
        {"east", {"eastern", "eastside", "orient", "sunrise"}},
        {"west", {"western", "westside", "occident", "sunset"}}}},
  };
  return table;
}

const CueTable& RuleCues() {
  static const CueTable table = [] {
    CueTable t;
    for (const auto& [slot, values] : PlantedCues()) {
      for (const auto& [value, cues] : values) t[slot][value] = {value};
    }
    return t;
  }();
  return table;
}

// Synonym frequencies, most frequent first.
const std::vector<double> kCueWeights = {0.55, 0.25, 0.13, 0.07};

const std::map<std::string, std::vector<std::string>> kSlotTemplates = {
    {"food", {"{} food", "some {}", "serving {}", "a {} place"}},
    {"price", {"{} prices", "something {}", "in the {} range", "{} please"}},
    {"area", {"in the {} part", "the {} area", "located {}", "near {}"}},
};

const std::map<std::string, std::string> kSlotQuestions = {
    {"food", "what type of food would you like ?"},
    {"price", "what price range do you prefer ?"},
    {"area", "which part of town ?"},
};

const std::vector<std::string> kOpeners = {"", "i am looking for", "i want",
                                           "hello , i need", "yes ,", "ok ,"};
const std::vector<std::string> kEmptyTurns = {
    "thank you", "no that is all", "what is the phone number ?",
    "could you give me the address ?"};

std::string Fill(const std::string& pattern, const std::string& word) {
  std::string out = pattern;
  out.replace(out.find("{}"), 2, word);
  return out;
}

template <typename T>
const T& Pick(const std::vector<T>& items, Rng& rng) {
  return items[rng.UniformIndex(items.size())];
}

std::vector<std::string> Keys(const std::map<std::string, std::vector<std::string>>& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

class DialogueWriter {
 public:
  DialogueWriter(SyntheticKind kind, Rng rng) : kind_(kind), rng_(std::move(rng)) {}

  Dialogue Make(const std::string& id) {
    const CueTable& cues = SyntheticCues(kind_);
    std::vector<std::string> slots;
    for (const auto& [slot, values] : cues) slots.push_back(slot);

    Dialogue d;
    d.id = id;
    DialogState state;
    const int turns = 2 + static_cast<int>(rng_.UniformIndex(3));
    for (int t = 0; t < turns; ++t) {
      std::vector<std::string> mention;
      std::vector<std::string> open;
      for (const std::string& s : slots) {
        if (!state.contains(s)) open.push_back(s);
      }
      if (t == 0) {
        const auto idx = rng_.SampleWithoutReplacement(slots.size(),
                                                       1 + rng_.UniformIndex(2));
        for (size_t i : idx) mention.push_back(slots[i]);
      } else if (rng_.Bernoulli(0.75)) {
        mention.push_back(!open.empty() && rng_.Bernoulli(0.7) ? Pick(open, rng_)
                                                               : Pick(slots, rng_));
      }

      Turn turn;
      std::string system = "hello , how can i help you ?";
      if (t > 0) {
        system = open.empty() ? "anything else ?" : kSlotQuestions.at(Pick(open, rng_));
      }
      turn.system = Tokenize(system);

      std::string user;
      if (mention.empty()) {
        user = Pick(kEmptyTurns, rng_);
      } else {
        user = Pick(kOpeners, rng_);
        for (size_t i = 0; i < mention.size(); ++i) {
          const std::string& slot = mention[i];
          const auto values = Keys(cues.at(slot));
          const std::string& value = Pick(values, rng_);
          const auto& words = cues.at(slot).at(value);
          const std::string& cue =
              words.size() == 1 ? words[0] : words[rng_.Categorical(kCueWeights)];
          if (i > 0) user += " and";
          user += " " + Fill(Pick(kSlotTemplates.at(slot), rng_), cue);
          turn.turn_label.push_back({slot, value});
        }
        user += rng_.Bernoulli(0.5) ? " ." : "";
      }
      turn.user = Tokenize(user);
      std::sort(turn.turn_label.begin(), turn.turn_label.end());
      state = ApplyTurnLabel(state, turn.turn_label);
      turn.gold_state = state;
      d.turns.push_back(std::move(turn));
    }
    return d;
  }

 private:
  SyntheticKind kind_;
  Rng rng_;
};

Ontology SyntheticOntology(SyntheticKind kind) {
  std::map<std::string, std::vector<std::string>> slots;
  for (const auto& [slot, values] : SyntheticCues(kind)) slots[slot] = Keys(values);
  return Ontology(slots);
}

Corpus MakeSplit(SyntheticKind kind, Split split, int count, const Rng& root) {
  Corpus c;
  c.split = split;
  c.ontology = SyntheticOntology(kind);
  DialogueWriter writer(kind, root.Substream(SplitName(split)));
  char id[64];
  for (int i = 0; i < count; ++i) {
    std::snprintf(id, sizeof id, "%s-%04d", SplitName(split).c_str(), i);
    c.dialogues.push_back(writer.Make(id));
  }
  return c;
}

}  // namespace

std::string SyntheticKindName(SyntheticKind kind) {
  return kind == SyntheticKind::kRule ? "rule" : "planted";
}

SyntheticKind ParseSyntheticKind(const std::string& name) {
  if (name == "rule") return SyntheticKind::kRule;
  if (name == "planted") return SyntheticKind::kPlanted;
  throw ConfigError("unknown synthetic corpus kind '" + name +
                    "' (expected rule or planted)");
}

const CueTable& SyntheticCues(SyntheticKind kind) {
  return kind == SyntheticKind::kRule ? RuleCues() : PlantedCues();
}

TurnLabel SyntheticRuleLabel(SyntheticKind kind, const Tokens& user) {
  const std::set<std::string> words(user.begin(), user.end());
  TurnLabel label;
  for (const auto& [slot, values] : SyntheticCues(kind)) {
    for (const auto& [value, cues] : values) {
      for (const std::string& cue : cues) {
        if (words.contains(cue)) label.push_back({slot, value});
      }
    }
  }
  std::sort(label.begin(), label.end());
  label.erase(std::unique(label.begin(), label.end()), label.end());
  return label;
}

SyntheticCorpus MakeSynthetic(const SyntheticOptions& options) {
  if (options.train_dialogues < 1 || options.validation_dialogues < 1 ||
      options.test_dialogues < 1) {
    throw ConfigError("synthetic corpus: every split needs at least one dialogue");
  }
  if (!(options.train_fraction > 0.0 && options.train_fraction <= 1.0)) {
    throw ConfigError("synthetic corpus: train fraction must be in (0, 1]");
  }
  const Rng root = Rng(options.seed).Substream("synthetic");
  SyntheticCorpus out;
  out.train = MakeSplit(options.kind, Split::kTrain, options.train_dialogues, root);
  const auto keep = static_cast<size_t>(
      std::ceil(options.train_fraction * options.train_dialogues - 1e-9));
  out.train.dialogues.resize(std::max<size_t>(keep, 1));
  out.validation = MakeSplit(options.kind, Split::kValidation,
                             options.validation_dialogues, root);
  out.test = MakeSplit(options.kind, Split::kTest, options.test_dialogues, root);

  std::ostringstream tsv;
  tsv << "# span\tcandidate\tscore\n";
  const CueTable& cues = SyntheticCues(options.kind);
  if (options.kind == SyntheticKind::kPlanted) {
    for (const auto& [slot, values] : cues) {
      const auto names = Keys(values);
      for (size_t v = 0; v < names.size(); ++v) {
        const auto& words = values.at(names[v]);
        const auto& other = values.at(names[(v + 1) % names.size()]);
        for (size_t k = 0; k < words.size(); ++k) {
          PlantedRow row{words[k], words[(k + 1) % words.size()], other[k], slot,
                         names[v]};
          tsv << row.span << "\t" << row.good << "\t1.0\n";
          tsv << row.span << "\t" << row.bad << "\t1.0\n";
          out.planted.push_back(row);
        }
      }
    }
  } else {
    // A few filler paraphrases; slot-value swaps come from the ontology.
    tsv << "want\twould like\t1.0\n"
        << "food\tcuisine\t1.0\n"
        << "prices\tcosts\t1.0\n"
        << "area\tneighborhood\t1.0\n"
        << "near\tclose to\t1.0\n";
  }
  out.candidates_tsv = tsv.str();

  nlohmann::json rows = nlohmann::json::array();
  for (const PlantedRow& r : out.planted) {
    rows.push_back({{"span", r.span}, {"good", r.good}, {"bad", r.bad},
                    {"slot", r.slot}, {"value", r.value}});
  }
  out.manifest = {{"kind", SyntheticKindName(options.kind)},
                  {"seed", options.seed},
                  {"train_dialogues", out.train.dialogues.size()},
                  {"validation_dialogues", out.validation.dialogues.size()},
                  {"test_dialogues", out.test.dialogues.size()},
                  {"cues", cues},
                  {"planted", rows}};
  return out;
}

void WriteSynthetic(const SyntheticCorpus& corpus,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SaveDataset(dir / "train.json", corpus.train);
  SaveDataset(dir / "validation.json", corpus.validation);
  SaveDataset(dir / "test.json", corpus.test);
  auto write = [&dir](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out << text;
  };
  write("ontology.json", corpus.train.ontology.ToJson().dump(2) + "\n");
  write("candidates.tsv", corpus.candidates_tsv);
  write("manifest.json", corpus.manifest.dump(2) + "\n");
}

}  // namespace rda
