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

#include "rda/augment.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "rda/error.h"

namespace rda {
namespace {

std::string Normalize(std::string_view text) {
  return Detokenize(Tokenize(text));
}

// All n-grams (n <= max_n) of user utterances, detokenized.
std::set<std::string> UserNgrams(const Corpus& corpus, size_t max_n) {
  std::set<std::string> grams;
  for (const Dialogue& d : corpus.dialogues) {
    for (const Turn& t : d.turns) {
      for (size_t i = 0; i < t.user.size(); ++i) {
        for (size_t n = 1; n <= max_n && i + n <= t.user.size(); ++n) {
          grams.insert(Detokenize(std::span(t.user).subspan(i, n)));
        }
      }
    }
  }
  return grams;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) fields.push_back(field);
  if (!line.empty() && line.back() == '\t') fields.emplace_back();
  return fields;
}

void AddUnique(std::vector<Candidate>& list, Candidate c) {
  for (Candidate& existing : list) {
    if (existing.text == c.text) {
      // A slot-value swap carries the label transform; it wins over a
      // paraphrase with the same surface text.
      if (c.source == CandidateSource::kSlotValue) existing = std::move(c);
      return;
    }
  }
  list.push_back(std::move(c));
}

}  // namespace

std::string SourceName(CandidateSource source) {
  switch (source) {
    case CandidateSource::kOriginal: return "original";
    case CandidateSource::kParaphrase: return "paraphrase";
    case CandidateSource::kSlotValue: return "slot_value";
  }
  return "?";
}

CandidateStore::CandidateStore(Entries entries) : entries_(std::move(entries)) {
  for (const auto& [key, list] : entries_) {
    if (list.empty()) {
      throw DataError("candidate store: empty candidate list for '" + key + "'");
    }
    max_span_tokens_ = std::max(max_span_tokens_, Tokenize(key).size());
  }
}

const std::vector<Candidate>* CandidateStore::Find(
    const std::string& span_text) const {
  auto it = entries_.find(span_text);
  return it == entries_.end() ? nullptr : &it->second;
}

bool IsSwapExcludedValue(const std::string& value) {
  const std::string v = Normalize(value);
  return v == kNoneValue || v == "do n't care" || v == "dontcare" ||
         v == "dont care";
}

CandidateStore BuildCandidateStore(std::istream& tsv, const std::string& origin,
                                   const Ontology& ontology,
                                   const Corpus& train) {
  CandidateStore::Entries entries;
  const std::set<std::string> grams = UserNgrams(train, kMaxParaphraseSpanTokens);

  std::string line;
  size_t line_no = 0;
  while (std::getline(tsv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::vector<std::string> fields = SplitTabs(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(origin + ":" + std::to_string(line_no) +
                       ": expected span<TAB>candidate[<TAB>score], got " +
                       std::to_string(fields.size()) + " field(s)");
    }
    const Tokens span_tokens = Tokenize(fields[0]);
    const Tokens cand_tokens = Tokenize(fields[1]);
    if (span_tokens.empty() || cand_tokens.empty()) {
      throw ParseError(origin + ":" + std::to_string(line_no) +
                       ": empty span or candidate");
    }
    if (span_tokens.size() > kMaxParaphraseSpanTokens) continue;
    const std::string key = Detokenize(span_tokens);
    const std::string text = Detokenize(cand_tokens);
    if (text == key || !grams.contains(key)) continue;
    Candidate c;
    c.text = text;
    c.tokens = cand_tokens;
    c.source = CandidateSource::kParaphrase;
    AddUnique(entries[key], std::move(c));
  }

  // Gold slot values occurring verbatim in training utterances swap to the
  // other values of their slot.
  size_t max_value_tokens = 0;
  for (const SlotValue& sv : ontology.Pairs()) {
    max_value_tokens = std::max(max_value_tokens, Tokenize(sv.value).size());
  }
  const std::set<std::string> value_grams = UserNgrams(train, max_value_tokens);
  for (const auto& [slot, values] : ontology.slots()) {
    for (const std::string& from : values) {
      if (IsSwapExcludedValue(from)) continue;
      const std::string key = Normalize(from);
      if (key.empty() || !value_grams.contains(key)) continue;
      for (const std::string& to : values) {
        if (to == from || IsSwapExcludedValue(to)) continue;
        Candidate c;
        c.tokens = Tokenize(to);
        c.text = Detokenize(c.tokens);
        if (c.text == key || c.text.empty()) continue;
        c.source = CandidateSource::kSlotValue;
        c.slot = slot;
        c.from_value = from;
        c.to_value = to;
        AddUnique(entries[key], std::move(c));
      }
    }
  }

  if (entries.empty()) {
    throw DataError(origin + ": no candidate entry matches the training data");
  }
  return CandidateStore(std::move(entries));
}

CandidateStore LoadCandidates(const std::filesystem::path& path,
                              const Ontology& ontology, const Corpus& train) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open candidate file " + path.string());
  return BuildCandidateStore(in, path.string(), ontology, train);
}

size_t AugmentationSite::CandidateIndex(const Candidate& c) const {
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == c) return i;
  }
  return std::string::npos;
}

SiteIndex IndexSites(const Corpus& corpus, const CandidateStore& store) {
  SiteIndex index;
  const size_t max_n = store.max_span_tokens();
  for (size_t d = 0; d < corpus.dialogues.size(); ++d) {
    const Dialogue& dialogue = corpus.dialogues[d];
    for (size_t t = 0; t < dialogue.turns.size(); ++t) {
      const Turn& turn = dialogue.turns[t];
      for (size_t i = 0; i < turn.user.size(); ++i) {
        for (size_t n = 1; n <= max_n && i + n <= turn.user.size(); ++n) {
          const Tokens span_tokens(turn.user.begin() + i,
                                   turn.user.begin() + i + n);
          const std::string key = Detokenize(span_tokens);
          const std::vector<Candidate>* list = store.Find(key);
          if (list == nullptr) continue;

          AugmentationSite site;
          site.dialogue_index = d;
          site.dialogue_id = dialogue.id;
          site.turn_index = t;
          site.span = {static_cast<int>(i), static_cast<int>(i + n)};
          site.span_text = key;
          Candidate original;
          original.text = key;
          original.tokens = span_tokens;
          original.source = CandidateSource::kOriginal;
          site.candidates.push_back(std::move(original));
          for (const Candidate& c : *list) {
            if (c.source == CandidateSource::kSlotValue) {
              const SlotValue gold{c.slot, c.from_value};
              if (!std::binary_search(turn.turn_label.begin(),
                                      turn.turn_label.end(), gold)) {
                continue;
              }
            }
            site.candidates.push_back(c);
          }
          if (site.candidates.size() > 1) {
            index.sites.push_back(std::move(site));
          }
        }
      }
    }
  }
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t s = 0; s < index.sites.size(); ++s) {
    groups[index.sites[s].span_text].push_back(s);
  }
  for (auto& [key, members] : groups) {
    index.group_keys.push_back(key);
    index.groups.push_back(std::move(members));
  }
  return index;
}

const Turn& SiteTurn(const Corpus& corpus, const AugmentationSite& site) {
  if (site.dialogue_index >= corpus.dialogues.size() ||
      site.turn_index >= corpus.dialogues[site.dialogue_index].turns.size()) {
    throw DataError("site refers to a missing turn of dialogue '" +
                    site.dialogue_id + "'");
  }
  return corpus.dialogues[site.dialogue_index].turns[site.turn_index];
}

AugmentedTurn ApplyReplacement(const Corpus& corpus,
                               const AugmentationSite& site,
                               const Candidate& candidate) {
  if (site.CandidateIndex(candidate) == std::string::npos) {
    throw DataError("candidate '" + candidate.text +
                    "' is not in the candidate set of span '" +
                    site.span_text + "' (dialogue '" + site.dialogue_id +
                    "' turn " + std::to_string(site.turn_index) + ")");
  }
  const Turn& original = SiteTurn(corpus, site);
  AugmentedTurn out{original, site.span};
  if (candidate.source == CandidateSource::kOriginal) return out;

  Tokens& user = out.turn.user;
  user.erase(user.begin() + site.span.start, user.begin() + site.span.end);
  user.insert(user.begin() + site.span.start, candidate.tokens.begin(),
              candidate.tokens.end());
  out.span = {site.span.start,
              site.span.start + static_cast<int>(candidate.tokens.size())};

  if (candidate.source == CandidateSource::kSlotValue) {
    TurnLabel& label = out.turn.turn_label;
    auto it = std::find(label.begin(), label.end(),
                        SlotValue{candidate.slot, candidate.from_value});
    if (it == label.end()) {
      throw DataError("slot-value candidate '" + candidate.text +
                      "' does not match the turn label of dialogue '" +
                      site.dialogue_id + "' turn " +
                      std::to_string(site.turn_index));
    }
    it->value = candidate.to_value;
    std::sort(label.begin(), label.end());
    const Dialogue& dialogue = corpus.dialogues[site.dialogue_index];
    const DialogState prev = site.turn_index == 0
                                 ? DialogState{}
                                 : dialogue.turns[site.turn_index - 1].gold_state;
    out.turn.gold_state = ApplyTurnLabel(prev, label);
  }
  return out;
}

}  // namespace rda
