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

#ifndef RDA_AUGMENT_H_
#define RDA_AUGMENT_H_

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "rda/corpus.h"

namespace rda {

enum class CandidateSource { kOriginal, kParaphrase, kSlotValue };

std::string SourceName(CandidateSource source);

struct Candidate {
  std::string text;  // detokenized
  Tokens tokens;
  CandidateSource source = CandidateSource::kParaphrase;
  // Slot-value swaps only: the label (slot, from_value) becomes
  // (slot, to_value).
  std::string slot;
  std::string from_value;
  std::string to_value;

  bool operator==(const Candidate&) const = default;
};

// Span text -> replacement candidates. Immutable once built.
class CandidateStore {
 public:
  using Entries = std::map<std::string, std::vector<Candidate>>;

  CandidateStore() = default;
  explicit CandidateStore(Entries entries);

  const Entries& entries() const { return entries_; }
  const std::vector<Candidate>* Find(const std::string& span_text) const;
  // Longest key, in tokens.
  size_t max_span_tokens() const { return max_span_tokens_; }
  size_t size() const { return entries_.size(); }

 private:
  Entries entries_;
  size_t max_span_tokens_ = 0;
};

inline constexpr size_t kMaxParaphraseSpanTokens = 3;

// True for values that never take part in slot-value swaps ("none" and
// the don't-care family).
bool IsSwapExcludedValue(const std::string& value);

// Builds the store from TSV rows `span<TAB>candidate[<TAB>score]` plus
// slot-value swap entries. Paraphrase rows survive only if the span has
// 1-3 tokens and occurs in some user utterance of `train`. Throws
// ParseError on malformed rows and DataError if nothing survives.
CandidateStore BuildCandidateStore(std::istream& tsv, const std::string& origin,
                                   const Ontology& ontology,
                                   const Corpus& train);
CandidateStore LoadCandidates(const std::filesystem::path& path,
                              const Ontology& ontology, const Corpus& train);

struct Span {
  int start = 0;
  int end = 0;  // exclusive

  int size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

// One replaceable span occurrence: (x, y, p, C_p).
struct AugmentationSite {
  size_t dialogue_index = 0;
  std::string dialogue_id;
  size_t turn_index = 0;
  Span span;
  std::string span_text;
  // candidates[0] is the original span (source kOriginal).
  std::vector<Candidate> candidates;

  size_t CandidateIndex(const Candidate& c) const;  // npos if absent
};

struct SiteIndex {
  std::vector<AugmentationSite> sites;
  // Distinct span texts in sorted order, and the sites holding each.
  std::vector<std::string> group_keys;
  std::vector<std::vector<size_t>> groups;

  bool empty() const { return sites.empty(); }
};

// One site per (turn, span occurrence) of a store key in a user utterance.
// Slot-value candidates apply only where the turn label carries the
// matching (slot, value); occurrences left with no applicable candidate
// are skipped.
SiteIndex IndexSites(const Corpus& corpus, const CandidateStore& store);

struct AugmentedTurn {
  Turn turn;
  Span span;  // span of the inserted candidate in the new utterance
};

// Replaces the site's span with `candidate` in a copy of its turn. Slot-value
// candidates rewrite the turn label and the gold state is replayed from
// the previous turn's state. Throws DataError if `candidate` is not in C_p.
AugmentedTurn ApplyReplacement(const Corpus& corpus,
                               const AugmentationSite& site,
                               const Candidate& candidate);

const Turn& SiteTurn(const Corpus& corpus, const AugmentationSite& site);

}  // namespace rda

#endif  // RDA_AUGMENT_H_
