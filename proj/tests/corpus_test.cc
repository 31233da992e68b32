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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "rda/augment.h"
#include "rda/corpus.h"
#include "rda/error.h"
#include "rda/synthetic.h"
#include "test_util.h"

namespace rda {
namespace {

using testing::SmallCorpus;
using testing::SmallDatasetJson;
using testing::Label;
using testing::StoreFromTsv;

const char kTsv[] =
    "# span\tcandidate\tscore\n"
    "overpriced\ttoo expensive\t0.9\n"
    "overpriced\tcheap enough\n"
    "any suggestions\tany ideas\n"
    "wants\twould like\n"
    "not in the corpus\tfour tokens\n"
    "nowhere\tnot present\n";

std::vector<std::string> CandidateTexts(const AugmentationSite& site) {
  std::vector<std::string> out;
  for (const Candidate& c : site.candidates) out.push_back(c.text);
  return out;
}

const AugmentationSite* FindSite(const SiteIndex& index,
                                 const std::string& dialogue, size_t turn,
                                 const std::string& span) {
  for (const AugmentationSite& s : index.sites) {
    if (s.dialogue_id == dialogue && s.turn_index == turn && s.span_text == span) {
      return &s;
    }
  }
  return nullptr;
}

TEST(LoadDatasetTest, WellFormedFileRoundTrips) {
  const auto dir = testing::TempDir("corpus");
  testing::WriteFile(dir / "train.json", SmallDatasetJson().dump());
  const Corpus corpus = LoadDataset(dir / "train.json", Split::kTrain);
  ASSERT_EQ(corpus.dialogues.size(), 2u);
  EXPECT_EQ(corpus.TurnCount(), 5u);
  EXPECT_EQ(corpus.dialogues[0].turns[0].user,
            Tokenize("Grandma wants Italian, any suggestions?"));
  for (const Dialogue& d : corpus.dialogues) ValidateDialogue(d, corpus.ontology);

  SaveDataset(dir / "copy.json", corpus);
  const Corpus again = LoadDataset(dir / "copy.json", Split::kTrain);
  EXPECT_EQ(again.dialogues, corpus.dialogues);
  EXPECT_EQ(again.ontology, corpus.ontology);
}

TEST(LoadDatasetTest, UnknownSlotIsRejected) {
  auto doc = SmallDatasetJson();
  doc["dialogues"][0]["turns"][0]["turn_label"] = Label({{"parking", "yes"}});
  try {
    ParseDataset(doc, Split::kTrain, std::nullopt, "bad.json");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("parking"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("d1"), std::string::npos);
  }
}

TEST(LoadDatasetTest, UnknownValueAndDoubleSlotAreRejected) {
  auto doc = SmallDatasetJson();
  doc["dialogues"][0]["turns"][0]["turn_label"] = Label({{"food", "thai"}});
  EXPECT_THROW(ParseDataset(doc, Split::kTrain, std::nullopt, "x"), DataError);
  doc["dialogues"][0]["turns"][0]["turn_label"] = Label({{"food", "italian"},
                                                   {"food", "chinese"}});
  EXPECT_THROW(ParseDataset(doc, Split::kTrain, std::nullopt, "x"), DataError);
}

TEST(LoadDatasetTest, MalformedJsonIsParseError) {
  const auto dir = testing::TempDir("corpus");
  testing::WriteFile(dir / "broken.json", "{\"dialogues\": [");
  EXPECT_THROW(LoadDataset(dir / "broken.json", Split::kTrain), ParseError);
  EXPECT_THROW(LoadDataset(dir / "missing.json", Split::kTrain), DataError);
}

TEST(LoadDatasetTest, RestaurantIntroDialogueReplays) {
  nlohmann::json doc = {
      {"ontology",
       {{"food", {"italian", "chinese"}},
        {"price", {"cheap", "expensive"}},
        {"area", {"north", "don't care"}}}},
      {"dialogues",
       {{{"id", "intro"},
         {"turns",
          {{{"system", ""},
            {"user", "Grandma wants Italian, any suggestions?"},
            {"turn_label", Label({{"food", "italian"}})}},
           {{"system", "request(price)"},
            {"user", "cheap, any area"},
            {"turn_label", Label({{"price", "cheap"}, {"area", "don't care"}})}}}}}}}};
  const Corpus corpus = ParseDataset(doc, Split::kTrain, std::nullopt, "intro");
  const Dialogue& d = corpus.dialogues[0];
  EXPECT_EQ(d.turns[0].gold_state, (DialogState{{"food", "italian"}}));
  EXPECT_EQ(d.turns[1].gold_state,
            (DialogState{{"food", "italian"},
                         {"price", "cheap"},
                         {"area", "don't care"}}));
  ValidateDialogue(d, corpus.ontology);
}

TEST(LoadDatasetTest, OntologyOverrideFile) {
  const auto dir = testing::TempDir("corpus");
  testing::WriteFile(dir / "train.json", SmallDatasetJson().dump());
  nlohmann::json onto = testing::SmallOntologyJson();
  onto["food"].push_back("thai");
  testing::WriteFile(dir / "ontology.json", onto.dump());
  const Corpus corpus =
      LoadDataset(dir / "train.json", Split::kTrain, dir / "ontology.json");
  EXPECT_TRUE(corpus.ontology.Contains("food", "thai"));
  EXPECT_TRUE(corpus.ontology.Contains("food", kNoneValue));
}

TEST(ReplayTest, NoneLeavesSlotAndValuesOverwrite) {
  const DialogState prev = {{"food", "italian"}, {"area", "north"}};
  EXPECT_EQ(ApplyTurnLabel(prev, {{"food", kNoneValue}}), prev);
  EXPECT_EQ(ApplyTurnLabel(prev, {{"area", "south"}, {"price", "cheap"}}),
            (DialogState{{"food", "italian"}, {"area", "south"}, {"price", "cheap"}}));
}

TEST(CandidateStoreTest, ParaphraseRowsForTrainingNgrams) {
  const Corpus corpus = SmallCorpus();
  const CandidateStore store = StoreFromTsv(kTsv, corpus);
  const auto* over = store.Find("overpriced");
  ASSERT_NE(over, nullptr);
  EXPECT_EQ((*over)[0].text, "too expensive");
  EXPECT_EQ((*over)[0].source, CandidateSource::kParaphrase);
  EXPECT_NE(store.Find("any suggestions"), nullptr);
  // Not in the training utterances.
  EXPECT_EQ(store.Find("nowhere"), nullptr);
}

TEST(CandidateStoreTest, FourTokenSpanIsRejected) {
  const Corpus corpus = SmallCorpus();
  const CandidateStore store =
      StoreFromTsv("i want cheap cheap\tfour words\nwants\twould like\n", corpus);
  EXPECT_EQ(store.Find("i want cheap cheap"), nullptr);
  EXPECT_NE(store.Find("wants"), nullptr);
  EXPECT_LE(store.max_span_tokens(), kMaxParaphraseSpanTokens);
}

TEST(CandidateStoreTest, SlotValueSwapsUseOtherValuesOfTheSlot) {
  const Corpus corpus = SmallCorpus();
  const CandidateStore store = StoreFromTsv(kTsv, corpus);
  const auto* italian = store.Find("italian");
  ASSERT_NE(italian, nullptr);
  std::set<std::string> texts;
  for (const Candidate& c : *italian) {
    EXPECT_EQ(c.source, CandidateSource::kSlotValue);
    EXPECT_EQ(c.slot, "food");
    texts.insert(c.text);
  }
  EXPECT_EQ(texts, (std::set<std::string>{"chinese", "cuban"}));
  // "dontcare" and "none" never take part in swaps.
  const auto* north = store.Find("north");
  ASSERT_NE(north, nullptr);
  for (const Candidate& c : *north) EXPECT_EQ(c.text, "south");
}

TEST(CandidateStoreTest, MalformedRowAndEmptyStore) {
  const Corpus corpus = SmallCorpus();
  EXPECT_THROW(StoreFromTsv("overpriced\n", corpus), ParseError);
  nlohmann::json doc = {
      {"ontology", {{"food", {"italian"}}}},
      {"dialogues",
       {{{"id", "x"},
         {"turns",
          {{{"system", ""}, {"user", "hello"}, {"turn_label", nlohmann::json::array()}}}}}}}};
  const Corpus tiny = ParseDataset(doc, Split::kTrain, std::nullopt, "tiny");
  EXPECT_THROW(StoreFromTsv("goodbye\tfarewell\n", tiny), DataError);
}

TEST(IndexSitesTest, OverpricedSiteHasPlusParaphrases) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex index = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  const AugmentationSite* site = FindSite(index, "d1", 1, "overpriced");
  ASSERT_NE(site, nullptr);
  EXPECT_EQ(CandidateTexts(*site),
            (std::vector<std::string>{"overpriced", "too expensive",
                                      "cheap enough"}));
  EXPECT_EQ(site->candidates[0].source, CandidateSource::kOriginal);
}

TEST(IndexSitesTest, UtteranceWithoutHitsHasNoSites) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex index = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  for (const AugmentationSite& s : index.sites) {
    EXPECT_FALSE(s.dialogue_id == "d2" && s.turn_index == 2) << s.span_text;
  }
}

TEST(IndexSitesTest, RepeatedWordGivesSeparateSites) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex index = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  std::vector<Span> spans;
  for (const AugmentationSite& s : index.sites) {
    if (s.dialogue_id == "d2" && s.turn_index == 0 && s.span_text == "cheap") {
      spans.push_back(s.span);
    }
  }
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_NE(spans[0], spans[1]);
}

TEST(IndexSitesTest, GroupsPartitionSites) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex index = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  ASSERT_EQ(index.group_keys.size(), index.groups.size());
  EXPECT_TRUE(std::is_sorted(index.group_keys.begin(), index.group_keys.end()));
  std::vector<size_t> seen;
  for (size_t g = 0; g < index.groups.size(); ++g) {
    for (size_t id : index.groups[g]) {
      EXPECT_EQ(index.sites[id].span_text, index.group_keys[g]);
      seen.push_back(id);
    }
  }
  std::sort(seen.begin(), seen.end());
  for (size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i);
  EXPECT_EQ(seen.size(), index.sites.size());
}

TEST(ApplyReplacementTest, ParaphraseKeepsLabels) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex index = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  const AugmentationSite* site = FindSite(index, "d1", 1, "overpriced");
  ASSERT_NE(site, nullptr);
  const AugmentedTurn out = ApplyReplacement(corpus, *site, site->candidates[1]);
  EXPECT_EQ(Detokenize(out.turn.user),
            "something cheap , any area , but not too expensive please");
  const Turn& orig = SiteTurn(corpus, *site);
  EXPECT_EQ(out.turn.turn_label, orig.turn_label);
  EXPECT_EQ(out.turn.gold_state, orig.gold_state);
  EXPECT_EQ(out.span.size(), 2);
  EXPECT_EQ(Detokenize(std::span(out.turn.user).subspan(out.span.start, 2)),
            "too expensive");
}

TEST(ApplyReplacementTest, OriginalCandidateIsIdentity) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex index = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  for (const AugmentationSite& site : index.sites) {
    const AugmentedTurn out = ApplyReplacement(corpus, site, site.candidates[0]);
    EXPECT_EQ(out.turn, SiteTurn(corpus, site));
    EXPECT_EQ(out.span, site.span);
  }
}

TEST(ApplyReplacementTest, SlotValueSwapRewritesLabel) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex index = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  const AugmentationSite* site = FindSite(index, "d1", 0, "italian");
  ASSERT_NE(site, nullptr);
  const Candidate* chinese = nullptr;
  for (const Candidate& c : site->candidates) {
    if (c.text == "chinese") chinese = &c;
  }
  ASSERT_NE(chinese, nullptr);
  const AugmentedTurn out = ApplyReplacement(corpus, *site, *chinese);
  EXPECT_EQ(Detokenize(out.turn.user),
            "grandma wants chinese , any suggestions ?");
  EXPECT_EQ(out.turn.turn_label, (TurnLabel{{"food", "chinese"}}));
  EXPECT_EQ(out.turn.gold_state, (DialogState{{"food", "chinese"}}));
  // The corpus itself is untouched.
  EXPECT_EQ(SiteTurn(corpus, *site).turn_label, (TurnLabel{{"food", "italian"}}));
}

TEST(ApplyReplacementTest, ForeignCandidateIsRejected) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex index = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  Candidate stranger;
  stranger.tokens = {"pizza"};
  stranger.text = "pizza";
  EXPECT_THROW(ApplyReplacement(corpus, index.sites[0], stranger), DataError);
}

// Site soundness, identity, label soundness and replay on every site of a
// generated corpus, for every candidate.
TEST(CorpusPropertyTest, SitesAndReplacementsAreSound) {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    SyntheticOptions options;
    options.kind = seed % 2 ? SyntheticKind::kRule : SyntheticKind::kPlanted;
    options.train_dialogues = 30;
    options.validation_dialogues = 2;
    options.test_dialogues = 2;
    options.seed = seed;
    const SyntheticCorpus syn = MakeSynthetic(options);
    const Corpus& corpus = syn.train;
    std::istringstream tsv(syn.candidates_tsv);
    const CandidateStore store =
        BuildCandidateStore(tsv, "syn", corpus.ontology, corpus);
    const SiteIndex index = IndexSites(corpus, store);
    ASSERT_FALSE(index.empty());
    for (const AugmentationSite& site : index.sites) {
      const Turn& turn = SiteTurn(corpus, site);
      ASSERT_GT(site.span.size(), 0);
      ASSERT_LE(site.span.end, static_cast<int>(turn.user.size()));
      EXPECT_EQ(Detokenize(std::span(turn.user).subspan(site.span.start,
                                                        site.span.size())),
                site.span_text);
      EXPECT_EQ(site.candidates[0].text, site.span_text);
      const std::vector<std::string> texts = CandidateTexts(site);
      const std::set<std::string> distinct(texts.begin(), texts.end());
      EXPECT_EQ(distinct.size(), site.candidates.size());
      for (const Candidate& c : site.candidates) {
        const AugmentedTurn out = ApplyReplacement(corpus, site, c);
        TurnLabel label = out.turn.turn_label;
        ValidateTurnLabel(label, corpus.ontology, "augmented");
        Dialogue d = corpus.dialogues[site.dialogue_index];
        d.turns[site.turn_index] = out.turn;
        const DialogState prev =
            site.turn_index == 0 ? DialogState{}
                                 : d.turns[site.turn_index - 1].gold_state;
        EXPECT_EQ(out.turn.gold_state, ApplyTurnLabel(prev, out.turn.turn_label));
      }
    }
  }
}

TEST(CorpusPropertyTest, IndexingIsDeterministic) {
  const Corpus corpus = SmallCorpus();
  const SiteIndex a = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  const SiteIndex b = IndexSites(corpus, StoreFromTsv(kTsv, corpus));
  ASSERT_EQ(a.sites.size(), b.sites.size());
  for (size_t i = 0; i < a.sites.size(); ++i) {
    EXPECT_EQ(a.sites[i].dialogue_id, b.sites[i].dialogue_id);
    EXPECT_EQ(a.sites[i].span, b.sites[i].span);
    EXPECT_EQ(a.sites[i].candidates, b.sites[i].candidates);
  }
}

}  // namespace
}  // namespace rda
