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

// Fixtures shared by the test binaries.

#ifndef RDA_TESTS_TEST_UTIL_H_
#define RDA_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "json.hpp"
#include "rda/augment.h"
#include "rda/corpus.h"

namespace rda::testing {

// Restaurant-domain ontology used by the hand-written fixtures.
inline nlohmann::json SmallOntologyJson() {
  return {{"food", {"italian", "chinese", "cuban"}},
          {"price", {"cheap", "expensive"}},
          {"area", {"north", "south", "dontcare"}}};
}

// A turn_label array of [slot, value] pairs.
inline nlohmann::json Label(
    std::initializer_list<std::pair<const char*, const char*>> pairs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [slot, value] : pairs) {
    out.push_back(nlohmann::json::array({slot, value}));
  }
  return out;
}

// Two short dialogues. Dialogue "d1" is the restaurant-search opening
// "grandma wants italian" followed by a price/area turn.
inline nlohmann::json SmallDatasetJson() {
  nlohmann::json d1 = {
      {"id", "d1"},
      {"turns",
       {{{"system", ""},
         {"user", "Grandma wants Italian, any suggestions?"},
         {"turn_label", Label({{"food", "italian"}})}},
        {{"system", "request(price)"},
         {"user", "something cheap, any area, but not overpriced please"},
         {"turn_label", Label({{"price", "cheap"}, {"area", "dontcare"}})}}}}};
  nlohmann::json d2 = {
      {"id", "d2"},
      {"turns",
       {{{"system", ""},
         {"user", "i want cheap cheap food in the north"},
         {"turn_label", Label({{"price", "cheap"}, {"area", "north"}})}},
        {{"system", "request(food)"},
         {"user", "chinese food"},
         {"turn_label", Label({{"food", "chinese"}})}},
        {{"system", "inform(name=x)"},
         {"user", "thanks"},
         {"turn_label", nlohmann::json::array()}}}}};
  return {{"ontology", SmallOntologyJson()}, {"dialogues", {d1, d2}}};
}

inline Corpus SmallCorpus() {
  return ParseDataset(SmallDatasetJson(), Split::kTrain, std::nullopt,
                      "<fixture>");
}

// Five dialogues over the small ontology covering overwrites, "none"
// turns, empty labels and dontcare.
inline std::vector<Dialogue> FiveDialogueFixture() {
  using nlohmann::json;
  auto turn = [](const char* system, const char* user, json label) {
    return json{{"system", system}, {"user", user}, {"turn_label", label}};
  };
  json dialogues = json::array();
  dialogues.push_back(
      {{"id", "f1"},
       {"turns",
        json::array({turn("", "italian food please", Label({{"food", "italian"}})),
                     turn("request(price)", "cheap", Label({{"price", "cheap"}})),
                     turn("inform(name=x)", "thanks", json::array())})}});
  dialogues.push_back(
      {{"id", "f2"},
       {"turns", json::array({turn("", "somewhere in the north",
                                   Label({{"area", "north"}})),
                              turn("confirm(area=north)", "no , the south",
                                   Label({{"area", "south"}}))})}});
  dialogues.push_back(
      {{"id", "f3"},
       {"turns", json::array({turn("", "any area , expensive chinese",
                                   Label({{"area", "dontcare"},
                                          {"food", "chinese"},
                                          {"price", "expensive"}}))})}});
  dialogues.push_back(
      {{"id", "f4"},
       {"turns",
        json::array({turn("", "hello", json::array()),
                     turn("request(food)", "cuban", Label({{"food", "cuban"}})),
                     turn("request(price)", "forget the food",
                          Label({{"food", "none"}})),
                     turn("", "cheap in the north",
                          Label({{"area", "north"}, {"price", "cheap"}}))})}});
  dialogues.push_back(
      {{"id", "f5"},
       {"turns", json::array({turn("", "chinese", Label({{"food", "chinese"}})),
                              turn("", "actually italian",
                                   Label({{"food", "italian"}}))})}});
  json doc = {{"ontology", SmallOntologyJson()}, {"dialogues", dialogues}};
  return ParseDataset(doc, Split::kValidation, std::nullopt, "<five>").dialogues;
}

inline CandidateStore StoreFromTsv(const std::string& tsv,
                                   const Corpus& corpus) {
  std::istringstream in(tsv);
  return BuildCandidateStore(in, "<tsv>", corpus.ontology, corpus);
}

// A fresh, empty directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("rda-" + tag + "-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path& path,
                      const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// |a - b| / max(|a|, |b|, floor).
inline double RelativeError(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace rda::testing

#endif  // RDA_TESTS_TEST_UTIL_H_
