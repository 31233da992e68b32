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

#include "rda/tokenize.h"

#include <array>

namespace rda {
namespace {

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsWordChar(unsigned char c) {
  return c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c == '\'';
}

char Lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

constexpr std::array<std::string_view, 6> kClitics = {"'s", "'re", "'ll",
                                                      "'ve", "'m", "'d"};

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

// Splits a word made of letters, digits and apostrophes.
void EmitWord(std::string_view word, Tokens& out) {
  // Quote-like apostrophes at the edges are punctuation.
  size_t lead = 0;
  while (lead < word.size() && word[lead] == '\'') ++lead;
  size_t trail = word.size();
  while (trail > lead && word[trail - 1] == '\'') --trail;
  std::string_view core = word.substr(lead, trail - lead);
  // A bare clitic such as "'s" or "n't" is already a token.
  bool leading_clitic = false;
  if (lead == 1 && !core.empty()) {
    for (std::string_view c : kClitics) {
      if (c.substr(1) == core) leading_clitic = true;
    }
  }
  if (leading_clitic) {
    --lead;
    core = word.substr(lead, trail - lead);
  }
  for (size_t i = 0; i < lead; ++i) out.emplace_back("'");

  if (!core.empty()) {
    if (core != "n't" && core.size() > 3 && EndsWith(core, "n't")) {
      EmitWord(core.substr(0, core.size() - 3), out);
      out.emplace_back("n't");
    } else {
      bool split = false;
      for (std::string_view c : kClitics) {
        if (core.size() > c.size() && EndsWith(core, c)) {
          EmitWord(core.substr(0, core.size() - c.size()), out);
          out.emplace_back(c);
          split = true;
          break;
        }
      }
      if (!split) out.emplace_back(core);
    }
  }
  for (size_t i = trail; i < word.size(); ++i) out.emplace_back("'");
}

}  // namespace

Tokens Tokenize(std::string_view text) {
  Tokens out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      EmitWord(word, out);
      word.clear();
    }
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsSpace(c)) {
      flush();
    } else if (IsWordChar(c)) {
      word.push_back(Lower(ch));
    } else {
      flush();
      out.emplace_back(1, ch);
    }
  }
  flush();
  return out;
}

std::string Detokenize(std::span<const std::string> tokens) {
  std::string s;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) s.push_back(' ');
    s += tokens[i];
  }
  return s;
}

}  // namespace rda
