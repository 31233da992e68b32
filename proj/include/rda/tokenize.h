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

#ifndef RDA_TOKENIZE_H_
#define RDA_TOKENIZE_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rda {

using Tokens = std::vector<std::string>;

// Lowercases ASCII, splits on whitespace, separates punctuation into
// standalone tokens and splits the clitics n't 's 're 'll 've 'm 'd off
// their host word ("don't" -> "do" "n't"). Bytes >= 0x80 are word
// characters. Tokenize(Detokenize(t)) == t for any t produced by Tokenize.
Tokens Tokenize(std::string_view text);

// Space-joined tokens.
std::string Detokenize(std::span<const std::string> tokens);

}  // namespace rda

#endif  // RDA_TOKENIZE_H_
