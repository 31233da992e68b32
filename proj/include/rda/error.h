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

#ifndef RDA_ERROR_H_
#define RDA_ERROR_H_

#include <stdexcept>
#include <string>

namespace rda {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. The message carries the file and line/record locus.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a data invariant (unknown slot, broken
// replay, candidate not in C_p, empty corpus, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Operand shapes disagree; the message names the offending graph node.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A gradient, loss or parameter stopped being finite.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rda

#endif  // RDA_ERROR_H_
