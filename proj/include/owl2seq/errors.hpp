// Copyright 2026 The owl2seq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OWL2SEQ_ERRORS_HPP
#define OWL2SEQ_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace owl2seq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between tensors.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Index outside a vocabulary, tag set or term set.
class VocabularyError : public Error {
 public:
  VocabularyError(const std::string& what, std::size_t index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Malformed formula token sequence.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at token " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Well-formed tokens that exceed the template grammar bounds.
class GrammarError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Formula template and tagged sentence disagree on slots.
class IncompatibilityError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated checkpoint / data file.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class VersionError : public CorruptionError {
 public:
  using CorruptionError::CorruptionError;
};

}  // namespace owl2seq

#endif  // OWL2SEQ_ERRORS_HPP
