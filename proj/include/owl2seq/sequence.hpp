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

#ifndef OWL2SEQ_SEQUENCE_HPP
#define OWL2SEQ_SEQUENCE_HPP

// Index-level view of examples shared by both networks, and the accuracy
// counters used for evaluation.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "owl2seq/corpus.hpp"
#include "owl2seq/dlkit.hpp"

namespace owl2seq {

inline constexpr std::size_t kEosIndex = 0;
static_assert(Vocabulary::kEos == kEosIndex);

/// Every sequence carries its trailing EOS.
struct EncodedExample {
  std::vector<std::size_t> words;
  std::vector<std::size_t> tags;
  std::vector<std::size_t> formula;
  std::uint64_t template_id = 0;
};

inline EncodedExample encode_example(const Example& ex, const Vocabulary& vocab) {
  EncodedExample out;
  out.words = vocab.encode(ex.words);
  out.tags.reserve(ex.tags.size() + 1);
  for (Tag t : ex.tags) out.tags.push_back(index_of(t));
  out.tags.push_back(index_of(Tag::EOS));
  out.formula.reserve(ex.formula_tokens.size() + 1);
  for (FormulaToken t : ex.formula_tokens) out.formula.push_back(index_of(t));
  out.formula.push_back(index_of(FormulaToken::EOS));
  out.template_id = ex.template_id;
  return out;
}

inline std::vector<EncodedExample> encode_examples(std::span<const Example> examples, const Vocabulary& vocab) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(encode_example(ex, vocab));
  return out;
}

/// Copy of `seq` extended with EOS up to `length`.
inline std::vector<std::size_t> pad_to(std::span<const std::size_t> seq, std::size_t length) {
  std::vector<std::size_t> out(seq.begin(), seq.end());
  if (out.size() < length) out.resize(length, kEosIndex);
  return out;
}

/// Token and exact-sequence accuracy. Only positions up to and including
/// the first gold EOS are scored; a missing prediction counts as wrong.
struct SequenceScore {
  std::size_t positions = 0;
  std::size_t correct_positions = 0;
  std::size_t sequences = 0;
  std::size_t correct_sequences = 0;

  void add(std::span<const std::size_t> predicted, std::span<const std::size_t> gold) {
    auto end = std::find(gold.begin(), gold.end(), kEosIndex);
    const std::size_t n = end == gold.end() ? gold.size() : static_cast<std::size_t>(end - gold.begin()) + 1;
    std::size_t ok = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k < predicted.size() && predicted[k] == gold[k]) ++ok;
    }
    positions += n;
    correct_positions += ok;
    ++sequences;
    if (ok == n) ++correct_sequences;
  }

  void merge(const SequenceScore& o) {
    positions += o.positions;
    correct_positions += o.correct_positions;
    sequences += o.sequences;
    correct_sequences += o.correct_sequences;
  }

  double token_accuracy() const { return positions == 0 ? 0.0 : double(correct_positions) / double(positions); }
  double sequence_accuracy() const {
    return sequences == 0 ? 0.0 : double(correct_sequences) / double(sequences);
  }
};

}  // namespace owl2seq

#endif  // OWL2SEQ_SEQUENCE_HPP
