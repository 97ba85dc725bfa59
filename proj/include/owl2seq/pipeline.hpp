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

#ifndef OWL2SEQ_PIPELINE_HPP
#define OWL2SEQ_PIPELINE_HPP

// Sentence -> grounded axiom: tag the words, transduce the formula template,
// then instantiate the template with the tagged words.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "owl2seq/config.hpp"
#include "owl2seq/corpus.hpp"
#include "owl2seq/dlkit.hpp"
#include "owl2seq/errors.hpp"
#include "owl2seq/tagger.hpp"
#include "owl2seq/transducer.hpp"

namespace owl2seq {

/// Whitespace tokenization, lowercased; number placeholders keep the
/// canonical "N0"/"N1" spelling.
inline std::vector<std::string> tokenize_sentence(std::string_view text) {
  std::vector<std::string> out = split_words(text);
  for (auto& w : out) {
    for (char& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (w.size() == 2 && w[0] == 'n' && std::isdigit(static_cast<unsigned char>(w[1]))) w[0] = 'N';
  }
  return out;
}

enum class TranslationStatus { Ok, ParseFailure, Incompatible };

struct Translation {
  TranslationStatus status = TranslationStatus::Ok;
  std::vector<std::string> words;
  std::vector<Tag> tags;                      // one per word, EOS step dropped
  std::vector<FormulaToken> template_tokens;  // raw transducer output
  std::optional<TemplateFormula> formula_template;
  std::optional<GroundFormula> formula;
  std::string diagnostic;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return status == TranslationStatus::Ok; }
  std::string text() const { return formula ? render_formula(*formula) : std::string(); }
};

inline std::string tags_to_string(std::span<const Tag> tags) {
  std::string out;
  for (Tag t : tags) {
    if (!out.empty()) out += ' ';
    out += tag_name(t);
  }
  return out;
}

/// Both models must have been trained on the same input vocabulary.
inline Translation translate(const TaggerModel& tagger, const TransducerModel& transducer, const Vocabulary& vocab,
                             std::vector<std::string> words) {
  Translation t;
  t.words = std::move(words);
  const auto indices = vocab.encode(t.words);
  t.tags = predict(tagger, indices);
  t.tags.resize(t.words.size());
  t.template_tokens = predict_formula(transducer, indices);
  try {
    t.formula_template = parse_formula(t.template_tokens);
  } catch (const ParseError& e) {
    t.status = TranslationStatus::ParseFailure;
    t.diagnostic = std::string("predicted template does not parse: ") + e.what();
    return t;
  }
  try {
    t.formula = instantiate(*t.formula_template, TaggedSentence{t.words, t.tags}, &t.warnings);
  } catch (const IncompatibilityError& e) {
    t.status = TranslationStatus::Incompatible;
    t.diagnostic = e.what();
  }
  return t;
}

inline void check_shared_vocabulary(const Vocabulary& a, const Vocabulary& b) {
  if (!(a == b)) {
    throw IncompatibilityError("tagger and transducer checkpoints use different input vocabularies (" +
                               std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " words)");
  }
}

}  // namespace owl2seq

#endif  // OWL2SEQ_PIPELINE_HPP
