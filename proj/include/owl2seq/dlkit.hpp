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

#ifndef OWL2SEQ_DLKIT_HPP
#define OWL2SEQ_DLKIT_HPP

// Target language: formula terms, word tags, the template/grounded formula
// AST, its linear token form and the combiner that grounds a formula
// template with a tagged sentence.
//
// Token grammar (the "." between role and filler exists only in text):
//   axiom := side SUBSUMES side
//   side  := atom [(AND|OR) atom]
//   atom  := Ci
//          | EXISTS Rj Ci
//          | cardop Nk Rj Ci
//          | cardop Nk (AND|OR) cardop Nl Rj Ci

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "owl2seq/errors.hpp"

namespace owl2seq {

// ---------------------------------------------------------------------------
// Terms and tags. EOS is index 0 in both sets.

enum class FormulaToken : std::uint8_t {
  EOS = 0,
  SUBSUMES,
  AND,
  OR,
  EXISTS,
  GEQ,
  LEQ,
  LT,
  GT,
  EQ,
  C0,
  C1,
  C2,
  C3,
  R0,
  R1,
  N0,
  N1,
};

enum class Tag : std::uint8_t { EOS = 0, w, C0, C1, C2, C3, R0, R1, N0, N1 };

inline constexpr std::size_t kMaxConceptSlots = 4;
inline constexpr std::size_t kMaxRoleSlots = 2;
inline constexpr std::size_t kMaxNumberSlots = 2;
inline constexpr std::size_t kFormulaTermCount = 18;
inline constexpr std::size_t kTagCount = 10;

inline constexpr std::array<std::string_view, kFormulaTermCount> kFormulaTokenNames = {
    "EOS", "SUBSUMES", "AND", "OR", "EXISTS", "GEQ", "LEQ", "LT", "GT",
    "EQ",  "C0",       "C1",  "C2", "C3",     "R0",  "R1",  "N0", "N1"};

inline constexpr std::array<std::string_view, kTagCount> kTagNames = {"EOS", "w",  "C0", "C1", "C2",
                                                                     "C3",  "R0", "R1", "N0", "N1"};

static_assert(static_cast<std::size_t>(FormulaToken::N1) + 1 == kFormulaTermCount);
static_assert(static_cast<std::size_t>(Tag::N1) + 1 == kTagCount);
static_assert(1 + 9 + kMaxConceptSlots + kMaxRoleSlots + kMaxNumberSlots == kFormulaTermCount);
static_assert(2 + kMaxConceptSlots + kMaxRoleSlots + kMaxNumberSlots == kTagCount);

inline std::string_view token_name(FormulaToken t) { return kFormulaTokenNames[static_cast<std::size_t>(t)]; }
inline std::string_view tag_name(Tag t) { return kTagNames[static_cast<std::size_t>(t)]; }

inline FormulaToken token_from_index(std::size_t i) {
  if (i >= kFormulaTermCount) throw VocabularyError("formula term index out of range", i);
  return static_cast<FormulaToken>(i);
}
inline Tag tag_from_index(std::size_t i) {
  if (i >= kTagCount) throw VocabularyError("tag index out of range", i);
  return static_cast<Tag>(i);
}
inline std::size_t index_of(FormulaToken t) { return static_cast<std::size_t>(t); }
inline std::size_t index_of(Tag t) { return static_cast<std::size_t>(t); }

inline std::optional<FormulaToken> parse_token_name(std::string_view s) {
  for (std::size_t i = 0; i < kFormulaTermCount; ++i) {
    if (kFormulaTokenNames[i] == s) return static_cast<FormulaToken>(i);
  }
  return std::nullopt;
}
inline std::optional<Tag> parse_tag_name(std::string_view s) {
  for (std::size_t i = 0; i < kTagCount; ++i) {
    if (kTagNames[i] == s) return static_cast<Tag>(i);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Slots

enum class SlotKind : std::uint8_t { Concept, Role, Number };

struct Slot {
  SlotKind kind;
  unsigned index;
  auto operator<=>(const Slot&) const = default;
};

inline std::string slot_name(const Slot& s) {
  const char prefix = s.kind == SlotKind::Concept ? 'C' : s.kind == SlotKind::Role ? 'R' : 'N';
  return prefix + std::to_string(s.index);
}

inline std::size_t slot_ceiling(SlotKind k) {
  switch (k) {
    case SlotKind::Concept: return kMaxConceptSlots;
    case SlotKind::Role: return kMaxRoleSlots;
    case SlotKind::Number: return kMaxNumberSlots;
  }
  return 0;
}

inline FormulaToken slot_token(const Slot& s) {
  if (s.index >= slot_ceiling(s.kind)) throw VocabularyError("slot " + slot_name(s) + " has no formula term", s.index);
  switch (s.kind) {
    case SlotKind::Concept: return static_cast<FormulaToken>(index_of(FormulaToken::C0) + s.index);
    case SlotKind::Role: return static_cast<FormulaToken>(index_of(FormulaToken::R0) + s.index);
    case SlotKind::Number: return static_cast<FormulaToken>(index_of(FormulaToken::N0) + s.index);
  }
  return FormulaToken::EOS;
}

inline Tag slot_tag(const Slot& s) {
  if (s.index >= slot_ceiling(s.kind)) throw VocabularyError("slot " + slot_name(s) + " has no tag", s.index);
  switch (s.kind) {
    case SlotKind::Concept: return static_cast<Tag>(index_of(Tag::C0) + s.index);
    case SlotKind::Role: return static_cast<Tag>(index_of(Tag::R0) + s.index);
    case SlotKind::Number: return static_cast<Tag>(index_of(Tag::N0) + s.index);
  }
  return Tag::w;
}

inline std::optional<Slot> token_slot(FormulaToken t) {
  const auto i = index_of(t);
  if (i >= index_of(FormulaToken::N0)) return Slot{SlotKind::Number, static_cast<unsigned>(i - index_of(FormulaToken::N0))};
  if (i >= index_of(FormulaToken::R0)) return Slot{SlotKind::Role, static_cast<unsigned>(i - index_of(FormulaToken::R0))};
  if (i >= index_of(FormulaToken::C0)) return Slot{SlotKind::Concept, static_cast<unsigned>(i - index_of(FormulaToken::C0))};
  return std::nullopt;
}

inline std::optional<Slot> tag_slot(Tag t) {
  const auto i = index_of(t);
  if (i >= index_of(Tag::N0)) return Slot{SlotKind::Number, static_cast<unsigned>(i - index_of(Tag::N0))};
  if (i >= index_of(Tag::R0)) return Slot{SlotKind::Role, static_cast<unsigned>(i - index_of(Tag::R0))};
  if (i >= index_of(Tag::C0)) return Slot{SlotKind::Concept, static_cast<unsigned>(i - index_of(Tag::C0))};
  return std::nullopt;
}

using SlotSet = std::set<Slot>;

// ---------------------------------------------------------------------------
// AST. `Ref` is SlotIndex for templates and std::string for grounded
// formulas; the slot category of a ref is implied by its position.

enum class CardOp : std::uint8_t { Geq, Leq, Lt, Gt, Eq };
enum class Connective : std::uint8_t { None, And, Or };

inline FormulaToken card_token(CardOp op) {
  return static_cast<FormulaToken>(index_of(FormulaToken::GEQ) + static_cast<std::size_t>(op));
}
inline std::optional<CardOp> token_card_op(FormulaToken t) {
  if (index_of(t) >= index_of(FormulaToken::GEQ) && index_of(t) <= index_of(FormulaToken::EQ)) {
    return static_cast<CardOp>(index_of(t) - index_of(FormulaToken::GEQ));
  }
  return std::nullopt;
}
inline std::string_view card_symbol(CardOp op) {
  switch (op) {
    case CardOp::Geq: return "≥";
    case CardOp::Leq: return "≤";
    case CardOp::Lt: return "<";
    case CardOp::Gt: return ">";
    case CardOp::Eq: return "=";
  }
  return "?";
}

using SlotIndex = unsigned;

template <typename Ref>
struct ConceptAtom {
  Ref concept_ref;
  friend bool operator==(const ConceptAtom&, const ConceptAtom&) = default;
};

template <typename Ref>
struct ExistsAtom {
  Ref role;
  Ref concept_ref;
  friend bool operator==(const ExistsAtom&, const ExistsAtom&) = default;
};

template <typename Ref>
struct CardAtom {
  CardOp op;
  Ref number;
  Ref role;
  Ref concept_ref;
  friend bool operator==(const CardAtom&, const CardAtom&) = default;
};

// Two cardinality constraints sharing one role and filler.
template <typename Ref>
struct CardPairAtom {
  CardOp op1;
  Ref number1;
  Connective joiner;  // And or Or
  CardOp op2;
  Ref number2;
  Ref role;
  Ref concept_ref;
  friend bool operator==(const CardPairAtom&, const CardPairAtom&) = default;
};

template <typename Ref>
using Atom = std::variant<ConceptAtom<Ref>, ExistsAtom<Ref>, CardAtom<Ref>, CardPairAtom<Ref>>;

template <typename Ref>
struct Side {
  std::vector<Atom<Ref>> atoms;
  Connective connective = Connective::None;
  friend bool operator==(const Side&, const Side&) = default;
};

/// lhs ⊑ rhs
template <typename Ref>
struct Formula {
  Side<Ref> lhs;
  Side<Ref> rhs;
  friend bool operator==(const Formula&, const Formula&) = default;
};

using TemplateFormula = Formula<SlotIndex>;
using GroundFormula = Formula<std::string>;

// Visit every ref of a formula with its slot kind, in token order.
template <typename Ref, typename F>
void for_each_ref(const Formula<Ref>& f, F&& fn) {
  auto visit_side = [&](const Side<Ref>& side) {
    for (const auto& atom : side.atoms) {
      std::visit(
          [&](const auto& a) {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, ConceptAtom<Ref>>) {
              fn(SlotKind::Concept, a.concept_ref);
            } else if constexpr (std::is_same_v<A, ExistsAtom<Ref>>) {
              fn(SlotKind::Role, a.role);
              fn(SlotKind::Concept, a.concept_ref);
            } else if constexpr (std::is_same_v<A, CardAtom<Ref>>) {
              fn(SlotKind::Number, a.number);
              fn(SlotKind::Role, a.role);
              fn(SlotKind::Concept, a.concept_ref);
            } else {
              fn(SlotKind::Number, a.number1);
              fn(SlotKind::Number, a.number2);
              fn(SlotKind::Role, a.role);
              fn(SlotKind::Concept, a.concept_ref);
            }
          },
          atom);
    }
  };
  visit_side(f.lhs);
  visit_side(f.rhs);
}

// Rebuild a formula with every ref mapped through fn(kind, ref).
template <typename To, typename From, typename F>
Formula<To> map_refs(const Formula<From>& f, F&& fn) {
  auto map_side = [&](const Side<From>& side) {
    Side<To> out;
    out.connective = side.connective;
    for (const auto& atom : side.atoms) {
      out.atoms.push_back(std::visit(
          [&](const auto& a) -> Atom<To> {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, ConceptAtom<From>>) {
              return ConceptAtom<To>{fn(SlotKind::Concept, a.concept_ref)};
            } else if constexpr (std::is_same_v<A, ExistsAtom<From>>) {
              To role = fn(SlotKind::Role, a.role);
              return ExistsAtom<To>{std::move(role), fn(SlotKind::Concept, a.concept_ref)};
            } else if constexpr (std::is_same_v<A, CardAtom<From>>) {
              To number = fn(SlotKind::Number, a.number);
              To role = fn(SlotKind::Role, a.role);
              return CardAtom<To>{a.op, std::move(number), std::move(role), fn(SlotKind::Concept, a.concept_ref)};
            } else {
              To n1 = fn(SlotKind::Number, a.number1);
              To n2 = fn(SlotKind::Number, a.number2);
              To role = fn(SlotKind::Role, a.role);
              return CardPairAtom<To>{a.op1,          std::move(n1),   a.joiner, a.op2, std::move(n2),
                                      std::move(role), fn(SlotKind::Concept, a.concept_ref)};
            }
          },
          atom));
    }
    return out;
  };
  return Formula<To>{map_side(f.lhs), map_side(f.rhs)};
}

// ---------------------------------------------------------------------------
// Parsing

struct ParseOptions {
  // The template grammar allows one connective per side.
  std::size_t max_atoms_per_side = 2;
};

namespace detail {

class FormulaParser {
 public:
  FormulaParser(std::span<const FormulaToken> tokens, const ParseOptions& opt) : opt_(opt) {
    for (FormulaToken t : tokens) {
      if (t == FormulaToken::EOS) break;
      tokens_.push_back(t);
    }
  }

  TemplateFormula parse() {
    TemplateFormula f;
    f.lhs = side();
    expect(FormulaToken::SUBSUMES, "expected SUBSUMES");
    f.rhs = side();
    if (pos_ != tokens_.size()) {
      if (peek() == FormulaToken::SUBSUMES) throw ParseError("second SUBSUMES", pos_);
      throw ParseError("trailing token " + std::string(token_name(tokens_[pos_])), pos_);
    }
    return f;
  }

 private:
  std::optional<FormulaToken> peek(std::size_t ahead = 0) const {
    if (pos_ + ahead < tokens_.size()) return tokens_[pos_ + ahead];
    return std::nullopt;
  }

  FormulaToken take(const char* what) {
    if (pos_ >= tokens_.size()) throw ParseError(std::string(what) + ", found end of formula", pos_);
    return tokens_[pos_++];
  }

  void expect(FormulaToken t, const char* what) {
    const std::size_t at = pos_;
    if (take(what) != t) throw ParseError(std::string(what) + ", found " + std::string(token_name(tokens_[at])), at);
  }

  SlotIndex slot(SlotKind kind, const char* what) {
    const std::size_t at = pos_;
    const FormulaToken t = take(what);
    const auto s = token_slot(t);
    if (!s || s->kind != kind) throw ParseError(std::string(what) + ", found " + std::string(token_name(t)), at);
    return s->index;
  }

  static std::optional<Connective> connective_of(std::optional<FormulaToken> t) {
    if (t == FormulaToken::AND) return Connective::And;
    if (t == FormulaToken::OR) return Connective::Or;
    return std::nullopt;
  }

  Side<SlotIndex> side() {
    Side<SlotIndex> s;
    const std::size_t start = pos_;
    s.atoms.push_back(atom());
    while (auto c = connective_of(peek())) {
      const std::size_t at = pos_;
      if (s.connective != Connective::None && s.connective != *c) {
        throw GrammarError("mixed AND/OR on one side", at);
      }
      ++pos_;
      s.connective = *c;
      s.atoms.push_back(atom());
      if (s.atoms.size() > opt_.max_atoms_per_side) {
        throw GrammarError("more than one connective on a side starting", start);
      }
    }
    return s;
  }

  Atom<SlotIndex> atom() {
    const std::size_t at = pos_;
    const FormulaToken t = take("expected an atom");
    if (auto s = token_slot(t); s && s->kind == SlotKind::Concept) {
      return ConceptAtom<SlotIndex>{s->index};
    }
    if (t == FormulaToken::EXISTS) {
      const SlotIndex role = slot(SlotKind::Role, "expected a role after EXISTS");
      return ExistsAtom<SlotIndex>{role, slot(SlotKind::Concept, "expected a concept after the role")};
    }
    if (auto op = token_card_op(t)) {
      const SlotIndex n1 = slot(SlotKind::Number, "expected a number after the cardinality operator");
      // Contracted pair: op N (AND|OR) op N R C. A plain connective here
      // followed by anything but a second cardop belongs to the side.
      if (auto j = connective_of(peek()); j && peek(1) && token_card_op(*peek(1))) {
        ++pos_;
        const CardOp op2 = *token_card_op(take("expected a cardinality operator"));
        const SlotIndex n2 = slot(SlotKind::Number, "expected a number after the cardinality operator");
        const SlotIndex role = slot(SlotKind::Role, "expected a role");
        return CardPairAtom<SlotIndex>{*op, n1, *j, op2, n2, role, slot(SlotKind::Concept, "expected a concept")};
      }
      const SlotIndex role = slot(SlotKind::Role, "expected a role after the number");
      return CardAtom<SlotIndex>{*op, n1, role, slot(SlotKind::Concept, "expected a concept after the role")};
    }
    throw ParseError("unexpected " + std::string(token_name(t)) + " where an atom should start", at);
  }

  std::vector<FormulaToken> tokens_;
  std::size_t pos_ = 0;
  ParseOptions opt_;
};

}  // namespace detail

/// Parses up to the first EOS (or the end of input).
inline TemplateFormula parse_formula(std::span<const FormulaToken> tokens, const ParseOptions& opt = {}) {
  return detail::FormulaParser(tokens, opt).parse();
}

/// Parses whitespace-separated ASCII term names ("C0 SUBSUMES C1").
inline std::vector<FormulaToken> tokens_from_string(std::string_view text) {
  std::vector<FormulaToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    const std::size_t j = text.find_first_of(" \t", i);
    const std::string_view word = text.substr(i, j == std::string_view::npos ? text.size() - i : j - i);
    if (word.empty()) break;
    const auto t = parse_token_name(word);
    if (!t) throw ParseError("unknown formula term '" + std::string(word) + "'", out.size());
    out.push_back(*t);
    i += word.size();
  }
  return out;
}

inline std::string tokens_to_string(std::span<const FormulaToken> tokens) {
  std::string out;
  for (FormulaToken t : tokens) {
    if (!out.empty()) out += ' ';
    out += token_name(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::vector<FormulaToken> formula_tokens(const TemplateFormula& f) {
  std::vector<FormulaToken> out;
  auto slot_tok = [](SlotKind k, SlotIndex i) { return slot_token(Slot{k, i}); };
  auto conn_tok = [](Connective c) { return c == Connective::Or ? FormulaToken::OR : FormulaToken::AND; };
  auto emit_side = [&](const Side<SlotIndex>& side) {
    for (std::size_t a = 0; a < side.atoms.size(); ++a) {
      if (a > 0) out.push_back(conn_tok(side.connective));
      std::visit(
          [&](const auto& atom) {
            using A = std::decay_t<decltype(atom)>;
            if constexpr (std::is_same_v<A, ConceptAtom<SlotIndex>>) {
              out.push_back(slot_tok(SlotKind::Concept, atom.concept_ref));
            } else if constexpr (std::is_same_v<A, ExistsAtom<SlotIndex>>) {
              out.push_back(FormulaToken::EXISTS);
              out.push_back(slot_tok(SlotKind::Role, atom.role));
              out.push_back(slot_tok(SlotKind::Concept, atom.concept_ref));
            } else if constexpr (std::is_same_v<A, CardAtom<SlotIndex>>) {
              out.push_back(card_token(atom.op));
              out.push_back(slot_tok(SlotKind::Number, atom.number));
              out.push_back(slot_tok(SlotKind::Role, atom.role));
              out.push_back(slot_tok(SlotKind::Concept, atom.concept_ref));
            } else {
              out.push_back(card_token(atom.op1));
              out.push_back(slot_tok(SlotKind::Number, atom.number1));
              out.push_back(conn_tok(atom.joiner));
              out.push_back(card_token(atom.op2));
              out.push_back(slot_tok(SlotKind::Number, atom.number2));
              out.push_back(slot_tok(SlotKind::Role, atom.role));
              out.push_back(slot_tok(SlotKind::Concept, atom.concept_ref));
            }
          },
          side.atoms[a]);
    }
  };
  emit_side(f.lhs);
  out.push_back(FormulaToken::SUBSUMES);
  emit_side(f.rhs);
  return out;
}

namespace detail {

inline std::string ref_text(SlotKind k, SlotIndex i) { return slot_name(Slot{k, i}); }
inline std::string ref_text(SlotKind, const std::string& s) { return s; }

inline std::string_view connective_symbol(Connective c) { return c == Connective::Or ? " ⊔ " : " ⊓ "; }

template <typename Ref>
std::string card_text(CardOp op, const Ref& n, const Ref& r, const Ref& c) {
  return std::string(card_symbol(op)) + " " + ref_text(SlotKind::Number, n) + " " + ref_text(SlotKind::Role, r) +
         "." + ref_text(SlotKind::Concept, c);
}

template <typename Ref>
std::string side_text(const Side<Ref>& side) {
  std::string out;
  for (std::size_t a = 0; a < side.atoms.size(); ++a) {
    if (a > 0) out += connective_symbol(side.connective);
    out += std::visit(
        [&](const auto& atom) -> std::string {
          using A = std::decay_t<decltype(atom)>;
          if constexpr (std::is_same_v<A, ConceptAtom<Ref>>) {
            return ref_text(SlotKind::Concept, atom.concept_ref);
          } else if constexpr (std::is_same_v<A, ExistsAtom<Ref>>) {
            return "∃" + ref_text(SlotKind::Role, atom.role) + "." + ref_text(SlotKind::Concept, atom.concept_ref);
          } else if constexpr (std::is_same_v<A, CardAtom<Ref>>) {
            return card_text(atom.op, atom.number, atom.role, atom.concept_ref);
          } else {
            // Expanded rendering: role and filler repeated for each bound.
            std::string pair = card_text(atom.op1, atom.number1, atom.role, atom.concept_ref) +
                               std::string(connective_symbol(atom.joiner)) +
                               card_text(atom.op2, atom.number2, atom.role, atom.concept_ref);
            return side.atoms.size() > 1 ? "(" + pair + ")" : pair;
          }
        },
        side.atoms[a]);
  }
  return out;
}

}  // namespace detail

/// Human-readable rendering, e.g. "C0 ⊑ C1 ⊓ = N0 R0.C2".
template <typename Ref>
std::string render_formula(const Formula<Ref>& f) {
  return detail::side_text(f.lhs) + " ⊑ " + detail::side_text(f.rhs);
}

struct SerializedFormula {
  std::vector<FormulaToken> tokens;
  std::string text;
};

inline SerializedFormula serialize_formula(const TemplateFormula& f) { return {formula_tokens(f), render_formula(f)}; }

// ---------------------------------------------------------------------------
// Structural checks

inline SlotSet placeholder_signature(const TemplateFormula& f) {
  SlotSet out;
  for_each_ref(f, [&](SlotKind k, SlotIndex i) { out.insert(Slot{k, i}); });
  return out;
}

/// Slot indices are dense from 0 within every category.
inline bool slots_dense(const SlotSet& slots) {
  for (SlotKind k : {SlotKind::Concept, SlotKind::Role, SlotKind::Number}) {
    unsigned expected = 0;
    for (const Slot& s : slots) {
      if (s.kind != k) continue;
      if (s.index != expected) return false;
      ++expected;
    }
  }
  return true;
}

/// Bounds of the template grammar: at most two atoms per side, one
/// connective kind per side, slots within the tag ceilings.
template <typename Ref>
bool within_template_bounds(const Formula<Ref>& f) {
  for (const auto* side : {&f.lhs, &f.rhs}) {
    if (side->atoms.empty() || side->atoms.size() > 2) return false;
    if ((side->atoms.size() > 1) != (side->connective != Connective::None)) return false;
  }
  if constexpr (std::is_same_v<Ref, SlotIndex>) {
    for (const Slot& s : placeholder_signature(f)) {
      if (s.index >= slot_ceiling(s.kind)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Tagged sentences and the combiner

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<Tag> tags;
};

/// Slot -> surface form. Concept runs are joined with "_"; EOS tags inside
/// a sentence behave like `w`.
inline std::vector<std::pair<Slot, std::string>> slot_mentions(const TaggedSentence& s) {
  if (s.tokens.size() != s.tags.size()) {
    throw ShapeError("tagged sentence has " + std::to_string(s.tokens.size()) + " tokens and " +
                     std::to_string(s.tags.size()) + " tags");
  }
  std::vector<std::pair<Slot, std::string>> out;
  std::size_t k = 0;
  while (k < s.tags.size()) {
    const auto slot = tag_slot(s.tags[k]);
    if (!slot) {
      ++k;
      continue;
    }
    std::string surface = s.tokens[k];
    std::size_t end = k + 1;
    if (slot->kind == SlotKind::Concept) {
      while (end < s.tags.size() && s.tags[end] == s.tags[k]) surface += "_" + s.tokens[end++];
    }
    for (const auto& [seen, text] : out) {
      if (seen == *slot) {
        throw IncompatibilityError("slot " + slot_name(*slot) + " is tagged on more than one " +
                                   (slot->kind == SlotKind::Concept ? "run" : "token"));
      }
    }
    out.emplace_back(*slot, std::move(surface));
    k = end;
  }
  return out;
}

inline SlotSet placeholder_signature(const TaggedSentence& s) {
  SlotSet out;
  for (Tag t : s.tags) {
    if (auto slot = tag_slot(t)) out.insert(*slot);
  }
  return out;
}

/// Grounds a formula template with the surface forms of a tagged sentence.
/// Slots tagged in the sentence but unused by the template are reported in
/// `warnings` (when given) and otherwise ignored.
inline GroundFormula instantiate(const TemplateFormula& tmpl, const TaggedSentence& tagged,
                                 std::vector<std::string>* warnings = nullptr) {
  const auto mentions = slot_mentions(tagged);
  auto lookup = [&](SlotKind k, SlotIndex i) -> std::string {
    const Slot want{k, i};
    for (const auto& [slot, text] : mentions) {
      if (slot == want) return text;
    }
    throw IncompatibilityError("formula template uses " + slot_name(want) + " but the sentence has no word tagged " +
                               slot_name(want));
  };
  GroundFormula out = map_refs<std::string>(tmpl, lookup);
  if (warnings) {
    const SlotSet used = placeholder_signature(tmpl);
    for (const auto& [slot, text] : mentions) {
      if (!used.contains(slot)) warnings->push_back("slot " + slot_name(slot) + " ('" + text + "') is unused");
    }
  }
  return out;
}

/// Inverse of instantiate for templates whose slots are numbered in order of
/// first appearance: distinct surface strings become fresh slot indices.
inline TemplateFormula erase_surface(const GroundFormula& f) {
  std::vector<std::pair<std::pair<SlotKind, std::string>, SlotIndex>> seen;
  std::array<SlotIndex, 3> next{0, 0, 0};
  return map_refs<SlotIndex>(f, [&](SlotKind k, const std::string& s) {
    for (const auto& [key, idx] : seen) {
      if (key.first == k && key.second == s) return idx;
    }
    const SlotIndex idx = next[static_cast<std::size_t>(k)]++;
    seen.push_back({{k, s}, idx});
    return idx;
  });
}

}  // namespace owl2seq

#endif  // OWL2SEQ_DLKIT_HPP
