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

#ifndef OWL2SEQ_CORPUS_HPP
#define OWL2SEQ_CORPUS_HPP

// Synthetic corpus: a definitory-sentence grammar expanded into
// (sentence template, tag template, formula template) triples, filled from
// a lexicon to produce tagged training and test examples.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "owl2seq/config.hpp"
#include "owl2seq/dlkit.hpp"
#include "owl2seq/numkit.hpp"

namespace owl2seq {

// ---------------------------------------------------------------------------
// Lexicon

struct LexiconSizes {
  std::size_t verbs = 840;
  std::size_t adjectives = 36;
  std::size_t nouns1 = 50;
  std::size_t nouns2 = 92;
};

struct Lexicon {
  std::vector<std::string> verbs;       // third person singular, fills roles
  std::vector<std::string> adjectives;
  std::vector<std::string> nouns1;      // modifier nouns ("sword")
  std::vector<std::string> nouns2;      // head nouns ("sharpener")

  void validate() const {
    auto check = [](const std::vector<std::string>& list, const char* what) {
      if (list.empty()) throw ConfigError(std::string("lexicon list '") + what + "' is empty");
      std::unordered_set<std::string> seen;
      for (const auto& w : list) {
        if (w.empty() || w.find_first_of(" \t\r\n") != std::string::npos) {
          throw ConfigError(std::string("lexicon list '") + what + "' has a malformed entry '" + w + "'");
        }
        if (std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isupper(c) != 0; })) {
          throw ConfigError(std::string("lexicon list '") + what + "' entry '" + w + "' is not lowercase");
        }
        if (!seen.insert(w).second) {
          throw ConfigError(std::string("lexicon list '") + what + "' repeats '" + w + "'");
        }
      }
    };
    check(verbs, "verbs");
    check(adjectives, "adjectives");
    check(nouns1, "nouns1");
    check(nouns2, "nouns2");
  }

  Lexicon truncated(const LexiconSizes& sizes) const {
    auto take = [](const std::vector<std::string>& v, std::size_t n, const char* what) {
      if (n > v.size()) {
        throw ConfigError(std::string("lexicon list '") + what + "' has " + std::to_string(v.size()) +
                          " entries, " + std::to_string(n) + " requested");
      }
      return std::vector<std::string>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
    };
    return {take(verbs, sizes.verbs, "verbs"), take(adjectives, sizes.adjectives, "adjectives"),
            take(nouns1, sizes.nouns1, "nouns1"), take(nouns2, sizes.nouns2, "nouns2")};
  }
};

inline std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word list " + path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    const auto w = trim(line);
    if (!w.empty() && w.front() != '#') out.emplace_back(w);
  }
  return out;
}

/// Reads verbs.txt, adjectives.txt, nouns1.txt and nouns2.txt from `dir`.
inline Lexicon load_lexicon(const std::string& dir) {
  Lexicon lex{load_word_list(dir + "/verbs.txt"), load_word_list(dir + "/adjectives.txt"),
              load_word_list(dir + "/nouns1.txt"), load_word_list(dir + "/nouns2.txt")};
  lex.validate();
  return lex;
}

// ---------------------------------------------------------------------------
// Concept names: adj+n1+n2, n1+n2, adj+n2, adj+n1, n1, n2

using ConceptName = std::vector<std::string>;

inline std::size_t concept_name_count(const Lexicon& lex) {
  const std::size_t a = lex.adjectives.size(), n1 = lex.nouns1.size(), n2 = lex.nouns2.size();
  return a * n1 * n2 + n1 * n2 + a * n2 + a * n1 + n1 + n2;
}

/// The index-th name in pattern order; index < concept_name_count(lex).
inline ConceptName concept_name_at(const Lexicon& lex, std::size_t index) {
  const auto& A = lex.adjectives;
  const auto& N1 = lex.nouns1;
  const auto& N2 = lex.nouns2;
  const std::size_t a = A.size(), n1 = N1.size(), n2 = N2.size();
  std::size_t i = index;
  if (i < a * n1 * n2) return {A[i / (n1 * n2)], N1[(i / n2) % n1], N2[i % n2]};
  i -= a * n1 * n2;
  if (i < n1 * n2) return {N1[i / n2], N2[i % n2]};
  i -= n1 * n2;
  if (i < a * n2) return {A[i / n2], N2[i % n2]};
  i -= a * n2;
  if (i < a * n1) return {A[i / n1], N1[i % n1]};
  i -= a * n1;
  if (i < n1) return {N1[i]};
  i -= n1;
  if (i < n2) return {N2[i]};
  throw ConfigError("concept name index " + std::to_string(index) + " out of range");
}

inline std::vector<ConceptName> concept_names(const Lexicon& lex) {
  std::vector<ConceptName> out;
  const std::size_t n = concept_name_count(lex);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(concept_name_at(lex, i));
  return out;
}

// ---------------------------------------------------------------------------
// Grammar

enum class AtomKind : std::uint8_t { Concept, Exists, Card, CardPair };

struct CardPairForm {
  CardOp op1;
  Connective joiner;
  CardOp op2;
  friend bool operator==(const CardPairForm&, const CardPairForm&) = default;
};

struct GrammarConfig {
  std::vector<AtomKind> lhs_atoms{AtomKind::Concept, AtomKind::Exists, AtomKind::Card};
  std::vector<AtomKind> rhs_atoms{AtomKind::Concept, AtomKind::Exists, AtomKind::Card, AtomKind::CardPair};
  std::vector<Connective> lhs_connectives{Connective::And, Connective::Or};
  std::vector<Connective> rhs_connectives{Connective::And, Connective::Or};
  std::vector<CardOp> card_ops{CardOp::Geq, CardOp::Leq, CardOp::Lt, CardOp::Gt, CardOp::Eq};
  std::vector<CardPairForm> card_pairs{{CardOp::Lt, Connective::Or, CardOp::Gt},
                                       {CardOp::Geq, Connective::And, CardOp::Leq}};
  // Maximum alternatives taken from every verbalization choice; 0 = all.
  std::size_t variants = 0;
  // Maximum sentence templates per formula template, spread evenly over
  // the full verbalization list; 0 = all.
  std::size_t verbalizations = 0;
  // Two-atom sides combine atom shapes in non-decreasing shape order only,
  // which drops the mirrored "B and A" duplicate of "A and B".
  bool ordered_pairs = true;

  static GrammarConfig from_config(const KeyValueConfig& kv);
  std::string canonical() const;
};

namespace detail {

inline AtomKind parse_atom_kind(const std::string& s) {
  if (s == "concept") return AtomKind::Concept;
  if (s == "exists") return AtomKind::Exists;
  if (s == "card") return AtomKind::Card;
  if (s == "cardpair") return AtomKind::CardPair;
  throw ConfigError("unknown atom kind '" + s + "' (concept, exists, card, cardpair)");
}
inline const char* atom_kind_name(AtomKind k) {
  switch (k) {
    case AtomKind::Concept: return "concept";
    case AtomKind::Exists: return "exists";
    case AtomKind::Card: return "card";
    case AtomKind::CardPair: return "cardpair";
  }
  return "?";
}
inline Connective parse_connective(const std::string& s) {
  if (s == "and") return Connective::And;
  if (s == "or") return Connective::Or;
  throw ConfigError("unknown connective '" + s + "' (and, or)");
}
inline const char* connective_name(Connective c) { return c == Connective::Or ? "or" : "and"; }
inline CardOp parse_card_op(const std::string& s) {
  if (s == "geq") return CardOp::Geq;
  if (s == "leq") return CardOp::Leq;
  if (s == "lt") return CardOp::Lt;
  if (s == "gt") return CardOp::Gt;
  if (s == "eq") return CardOp::Eq;
  throw ConfigError("unknown cardinality operator '" + s + "' (geq, leq, lt, gt, eq)");
}
inline const char* card_op_name(CardOp op) {
  switch (op) {
    case CardOp::Geq: return "geq";
    case CardOp::Leq: return "leq";
    case CardOp::Lt: return "lt";
    case CardOp::Gt: return "gt";
    case CardOp::Eq: return "eq";
  }
  return "?";
}

template <typename T, typename F>
std::vector<T> parse_list(const KeyValueConfig& kv, const std::string& key, const std::vector<T>& fallback, F&& parse) {
  if (!kv.has(key)) return fallback;
  std::vector<T> out;
  for (const auto& item : kv.get_list(key, {})) {
    if (item == "none") continue;
    out.push_back(parse(item));
  }
  return out;
}

}  // namespace detail

inline GrammarConfig GrammarConfig::from_config(const KeyValueConfig& kv) {
  using namespace detail;
  GrammarConfig g;
  g.lhs_atoms = parse_list<AtomKind>(kv, "lhs_atoms", g.lhs_atoms, parse_atom_kind);
  g.rhs_atoms = parse_list<AtomKind>(kv, "rhs_atoms", g.rhs_atoms, parse_atom_kind);
  g.lhs_connectives = parse_list<Connective>(kv, "lhs_connectives", g.lhs_connectives, parse_connective);
  g.rhs_connectives = parse_list<Connective>(kv, "rhs_connectives", g.rhs_connectives, parse_connective);
  g.card_ops = parse_list<CardOp>(kv, "card_ops", g.card_ops, parse_card_op);
  g.card_pairs = parse_list<CardPairForm>(kv, "card_pairs", g.card_pairs, [](const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ConfigError("card pair '" + s + "' must look like op:joiner:op");
    return CardPairForm{parse_card_op(parts[0]), parse_connective(parts[1]), parse_card_op(parts[2])};
  });
  g.variants = kv.get_uint("variants", g.variants);
  g.verbalizations = kv.get_uint("verbalizations", g.verbalizations);
  g.ordered_pairs = kv.get_bool("ordered_pairs", g.ordered_pairs);
  return g;
}

inline std::string GrammarConfig::canonical() const {
  using namespace detail;
  auto join = [](const auto& list, auto&& name) {
    std::string out;
    for (const auto& x : list) {
      if (!out.empty()) out += ',';
      out += name(x);
    }
    return out.empty() ? std::string("none") : out;
  };
  std::string s;
  s += "lhs_atoms=" + join(lhs_atoms, atom_kind_name) + "\n";
  s += "rhs_atoms=" + join(rhs_atoms, atom_kind_name) + "\n";
  s += "lhs_connectives=" + join(lhs_connectives, connective_name) + "\n";
  s += "rhs_connectives=" + join(rhs_connectives, connective_name) + "\n";
  s += "card_ops=" + join(card_ops, card_op_name) + "\n";
  s += "card_pairs=" + join(card_pairs, [](const CardPairForm& p) {
         return std::string(card_op_name(p.op1)) + ":" + connective_name(p.joiner) + ":" + card_op_name(p.op2);
       }) + "\n";
  s += "variants=" + std::to_string(variants) + "\n";
  s += "verbalizations=" + std::to_string(verbalizations) + "\n";
  s += "ordered_pairs=" + std::string(ordered_pairs ? "true" : "false") + "\n";
  return s;
}

/// One element of a sentence template: a literal word or a slot.
struct TemplateToken {
  bool is_slot = false;
  std::string word;
  Slot slot{SlotKind::Concept, 0};

  static TemplateToken literal(std::string w) { return {false, std::move(w), {SlotKind::Concept, 0}}; }
  static TemplateToken of(Slot s) { return {true, {}, s}; }

  std::string text() const { return is_slot ? slot_name(slot) : word; }
  friend bool operator==(const TemplateToken&, const TemplateToken&) = default;
};

inline std::string template_text(std::span<const TemplateToken> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.text();
  }
  return out;
}

inline std::uint64_t template_id_of(std::span<const TemplateToken> tokens) { return fnv1a64(template_text(tokens)); }

struct SentenceTemplate {
  std::vector<TemplateToken> tokens;
  TemplateFormula formula;
  std::uint64_t id = 0;

  std::string text() const { return template_text(tokens); }

  SlotSet signature() const {
    SlotSet out;
    for (const auto& t : tokens) {
      if (t.is_slot) out.insert(t.slot);
    }
    return out;
  }

  // One tag per template token; a concept slot expands to as many copies
  // of its tag as the filler has words.
  // One tag per template token (a concept slot stands for its whole run),
  // then EOS.
  std::vector<Tag> tag_template() const {
    std::vector<Tag> out;
    for (const auto& t : tokens) out.push_back(t.is_slot ? slot_tag(t.slot) : Tag::w);
    out.push_back(Tag::EOS);
    return out;
  }
};

namespace detail {

using Phrase = std::vector<TemplateToken>;
using Alternatives = std::vector<Phrase>;

inline Phrase words(std::string_view text) {
  Phrase out;
  for (auto& w : split_words(text)) out.push_back(TemplateToken::literal(std::move(w)));
  return out;
}

inline Alternatives capped(Alternatives alts, std::size_t cap) {
  if (cap > 0 && alts.size() > cap) alts.resize(cap);
  return alts;
}

inline Alternatives product(const Alternatives& a, const Alternatives& b) {
  Alternatives out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      Phrase p = x;
      p.insert(p.end(), y.begin(), y.end());
      out.push_back(std::move(p));
    }
  }
  return out;
}

template <typename... Rest>
Alternatives product(const Alternatives& a, const Alternatives& b, const Rest&... rest) {
  return product(product(a, b), rest...);
}

inline Alternatives one(Phrase p) { return {std::move(p)}; }
inline Alternatives slot_alt(SlotKind k, SlotIndex i) { return one({TemplateToken::of(Slot{k, i})}); }

inline std::vector<std::string_view> card_phrases(CardOp op) {
  switch (op) {
    case CardOp::Geq: return {"at least", "no less than"};
    case CardOp::Leq: return {"at most", "no more than"};
    case CardOp::Lt: return {"less than", "fewer than"};
    case CardOp::Gt: return {"more than"};
    case CardOp::Eq: return {"exactly"};
  }
  return {};
}

inline Alternatives phrase_alts(const std::vector<std::string_view>& texts, std::size_t cap) {
  Alternatives out;
  for (auto t : texts) out.push_back(words(t));
  return capped(std::move(out), cap);
}

inline Alternatives connective_word(Connective c) { return one(words(c == Connective::Or ? "or" : "and")); }

// Verb-phrase form of an atom, as used after "that".
inline Alternatives atom_predicate(const Atom<SlotIndex>& atom, std::size_t cap) {
  return std::visit(
      [&](const auto& a) -> Alternatives {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, ConceptAtom<SlotIndex>>) {
          return product(phrase_alts({"is a", "is also a"}, cap), slot_alt(SlotKind::Concept, a.concept_ref));
        } else if constexpr (std::is_same_v<A, ExistsAtom<SlotIndex>>) {
          return product(slot_alt(SlotKind::Role, a.role), phrase_alts({"some", "a"}, cap),
                         slot_alt(SlotKind::Concept, a.concept_ref));
        } else if constexpr (std::is_same_v<A, CardAtom<SlotIndex>>) {
          return product(slot_alt(SlotKind::Role, a.role), phrase_alts(card_phrases(a.op), cap),
                         slot_alt(SlotKind::Number, a.number), slot_alt(SlotKind::Concept, a.concept_ref));
        } else {
          return product(slot_alt(SlotKind::Role, a.role), phrase_alts(card_phrases(a.op1), cap),
                         slot_alt(SlotKind::Number, a.number1), connective_word(a.joiner),
                         phrase_alts(card_phrases(a.op2), cap), slot_alt(SlotKind::Number, a.number2),
                         slot_alt(SlotKind::Concept, a.concept_ref));
        }
      },
      atom);
}

inline Alternatives clause(const Side<SlotIndex>& side, std::size_t cap) {
  Alternatives out = atom_predicate(side.atoms[0], cap);
  for (std::size_t i = 1; i < side.atoms.size(); ++i) {
    out = product(out, connective_word(side.connective), atom_predicate(side.atoms[i], cap));
  }
  return out;
}

inline bool is_concept(const Atom<SlotIndex>& a) { return std::holds_alternative<ConceptAtom<SlotIndex>>(a); }

inline Alternatives subject(const Side<SlotIndex>& lhs, std::size_t cap) {
  if (lhs.atoms.size() == 1 && is_concept(lhs.atoms[0])) {
    const auto c = std::get<ConceptAtom<SlotIndex>>(lhs.atoms[0]).concept_ref;
    return product(phrase_alts({"every", "a", "each"}, cap), slot_alt(SlotKind::Concept, c));
  }
  return product(phrase_alts({"anything that", "everything that"}, cap), clause(lhs, cap));
}

inline Alternatives predicate(const Side<SlotIndex>& rhs, std::size_t cap) {
  if (rhs.atoms.size() == 1 && is_concept(rhs.atoms[0])) {
    const auto c = std::get<ConceptAtom<SlotIndex>>(rhs.atoms[0]).concept_ref;
    return product(phrase_alts({"a", "also a"}, cap), slot_alt(SlotKind::Concept, c));
  }
  Alternatives out;
  if (rhs.atoms.size() == 2 && rhs.connective == Connective::And && is_concept(rhs.atoms[0])) {
    const auto c = std::get<ConceptAtom<SlotIndex>>(rhs.atoms[0]).concept_ref;
    out = product(one(words("a")), slot_alt(SlotKind::Concept, c), one(words("that")),
                  atom_predicate(rhs.atoms[1], cap));
  }
  const Alternatives generic = product(phrase_alts({"something that", "also something that"}, cap), clause(rhs, cap));
  out.insert(out.end(), generic.begin(), generic.end());
  return capped(std::move(out), cap);
}

struct AtomShape {
  AtomKind kind;
  CardOp op = CardOp::Geq;
  CardPairForm pair{CardOp::Geq, Connective::And, CardOp::Leq};
};

inline std::vector<AtomShape> atom_shapes(const std::vector<AtomKind>& kinds, const GrammarConfig& cfg) {
  std::vector<AtomShape> out;
  for (AtomKind k : kinds) {
    switch (k) {
      case AtomKind::Concept:
      case AtomKind::Exists: out.push_back({k}); break;
      case AtomKind::Card:
        for (CardOp op : cfg.card_ops) out.push_back({k, op});
        break;
      case AtomKind::CardPair:
        for (const auto& p : cfg.card_pairs) out.push_back({k, CardOp::Geq, p});
        break;
    }
  }
  return out;
}

struct SideShape {
  std::vector<AtomShape> atoms;
  Connective connective = Connective::None;
};

inline std::vector<SideShape> side_shapes(const std::vector<AtomShape>& atoms, const std::vector<Connective>& conns,
                                          bool ordered) {
  std::vector<SideShape> out;
  for (const auto& a : atoms) out.push_back({{a}, Connective::None});
  for (Connective c : conns) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      for (std::size_t j = ordered ? i : 0; j < atoms.size(); ++j) out.push_back({{atoms[i], atoms[j]}, c});
    }
  }
  return out;
}

// Builds the template formula, numbering slots per category in token order.
// Returns false when a slot ceiling is exceeded.
inline bool build_formula(const SideShape& lhs, const SideShape& rhs, TemplateFormula& out) {
  std::array<unsigned, 3> next{0, 0, 0};
  auto take = [&](SlotKind k) { return next[static_cast<std::size_t>(k)]++; };
  auto build_side = [&](const SideShape& shape) {
    Side<SlotIndex> side;
    side.connective = shape.connective;
    for (const auto& a : shape.atoms) {
      switch (a.kind) {
        case AtomKind::Concept: side.atoms.push_back(ConceptAtom<SlotIndex>{take(SlotKind::Concept)}); break;
        case AtomKind::Exists: {
          const auto r = take(SlotKind::Role);
          side.atoms.push_back(ExistsAtom<SlotIndex>{r, take(SlotKind::Concept)});
          break;
        }
        case AtomKind::Card: {
          const auto n = take(SlotKind::Number);
          const auto r = take(SlotKind::Role);
          side.atoms.push_back(CardAtom<SlotIndex>{a.op, n, r, take(SlotKind::Concept)});
          break;
        }
        case AtomKind::CardPair: {
          const auto n1 = take(SlotKind::Number);
          const auto n2 = take(SlotKind::Number);
          const auto r = take(SlotKind::Role);
          side.atoms.push_back(
              CardPairAtom<SlotIndex>{a.pair.op1, n1, a.pair.joiner, a.pair.op2, n2, r, take(SlotKind::Concept)});
          break;
        }
      }
    }
    return side;
  };
  out.lhs = build_side(lhs);
  out.rhs = build_side(rhs);
  return next[0] <= kMaxConceptSlots && next[1] <= kMaxRoleSlots && next[2] <= kMaxNumberSlots;
}

}  // namespace detail

/// Every literal word the grammar can emit.
inline std::set<std::string> grammar_function_words() {
  std::set<std::string> out;
  const std::vector<std::string_view> phrases = {
      "is a", "is also a", "some", "every", "each", "anything that", "everything that", "something that",
      "also something that", "also a", "and", "or", "is"};
  for (auto p : phrases) {
    for (auto& w : split_words(p)) out.insert(w);
  }
  for (CardOp op : {CardOp::Geq, CardOp::Leq, CardOp::Lt, CardOp::Gt, CardOp::Eq}) {
    for (auto p : detail::card_phrases(op)) {
      for (auto& w : split_words(p)) out.insert(w);
    }
  }
  out.insert("N0");
  out.insert("N1");
  return out;
}

/// The distinct formula templates admitted by `cfg`, in enumeration order.
inline std::vector<TemplateFormula> formula_space(const GrammarConfig& cfg) {
  if (cfg.lhs_atoms.empty() || cfg.rhs_atoms.empty()) {
    throw ConfigError("grammar config enables no atom kinds on one side");
  }
  const auto lhs_atoms = detail::atom_shapes(cfg.lhs_atoms, cfg);
  const auto rhs_atoms = detail::atom_shapes(cfg.rhs_atoms, cfg);
  if (lhs_atoms.empty() || rhs_atoms.empty()) {
    throw ConfigError("grammar config yields no atoms (check card_ops / card_pairs)");
  }
  const auto lhs_shapes = detail::side_shapes(lhs_atoms, cfg.lhs_connectives, cfg.ordered_pairs);
  const auto rhs_shapes = detail::side_shapes(rhs_atoms, cfg.rhs_connectives, cfg.ordered_pairs);
  std::vector<TemplateFormula> out;
  for (const auto& l : lhs_shapes) {
    for (const auto& r : rhs_shapes) {
      TemplateFormula f;
      if (!detail::build_formula(l, r, f)) continue;
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(std::move(f));
    }
  }
  return out;
}

/// Verbalizations of one formula template. `limit` > 0 keeps that many,
/// taken at evenly spaced positions of the full list.
inline std::vector<std::vector<TemplateToken>> verbalize(const TemplateFormula& f, std::size_t variants,
                                                         std::size_t limit = 0) {
  auto all = detail::product(detail::subject(f.lhs, variants), detail::one(detail::words("is")),
                             detail::predicate(f.rhs, variants));
  if (limit == 0 || all.size() <= limit) return all;
  std::vector<std::vector<TemplateToken>> out;
  out.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) out.push_back(std::move(all[i * all.size() / limit]));
  return out;
}

/// Cross product of formula shapes and verbalization variants.
inline std::vector<SentenceTemplate> expand_grammar(const GrammarConfig& cfg) {
  std::vector<SentenceTemplate> out;
  std::unordered_map<std::string, std::size_t> by_text;
  for (const auto& f : formula_space(cfg)) {
    for (auto& tokens : verbalize(f, cfg.variants, cfg.verbalizations)) {
      SentenceTemplate t{std::move(tokens), f, 0};
      const std::string text = t.text();
      if (auto it = by_text.find(text); it != by_text.end()) {
        if (!(out[it->second].formula == f)) {
          throw GenerationError("sentence template '" + text + "' verbalizes two different formulas");
        }
        continue;
      }
      if (t.signature() != placeholder_signature(f)) {
        throw GenerationError("template '" + text + "' does not mention every slot of its formula");
      }
      t.id = fnv1a64(text);
      by_text.emplace(text, out.size());
      out.push_back(std::move(t));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Examples

struct Example {
  std::vector<std::string> words;  // numbers stay as "N0"/"N1"
  std::vector<Tag> tags;
  std::vector<FormulaToken> formula_tokens;
  std::uint64_t template_id = 0;

  std::string sentence() const {
    std::string out;
    for (const auto& w : words) {
      if (!out.empty()) out += ' ';
      out += w;
    }
    return out;
  }

  TaggedSentence tagged() const { return {words, tags}; }
  friend bool operator==(const Example&, const Example&) = default;
};

/// Fills every slot of `tmpl`: roles with a verb, concepts with a concept
/// name (one token per word, all tagged with the slot), numbers stay as the
/// literal placeholder.
inline Example fill(const SentenceTemplate& tmpl, const Lexicon& lex, SeededRng& rng) {
  Example ex;
  ex.template_id = tmpl.id;
  ex.formula_tokens = formula_tokens(tmpl.formula);
  const std::size_t names = concept_name_count(lex);
  std::map<Slot, std::vector<std::string>> fillers;
  for (const auto& t : tmpl.tokens) {
    if (!t.is_slot) {
      ex.words.push_back(t.word);
      ex.tags.push_back(Tag::w);
      continue;
    }
    auto it = fillers.find(t.slot);
    if (it == fillers.end()) {
      std::vector<std::string> surface;
      switch (t.slot.kind) {
        case SlotKind::Role: surface = {lex.verbs[rng.below(lex.verbs.size())]}; break;
        case SlotKind::Concept: surface = concept_name_at(lex, rng.below(names)); break;
        case SlotKind::Number: surface = {slot_name(t.slot)}; break;
      }
      it = fillers.emplace(t.slot, std::move(surface)).first;
    }
    for (const auto& w : it->second) {
      ex.words.push_back(w);
      ex.tags.push_back(slot_tag(t.slot));
    }
  }
  return ex;
}

/// Recovers the sentence template text of an example (slot runs collapse
/// back to their placeholder) and hashes it like SentenceTemplate::id.
inline std::string template_text_of(const Example& ex) {
  std::string out;
  for (std::size_t k = 0; k < ex.words.size(); ++k) {
    const auto slot = tag_slot(ex.tags[k]);
    if (slot && slot->kind == SlotKind::Concept && k > 0 && ex.tags[k - 1] == ex.tags[k]) continue;
    if (!out.empty()) out += ' ';
    out += slot ? slot_name(*slot) : ex.words[k];
  }
  return out;
}

struct DatasetConfig {
  std::size_t examples_per_template = 10;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  std::size_t max_retries = 100;
};

struct Dataset {
  std::vector<Example> train;
  std::vector<Example> test;
};

inline void check_lexicon_against_grammar(const Lexicon& lex) {
  const auto function_words = grammar_function_words();
  for (const auto* list : {&lex.verbs, &lex.adjectives, &lex.nouns1, &lex.nouns2}) {
    for (const auto& w : *list) {
      if (function_words.contains(w)) {
        throw ConfigError("lexicon word '" + w + "' is also a grammar function word");
      }
    }
  }
}

/// k fills per template for training; the test set cycles through the
/// templates with fresh fills, re-drawing any sentence already in train.
inline Dataset generate_dataset(const std::vector<SentenceTemplate>& templates, const Lexicon& lex,
                                const DatasetConfig& cfg) {
  if (templates.empty()) throw ConfigError("no sentence templates to fill");
  if (cfg.examples_per_template == 0) throw ConfigError("examples_per_template must be at least 1");
  lex.validate();
  check_lexicon_against_grammar(lex);

  Dataset ds;
  SeededRng train_rng = SeededRng(cfg.seed).fork(1);
  SeededRng test_rng = SeededRng(cfg.seed).fork(2);
  std::unordered_set<std::string> seen;
  ds.train.reserve(templates.size() * cfg.examples_per_template);
  for (const auto& t : templates) {
    for (std::size_t i = 0; i < cfg.examples_per_template; ++i) {
      ds.train.push_back(fill(t, lex, train_rng));
      seen.insert(ds.train.back().sentence());
    }
  }
  for (std::size_t i = 0; i < cfg.test_size; ++i) {
    const auto& t = templates[i % templates.size()];
    bool placed = false;
    for (std::size_t attempt = 0; attempt <= cfg.max_retries && !placed; ++attempt) {
      Example ex = fill(t, lex, test_rng);
      if (seen.contains(ex.sentence())) continue;
      ds.test.push_back(std::move(ex));
      placed = true;
    }
    if (!placed) {
      throw GenerationError("could not draw a test sentence for template '" + t.text() + "' absent from train after " +
                            std::to_string(cfg.max_retries) + " retries; use a larger lexicon");
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Vocabulary

class Vocabulary {
 public:
  static constexpr std::size_t kEos = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::string_view kEosWord = "<EOS>";
  static constexpr std::string_view kUnkWord = "<UNK>";

  Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

  /// `words` excludes the reserved entries.
  explicit Vocabulary(std::vector<std::string> words) {
    words_.emplace_back(kEosWord);
    words_.emplace_back(kUnkWord);
    for (auto& w : words) {
      if (w == kEosWord || w == kUnkWord) continue;
      if (index_.contains(w)) throw ConfigError("duplicate vocabulary word '" + w + "'");
      index_.emplace(w, words_.size());
      words_.push_back(std::move(w));
    }
  }

  /// Full table including the reserved entries at 0 and 1.
  static Vocabulary from_table(const std::vector<std::string>& table) {
    if (table.size() < 2 || table[0] != kEosWord || table[1] != kUnkWord) {
      throw CorruptionError("vocabulary table does not start with <EOS>, <UNK>");
    }
    return Vocabulary(std::vector<std::string>(table.begin() + 2, table.end()));
  }

  std::size_t size() const noexcept { return words_.size(); }
  bool contains(const std::string& w) const { return index_.contains(w); }

  std::size_t index(const std::string& w) const {
    const auto it = index_.find(w);
    return it == index_.end() ? kUnk : it->second;
  }

  const std::string& word(std::size_t i) const {
    if (i >= words_.size()) throw VocabularyError("word index outside vocabulary", i);
    return words_[i];
  }

  const std::vector<std::string>& table() const noexcept { return words_; }

  /// Word indices with the trailing EOS appended.
  std::vector<std::size_t> encode(std::span<const std::string> words) const {
    std::vector<std::size_t> out;
    out.reserve(words.size() + 1);
    for (const auto& w : words) out.push_back(index(w));
    out.push_back(kEos);
    return out;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sorted unique words of `examples` after the reserved EOS and UNK.
inline Vocabulary build_vocab(std::span<const Example> examples) {
  if (examples.empty()) throw ConfigError("cannot build a vocabulary from no examples");
  std::set<std::string> words;
  for (const auto& ex : examples) words.insert(ex.words.begin(), ex.words.end());
  return Vocabulary(std::vector<std::string>(words.begin(), words.end()));
}

// ---------------------------------------------------------------------------
// Stratified split

struct StratifiedSplit {
  std::vector<std::size_t> train;  // indices into the input
  std::vector<std::size_t> validation;
  std::size_t degenerate_groups = 0;  // groups of one, kept whole in train
};

/// Within every template group, ceil(ratio * n) examples go to train.
/// `Examples` is any indexable range whose elements carry `template_id`.
template <typename Examples>
StratifiedSplit split_stratified(const Examples& examples, double ratio, SeededRng& rng) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1), got " + std::to_string(ratio));
  std::vector<std::uint64_t> order;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto [it, fresh] = groups.try_emplace(examples[i].template_id);
    if (fresh) order.push_back(examples[i].template_id);
    it->second.push_back(i);
  }
  StratifiedSplit out;
  for (auto id : order) {
    auto& members = groups[id];
    if (members.size() < 2) {
      ++out.degenerate_groups;
      out.train.insert(out.train.end(), members.begin(), members.end());
      continue;
    }
    rng.shuffle(members);
    // The epsilon keeps 0.9 * 10 from rounding up to 10.
    const auto keep = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(members.size()) - 1e-9));
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(keep));
    out.validation.insert(out.validation.end(), members.begin() + static_cast<std::ptrdiff_t>(keep), members.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset files: "#" header lines, then one example per line as
// words <TAB> tags <TAB> formula terms (each space-joined).

inline constexpr std::string_view kCorpusFormatLine = "# owl2seq corpus v1";

struct DatasetFile {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<Example> examples;

  std::string header_value(const std::string& key, const std::string& fallback = {}) const {
    for (const auto& [k, v] : header) {
      if (k == key) return v;
    }
    return fallback;
  }
};

inline void write_dataset(std::ostream& out, std::span<const Example> examples,
                          const std::vector<std::pair<std::string, std::string>>& header) {
  out << kCorpusFormatLine << '\n';
  for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
  for (const auto& ex : examples) {
    out << ex.sentence() << '\t';
    for (std::size_t i = 0; i < ex.tags.size(); ++i) out << (i ? " " : "") << tag_name(ex.tags[i]);
    out << '\t' << tokens_to_string(ex.formula_tokens) << '\n';
  }
}

inline DatasetFile read_dataset(std::istream& in, const std::string& origin = "dataset") {
  DatasetFile file;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
    if (line.front() == '#') {
      const auto body = trim(std::string_view(line).substr(1));
      if (const auto eq = body.find('='); eq != std::string_view::npos) {
        file.header.emplace_back(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
      }
      continue;
    }
    const auto fields = [&] {
      std::vector<std::string> f;
      std::size_t start = 0;
      for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
        f.push_back(line.substr(start, tab - start));
      }
      f.push_back(line.substr(start));
      return f;
    }();
    if (fields.size() != 3) throw CorruptionError(where() + "expected 3 tab-separated fields");
    Example ex;
    ex.words = split_words(fields[0]);
    for (const auto& t : split_words(fields[1])) {
      const auto tag = parse_tag_name(t);
      if (!tag) throw CorruptionError(where() + "unknown tag '" + t + "'");
      ex.tags.push_back(*tag);
    }
    try {
      ex.formula_tokens = tokens_from_string(fields[2]);
    } catch (const ParseError& e) {
      throw CorruptionError(where() + e.what());
    }
    if (ex.words.size() != ex.tags.size()) {
      throw CorruptionError(where() + std::to_string(ex.words.size()) + " words but " + std::to_string(ex.tags.size()) +
                            " tags");
    }
    ex.template_id = fnv1a64(template_text_of(ex));
    file.examples.push_back(std::move(ex));
  }
  return file;
}

inline DatasetFile read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path);
  return read_dataset(in, path);
}

}  // namespace owl2seq

#endif  // OWL2SEQ_CORPUS_HPP
