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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "owl2seq/corpus.hpp"

using namespace owl2seq;

namespace {

const std::string kDataDir = OWL2SEQ_DATA_DIR;

GrammarConfig grammar_file(const std::string& name) {
  return GrammarConfig::from_config(KeyValueConfig::load(kDataDir + "/grammar/" + name));
}

Lexicon tiny_lexicon(std::size_t a, std::size_t n1, std::size_t n2, std::size_t v = 3) {
  Lexicon lex;
  for (std::size_t i = 0; i < a; ++i) lex.adjectives.push_back("adj" + std::to_string(i));
  for (std::size_t i = 0; i < n1; ++i) lex.nouns1.push_back("mod" + std::to_string(i));
  for (std::size_t i = 0; i < n2; ++i) lex.nouns2.push_back("head" + std::to_string(i));
  for (std::size_t i = 0; i < v; ++i) lex.verbs.push_back("verb" + std::to_string(i));
  return lex;
}

Lexicon desk_lexicon() { return load_lexicon(kDataDir + "/lexicon").truncated({30, 8, 10, 10}); }

// Walks the formula grammar as strings: an atom is a letter code with its
// slot cost, a two-atom side is an unordered pair, and a formula survives
// when its slot totals fit 4 concepts, 2 roles and 2 numbers.
struct AtomCode {
  std::string code;
  int c, r, n;
};

std::size_t enumerate_formula_space(const KeyValueConfig& kv) {
  auto list = [&](const std::string& key, std::vector<std::string> fallback) {
    auto v = kv.get_list(key, fallback);
    std::erase(v, "none");
    return v;
  };
  const auto ops = list("card_ops", {"geq", "leq", "lt", "gt", "eq"});
  const auto pairs = list("card_pairs", {"lt:or:gt", "geq:and:leq"});
  auto atoms_of = [&](const std::vector<std::string>& kinds) {
    std::vector<AtomCode> out;
    for (const auto& k : kinds) {
      if (k == "concept") out.push_back({"C", 1, 0, 0});
      if (k == "exists") out.push_back({"E", 1, 1, 0});
      if (k == "card") {
        for (const auto& op : ops) out.push_back({"K" + op, 1, 1, 1});
      }
      if (k == "cardpair") {
        for (const auto& p : pairs) out.push_back({"P" + p, 1, 1, 2});
      }
    }
    return out;
  };
  struct SideCode {
    std::string key;
    int c, r, n;
  };
  auto sides_of = [&](const std::vector<AtomCode>& atoms, const std::vector<std::string>& conns) {
    std::map<std::string, SideCode> out;
    for (const auto& a : atoms) out[a.code] = {a.code, a.c, a.r, a.n};
    for (const auto& conn : conns) {
      for (const auto& a : atoms) {
        for (const auto& b : atoms) {
          const auto lo = std::min(a.code, b.code), hi = std::max(a.code, b.code);
          const std::string key = lo + " " + conn + " " + hi;
          out[key] = {key, a.c + b.c, a.r + b.r, a.n + b.n};
        }
      }
    }
    return out;
  };
  const auto lhs = sides_of(atoms_of(list("lhs_atoms", {"concept", "exists", "card"})),
                            list("lhs_connectives", {"and", "or"}));
  const auto rhs = sides_of(atoms_of(list("rhs_atoms", {"concept", "exists", "card", "cardpair"})),
                            list("rhs_connectives", {"and", "or"}));
  std::size_t count = 0;
  for (const auto& [lk, l] : lhs) {
    for (const auto& [rk, r] : rhs) {
      if (l.c + r.c <= 4 && l.r + r.r <= 2 && l.n + r.n <= 2) ++count;
    }
  }
  return count;
}

std::size_t distinct_formulas(const std::vector<SentenceTemplate>& templates) {
  std::set<std::string> seen;
  for (const auto& t : templates) seen.insert(tokens_to_string(formula_tokens(t.formula)));
  return seen.size();
}

std::string dataset_bytes(const std::vector<Example>& xs) {
  std::ostringstream out;
  write_dataset(out, xs, {{"seed", "1"}});
  return out.str();
}

}  // namespace

TEST(ConceptNames, SixPatterns) {
  Lexicon lex;
  lex.verbs = {"has"};
  lex.adjectives = {"magnificent"};
  lex.nouns1 = {"sword"};
  lex.nouns2 = {"sharpener"};
  const auto names = concept_names(lex);
  const std::vector<ConceptName> expected{{"magnificent", "sword", "sharpener"},
                                          {"sword", "sharpener"},
                                          {"magnificent", "sharpener"},
                                          {"magnificent", "sword"},
                                          {"sword"},
                                          {"sharpener"}};
  EXPECT_EQ(names, expected);
}

TEST(ConceptNames, ClosedFormAtFullSizes) {
  const Lexicon lex = tiny_lexicon(36, 50, 92);
  EXPECT_EQ(concept_name_count(lex), 175454u);
  EXPECT_EQ(concept_names(lex).size(), 175454u);
}

TEST(ConceptNames, BruteForceUpToFive) {
  for (std::size_t a = 1; a <= 5; ++a) {
    for (std::size_t n1 = 1; n1 <= 5; ++n1) {
      for (std::size_t n2 = 1; n2 <= 5; ++n2) {
        const Lexicon lex = tiny_lexicon(a, n1, n2);
        std::set<std::vector<std::string>> brute;
        for (const auto& x : lex.adjectives) {
          for (const auto& y : lex.nouns1) {
            for (const auto& z : lex.nouns2) brute.insert({x, y, z});
          }
        }
        for (const auto& y : lex.nouns1) {
          for (const auto& z : lex.nouns2) brute.insert({y, z});
        }
        for (const auto& x : lex.adjectives) {
          for (const auto& z : lex.nouns2) brute.insert({x, z});
          for (const auto& y : lex.nouns1) brute.insert({x, y});
        }
        for (const auto& y : lex.nouns1) brute.insert({y});
        for (const auto& z : lex.nouns2) brute.insert({z});

        const auto names = concept_names(lex);
        const std::set<std::vector<std::string>> generated(names.begin(), names.end());
        EXPECT_EQ(generated, brute);
        EXPECT_EQ(names.size(), brute.size()) << "names must be distinct";
        EXPECT_EQ(concept_name_count(lex), a * n1 * n2 + n1 * n2 + a * n2 + a * n1 + n1 + n2);
        EXPECT_EQ(concept_name_count(lex), brute.size());
      }
    }
  }
}

TEST(Lexicon, BundledListsAndValidation) {
  const Lexicon lex = load_lexicon(kDataDir + "/lexicon");
  EXPECT_EQ(lex.verbs.size(), 840u);
  EXPECT_EQ(lex.adjectives.size(), 36u);
  EXPECT_EQ(lex.nouns1.size(), 50u);
  EXPECT_EQ(lex.nouns2.size(), 92u);
  EXPECT_EQ(concept_name_count(lex), 175454u);
  const Lexicon cut = lex.truncated({30, 8, 10, 10});
  EXPECT_EQ(cut.verbs.size(), 30u);
  EXPECT_EQ(cut.nouns2.size(), 10u);

  Lexicon bad = tiny_lexicon(1, 1, 1);
  bad.nouns1.push_back("mod0");
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = tiny_lexicon(1, 1, 1);
  bad.verbs.push_back("Upper");
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = tiny_lexicon(1, 1, 1);
  bad.adjectives.clear();
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW(load_lexicon("/nonexistent/lexicon"), IoError);
}

TEST(ExpandGrammar, MinimalConfig) {
  const auto templates = expand_grammar(grammar_file("minimal.cfg"));
  ASSERT_EQ(templates.size(), 1u);
  EXPECT_EQ(templates[0].text(), "every C0 is a C1");
  EXPECT_EQ(render_formula(templates[0].formula), "C0 ⊑ C1");
  EXPECT_EQ(templates[0].id, fnv1a64("every C0 is a C1"));
}

TEST(ExpandGrammar, FullConfigHasTheExampleRows) {
  const auto templates = expand_grammar(grammar_file("full.cfg"));
  std::set<std::string> formulas;
  for (const auto& t : templates) formulas.insert(render_formula(t.formula));
  EXPECT_TRUE(formulas.contains("≥ N0 R0.C0 ⊓ C1 ⊑ C2"));
  EXPECT_TRUE(formulas.contains("C0 ⊑ < N0 R0.C1 ⊔ > N1 R0.C1"));
  EXPECT_TRUE(formulas.contains("< N0 R0.C0 ⊔ > N1 R0.C0 ⊑ C1"));
  std::set<std::string> sentences;
  for (const auto& t : templates) sentences.insert(t.text());
  EXPECT_TRUE(sentences.contains("every C0 is also something that R0 less than N0 or more than N1 C1"));
}

TEST(ExpandGrammar, FormulaCountMatchesEnumerator) {
  for (const std::string name : {"minimal.cfg", "desk.cfg", "full.cfg"}) {
    const auto kv = KeyValueConfig::load(kDataDir + "/grammar/" + name);
    const auto cfg = GrammarConfig::from_config(kv);
    const std::size_t expected = enumerate_formula_space(kv);
    EXPECT_EQ(formula_space(cfg).size(), expected) << name;
    EXPECT_EQ(distinct_formulas(expand_grammar(cfg)), expected) << name;
  }
  const KeyValueConfig defaults;
  EXPECT_EQ(formula_space(GrammarConfig{}).size(), enumerate_formula_space(defaults));
}

TEST(ExpandGrammar, ShippedSizes) {
  const auto desk = expand_grammar(grammar_file("desk.cfg"));
  EXPECT_EQ(desk.size(), 69u);
  EXPECT_EQ(distinct_formulas(desk), 23u);
  const auto full = expand_grammar(grammar_file("full.cfg"));
  EXPECT_EQ(full.size(), 750u);
  EXPECT_EQ(distinct_formulas(full), 126u);
}

TEST(ExpandGrammar, TemplatesAreWellFormed) {
  const auto templates = expand_grammar(grammar_file("full.cfg"));
  std::set<std::uint64_t> ids;
  for (const auto& t : templates) {
    EXPECT_EQ(t.signature(), placeholder_signature(t.formula)) << t.text();
    EXPECT_TRUE(within_template_bounds(t.formula)) << t.text();
    EXPECT_TRUE(slots_dense(placeholder_signature(t.formula))) << t.text();
    EXPECT_EQ(parse_formula(formula_tokens(t.formula)), t.formula);
    const auto tags = t.tag_template();
    ASSERT_EQ(tags.size(), t.tokens.size() + 1);
    EXPECT_EQ(tags.back(), Tag::EOS);
    ids.insert(t.id);
  }
  EXPECT_EQ(ids.size(), templates.size());
}

TEST(ExpandGrammar, Deterministic) {
  const auto a = expand_grammar(grammar_file("full.cfg"));
  const auto b = expand_grammar(grammar_file("full.cfg"));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].text(), b[i].text());
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].formula, b[i].formula);
  }
}

TEST(ExpandGrammar, EmptyConstructSetIsAConfigError) {
  GrammarConfig g;
  g.lhs_atoms.clear();
  EXPECT_THROW(formula_space(g), ConfigError);
  EXPECT_THROW(expand_grammar(g), ConfigError);
  EXPECT_THROW(GrammarConfig::from_config(KeyValueConfig::parse_string("lhs_atoms = wheel")), ConfigError);
}

TEST(Fill, BeeTemplateToExample) {
  const auto templates = expand_grammar(grammar_file("desk.cfg"));
  const auto it = std::find_if(templates.begin(), templates.end(),
                               [](const SentenceTemplate& t) { return t.text() == "a C0 is a C1 that R0 exactly N0 C2"; });
  ASSERT_NE(it, templates.end());
  EXPECT_EQ(render_formula(it->formula), "C0 ⊑ C1 ⊓ = N0 R0.C2");
  std::string tmpl_tags;
  for (Tag t : it->tag_template()) tmpl_tags += (tmpl_tags.empty() ? "" : " ") + std::string(tag_name(t));
  EXPECT_EQ(tmpl_tags, "w C0 w w C1 w R0 w N0 C2 EOS");

  Lexicon lex;
  lex.verbs = {"has"};
  lex.adjectives = {"tiny"};
  lex.nouns1 = {"insect"};
  lex.nouns2 = {"bee", "legs"};
  // Search seeds for the draw bee / insect / legs; the search itself is
  // deterministic.
  std::optional<Example> found;
  for (std::uint64_t seed = 0; seed < 100000 && !found; ++seed) {
    SeededRng rng(seed);
    Example ex = fill(*it, lex, rng);
    if (ex.sentence() == "a bee is a insect that has exactly N0 legs") found = ex;
  }
  ASSERT_TRUE(found.has_value());
  std::string tags;
  for (Tag t : found->tags) tags += (tags.empty() ? "" : " ") + std::string(tag_name(t));
  EXPECT_EQ(tags, "w C0 w w C1 w R0 w N0 C2");
  EXPECT_EQ(tokens_to_string(found->formula_tokens), "C0 SUBSUMES C1 AND EQ N0 R0 C2");
  EXPECT_EQ(found->template_id, it->id);
}

TEST(Fill, MultiWordConceptsAndReuse) {
  const auto templates = expand_grammar(grammar_file("desk.cfg"));
  Lexicon lex;
  lex.verbs = {"sharpens"};
  lex.adjectives = {"magnificent"};
  lex.nouns1 = {"sword"};
  lex.nouns2 = {"sharpener"};
  SeededRng rng(3);
  for (const auto& t : templates) {
    const Example ex = fill(t, lex, rng);
    ASSERT_EQ(ex.words.size(), ex.tags.size());
    // Every slot maps to one contiguous run; instantiate must accept it.
    const TaggedSentence tagged{ex.words, ex.tags};
    EXPECT_NO_THROW(instantiate(parse_formula(ex.formula_tokens), tagged)) << ex.sentence();
    EXPECT_EQ(template_text_of(ex), t.text());
    for (std::size_t k = 0; k < ex.words.size(); ++k) {
      if (ex.words[k] == "magnificent") {
        ASSERT_LT(k + 1, ex.words.size());
        EXPECT_EQ(ex.tags[k], ex.tags[k + 1]);
      }
      if (ex.words[k] == "N0") {
        EXPECT_EQ(ex.tags[k], Tag::N0);
      }
      if (ex.words[k] == "N1") {
        EXPECT_EQ(ex.tags[k], Tag::N1);
      }
    }
  }
}

TEST(Fill, SeedDeterminism) {
  const auto templates = expand_grammar(grammar_file("desk.cfg"));
  const Lexicon lex = desk_lexicon();
  SeededRng a(5), b(5), c(6);
  int differ = 0;
  for (const auto& t : templates) {
    const Example x = fill(t, lex, a), y = fill(t, lex, b), z = fill(t, lex, c);
    EXPECT_EQ(x.words, y.words);
    EXPECT_EQ(x.tags, y.tags);
    differ += x.words != z.words;
  }
  EXPECT_GT(differ, 60);
}

TEST(GenerateDataset, TinyConfigExhaustive) {
  auto templates = expand_grammar(grammar_file("desk.cfg"));
  templates.resize(3);
  const Lexicon lex = desk_lexicon();
  const Dataset ds = generate_dataset(templates, lex, {2, 4, 9, 100});
  ASSERT_EQ(ds.train.size(), 6u);
  ASSERT_EQ(ds.test.size(), 4u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(ds.train[i].template_id, templates[i / 2].id);
  for (const auto& t : ds.test) {
    for (const auto& r : ds.train) EXPECT_NE(t.sentence(), r.sentence());
  }
}

TEST(GenerateDataset, CountsAndDisjointnessOverSeeds) {
  const auto templates = expand_grammar(grammar_file("desk.cfg"));
  const Lexicon lex = desk_lexicon();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset ds = generate_dataset(templates, lex, {10, 200, seed, 100});
    EXPECT_EQ(ds.train.size(), templates.size() * 10);
    EXPECT_EQ(ds.test.size(), 200u);
    std::set<std::string> train;
    for (const auto& ex : ds.train) train.insert(ex.sentence());
    for (const auto& ex : ds.test) EXPECT_FALSE(train.contains(ex.sentence())) << ex.sentence();
  }
}

TEST(GenerateDataset, ByteIdenticalUnderFixedSeed) {
  const auto templates = expand_grammar(grammar_file("desk.cfg"));
  const Lexicon lex = desk_lexicon();
  const Dataset a = generate_dataset(templates, lex, {10, 50, 4, 100});
  const Dataset b = generate_dataset(templates, lex, {10, 50, 4, 100});
  const Dataset c = generate_dataset(templates, lex, {10, 50, 5, 100});
  EXPECT_EQ(dataset_bytes(a.train), dataset_bytes(b.train));
  EXPECT_EQ(dataset_bytes(a.test), dataset_bytes(b.test));
  EXPECT_NE(dataset_bytes(a.train), dataset_bytes(c.train));
}

TEST(GenerateDataset, ExhaustedRetriesSuggestLargerLexicon) {
  const auto templates = expand_grammar(grammar_file("minimal.cfg"));
  const Lexicon lex = tiny_lexicon(1, 1, 1);  // 6 concept names, 36 sentences
  try {
    generate_dataset(templates, lex, {36 * 4, 5, 1, 10});
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("larger lexicon"), std::string::npos);
  }
  EXPECT_THROW(generate_dataset(templates, lex, {0, 0, 1, 10}), ConfigError);
}

TEST(Vocabulary, BuildAndReserved) {
  Example ex;
  ex.words = {"bee", "a", "bee"};
  const std::vector<Example> xs{ex};
  const Vocabulary v = build_vocab(xs);
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.word(0), "<EOS>");
  EXPECT_EQ(v.word(1), "<UNK>");
  EXPECT_EQ(v.index("a"), 2u);
  EXPECT_EQ(v.index("bee"), 3u);
  EXPECT_EQ(v.index("wasp"), Vocabulary::kUnk);
  EXPECT_EQ(v.encode(std::vector<std::string>{"a", "wasp"}), (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_EQ(Vocabulary::from_table(v.table()), v);
  EXPECT_THROW(Vocabulary::from_table({"a", "b"}), CorruptionError);
  EXPECT_THROW(v.word(4), VocabularyError);
  EXPECT_THROW(build_vocab(std::vector<Example>{}), ConfigError);
}

TEST(Vocabulary, TrainCoversTestOnDeskCorpus) {
  const auto templates = expand_grammar(grammar_file("desk.cfg"));
  const Dataset ds = generate_dataset(templates, desk_lexicon(), {10, 200, 1, 100});
  const Vocabulary v = build_vocab(ds.train);
  for (const auto& ex : ds.test) {
    for (const auto& w : ex.words) EXPECT_TRUE(v.contains(w)) << w;
  }
}

TEST(SplitStratified, NinetyTen) {
  std::vector<Example> xs(30);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i].template_id = 100 + i / 10;
  SeededRng rng(1);
  const auto s = split_stratified(xs, 0.9, rng);
  EXPECT_EQ(s.train.size(), 27u);
  EXPECT_EQ(s.validation.size(), 3u);
  std::map<std::uint64_t, int> val_per_group;
  for (auto i : s.validation) ++val_per_group[xs[i].template_id];
  EXPECT_EQ(val_per_group.size(), 3u);
  for (const auto& [id, n] : val_per_group) EXPECT_EQ(n, 1);

  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.validation.begin(), s.validation.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);

  SeededRng again(1);
  const auto t = split_stratified(xs, 0.9, again);
  EXPECT_EQ(s.train, t.train);
  EXPECT_EQ(s.validation, t.validation);
}

TEST(SplitStratified, DegenerateAndInvalid) {
  std::vector<Example> xs(3);
  xs[0].template_id = 1;
  xs[1].template_id = 2;
  xs[2].template_id = 2;
  SeededRng rng(1);
  const auto s = split_stratified(xs, 0.9, rng);
  EXPECT_EQ(s.degenerate_groups, 1u);
  // ceil(0.9 * 2) = 2 keeps the pair whole as well.
  EXPECT_EQ(s.train.size(), 3u);
  EXPECT_TRUE(s.validation.empty());
  EXPECT_THROW(split_stratified(xs, 1.0, rng), ConfigError);
  EXPECT_THROW(split_stratified(xs, 0.0, rng), ConfigError);
}

TEST(DatasetFile, RoundTripAndHeader) {
  const auto templates = expand_grammar(grammar_file("desk.cfg"));
  const Dataset ds = generate_dataset(templates, desk_lexicon(), {2, 10, 3, 100});
  std::ostringstream out;
  write_dataset(out, ds.train, {{"generator", "owl2seq 1"}, {"seed", "3"}});
  std::istringstream in(out.str());
  const DatasetFile file = read_dataset(in);
  EXPECT_EQ(file.header_value("seed"), "3");
  EXPECT_EQ(file.header_value("generator"), "owl2seq 1");
  ASSERT_EQ(file.examples.size(), ds.train.size());
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    EXPECT_EQ(file.examples[i].words, ds.train[i].words);
    EXPECT_EQ(file.examples[i].tags, ds.train[i].tags);
    EXPECT_EQ(file.examples[i].formula_tokens, ds.train[i].formula_tokens);
    EXPECT_EQ(file.examples[i].template_id, ds.train[i].template_id);
  }
}

TEST(DatasetFile, MalformedLines) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_dataset(in);
  };
  EXPECT_THROW(read("a bee\tw C0\n"), CorruptionError);
  EXPECT_THROW(read("a bee\tw X9\tC0 SUBSUMES C1\n"), CorruptionError);
  EXPECT_THROW(read("a bee\tw\tC0 SUBSUMES C1\n"), CorruptionError);
  EXPECT_THROW(read("a bee\tw C0\tC0 SUBSUMES Q\n"), CorruptionError);
  EXPECT_THROW(read_dataset_file("/nonexistent/train.tsv"), IoError);
}
