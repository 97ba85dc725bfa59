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


// Acceptance suite. Prints one PASS/FAIL line per criterion, with indented
// detail lines, and exits non-zero when any criterion fails. Criteria 2 and 6
// drive the owl2seq command-line tool on the desk-scale grammar.
//
//   acceptance [WORKDIR]

#include <sys/wait.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "owl2seq/owl2seq.hpp"

using namespace owl2seq;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = OWL2SEQ_DATA_DIR;
const std::string kCli = OWL2SEQ_CLI_PATH;
const std::string kDeskConfig = kDataDir + "/grammar/desk.cfg";

// Pinned tolerances.
constexpr double kGradTolerance = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr double kGradBudgetSeconds = 30.0;
constexpr double kTokenFloor = 0.99;
constexpr double kSequenceFloor = 0.95;
constexpr double kTrainBudgetSeconds = 15 * 60.0;
constexpr double kLossTolerance = 1e-9;
constexpr double kLossRiseAllowed = 0.01;
constexpr double kTranslateFloor = 0.95;

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = kCli + " " + args + " >" + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool bits_equal(const std::vector<DenseVector>& a, const std::vector<DenseVector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].dim() != b[k].dim()) return false;
    for (std::size_t i = 0; i < a[k].dim(); ++i) {
      if (std::bit_cast<std::uint64_t>(a[k][i]) != std::bit_cast<std::uint64_t>(b[k][i])) return false;
    }
  }
  return true;
}

std::string gold_rendering(const Example& ex) {
  return render_formula(instantiate(parse_formula(ex.formula_tokens), ex.tagged()));
}

// ---------------------------------------------------------------------------

Verdict gradient_fidelity() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  TinyDims dims;  // vocab 12, d 4, hidden 5 (tagger, encoder) / 6 (decoder), length <= 6
  for (const std::string task : {"tagger", "transducer"}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      GradCheckSetup setup;
      setup.seed = seed;
      setup.options.step = kGradStep;
      setup.options.tolerance = kGradTolerance;
      const GradCheckReport r =
          task == "tagger" ? check_tagger_gradients(dims, setup) : check_transducer_gradients(dims, setup);
      const TensorCheck* worst = &r.tensors.front();
      std::size_t failures = 0;
      for (const auto& t : r.tensors) {
        failures += t.failures;
        if (t.max_rel_error > worst->max_rel_error) worst = &t;
      }
      v.check(r.passed(), task + " seed " + std::to_string(seed) + ": max rel err " + fmt(r.max_rel_error(), 3) +
                              " over " + std::to_string(r.coordinates_checked()) + " coords, " +
                              std::to_string(failures) + " above " + fmt(kGradTolerance) + "; worst " + worst->name +
                              " analytic " + fmt(worst->analytic, 9) + " numeric " + fmt(worst->numeric, 9));
      if (!r.passed()) {
        // Diagnostic only: roundoff in the loss shrinks as the step grows,
        // a wrong gradient would not.
        std::string sweep;
        for (double step : {1e-3, 1e-4, 1e-6}) {
          GradCheckSetup s = setup;
          s.options.step = step;
          const GradCheckReport d =
              task == "tagger" ? check_tagger_gradients(dims, s) : check_transducer_gradients(dims, s);
          sweep += (sweep.empty() ? "" : ", ") + std::string("h=") + fmt(step) + " " + fmt(d.max_rel_error(), 3);
        }
        v.note("step sweep (max rel err): " + sweep);
      }
    }
  }
  const double secs = seconds_since(t0);
  v.check(secs < kGradBudgetSeconds, "runtime " + fmt(secs, 3) + " s");
  return v;
}

// ---------------------------------------------------------------------------

struct DeskRun {
  bool ok = false;
  fs::path dir;
  std::vector<MetricsRow> tagger_rows;
  std::vector<MetricsRow> transducer_rows;
};

const MetricsRow* last_row(const std::vector<MetricsRow>& rows, const std::string& split) {
  const MetricsRow* out = nullptr;
  for (const auto& r : rows) {
    if (r.split == split) out = &r;
  }
  return out;
}

Verdict desk_reproduction(DeskRun& run) {
  Verdict v;
  const KeyValueConfig kv = KeyValueConfig::load(kDeskConfig);
  const RunConfig rc = RunConfig::from_config(kv);
  const CorpusSettings cs = CorpusSettings::from_config(kv, kDataDir + "/grammar", kDataDir + "/lexicon");
  const auto templates = expand_grammar(cs.grammar);
  const std::size_t formulas = formula_space(cs.grammar).size();
  v.check(templates.size() >= 40 && formulas >= 12, "grammar: " + std::to_string(templates.size()) +
                                                        " sentence templates, " + std::to_string(formulas) +
                                                        " formula templates");
  v.check(cs.sizes.verbs == 30 && cs.sizes.adjectives == 8 && cs.sizes.nouns1 == 10 && cs.sizes.nouns2 == 10 &&
              cs.dataset.examples_per_template == 10,
          "lexicon 30/8/10/10, 10 examples per template");
  v.check(rc.tagger.window_half_width == 2 && rc.tagger.embed_dim == 32 && rc.tagger.hidden_dim == 64 &&
              rc.transducer.embed_dim == 32 && rc.transducer.enc_hidden == 128 && rc.transducer.dec_hidden == 128,
          "networks: tagger c=2 d=32 hidden=64, transducer d=32 enc=dec=128");
  v.check(rc.train.optimizer.lr == 2.0 && rc.train.optimizer.rho == 0.95 && rc.train.optimizer.epsilon == 1e-6 &&
              rc.train.batch_size == 128 && rc.train.epochs <= 150,
          "AdaDelta lr 2.0 rho 0.95 eps 1e-6, batch 128, at most " + std::to_string(rc.train.epochs) +
              " epochs, stop after " + std::to_string(rc.train.stop_after_perfect) + " perfect validation epochs");

  const auto t0 = std::chrono::steady_clock::now();
  const std::string d = run.dir.string();
  const std::string cfg = " --config " + kDeskConfig;
  const std::string corpora = " --train " + d + "/train.tsv --test " + d + "/test.tsv --out " + d;
  const int gen = run_cli("gen-corpus" + cfg + " --out " + d, d + "/gen.log");
  const int tag = gen == 0 ? run_cli("train" + cfg + " --task tagger" + corpora, d + "/train_tagger.log") : -1;
  const int trd = gen == 0 ? run_cli("train" + cfg + " --task transducer" + corpora, d + "/train_transducer.log") : -1;
  const double secs = seconds_since(t0);
  v.check(gen == 0 && tag == 0 && trd == 0, "owl2seq gen-corpus / train tagger / train transducer exit codes " +
                                                std::to_string(gen) + " / " + std::to_string(tag) + " / " +
                                                std::to_string(trd) + " (logs in " + d + ")");
  if (gen != 0 || tag != 0 || trd != 0) return v;
  run.ok = true;
  run.tagger_rows = read_metrics_file(d + "/tagger_metrics.csv");
  run.transducer_rows = read_metrics_file(d + "/transducer_metrics.csv");

  for (const auto& [task, rows] : {std::pair<std::string, const std::vector<MetricsRow>*>{"tagger", &run.tagger_rows},
                                   {"transducer", &run.transducer_rows}}) {
    const MetricsRow* val = last_row(*rows, "val");
    const MetricsRow* test = last_row(*rows, "test");
    if (!val || !test) {
      v.check(false, task + ": metrics lack val or test rows");
      continue;
    }
    std::size_t first_perfect = 0;
    for (const auto& r : *rows) {
      if (r.split == "val" && r.token_accuracy == 1.0 && first_perfect == 0) first_perfect = r.epoch;
    }
    v.note(task + ": " + std::to_string(val->epoch) + " epochs; validation token accuracy first 1.0 at epoch " +
           (first_perfect ? std::to_string(first_perfect) : std::string("never")));
    v.check(val->token_accuracy >= kTokenFloor && test->token_accuracy >= kTokenFloor,
            task + " token accuracy val " + fmt(val->token_accuracy) + ", test " + fmt(test->token_accuracy) +
                " (floor " + fmt(kTokenFloor) + (val->token_accuracy == 1.0 && test->token_accuracy == 1.0
                                                     ? "; 100% reached)"
                                                     : "; 100% not reached)"));
    if (task == "transducer") {
      v.check(val->sequence_accuracy >= kSequenceFloor && test->sequence_accuracy >= kSequenceFloor,
              "transducer sequence accuracy val " + fmt(val->sequence_accuracy) + ", test " +
                  fmt(test->sequence_accuracy) + " (floor " + fmt(kSequenceFloor) + ")");
    }
  }
  v.check(secs <= kTrainBudgetSeconds, "runtime " + fmt(secs, 4) + " s (budget " + fmt(kTrainBudgetSeconds) + " s)");
  return v;
}

// Training loss over the first five epochs: no epoch rises more than 1%.
Verdict loss_trend(const DeskRun& run) {
  Verdict v;
  if (!run.ok) {
    v.check(false, "desk-scale run unavailable");
    return v;
  }
  for (const auto& [task, rows] : {std::pair<std::string, const std::vector<MetricsRow>*>{"tagger", &run.tagger_rows},
                                   {"transducer", &run.transducer_rows}}) {
    std::vector<double> losses;
    for (const auto& r : *rows) {
      if (r.split == "train" && r.epoch <= 5) losses.push_back(r.loss);
    }
    bool ok = losses.size() == 5;
    std::string text;
    for (std::size_t i = 0; i < losses.size(); ++i) {
      if (i > 0 && losses[i] > losses[i - 1] * (1.0 + kLossRiseAllowed)) ok = false;
      text += (i ? " " : "") + fmt(losses[i], 5);
    }
    v.check(ok, task + " train loss epochs 1-5: " + text);
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict closed_form_losses() {
  Verdict v;
  for (std::size_t length : {1u, 4u, 11u}) {
    TaggerConfig cfg;
    cfg.window_half_width = 2;
    cfg.embed_dim = 5;
    cfg.hidden_dim = 7;
    cfg.in_vocab = 20;
    EncodedExample ex;
    for (std::size_t i = 0; i + 1 < length; ++i) {
      ex.words.push_back(2 + i % 18);
      ex.tags.push_back(1 + i % 9);
    }
    ex.words.push_back(kEosIndex);
    ex.tags.push_back(kEosIndex);
    const std::vector<EncodedExample> batch{ex};
    const double got = batch_loss(TaggerModel::zeros(cfg), batch);
    const double want = static_cast<double>(length) * std::log(10.0);
    v.check(std::abs(got - want) <= kLossTolerance,
            "tagger L=" + std::to_string(length) + ": " + fmt(got, 15) + " vs L ln 10 = " + fmt(want, 15));
  }
  for (std::size_t length : {1u, 4u, 9u}) {
    TransducerConfig cfg;
    cfg.embed_dim = 5;
    cfg.enc_hidden = 7;
    cfg.dec_hidden = 6;
    cfg.in_vocab = 20;
    cfg.max_output_len = 12;
    EncodedExample ex;
    ex.words = {3, 4, 5, kEosIndex};
    for (std::size_t i = 0; i + 1 < length; ++i) ex.formula.push_back(1 + i % 17);
    ex.formula.push_back(kEosIndex);
    const std::vector<EncodedExample> batch{ex};
    const double got = batch_loss(TransducerModel::zeros(cfg), batch);
    const double want = static_cast<double>(length) * std::log(18.0);
    v.check(std::abs(got - want) <= kLossTolerance,
            "transducer M=" + std::to_string(length) + ": " + fmt(got, 15) + " vs M ln 18 = " + fmt(want, 15));
  }
  return v;
}

// ---------------------------------------------------------------------------

Lexicon synthetic_lexicon(std::size_t a, std::size_t n1, std::size_t n2) {
  Lexicon lex;
  for (std::size_t i = 0; i < a; ++i) lex.adjectives.push_back("adj" + std::to_string(i));
  for (std::size_t i = 0; i < n1; ++i) lex.nouns1.push_back("mod" + std::to_string(i));
  for (std::size_t i = 0; i < n2; ++i) lex.nouns2.push_back("head" + std::to_string(i));
  lex.verbs = {"verb0", "verb1", "verb2"};
  return lex;
}

Verdict corpus_combinatorics() {
  Verdict v;
  auto closed = [](std::size_t a, std::size_t n1, std::size_t n2) {
    return a * n1 * n2 + n1 * n2 + a * n2 + a * n1 + n1 + n2;
  };
  bool enum_ok = true;
  for (std::size_t a = 1; a <= 5; ++a) {
    for (std::size_t n1 = 1; n1 <= 5; ++n1) {
      for (std::size_t n2 = 1; n2 <= 5; ++n2) {
        const Lexicon lex = synthetic_lexicon(a, n1, n2);
        std::set<std::vector<std::string>> brute;
        for (const auto& x : lex.adjectives)
          for (const auto& y : lex.nouns1)
            for (const auto& z : lex.nouns2) brute.insert({x, y, z});
        for (const auto& y : lex.nouns1)
          for (const auto& z : lex.nouns2) brute.insert({y, z});
        for (const auto& x : lex.adjectives) {
          for (const auto& z : lex.nouns2) brute.insert({x, z});
          for (const auto& y : lex.nouns1) brute.insert({x, y});
        }
        for (const auto& y : lex.nouns1) brute.insert({y});
        for (const auto& z : lex.nouns2) brute.insert({z});
        const auto names = concept_names(lex);
        const std::set<std::vector<std::string>> generated(names.begin(), names.end());
        enum_ok = enum_ok && generated == brute && names.size() == brute.size() &&
                  concept_name_count(lex) == closed(a, n1, n2);
      }
    }
  }
  v.check(enum_ok, "concept names equal the closed form and an exhaustive enumeration for all sizes 1..5");
  const Lexicon bundled = load_lexicon(kDataDir + "/lexicon");
  const std::size_t a = bundled.adjectives.size(), n1 = bundled.nouns1.size(), n2 = bundled.nouns2.size();
  v.check(concept_name_count(bundled) == closed(a, n1, n2) && concept_names(bundled).size() == closed(a, n1, n2),
          "bundled lexicon a=" + std::to_string(a) + " n1=" + std::to_string(n1) + " n2=" + std::to_string(n2) + ": " +
              std::to_string(concept_name_count(bundled)) + " concept names");

  const KeyValueConfig kv = KeyValueConfig::load(kDeskConfig);
  const CorpusSettings cs = CorpusSettings::from_config(kv, kDataDir + "/grammar", kDataDir + "/lexicon");
  const auto templates = expand_grammar(cs.grammar);
  const Lexicon lex = load_lexicon(cs.lexicon_dir).truncated(cs.sizes);
  bool sizes_ok = true;
  bool disjoint = true;
  std::size_t pairs = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    DatasetConfig dc = cs.dataset;
    dc.seed = seed;
    dc.examples_per_template = 1 + seed % 10;
    const Dataset ds = generate_dataset(templates, lex, dc);
    sizes_ok = sizes_ok && ds.train.size() == templates.size() * dc.examples_per_template;
    std::set<std::string> train;
    for (const auto& ex : ds.train) train.insert(ex.sentence());
    for (const auto& ex : ds.test) {
      ++pairs;
      disjoint = disjoint && !train.contains(ex.sentence());
    }
  }
  v.check(sizes_ok, "|train| = templates x k for 10 seeds (k = 2..10 and 1)");
  v.check(disjoint, "train/test exact-sentence disjointness over 10 seeds (" + std::to_string(pairs) +
                        " test sentences)");
  return v;
}

// ---------------------------------------------------------------------------

Atom<SlotIndex> random_atom(SeededRng& rng) {
  auto c = [&] { return static_cast<SlotIndex>(rng.below(kMaxConceptSlots)); };
  auto r = [&] { return static_cast<SlotIndex>(rng.below(kMaxRoleSlots)); };
  auto n = [&] { return static_cast<SlotIndex>(rng.below(kMaxNumberSlots)); };
  auto op = [&] { return static_cast<CardOp>(rng.below(5)); };
  switch (rng.below(4)) {
    case 0: return ConceptAtom<SlotIndex>{c()};
    case 1: return ExistsAtom<SlotIndex>{r(), c()};
    case 2: return CardAtom<SlotIndex>{op(), n(), r(), c()};
    default: {
      const Connective j = rng.below(2) ? Connective::And : Connective::Or;
      return CardPairAtom<SlotIndex>{op(), n(), j, op(), n(), r(), c()};
    }
  }
}

Side<SlotIndex> random_side(SeededRng& rng) {
  Side<SlotIndex> s;
  s.atoms.push_back(random_atom(rng));
  if (rng.below(2)) {
    s.connective = rng.below(2) ? Connective::And : Connective::Or;
    s.atoms.push_back(random_atom(rng));
  }
  return s;
}

std::string dataset_bytes(const Dataset& ds) {
  std::ostringstream s;
  write_dataset(s, ds.train, {{"part", "train"}});
  write_dataset(s, ds.test, {{"part", "test"}});
  return s.str();
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict round_trips(const fs::path& dir) {
  Verdict v;
  SeededRng rng(2024);
  std::size_t ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const TemplateFormula f{random_side(rng), random_side(rng)};
    const auto s = serialize_formula(f);
    const TemplateFormula back = parse_formula(s.tokens);
    const auto again = serialize_formula(back);
    if (back == f && again.tokens == s.tokens && again.text == s.text) ++ok;
  }
  v.check(ok == 1000, "formula parse/serialize identity on " + std::to_string(ok) + "/1000 random ASTs");

  const Vocabulary vocab(std::vector<std::string>{"a", "bee", "every", "insect", "is"});
  const std::vector<std::size_t> sentence{2, 3, 4, 1, 5, kEosIndex};
  SeededRng init(7);
  TaggerConfig tc{2, 6, 9, vocab.size(), kTagCount};
  TaggerModel tagger = TaggerModel::initialize(tc, init);
  TransducerConfig dc{6, 9, 8, vocab.size(), kFormulaTermCount, 8};
  TransducerModel transducer = TransducerModel::initialize(dc, init);
  save_checkpoint((dir / "rt_tagger.ckpt").string(), make_checkpoint(tagger, vocab));
  save_checkpoint((dir / "rt_transducer.ckpt").string(), make_checkpoint(transducer, vocab));
  const auto t2 = restore_tagger(load_checkpoint((dir / "rt_tagger.ckpt").string()));
  const auto d2 = restore_transducer(load_checkpoint((dir / "rt_transducer.ckpt").string()));
  v.check(bits_equal(forward(tagger, sentence), forward(t2.model, sentence)) && t2.vocab == vocab,
          "tagger checkpoint save/load: forward outputs bit-identical");
  const auto c1 = encode(transducer, sentence);
  const auto c2 = encode(d2.model, sentence);
  v.check(bits_equal(decode(transducer, c1, 8), decode(d2.model, c2, 8)) && d2.vocab == vocab &&
              predict_formula_indices(transducer, sentence) == predict_formula_indices(d2.model, sentence),
          "transducer checkpoint save/load: decoder outputs bit-identical");

  const KeyValueConfig kv = KeyValueConfig::load(kDeskConfig);
  const CorpusSettings cs = CorpusSettings::from_config(kv, kDataDir + "/grammar", kDataDir + "/lexicon");
  const auto templates = expand_grammar(cs.grammar);
  const Lexicon lex = load_lexicon(cs.lexicon_dir).truncated(cs.sizes);
  const std::string first = dataset_bytes(generate_dataset(templates, lex, cs.dataset));
  const std::string second = dataset_bytes(generate_dataset(templates, lex, cs.dataset));
  v.check(first == second, "dataset generation byte-identical under a fixed seed (" + std::to_string(first.size()) +
                               " bytes)");
  const std::string a = (dir / "gen_a").string(), b = (dir / "gen_b").string();
  const int ra = run_cli("gen-corpus --config " + kDeskConfig + " --out " + a, (dir / "gen_a.log").string());
  const int rb = run_cli("gen-corpus --config " + kDeskConfig + " --out " + b, (dir / "gen_b.log").string());
  v.check(ra == 0 && rb == 0 && file_bytes(fs::path(a) / "train.tsv") == file_bytes(fs::path(b) / "train.tsv") &&
              file_bytes(fs::path(a) / "test.tsv") == file_bytes(fs::path(b) / "test.tsv"),
          "owl2seq gen-corpus run twice: train.tsv and test.tsv byte-identical");
  return v;
}

// ---------------------------------------------------------------------------

Verdict pipeline_fidelity(const DeskRun& run) {
  Verdict v;
  const std::vector<std::string> words = split_words("a bee is a insect that has exactly N0 legs");
  std::vector<Tag> gold_tags;
  for (const auto& t : split_words("w C0 w w C1 w R0 w N0 C2")) gold_tags.push_back(*parse_tag_name(t));
  const TemplateFormula tmpl = parse_formula(tokens_from_string("C0 SUBSUMES C1 AND EQ N0 R0 C2"));
  const std::string fixture = render_formula(instantiate(tmpl, TaggedSentence{words, gold_tags}));
  v.check(fixture == "bee ⊑ insect ⊓ = N0 has.legs", "fixture: instantiate(template, gold tags) = " + fixture);
  if (!run.ok) {
    v.check(false, "desk-scale run unavailable");
    return v;
  }

  const fs::path d = run.dir;
  const std::string ckpts =
      " --tagger-ckpt " + (d / "tagger.ckpt").string() + " --transducer-ckpt " + (d / "transducer.ckpt").string();
  const auto tagger = restore_tagger(load_checkpoint((d / "tagger.ckpt").string()));
  const auto transducer = restore_transducer(load_checkpoint((d / "transducer.ckpt").string()));
  const auto idx = tagger.vocab.encode(words);
  v.note("trained tags for the fixture sentence: " + tags_to_string(predict(tagger.model, idx)));
  v.note("trained template for the fixture sentence: " + tokens_to_string(predict_formula(transducer.model, idx)));

  const DatasetFile test = read_dataset_file((d / "test.tsv").string());
  {
    std::ofstream in(d / "test_sentences.txt");
    for (const auto& ex : test.examples) in << ex.sentence() << "\n";
  }
  const std::string out = (d / "translations.txt").string();
  const std::string cmd = kCli + " translate" + ckpts + " < " + (d / "test_sentences.txt").string() + " > " + out;
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::vector<std::string> results;
  {
    std::ifstream in(out);
    for (std::string line; std::getline(in, line);) {
      if (!line.starts_with("  ")) results.push_back(line);
    }
  }
  std::size_t same = 0;
  const std::size_t n = test.examples.size();
  for (std::size_t i = 0; i < n && i < results.size(); ++i) {
    if (results[i] == gold_rendering(test.examples[i])) ++same;
  }
  const double fraction = n == 0 ? 0.0 : double(same) / double(n);
  v.note("owl2seq translate exit code " + std::to_string(code) + ", " + std::to_string(results.size()) + " results");
  v.check(results.size() == n && fraction >= kTranslateFloor,
          "owl2seq translate matches the gold grounded formula on " + std::to_string(same) + "/" + std::to_string(n) +
              " held-out sentences (" + fmt(100.0 * fraction, 4) + "%, floor " + fmt(100.0 * kTranslateFloor) + "%)");
  return v;
}

// ---------------------------------------------------------------------------

Verdict vocabulary_constants(const fs::path& dir) {
  Verdict v;
  v.check(kTagCount == 10 && kTagNames.size() == 10, "tag set size " + std::to_string(kTagNames.size()));
  v.check(kFormulaTermCount == 18 && kFormulaTokenNames.size() == 18,
          "formula term set size " + std::to_string(kFormulaTokenNames.size()));
  v.check(tag_from_index(kEosIndex) == Tag::EOS && token_from_index(kEosIndex) == FormulaToken::EOS, "EOS at index 0");
  // The command-line tool checks both sizes before running any command.
  v.check(run_cli("gradcheck --task tagger --seed 1", (dir / "startup.log").string()) == 0,
          "owl2seq startup check passes");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "owl2seq_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  int failed = 0;
  auto report = [&](const std::string& label, const std::string& name, const std::function<Verdict()>& body) {
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    if (!v.pass) ++failed;
    std::cout << label << ": " << (v.pass ? "PASS" : "FAIL") << "  " << name << "\n";
    for (const auto& d : v.details) std::cout << "    " << d << "\n";
    std::cout.flush();
  };

  DeskRun run;
  run.dir = dir / "desk";
  fs::create_directories(run.dir);

  report("criterion 1", "gradient fidelity", gradient_fidelity);
  report("criterion 2", "desk-scale reproduction of the 100% result", [&] { return desk_reproduction(run); });
  report("criterion 3", "closed-form loss checks", closed_form_losses);
  report("criterion 4", "corpus combinatorics", corpus_combinatorics);
  report("criterion 5", "round trips", [&] { return round_trips(dir); });
  report("criterion 6", "pipeline fidelity", [&] { return pipeline_fidelity(run); });
  report("criterion 7", "vocabulary constants", [&] { return vocabulary_constants(dir); });
  report("invariant", "training loss trend over the first 5 epochs", [&] { return loss_trend(run); });

  std::cout << (failed == 0 ? "all acceptance checks passed" : std::to_string(failed) + " acceptance check(s) failed")
            << "\n";
  return failed == 0 ? 0 : 1;
}
