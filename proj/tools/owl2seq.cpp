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

// owl2seq command line: corpus generation, training, evaluation,
// translation, gradient checks and curve export.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "owl2seq/owl2seq.hpp"

namespace fs = std::filesystem;
using namespace owl2seq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIncompatible = 4;

constexpr const char* kGeneratorVersion = "owl2seq 1";

#ifndef OWL2SEQ_DATA_DIR
#define OWL2SEQ_DATA_DIR "data"
#endif

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string task;
  std::string out;
  std::string train;
  std::string test;
  std::string tagger_ckpt;
  std::string transducer_ckpt;
};

void check_vocabulary_constants() {
  if (kTagNames.size() != 10 || kFormulaTokenNames.size() != 18) {
    throw NumericError("tag set size " + std::to_string(kTagNames.size()) + " and formula term count " +
                       std::to_string(kFormulaTokenNames.size()) + " differ from 10 and 18");
  }
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (index_of(*parse_tag_name(kTagNames[i])) != i) throw NumericError("tag table is not self-consistent");
  }
  for (std::size_t i = 0; i < kFormulaTokenNames.size(); ++i) {
    if (index_of(*parse_token_name(kFormulaTokenNames[i])) != i) throw NumericError("term table is not self-consistent");
  }
}

KeyValueConfig load_config(const Options& o) {
  KeyValueConfig kv = o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
  check_config_keys(kv);
  if (o.seed_set) kv.set("seed", std::to_string(o.seed));
  return kv;
}

std::string config_dir(const Options& o) {
  return o.config.empty() ? std::string(".") : fs::path(o.config).parent_path().string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

// ---------------------------------------------------------------------------

int cmd_gen_corpus(const Options& o) {
  if (o.out.empty()) throw ConfigError("gen-corpus needs --out DIR");
  const KeyValueConfig kv = load_config(o);
  const CorpusSettings cs =
      CorpusSettings::from_config(kv, config_dir(o), std::string(OWL2SEQ_DATA_DIR) + "/lexicon");
  const Lexicon lex = load_lexicon(cs.lexicon_dir).truncated(cs.sizes);
  const auto templates = expand_grammar(cs.grammar);
  const Dataset ds = generate_dataset(templates, lex, cs.dataset);

  std::string lexicon_text;
  for (const auto* list : {&lex.verbs, &lex.adjectives, &lex.nouns1, &lex.nouns2}) lexicon_text += join(*list, " ") + "\n";
  const std::vector<std::pair<std::string, std::string>> header = {
      {"generator", kGeneratorVersion},
      {"seed", std::to_string(cs.dataset.seed)},
      {"config_hash", hex64(fnv1a64(cs.canonical() + lexicon_text))},
      {"templates", std::to_string(templates.size())}};

  ensure_dir(o.out);
  for (const auto& [name, examples] : {std::pair{"train.tsv", &ds.train}, std::pair{"test.tsv", &ds.test}}) {
    const std::string path = (fs::path(o.out) / name).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    write_dataset(f, *examples, header);
    if (!f) throw IoError("failed writing " + path);
  }
  std::size_t formulas = formula_space(cs.grammar).size();
  std::cout << "sentence templates: " << templates.size() << "\n"
            << "formula templates: " << formulas << "\n"
            << "train examples: " << ds.train.size() << "\n"
            << "test examples: " << ds.test.size() << "\n"
            << "vocabulary: " << build_vocab(ds.train).size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

void print_row(const MetricsRow& r) {
  std::cout << "epoch " << std::setw(3) << r.epoch << "  " << std::left << std::setw(5) << r.split << std::right
            << "  loss " << std::fixed << std::setprecision(4) << r.loss << "  token " << r.token_accuracy
            << "  sequence " << r.sequence_accuracy << std::defaultfloat << "\n";
}

int cmd_train(const Options& o) {
  if (o.train.empty()) throw ConfigError("train needs --train PATH");
  if (o.out.empty()) throw ConfigError("train needs --out DIR");
  KeyValueConfig kv = load_config(o);
  if (!o.task.empty()) kv.set("task", o.task);
  const RunConfig rc = RunConfig::from_config(kv);

  const DatasetFile train_file = read_dataset_file(o.train);
  if (train_file.examples.empty()) throw CorruptionError(o.train + ": no examples");
  const Vocabulary vocab = build_vocab(train_file.examples);
  const auto data = encode_examples(train_file.examples, vocab);
  std::vector<EncodedExample> test;
  if (!o.test.empty()) test = encode_examples(read_dataset_file(o.test).examples, vocab);

  ensure_dir(o.out);
  const std::string metrics_path = (fs::path(o.out) / (rc.task + "_metrics.csv")).string();
  const std::string ckpt_path = (fs::path(o.out) / (rc.task + ".ckpt")).string();
  std::ofstream metrics(metrics_path, std::ios::trunc);
  if (!metrics) throw IoError("cannot write " + metrics_path);
  metrics << kMetricsHeader << '\n';
  auto on_row = [&](const MetricsRow& r) {
    write_metrics_row(metrics, r);
    metrics.flush();
    print_row(r);
  };

  SeededRng init = SeededRng(rc.seed).fork(rc.task == "tagger" ? 101 : 102);
  std::cout << "task " << rc.task << ", " << data.size() << " training examples, vocabulary " << vocab.size() << "\n";
  if (rc.task == "tagger") {
    TaggerConfig cfg = rc.tagger;
    cfg.in_vocab = vocab.size();
    TaggerModel model = TaggerModel::initialize(cfg, init);
    const auto run = train_model(model, data, rc.train, test, on_row);
    save_checkpoint(ckpt_path, make_checkpoint(model, vocab, rc.echo()));
    std::cout << "epochs run: " << run.epochs_run << "\n";
  } else {
    TransducerConfig cfg = rc.transducer;
    cfg.in_vocab = vocab.size();
    if (cfg.max_output_len == 0) cfg.max_output_len = default_max_output_len(data);
    TransducerModel model = TransducerModel::initialize(cfg, init);
    const auto run = train_model(model, data, rc.train, test, on_row);
    save_checkpoint(ckpt_path, make_checkpoint(model, vocab, rc.echo()));
    std::cout << "epochs run: " << run.epochs_run << "\n";
  }
  std::cout << "checkpoint: " << ckpt_path << "\nmetrics: " << metrics_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

void check_known_words(const std::vector<Example>& examples, const Vocabulary& vocab, const std::string& origin) {
  for (const auto& ex : examples) {
    for (const auto& w : ex.words) {
      if (!vocab.contains(w)) {
        throw VocabularyError(origin + ": word '" + w + "' is not in the checkpoint vocabulary of " +
                                   std::to_string(vocab.size()) + " entries (use --allow-unknown to map it to " +
                                   std::string(Vocabulary::kUnkWord) + ")",
                            Vocabulary::kUnk);
      }
    }
  }
}

int cmd_eval(const Options& o, bool allow_unknown) {
  const std::string task = o.task.empty() ? (o.tagger_ckpt.empty() ? "transducer" : "tagger") : o.task;
  const std::string& path = o.test.empty() ? o.train : o.test;
  if (path.empty()) throw ConfigError("eval needs --test PATH");
  const DatasetFile file = read_dataset_file(path);
  SequenceScore score;
  double loss = 0.0;
  if (task == "tagger") {
    if (o.tagger_ckpt.empty()) throw ConfigError("eval --task tagger needs --tagger-ckpt PATH");
    auto r = restore_tagger(load_checkpoint(o.tagger_ckpt));
    if (!allow_unknown) check_known_words(file.examples, r.vocab, path);
    const auto data = encode_examples(file.examples, r.vocab);
    score = evaluate(r.model, data);
    for (const auto& ex : data) loss += batch_loss(r.model, std::span<const EncodedExample>(&ex, 1));
  } else if (task == "transducer") {
    if (o.transducer_ckpt.empty()) throw ConfigError("eval --task transducer needs --transducer-ckpt PATH");
    auto r = restore_transducer(load_checkpoint(o.transducer_ckpt));
    if (!allow_unknown) check_known_words(file.examples, r.vocab, path);
    const auto data = encode_examples(file.examples, r.vocab);
    score = evaluate(r.model, data);
    for (const auto& ex : data) loss += batch_loss(r.model, std::span<const EncodedExample>(&ex, 1));
  } else {
    throw ConfigError("--task must be tagger or transducer");
  }
  std::cout << std::setprecision(10) << "examples " << score.sequences << "\nloss " << loss << "\ntoken_accuracy "
            << score.token_accuracy() << "\nsequence_accuracy " << score.sequence_accuracy() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_translate(const Options& o, const std::vector<std::string>& words, bool verbose) {
  if (o.tagger_ckpt.empty() || o.transducer_ckpt.empty()) {
    throw ConfigError("translate needs --tagger-ckpt PATH and --transducer-ckpt PATH");
  }
  auto tagger = restore_tagger(load_checkpoint(o.tagger_ckpt));
  auto transducer = restore_transducer(load_checkpoint(o.transducer_ckpt));
  check_shared_vocabulary(tagger.vocab, transducer.vocab);

  std::vector<std::string> sentences;
  if (!words.empty()) {
    sentences.push_back(join(words, " "));
  } else {
    for (std::string line; std::getline(std::cin, line);) {
      if (!trim(line).empty()) sentences.push_back(line);
    }
  }
  int status = kExitOk;
  for (const auto& s : sentences) {
    const Translation t = translate(tagger.model, transducer.model, tagger.vocab, tokenize_sentence(s));
    if (t.ok()) {
      std::cout << t.text() << "\n";
      if (verbose) {
        std::cout << "  tags: " << tags_to_string(t.tags) << "\n  template: " << tokens_to_string(t.template_tokens)
                  << "\n";
        for (const auto& w : t.warnings) std::cout << "  warning: " << w << "\n";
      }
    } else {
      status = std::max(status, t.status == TranslationStatus::Incompatible ? kExitIncompatible : kExitData);
      std::cout << "error: " << t.diagnostic << "\n  sentence: " << s << "\n  tags: " << tags_to_string(t.tags)
                << "\n  template: " << tokens_to_string(t.template_tokens) << "\n";
    }
  }
  return status;
}

// ---------------------------------------------------------------------------

int cmd_gradcheck(const Options& o, const TinyDims& dims, const std::string& corrupt) {
  const std::string task = o.task.empty() ? "tagger" : o.task;
  GradCheckSetup setup;
  setup.seed = o.seed;
  setup.corrupt_tensor = corrupt;
  GradCheckReport report;
  if (task == "tagger") {
    report = check_tagger_gradients(dims, setup);
  } else if (task == "transducer") {
    report = check_transducer_gradients(dims, setup);
  } else {
    throw ConfigError("--task must be tagger or transducer");
  }
  std::cout << std::setprecision(6);
  for (const auto& t : report.tensors) {
    std::cout << std::left << std::setw(14) << t.name << std::right << " coords " << std::setw(4) << t.checked
              << "  max rel err " << std::scientific << t.max_rel_error << "  at " << t.worst_coord << " (analytic "
              << t.analytic << ", numeric " << t.numeric << ")" << std::defaultfloat << "\n";
  }
  std::cout << "max relative error " << std::scientific << report.max_rel_error() << std::defaultfloat << " over "
            << report.coordinates_checked() << " coordinates, tolerance " << report.tolerance << ": "
            << (report.passed() ? "PASS" : "FAIL") << "\n";
  return report.passed() ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------------------

std::string svg_curves(const std::vector<MetricsRow>& rows, const std::string& split) {
  std::size_t max_epoch = 1;
  for (const auto& r : rows) max_epoch = std::max(max_epoch, r.epoch);
  const double w = 640, h = 360, left = 50, right = 20, top = 20, bottom = 40;
  auto px = [&](double epoch) { return left + (w - left - right) * (epoch - 1) / std::max<double>(1, double(max_epoch - 1)); };
  auto py = [&](double acc) { return top + (h - top - bottom) * (1.0 - acc); };
  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << w - right << "\" y2=\"" << py(0)
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << left << "\" y2=\"" << py(1)
    << "\" stroke=\"black\"/>\n";
  for (double a : {0.0, 0.5, 1.0}) {
    s << "<text x=\"" << left - 8 << "\" y=\"" << py(a) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << a
      << "</text>\n";
  }
  s << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 8 << "\" font-size=\"12\" text-anchor=\"middle\">epoch ("
    << split << ", 1.." << max_epoch << ")</text>\n";
  const std::pair<const char*, double MetricsRow::*> series[] = {{"#1f77b4", &MetricsRow::token_accuracy},
                                                                 {"#d62728", &MetricsRow::sequence_accuracy}};
  for (const auto& [color, field] : series) {
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows) s << px(double(r.epoch)) << ',' << py(r.*field) << ' ';
    s << "\"/>\n";
  }
  s << "<text x=\"" << w - right << "\" y=\"" << top + 12 << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#1f77b4\">"
    << "token accuracy</text>\n";
  s << "<text x=\"" << w - right << "\" y=\"" << top + 26 << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#d62728\">"
    << "sequence accuracy</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string text_curves(const std::vector<MetricsRow>& rows) {
  std::ostringstream s;
  s << "epoch  token    sequence\n";
  for (const auto& r : rows) {
    const auto bar = static_cast<std::size_t>(std::lround(r.token_accuracy * 40));
    s << std::setw(5) << r.epoch << "  " << std::fixed << std::setprecision(4) << r.token_accuracy << "   "
      << r.sequence_accuracy << "  " << std::string(bar, '#') << "\n";
  }
  return s.str();
}

int cmd_export_curves(const std::string& metrics_path, const Options& o, const std::string& split,
                      std::size_t first_epochs) {
  auto rows = read_metrics_file(metrics_path);
  std::erase_if(rows, [&](const MetricsRow& r) { return r.split != split || (first_epochs && r.epoch > first_epochs); });
  if (rows.empty()) throw CorruptionError(metrics_path + ": no rows for split '" + split + "'");
  const bool svg = !o.out.empty() && fs::path(o.out).extension() == ".svg";
  const std::string body = svg ? svg_curves(rows, split) : text_curves(rows);
  if (o.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(o.out, std::ios::trunc);
    if (!f) throw IoError("cannot write " + o.out);
    f << body;
    std::cout << "wrote " << rows.size() << " epochs to " << o.out << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"owl2seq: definitory sentences to description-logic axioms"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key=value configuration file");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "random seed");
  };

  auto* gen = app.add_subcommand("gen-corpus", "generate train/test corpora from a grammar config");
  add_common(gen);
  gen->add_option("--out", o.out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train the tagger or the transducer");
  add_common(train);
  train->add_option("--task", o.task, "tagger | transducer");
  train->add_option("--train", o.train, "training corpus")->required();
  train->add_option("--test", o.test, "held-out corpus evaluated every epoch");
  train->add_option("--out", o.out, "output directory")->required();

  bool allow_unknown = false;
  auto* eval = app.add_subcommand("eval", "token and sequence accuracy of a checkpoint on a corpus");
  eval->add_option("--task", o.task, "tagger | transducer");
  eval->add_option("--test", o.test, "corpus to evaluate")->required();
  eval->add_option("--tagger-ckpt", o.tagger_ckpt, "tagger checkpoint");
  eval->add_option("--transducer-ckpt", o.transducer_ckpt, "transducer checkpoint");
  eval->add_flag("--allow-unknown", allow_unknown, "map words outside the checkpoint vocabulary to <UNK>");

  std::vector<std::string> words;
  bool verbose = false;
  auto* tr = app.add_subcommand("translate", "translate sentences (arguments or stdin lines) to axioms");
  tr->add_option("--tagger-ckpt", o.tagger_ckpt, "tagger checkpoint")->required();
  tr->add_option("--transducer-ckpt", o.transducer_ckpt, "transducer checkpoint")->required();
  tr->add_option("sentence", words, "sentence words; stdin is read when absent");
  tr->add_flag("-v,--verbose", verbose, "also print tags and the formula template");

  TinyDims dims;
  std::string corrupt;
  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient check on a tiny random model");
  add_common(gc);
  gc->add_option("--task", o.task, "tagger | transducer");
  gc->add_option("--vocab", dims.vocab, "input vocabulary size");
  gc->add_option("--embed", dims.embed, "embedding size");
  gc->add_option("--hidden", dims.hidden, "tagger / encoder hidden size");
  gc->add_option("--dec-hidden", dims.dec_hidden, "decoder hidden size");
  gc->add_option("--window", dims.window_half_width, "tagger window half-width");
  gc->add_option("--length", dims.max_length, "longest sequence, EOS included");
  gc->add_option("--batch", dims.batch, "examples in the checked batch");
  gc->add_option("--corrupt-grad", corrupt, "scale this tensor's analytic gradient by 1.01")->group("");

  std::string metrics_path, split = "val";
  std::size_t first_epochs = 0;
  auto* ex = app.add_subcommand("export-curves", "accuracy curve from a metrics CSV (SVG when --out ends in .svg)");
  ex->add_option("metrics", metrics_path, "metrics CSV written by train")->required();
  ex->add_option("--out", o.out, "output file; stdout when absent");
  ex->add_option("--split", split, "train | val | test");
  ex->add_option("--epochs", first_epochs, "only the first N epochs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    check_vocabulary_constants();
    if (*gen) return cmd_gen_corpus(o);
    if (*train) return cmd_train(o);
    if (*eval) return cmd_eval(o, allow_unknown);
    if (*tr) return cmd_translate(o, words, verbose);
    if (*gc) return cmd_gradcheck(o, dims, corrupt);
    if (*ex) return cmd_export_curves(metrics_path, o, split, first_epochs);
  } catch (const ConfigError& e) {
    std::cerr << "owl2seq: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "owl2seq: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IncompatibilityError& e) {
    std::cerr << "owl2seq: incompatible: " << e.what() << "\n";
    return kExitIncompatible;
  } catch (const Error& e) {
    std::cerr << "owl2seq: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "owl2seq: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
