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

#ifndef OWL2SEQ_RUN_CONFIG_HPP
#define OWL2SEQ_RUN_CONFIG_HPP

// One key=value file drives corpus generation and training. Unknown keys
// are rejected so that typos do not silently fall back to defaults.

#include <filesystem>
#include <set>
#include <string>

#include "owl2seq/config.hpp"
#include "owl2seq/corpus.hpp"
#include "owl2seq/errors.hpp"
#include "owl2seq/tagger.hpp"
#include "owl2seq/training.hpp"
#include "owl2seq/transducer.hpp"

namespace owl2seq {

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      // grammar
      "lhs_atoms", "rhs_atoms", "lhs_connectives", "rhs_connectives", "card_ops", "card_pairs", "variants",
      "verbalizations", "ordered_pairs",
      // lexicon and corpus
      "lexicon_dir", "verbs", "adjectives", "nouns1", "nouns2", "examples_per_template", "test_size", "max_retries",
      // networks
      "tagger.window", "tagger.embed_dim", "tagger.hidden_dim", "transducer.embed_dim", "transducer.enc_hidden",
      "transducer.dec_hidden", "transducer.max_output_len",
      // training
      "task", "epochs", "batch_size", "lr", "rho", "epsilon", "train_ratio", "stop_after_perfect", "seed"};
  return keys;
}

inline void check_config_keys(const KeyValueConfig& kv) {
  for (const auto& [k, v] : kv.values()) {
    if (!known_config_keys().contains(k)) throw ConfigError("unknown config key '" + k + "'");
  }
}

struct CorpusSettings {
  std::string lexicon_dir;
  LexiconSizes sizes;
  GrammarConfig grammar;
  DatasetConfig dataset;

  /// Relative lexicon_dir values resolve against `base_dir`; without the
  /// key, `default_lexicon_dir` is used.
  static CorpusSettings from_config(const KeyValueConfig& kv, const std::string& base_dir,
                                    const std::string& default_lexicon_dir) {
    CorpusSettings s;
    s.grammar = GrammarConfig::from_config(kv);
    if (kv.has("lexicon_dir")) {
      std::filesystem::path p(kv.get("lexicon_dir", ""));
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      s.lexicon_dir = p.lexically_normal().string();
    } else {
      s.lexicon_dir = default_lexicon_dir;
    }
    s.sizes.verbs = kv.get_uint("verbs", s.sizes.verbs);
    s.sizes.adjectives = kv.get_uint("adjectives", s.sizes.adjectives);
    s.sizes.nouns1 = kv.get_uint("nouns1", s.sizes.nouns1);
    s.sizes.nouns2 = kv.get_uint("nouns2", s.sizes.nouns2);
    s.dataset.examples_per_template = kv.get_uint("examples_per_template", s.dataset.examples_per_template);
    s.dataset.test_size = kv.get_uint("test_size", s.dataset.test_size);
    s.dataset.max_retries = kv.get_uint("max_retries", s.dataset.max_retries);
    s.dataset.seed = kv.get_uint("seed", 0);
    return s;
  }

  /// Stable text of everything that determines the corpus bytes except the
  /// lexicon contents.
  std::string canonical() const {
    std::string out = grammar.canonical();
    out += "verbs=" + std::to_string(sizes.verbs) + "\nadjectives=" + std::to_string(sizes.adjectives) +
           "\nnouns1=" + std::to_string(sizes.nouns1) + "\nnouns2=" + std::to_string(sizes.nouns2) +
           "\nexamples_per_template=" + std::to_string(dataset.examples_per_template) +
           "\ntest_size=" + std::to_string(dataset.test_size) + "\nmax_retries=" + std::to_string(dataset.max_retries) +
           "\nseed=" + std::to_string(dataset.seed) + "\n";
    return out;
  }
};

/// Defaults follow the reference network parameters: embedding 100, tagger
/// hidden 200, encoder/decoder 1000, 150 epochs, batch 128, AdaDelta with
/// lr 2.0, rho 0.95, epsilon 1e-6.
struct RunConfig {
  std::string task = "tagger";
  TaggerConfig tagger{2, 100, 200, 0, kTagCount};
  TransducerConfig transducer{100, 1000, 1000, 0, kFormulaTermCount, 0};
  TrainConfig train;
  std::uint64_t seed = 0;

  static RunConfig from_config(const KeyValueConfig& kv) {
    RunConfig r;
    r.task = kv.get("task", r.task);
    r.tagger.window_half_width = kv.get_uint("tagger.window", r.tagger.window_half_width);
    r.tagger.embed_dim = kv.get_uint("tagger.embed_dim", r.tagger.embed_dim);
    r.tagger.hidden_dim = kv.get_uint("tagger.hidden_dim", r.tagger.hidden_dim);
    r.transducer.embed_dim = kv.get_uint("transducer.embed_dim", r.transducer.embed_dim);
    r.transducer.enc_hidden = kv.get_uint("transducer.enc_hidden", r.transducer.enc_hidden);
    r.transducer.dec_hidden = kv.get_uint("transducer.dec_hidden", r.transducer.dec_hidden);
    r.transducer.max_output_len = kv.get_uint("transducer.max_output_len", r.transducer.max_output_len);
    r.train.epochs = kv.get_uint("epochs", r.train.epochs);
    r.train.batch_size = kv.get_uint("batch_size", r.train.batch_size);
    r.train.optimizer.lr = kv.get_double("lr", r.train.optimizer.lr);
    r.train.optimizer.rho = kv.get_double("rho", r.train.optimizer.rho);
    r.train.optimizer.epsilon = kv.get_double("epsilon", r.train.optimizer.epsilon);
    r.train.train_ratio = kv.get_double("train_ratio", r.train.train_ratio);
    r.train.stop_after_perfect = kv.get_uint("stop_after_perfect", r.train.stop_after_perfect);
    r.seed = kv.get_uint("seed", r.seed);
    r.train.seed = r.seed;
    if (r.task != "tagger" && r.task != "transducer") {
      throw ConfigError("task must be 'tagger' or 'transducer', got '" + r.task + "'");
    }
    r.train.validate();
    return r;
  }

  /// Echo stored in checkpoints.
  KeyValueConfig echo() const {
    KeyValueConfig kv;
    kv.set("run.seed", std::to_string(seed));
    kv.set("run.epochs", std::to_string(train.epochs));
    kv.set("run.batch_size", std::to_string(train.batch_size));
    kv.set("run.lr", format_double(train.optimizer.lr));
    kv.set("run.rho", format_double(train.optimizer.rho));
    kv.set("run.epsilon", format_double(train.optimizer.epsilon));
    kv.set("run.train_ratio", format_double(train.train_ratio));
    kv.set("run.stop_after_perfect", std::to_string(train.stop_after_perfect));
    return kv;
  }

  static std::string format_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
  }
};

}  // namespace owl2seq

#endif  // OWL2SEQ_RUN_CONFIG_HPP
