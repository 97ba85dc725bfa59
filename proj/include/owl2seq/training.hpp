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

#ifndef OWL2SEQ_TRAINING_HPP
#define OWL2SEQ_TRAINING_HPP

// Epoch loop shared by both networks: stratified resplit, shuffle,
// mini-batches, summed gradients, AdaDelta. Metrics go to CSV.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "owl2seq/config.hpp"
#include "owl2seq/corpus.hpp"
#include "owl2seq/errors.hpp"
#include "owl2seq/nn.hpp"
#include "owl2seq/sequence.hpp"
#include "owl2seq/tagger.hpp"
#include "owl2seq/transducer.hpp"

namespace owl2seq {

inline SequenceScore evaluate(const TaggerModel& m, std::span<const EncodedExample> xs) { return evaluate_tagger(m, xs); }
inline SequenceScore evaluate(const TransducerModel& m, std::span<const EncodedExample> xs) {
  return evaluate_transducer(m, xs);
}

struct TrainConfig {
  std::size_t epochs = 150;
  std::size_t batch_size = 128;
  AdaDeltaConfig optimizer;
  double train_ratio = 0.9;
  std::uint64_t seed = 0;
  // Stop once validation has been perfect (token and sequence accuracy 1)
  // for this many consecutive epochs; 0 trains for all epochs.
  std::size_t stop_after_perfect = 0;

  void validate() const {
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("train_ratio must lie in (0, 1)");
    if (!(optimizer.lr > 0.0) || !(optimizer.rho > 0.0 && optimizer.rho < 1.0) || !(optimizer.epsilon > 0.0)) {
      throw ConfigError("AdaDelta needs lr > 0, rho in (0, 1), epsilon > 0");
    }
  }
};

struct MetricsRow {
  std::size_t epoch = 0;
  std::string split;  // train | val | test
  double loss = 0.0;
  double token_accuracy = 0.0;
  double sequence_accuracy = 0.0;
  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline constexpr std::string_view kMetricsHeader = "epoch,split,loss,token_accuracy,sequence_accuracy";

inline void write_metrics_row(std::ostream& out, const MetricsRow& r) {
  out << r.epoch << ',' << r.split << ',' << std::setprecision(17) << r.loss << ',' << r.token_accuracy << ','
      << r.sequence_accuracy << '\n';
}

inline void write_metrics(std::ostream& out, std::span<const MetricsRow> rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) write_metrics_row(out, r);
}

inline std::vector<MetricsRow> read_metrics(std::istream& in, const std::string& origin = "metrics") {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMetricsHeader) {
    throw CorruptionError(origin + ": missing metrics header");
  }
  std::vector<MetricsRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw CorruptionError(origin + ":" + std::to_string(lineno) + ": expected 5 fields");
    try {
      rows.push_back({std::stoul(f[0]), f[1], std::stod(f[2]), std::stod(f[3]), std::stod(f[4])});
    } catch (const std::exception&) {
      throw CorruptionError(origin + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

inline std::vector<MetricsRow> read_metrics_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics file " + path);
  return read_metrics(in, path);
}

struct TrainingRun {
  std::vector<MetricsRow> rows;
  std::size_t epochs_run = 0;
  bool stopped_early = false;
};

/// Trains `model` in place. Every epoch draws its own stream from the seed,
/// resplits `data` per template group, shuffles the training part and takes
/// one AdaDelta step per batch on the summed batch gradient. Train rows
/// report the summed batch losses and the predictions made during those
/// forward passes; val and test rows evaluate the model at epoch end.
template <typename Model>
TrainingRun train_model(Model& model, std::span<const EncodedExample> data, const TrainConfig& cfg,
                        std::span<const EncodedExample> test = {},
                        const std::function<void(const MetricsRow&)>& on_row = {}) {
  cfg.validate();
  if (data.empty()) throw ConfigError("training set is empty");
  TrainingRun run;
  AdaDelta optimizer(model.tensors(), cfg.optimizer);
  const SeededRng root(cfg.seed);
  std::size_t perfect_streak = 0;

  auto emit = [&](MetricsRow row) {
    if (on_row) on_row(row);
    run.rows.push_back(std::move(row));
  };

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    SeededRng rng = root.fork(epoch);
    const StratifiedSplit split = split_stratified(data, cfg.train_ratio, rng);
    std::vector<std::size_t> order = split.train;
    rng.shuffle(order);

    double train_loss = 0.0;
    SequenceScore train_score;
    std::vector<EncodedExample> batch;
    for (std::size_t start = 0, b = 0; start < order.size(); start += cfg.batch_size, ++b) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) batch.push_back(data[order[i]]);
      auto result = loss_and_grads(model, std::span<const EncodedExample>(batch));
      if (!std::isfinite(result.loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(b));
      }
      train_loss += result.loss;
      train_score.merge(result.score);
      optimizer.step(model.tensors(), result.grads.tensors());
    }
    emit({epoch, "train", train_loss, train_score.token_accuracy(), train_score.sequence_accuracy()});

    std::vector<EncodedExample> val;
    for (std::size_t i : split.validation) val.push_back(data[i]);
    if (!val.empty()) {
      const SequenceScore s = evaluate(model, val);
      emit({epoch, "val", batch_loss(model, std::span<const EncodedExample>(val)), s.token_accuracy(),
            s.sequence_accuracy()});
      const bool perfect = s.correct_positions == s.positions && s.correct_sequences == s.sequences;
      perfect_streak = perfect ? perfect_streak + 1 : 0;
    }
    if (!test.empty()) {
      const SequenceScore s = evaluate(model, test);
      emit({epoch, "test", batch_loss(model, test), s.token_accuracy(), s.sequence_accuracy()});
    }
    run.epochs_run = epoch;
    if (cfg.stop_after_perfect > 0 && perfect_streak >= cfg.stop_after_perfect) {
      run.stopped_early = epoch < cfg.epochs;
      break;
    }
  }
  return run;
}

}  // namespace owl2seq

#endif  // OWL2SEQ_TRAINING_HPP
