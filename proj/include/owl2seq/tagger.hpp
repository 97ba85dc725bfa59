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

#ifndef OWL2SEQ_TAGGER_HPP
#define OWL2SEQ_TAGGER_HPP

// Sequence tagger: context window -> embedding -> GRU -> softmax over tags.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "owl2seq/dlkit.hpp"
#include "owl2seq/errors.hpp"
#include "owl2seq/nn.hpp"
#include "owl2seq/numkit.hpp"
#include "owl2seq/sequence.hpp"

namespace owl2seq {

struct TaggerConfig {
  std::size_t window_half_width = 2;  // c
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 64;
  std::size_t in_vocab = 0;
  std::size_t out_tags = kTagCount;

  std::size_t window_size() const noexcept { return 2 * window_half_width + 1; }
  std::size_t gru_input_dim() const noexcept { return window_size() * embed_dim; }

  void validate() const {
    if (embed_dim == 0 || hidden_dim == 0 || in_vocab == 0) {
      throw ConfigError("tagger dimensions must be positive (embed " + std::to_string(embed_dim) + ", hidden " +
                        std::to_string(hidden_dim) + ", vocab " + std::to_string(in_vocab) + ")");
    }
    if (out_tags != kTagCount) {
      throw ConfigError("tagger output size " + std::to_string(out_tags) + " differs from the tag set size " +
                        std::to_string(kTagCount));
    }
  }

  friend bool operator==(const TaggerConfig&, const TaggerConfig&) = default;
};

struct TaggerModel {
  TaggerConfig config;
  EmbeddingTable embedding;
  GruParams gru;
  OutputHead head;

  static TaggerModel zeros(const TaggerConfig& cfg) {
    cfg.validate();
    TaggerModel m;
    m.config = cfg;
    m.embedding.E = DenseMatrix(cfg.embed_dim, cfg.in_vocab);
    m.gru = GruParams::zeros(cfg.hidden_dim, cfg.gru_input_dim());
    m.head = {DenseMatrix(cfg.out_tags, cfg.hidden_dim), DenseVector(cfg.out_tags)};
    return m;
  }

  static TaggerModel initialize(const TaggerConfig& cfg, SeededRng& rng) {
    TaggerModel m = zeros(cfg);
    m.embedding.E = uniform_init(cfg.embed_dim, cfg.in_vocab, 0.1, rng);
    m.gru = GruParams::glorot(cfg.hidden_dim, cfg.gru_input_dim(), rng);
    m.head.W = glorot_init(cfg.out_tags, cfg.hidden_dim, rng);
    return m;
  }

  void validate() const {
    config.validate();
    gru.validate();
    head.validate();
    if (embedding.embed_dim() != config.embed_dim || embedding.vocab_size() != config.in_vocab ||
        gru.hidden_dim() != config.hidden_dim || gru.input_dim() != config.gru_input_dim() ||
        head.hidden_dim() != config.hidden_dim || head.out_dim() != config.out_tags) {
      throw ShapeError("tagger tensors disagree with config: E " + embedding.E.shape() + ", W_r " + gru.W_r.shape() +
                       ", head " + head.W.shape());
    }
  }

  /// Fixed order: embedding, GRU (W_r U_r W_z U_z W_h U_h), head (W b).
  std::vector<TensorRef> tensors() {
    std::vector<TensorRef> out;
    out.push_back(tensor_ref("embedding.E", embedding.E));
    gru.append_tensors("gru", out);
    head.append_tensors("head", out);
    return out;
  }
};

/// One (2c+1)-window per position, positions outside the sequence read EOS.
inline std::vector<std::vector<std::size_t>> windows(std::span<const std::size_t> indices, std::size_t c) {
  const auto n = static_cast<std::ptrdiff_t>(indices.size());
  const auto half = static_cast<std::ptrdiff_t>(c);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(indices.size());
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    std::vector<std::size_t> w;
    w.reserve(2 * c + 1);
    for (std::ptrdiff_t j = k - half; j <= k + half; ++j) {
      w.push_back(j < 0 || j >= n ? kEosIndex : indices[static_cast<std::size_t>(j)]);
    }
    out.push_back(std::move(w));
  }
  return out;
}

/// Forward activations of one sentence, kept for backpropagation.
struct TaggerTrace {
  std::vector<std::vector<std::size_t>> windows;
  std::vector<GruCache> steps;
  std::vector<DenseVector> probs;
};

inline TaggerTrace tagger_trace(const TaggerModel& model, std::span<const std::size_t> indices) {
  const std::size_t n = model.config.hidden_dim;
  TaggerTrace t;
  t.windows = windows(indices, model.config.window_half_width);
  t.steps.resize(indices.size());
  t.probs.assign(indices.size(), DenseVector(model.config.out_tags));
  DenseVector h(n);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const DenseVector x = embed_window(model.embedding, t.windows[k]);
    gru_step(model.gru, x.span(), h.span(), t.steps[k]);
    h = t.steps[k].h;
    output_distribution_into(model.head, h.span(), t.probs[k].span());
  }
  return t;
}

/// Per-position tag distributions; h<0> is the zero vector.
inline std::vector<DenseVector> forward(const TaggerModel& model, std::span<const std::size_t> indices) {
  return tagger_trace(model, indices).probs;
}

/// Argmax tag per position, ties to the lowest tag index.
inline std::vector<Tag> predict(const TaggerModel& model, std::span<const std::size_t> indices) {
  std::vector<Tag> out;
  for (const auto& p : forward(model, indices)) out.push_back(tag_from_index(argmax(p.span())));
  return out;
}

inline std::vector<std::size_t> predict_indices(const TaggerModel& model, std::span<const std::size_t> indices) {
  std::vector<std::size_t> out;
  for (const auto& p : forward(model, indices)) out.push_back(argmax(p.span()));
  return out;
}

/// Adds d loss / d params of one sentence into `grads` and returns its loss.
/// When `score` is given, the forward pass's argmax tags are scored too.
inline double tagger_backprop(const TaggerModel& model, std::span<const std::size_t> words,
                              std::span<const std::size_t> gold, TaggerModel& grads,
                              SequenceScore* score = nullptr) {
  if (words.size() != gold.size()) {
    throw ShapeError("tagger: " + std::to_string(words.size()) + " words against " + std::to_string(gold.size()) +
                     " tags");
  }
  for (std::size_t g : gold) {
    if (g >= model.config.out_tags) throw VocabularyError("tag index outside the tag set", g);
  }
  const TaggerTrace t = tagger_trace(model, words);
  const double loss = sequence_cross_entropy(t.probs, gold);
  if (score) {
    std::vector<std::size_t> pred;
    for (const auto& p : t.probs) pred.push_back(argmax(p.span()));
    score->add(pred, gold);
  }

  const std::size_t d = model.config.embed_dim;
  DenseVector grad_next(model.config.hidden_dim);
  for (std::size_t k = words.size(); k-- > 0;) {
    DenseVector grad_h = grad_next;
    output_backward(model.head, t.steps[k].h.span(), t.probs[k].span(), gold[k], grads.head, grad_h.span());
    const auto in = gru_backward(model.gru, t.steps[k], grad_h.span(), grads.gru);
    for (std::size_t p = 0; p < t.windows[k].size(); ++p) {
      grads.embedding.accumulate_column(t.windows[k][p], in.grad_x.span().subspan(p * d, d));
    }
    grad_next = in.grad_h_prev;
  }
  return loss;
}

struct TaggerLoss {
  double loss = 0.0;
  TaggerModel grads;
  SequenceScore score;  // predictions of the same forward pass
};

/// Summed cross-entropy and gradients of a batch. Sentences are padded with
/// EOS to the batch's longest one; per-example gradients are summed in
/// batch order.
inline TaggerLoss loss_and_grads(const TaggerModel& model, std::span<const EncodedExample> batch) {
  if (batch.empty()) throw ConfigError("tagger: empty batch");
  std::size_t length = 0;
  for (const auto& ex : batch) length = std::max(length, ex.words.size());
  TaggerLoss out{0.0, TaggerModel::zeros(model.config), {}};
  for (const auto& ex : batch) {
    const auto words = pad_to(ex.words, length);
    const auto tags = pad_to(ex.tags, length);
    out.loss += tagger_backprop(model, words, tags, out.grads, &out.score);
  }
  return out;
}

/// Batch loss without gradients, padded like loss_and_grads.
inline double batch_loss(const TaggerModel& model, std::span<const EncodedExample> batch) {
  std::size_t length = 0;
  for (const auto& ex : batch) length = std::max(length, ex.words.size());
  double loss = 0.0;
  for (const auto& ex : batch) {
    const auto words = pad_to(ex.words, length);
    const auto tags = pad_to(ex.tags, length);
    loss += sequence_cross_entropy(forward(model, words), tags);
  }
  return loss;
}

inline SequenceScore evaluate_tagger(const TaggerModel& model, std::span<const EncodedExample> examples) {
  SequenceScore score;
  for (const auto& ex : examples) score.add(predict_indices(model, ex.words), ex.tags);
  return score;
}

}  // namespace owl2seq

#endif  // OWL2SEQ_TAGGER_HPP
