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

#ifndef OWL2SEQ_TRANSDUCER_HPP
#define OWL2SEQ_TRANSDUCER_HPP

// Encoder-decoder without attention or token feedback: the encoder's last
// state c is the constant input of every decoder step.

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

struct TransducerConfig {
  std::size_t embed_dim = 32;
  std::size_t enc_hidden = 128;
  std::size_t dec_hidden = 128;
  std::size_t in_vocab = 0;
  std::size_t out_terms = kFormulaTermCount;
  std::size_t max_output_len = 0;  // m_max; 0 until set from a training corpus

  void validate() const {
    if (embed_dim == 0 || enc_hidden == 0 || dec_hidden == 0 || in_vocab == 0) {
      throw ConfigError("transducer dimensions must be positive (embed " + std::to_string(embed_dim) + ", enc " +
                        std::to_string(enc_hidden) + ", dec " + std::to_string(dec_hidden) + ", vocab " +
                        std::to_string(in_vocab) + ")");
    }
    if (out_terms != kFormulaTermCount) {
      throw ConfigError("transducer output size " + std::to_string(out_terms) + " differs from the formula term count " +
                        std::to_string(kFormulaTermCount));
    }
  }

  friend bool operator==(const TransducerConfig&, const TransducerConfig&) = default;
};

/// Longest formula body among `examples` plus two.
inline std::size_t default_max_output_len(std::span<const EncodedExample> examples) {
  std::size_t longest = 0;
  for (const auto& ex : examples) longest = std::max(longest, ex.formula.empty() ? 0 : ex.formula.size() - 1);
  return longest + 2;
}

struct TransducerModel {
  TransducerConfig config;
  EmbeddingTable embedding;
  GruParams encoder;
  GruParams decoder;  // input dim = enc_hidden
  OutputHead head;

  static TransducerModel zeros(const TransducerConfig& cfg) {
    cfg.validate();
    TransducerModel m;
    m.config = cfg;
    m.embedding.E = DenseMatrix(cfg.embed_dim, cfg.in_vocab);
    m.encoder = GruParams::zeros(cfg.enc_hidden, cfg.embed_dim);
    m.decoder = GruParams::zeros(cfg.dec_hidden, cfg.enc_hidden);
    m.head = {DenseMatrix(cfg.out_terms, cfg.dec_hidden), DenseVector(cfg.out_terms)};
    return m;
  }

  static TransducerModel initialize(const TransducerConfig& cfg, SeededRng& rng) {
    TransducerModel m = zeros(cfg);
    m.embedding.E = uniform_init(cfg.embed_dim, cfg.in_vocab, 0.1, rng);
    m.encoder = GruParams::glorot(cfg.enc_hidden, cfg.embed_dim, rng);
    m.decoder = GruParams::glorot(cfg.dec_hidden, cfg.enc_hidden, rng);
    m.head.W = glorot_init(cfg.out_terms, cfg.dec_hidden, rng);
    return m;
  }

  void validate() const {
    config.validate();
    encoder.validate();
    decoder.validate();
    head.validate();
    if (embedding.embed_dim() != config.embed_dim || embedding.vocab_size() != config.in_vocab ||
        encoder.input_dim() != config.embed_dim || encoder.hidden_dim() != config.enc_hidden ||
        decoder.input_dim() != config.enc_hidden || decoder.hidden_dim() != config.dec_hidden ||
        head.hidden_dim() != config.dec_hidden || head.out_dim() != config.out_terms) {
      throw ShapeError("transducer tensors disagree with config: E " + embedding.E.shape() + ", encoder W_r " +
                       encoder.W_r.shape() + ", decoder W_r " + decoder.W_r.shape() + ", head " + head.W.shape());
    }
  }

  /// Fixed order: embedding, encoder, decoder, head.
  std::vector<TensorRef> tensors() {
    std::vector<TensorRef> out;
    out.push_back(tensor_ref("embedding.E", embedding.E));
    encoder.append_tensors("encoder", out);
    decoder.append_tensors("decoder", out);
    head.append_tensors("head", out);
    return out;
  }
};

inline std::vector<GruCache> encoder_trace(const TransducerModel& model, std::span<const std::size_t> indices) {
  std::vector<GruCache> steps(indices.size());
  DenseVector h(model.config.enc_hidden);
  DenseVector x(model.config.embed_dim);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    model.embedding.lookup_into(indices[k], x.span());
    gru_step(model.encoder, x.span(), h.span(), steps[k]);
    h = steps[k].h;
  }
  return steps;
}

/// Context vector: the encoder state after the whole sentence (EOS included).
inline DenseVector encode(const TransducerModel& model, std::span<const std::size_t> indices) {
  const auto steps = encoder_trace(model, indices);
  return steps.empty() ? DenseVector(model.config.enc_hidden) : steps.back().h;
}

struct DecoderTrace {
  std::vector<GruCache> steps;
  std::vector<DenseVector> probs;
};

inline DecoderTrace decoder_trace(const TransducerModel& model, const DenseVector& c, std::size_t steps) {
  if (c.dim() != model.config.enc_hidden) {
    throw ShapeError("decoder context [" + std::to_string(c.dim()) + "] expected [" +
                     std::to_string(model.config.enc_hidden) + "]");
  }
  DecoderTrace t;
  t.steps.resize(steps);
  t.probs.assign(steps, DenseVector(model.config.out_terms));
  DenseVector h(model.config.dec_hidden);
  for (std::size_t j = 0; j < steps; ++j) {
    gru_step(model.decoder, c.span(), h.span(), t.steps[j]);
    h = t.steps[j].h;
    output_distribution_into(model.head, h.span(), t.probs[j].span());
  }
  return t;
}

/// Per-step term distributions for `steps` decoder steps.
inline std::vector<DenseVector> decode(const TransducerModel& model, const DenseVector& c, std::size_t steps) {
  if (steps == 0) throw ConfigError("decode: at least one step is required");
  return decoder_trace(model, c, steps).probs;
}

/// Greedy decoding; stops before the first EOS or after m_max terms.
inline std::vector<std::size_t> predict_formula_indices(const TransducerModel& model,
                                                        std::span<const std::size_t> indices) {
  const std::size_t m_max = model.config.max_output_len;
  if (m_max == 0) throw ConfigError("transducer max_output_len is not set");
  const DenseVector c = encode(model, indices);
  std::vector<std::size_t> out;
  DenseVector h(model.config.dec_hidden);
  DenseVector probs(model.config.out_terms);
  GruCache cache;
  while (out.size() < m_max) {
    gru_step(model.decoder, c.span(), h.span(), cache);
    h = cache.h;
    output_distribution_into(model.head, h.span(), probs.span());
    const std::size_t best = argmax(probs.span());
    if (best == kEosIndex) break;
    out.push_back(best);
  }
  return out;
}

inline std::vector<FormulaToken> predict_formula(const TransducerModel& model, std::span<const std::size_t> indices) {
  std::vector<FormulaToken> out;
  for (std::size_t i : predict_formula_indices(model, indices)) out.push_back(token_from_index(i));
  return out;
}

/// Adds the gradients of one example into `grads`; `gold` is already padded
/// to the number of decoder steps. Decoder steps do not depend on emitted
/// terms, so the argmax of these distributions, cut after the first EOS, is
/// exactly what greedy prediction would emit; `score` records it.
inline double transducer_backprop(const TransducerModel& model, std::span<const std::size_t> words,
                                  std::span<const std::size_t> gold, TransducerModel& grads,
                                  SequenceScore* score = nullptr) {
  for (std::size_t g : gold) {
    if (g >= model.config.out_terms) throw VocabularyError("formula term index outside the term set", g);
  }
  const auto enc = encoder_trace(model, words);
  const DenseVector c = enc.empty() ? DenseVector(model.config.enc_hidden) : enc.back().h;
  const DecoderTrace dec = decoder_trace(model, c, gold.size());
  const double loss = sequence_cross_entropy(dec.probs, gold);
  if (score) {
    std::vector<std::size_t> pred;
    for (const auto& p : dec.probs) {
      pred.push_back(argmax(p.span()));
      if (pred.back() == kEosIndex) break;
    }
    score->add(pred, gold);
  }

  DenseVector grad_c(model.config.enc_hidden);
  DenseVector grad_next(model.config.dec_hidden);
  for (std::size_t j = gold.size(); j-- > 0;) {
    DenseVector grad_h = grad_next;
    output_backward(model.head, dec.steps[j].h.span(), dec.probs[j].span(), gold[j], grads.head, grad_h.span());
    const auto in = gru_backward(model.decoder, dec.steps[j], grad_h.span(), grads.decoder);
    for (std::size_t i = 0; i < grad_c.dim(); ++i) grad_c[i] += in.grad_x[i];
    grad_next = in.grad_h_prev;
  }

  DenseVector grad_h = grad_c;
  for (std::size_t k = enc.size(); k-- > 0;) {
    const auto in = gru_backward(model.encoder, enc[k], grad_h.span(), grads.encoder);
    grads.embedding.accumulate_column(words[k], in.grad_x.span());
    grad_h = in.grad_h_prev;
  }
  return loss;
}

struct TransducerLoss {
  double loss = 0.0;
  TransducerModel grads;
  SequenceScore score;
};

/// Summed cross-entropy and gradients of a batch. Gold formulas are padded
/// with EOS to the batch's longest; inputs keep their own lengths.
inline TransducerLoss loss_and_grads(const TransducerModel& model, std::span<const EncodedExample> batch) {
  if (batch.empty()) throw ConfigError("transducer: empty batch");
  std::size_t length = 0;
  for (const auto& ex : batch) length = std::max(length, ex.formula.size());
  TransducerLoss out{0.0, TransducerModel::zeros(model.config), {}};
  for (const auto& ex : batch) {
    out.loss += transducer_backprop(model, ex.words, pad_to(ex.formula, length), out.grads, &out.score);
  }
  return out;
}

inline double batch_loss(const TransducerModel& model, std::span<const EncodedExample> batch) {
  std::size_t length = 0;
  for (const auto& ex : batch) length = std::max(length, ex.formula.size());
  double loss = 0.0;
  for (const auto& ex : batch) {
    if (length == 0) break;
    loss += sequence_cross_entropy(decode(model, encode(model, ex.words), length), pad_to(ex.formula, length));
  }
  return loss;
}

/// Scores the predicted body plus the EOS that ended it.
inline SequenceScore evaluate_transducer(const TransducerModel& model, std::span<const EncodedExample> examples) {
  SequenceScore score;
  for (const auto& ex : examples) {
    auto pred = predict_formula_indices(model, ex.words);
    if (pred.size() < model.config.max_output_len) pred.push_back(kEosIndex);
    score.add(pred, ex.formula);
  }
  return score;
}

}  // namespace owl2seq

#endif  // OWL2SEQ_TRANSDUCER_HPP
