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

#ifndef OWL2SEQ_NN_HPP
#define OWL2SEQ_NN_HPP

// Trainable building blocks shared by the tagger and the transducer:
// embedding lookup, GRU cell with its hand-written backward pass, softmax
// output head, sequence cross-entropy, AdaDelta and a central-difference
// gradient checker.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "owl2seq/numkit.hpp"

namespace owl2seq {

/// A named, shaped view over one trainable tensor. Models expose their
/// parameters as a fixed-order list of these; optimizer state, gradient
/// buffers and checkpoints all rely on that order being stable.
struct TensorRef {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<double> values;
};

inline TensorRef tensor_ref(std::string name, DenseMatrix& m) {
  return {std::move(name), m.rows(), m.cols(), m.span()};
}
inline TensorRef tensor_ref(std::string name, DenseVector& v) {
  return {std::move(name), v.dim(), 1, v.span()};
}

// ---------------------------------------------------------------------------
// Embedding

struct EmbeddingTable {
  DenseMatrix E;  // embed_dim x vocab_size

  std::size_t embed_dim() const noexcept { return E.rows(); }
  std::size_t vocab_size() const noexcept { return E.cols(); }

  void check_index(std::size_t index) const {
    if (index >= vocab_size()) {
      throw VocabularyError("word index outside embedding table of size " + std::to_string(vocab_size()),
                            index);
    }
  }

  // out[0..d) = E[:, index]
  void lookup_into(std::size_t index, std::span<double> out) const {
    check_index(index);
    const std::size_t d = embed_dim();
    for (std::size_t r = 0; r < d; ++r) out[r] = E(r, index);
  }

  // E[:, index] += g
  void accumulate_column(std::size_t index, std::span<const double> g) {
    const std::size_t d = embed_dim();
    for (std::size_t r = 0; r < d; ++r) E(r, index) += g[r];
  }
};

/// Concatenated embeddings of a context window, in window order.
inline DenseVector embed_window(const EmbeddingTable& table, std::span<const std::size_t> window) {
  const std::size_t d = table.embed_dim();
  DenseVector out(window.size() * d);
  for (std::size_t p = 0; p < window.size(); ++p) {
    table.lookup_into(window[p], out.span().subspan(p * d, d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// GRU (no gate biases)

struct GruParams {
  DenseMatrix W_r, U_r, W_z, U_z, W_h, U_h;

  static GruParams zeros(std::size_t hidden, std::size_t input) {
    return {DenseMatrix(hidden, input), DenseMatrix(hidden, hidden), DenseMatrix(hidden, input),
            DenseMatrix(hidden, hidden), DenseMatrix(hidden, input), DenseMatrix(hidden, hidden)};
  }

  static GruParams glorot(std::size_t hidden, std::size_t input, SeededRng& rng) {
    GruParams p;
    p.W_r = glorot_init(hidden, input, rng);
    p.U_r = glorot_init(hidden, hidden, rng);
    p.W_z = glorot_init(hidden, input, rng);
    p.U_z = glorot_init(hidden, hidden, rng);
    p.W_h = glorot_init(hidden, input, rng);
    p.U_h = glorot_init(hidden, hidden, rng);
    return p;
  }

  std::size_t hidden_dim() const noexcept { return W_r.rows(); }
  std::size_t input_dim() const noexcept { return W_r.cols(); }

  void validate() const {
    const std::size_t h = hidden_dim(), in = input_dim();
    for (const DenseMatrix* w : {&W_r, &W_z, &W_h}) {
      if (w->rows() != h || w->cols() != in) {
        throw ShapeError("GRU input matrix " + w->shape() + " expected " + DenseMatrix::shape_string(h, in));
      }
    }
    for (const DenseMatrix* u : {&U_r, &U_z, &U_h}) {
      if (u->rows() != h || u->cols() != h) {
        throw ShapeError("GRU recurrent matrix " + u->shape() + " expected " + DenseMatrix::shape_string(h, h));
      }
    }
  }

  void append_tensors(const std::string& prefix, std::vector<TensorRef>& out) {
    out.push_back(tensor_ref(prefix + ".W_r", W_r));
    out.push_back(tensor_ref(prefix + ".U_r", U_r));
    out.push_back(tensor_ref(prefix + ".W_z", W_z));
    out.push_back(tensor_ref(prefix + ".U_z", U_z));
    out.push_back(tensor_ref(prefix + ".W_h", W_h));
    out.push_back(tensor_ref(prefix + ".U_h", U_h));
  }

  friend bool operator==(const GruParams&, const GruParams&) = default;
};

/// Everything gru_backward needs from the forward pass.
struct GruCache {
  DenseVector x, h_prev;
  DenseVector r, z, h_tilde;
  DenseVector u_h;  // U_h h_prev, before the reset gate is applied
  DenseVector h;
};

inline void check_gru_inputs(const GruParams& p, std::size_t x_dim, std::size_t h_dim) {
  if (x_dim != p.input_dim() || h_dim != p.hidden_dim()) {
    throw ShapeError("gru_step: x [" + std::to_string(x_dim) + "], h_prev [" + std::to_string(h_dim) +
                     "] against W_r " + p.W_r.shape() + ", U_r " + p.U_r.shape());
  }
}

/// One GRU step:
///   r = sigma(W_r x + U_r h_prev)
///   z = sigma(W_z x + U_z h_prev)
///   h~ = tanh(W_h x + r * (U_h h_prev))
///   h = z * h_prev + (1 - z) * h~
inline void gru_step(const GruParams& p, std::span<const double> x, std::span<const double> h_prev,
                     GruCache& cache) {
  check_gru_inputs(p, x.size(), h_prev.size());
  const std::size_t n = p.hidden_dim();
  cache.x = DenseVector(std::vector<double>(x.begin(), x.end()));
  cache.h_prev = DenseVector(std::vector<double>(h_prev.begin(), h_prev.end()));
  cache.r = DenseVector(n);
  cache.z = DenseVector(n);
  cache.h_tilde = DenseVector(n);
  cache.u_h = DenseVector(n);
  cache.h = DenseVector(n);

  gemv_acc(p.W_r, x, cache.r.span());
  gemv_acc(p.U_r, h_prev, cache.r.span());
  gemv_acc(p.W_z, x, cache.z.span());
  gemv_acc(p.U_z, h_prev, cache.z.span());
  gemv_acc(p.W_h, x, cache.h_tilde.span());
  gemv_acc(p.U_h, h_prev, cache.u_h.span());
  for (std::size_t i = 0; i < n; ++i) {
    cache.r[i] = sigmoid(cache.r[i]);
    cache.z[i] = sigmoid(cache.z[i]);
    cache.h_tilde[i] = std::tanh(cache.h_tilde[i] + cache.r[i] * cache.u_h[i]);
    cache.h[i] = cache.z[i] * h_prev[i] + (1.0 - cache.z[i]) * cache.h_tilde[i];
  }
}

inline std::pair<DenseVector, GruCache> gru_step(const GruParams& p, const DenseVector& x,
                                                 const DenseVector& h_prev) {
  GruCache cache;
  gru_step(p, x.span(), h_prev.span(), cache);
  DenseVector h = cache.h;
  return {std::move(h), std::move(cache)};
}

struct GruInputGrads {
  DenseVector grad_x;
  DenseVector grad_h_prev;
};

/// Backward pass of gru_step. Parameter gradients are *added* into `grads`
/// so a whole sequence can accumulate into one buffer.
inline GruInputGrads gru_backward(const GruParams& p, const GruCache& cache, std::span<const double> grad_h,
                                  GruParams& grads) {
  const std::size_t n = p.hidden_dim();
  if (grad_h.size() != n || cache.h.dim() != n || cache.x.dim() != p.input_dim()) {
    throw ShapeError("gru_backward: grad_h [" + std::to_string(grad_h.size()) + "] against hidden " +
                     std::to_string(n) + " and cached x [" + std::to_string(cache.x.dim()) + "]");
  }
  DenseVector da_r(n), da_z(n), da_h(n), du(n);
  GruInputGrads out{DenseVector(p.input_dim()), DenseVector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad_h[i];
    const double z = cache.z[i], r = cache.r[i], ht = cache.h_tilde[i];
    da_z[i] = g * (cache.h_prev[i] - ht) * z * (1.0 - z);
    da_h[i] = g * (1.0 - z) * (1.0 - ht * ht);
    da_r[i] = da_h[i] * cache.u_h[i] * r * (1.0 - r);
    du[i] = da_h[i] * r;
    out.grad_h_prev[i] = g * z;
  }
  const auto x = cache.x.span();
  const auto hp = cache.h_prev.span();
  ger_acc(grads.W_r, da_r.span(), x);
  ger_acc(grads.U_r, da_r.span(), hp);
  ger_acc(grads.W_z, da_z.span(), x);
  ger_acc(grads.U_z, da_z.span(), hp);
  ger_acc(grads.W_h, da_h.span(), x);
  ger_acc(grads.U_h, du.span(), hp);

  gemv_t_acc(p.W_r, da_r.span(), out.grad_x.span());
  gemv_t_acc(p.W_z, da_z.span(), out.grad_x.span());
  gemv_t_acc(p.W_h, da_h.span(), out.grad_x.span());
  gemv_t_acc(p.U_r, da_r.span(), out.grad_h_prev.span());
  gemv_t_acc(p.U_z, da_z.span(), out.grad_h_prev.span());
  gemv_t_acc(p.U_h, du.span(), out.grad_h_prev.span());
  return out;
}

// ---------------------------------------------------------------------------
// Output head

struct OutputHead {
  DenseMatrix W;  // out_vocab x hidden
  DenseVector b;  // out_vocab

  std::size_t out_dim() const noexcept { return W.rows(); }
  std::size_t hidden_dim() const noexcept { return W.cols(); }

  void validate() const {
    if (W.rows() != b.dim()) {
      throw ShapeError("output head W " + W.shape() + " with bias [" + std::to_string(b.dim()) + "]");
    }
  }

  void append_tensors(const std::string& prefix, std::vector<TensorRef>& out) {
    out.push_back(tensor_ref(prefix + ".W", W));
    out.push_back(tensor_ref(prefix + ".b", b));
  }

  friend bool operator==(const OutputHead&, const OutputHead&) = default;
};

inline void output_distribution_into(const OutputHead& head, std::span<const double> h, std::span<double> out) {
  if (h.size() != head.hidden_dim() || out.size() != head.out_dim()) {
    throw ShapeError("output head W " + head.W.shape() + " applied to h [" + std::to_string(h.size()) + "]");
  }
  std::copy(head.b.begin(), head.b.end(), out.begin());
  gemv_acc(head.W, h, out);
  softmax_inplace(out);
}

/// softmax(W h + b)
inline DenseVector output_distribution(const OutputHead& head, const DenseVector& h) {
  head.validate();
  DenseVector out(head.out_dim());
  output_distribution_into(head, h.span(), out.span());
  return out;
}

/// Backward through softmax + cross-entropy for one step: accumulates head
/// gradients and adds W^T (y - onehot(gold)) into grad_h.
inline void output_backward(const OutputHead& head, std::span<const double> h, std::span<const double> probs,
                            std::size_t gold, OutputHead& grads, std::span<double> grad_h) {
  const std::size_t k = head.out_dim();
  DenseVector delta(std::vector<double>(probs.begin(), probs.end()));
  delta[gold] -= 1.0;
  for (std::size_t i = 0; i < k; ++i) grads.b[i] += delta[i];
  ger_acc(grads.W, delta.span(), h);
  gemv_t_acc(head.W, delta.span(), grad_h);
}

// ---------------------------------------------------------------------------
// Loss

/// -sum_k log pred[k][gold[k]], every step included (padding too).
inline double sequence_cross_entropy(std::span<const DenseVector> pred, std::span<const std::size_t> gold) {
  if (pred.size() != gold.size()) {
    throw ShapeError("sequence_cross_entropy: " + std::to_string(pred.size()) + " distributions for " +
                     std::to_string(gold.size()) + " gold indices");
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (gold[k] >= pred[k].dim()) {
      throw VocabularyError("gold index outside output distribution of size " + std::to_string(pred[k].dim()),
                            gold[k]);
    }
    const double p = pred[k][gold[k]];
    // A probability that underflowed to zero would make the loss infinite.
    loss -= std::log(std::max(p, std::numeric_limits<double>::min()));
  }
  return loss;
}

// ---------------------------------------------------------------------------
// AdaDelta

struct AdaDeltaConfig {
  double lr = 2.0;
  double rho = 0.95;
  double epsilon = 1e-6;
};

struct AdaDeltaState {
  std::vector<double> eg2;   // running mean of g^2
  std::vector<double> edx2;  // running mean of the unscaled update squared
  double rho = 0.95;
  double epsilon = 1e-6;
  double lr = 2.0;

  AdaDeltaState() = default;
  AdaDeltaState(std::size_t size, const AdaDeltaConfig& cfg)
      : eg2(size, 0.0), edx2(size, 0.0), rho(cfg.rho), epsilon(cfg.epsilon), lr(cfg.lr) {}
};

/// Canonical AdaDelta with `lr` as a pure output gain: the accumulators see
/// the lr=1 update, and only the applied step is scaled.
inline void adadelta_step(std::span<double> param, std::span<const double> grad, AdaDeltaState& state) {
  if (param.size() != grad.size() || state.eg2.size() != param.size() || state.edx2.size() != param.size()) {
    throw ShapeError("adadelta_step: param " + std::to_string(param.size()) + ", grad " +
                     std::to_string(grad.size()) + ", state " + std::to_string(state.eg2.size()));
  }
  const double rho = state.rho, eps = state.epsilon, lr = state.lr;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    state.eg2[i] = rho * state.eg2[i] + (1.0 - rho) * g * g;
    const double unit = -std::sqrt(state.edx2[i] + eps) / std::sqrt(state.eg2[i] + eps) * g;
    state.edx2[i] = rho * state.edx2[i] + (1.0 - rho) * unit * unit;
    param[i] += lr * unit;
  }
}

/// One AdaDeltaState per tensor of a model, in the model's tensor order.
class AdaDelta {
 public:
  AdaDelta() = default;
  AdaDelta(const std::vector<TensorRef>& params, const AdaDeltaConfig& cfg) {
    states_.reserve(params.size());
    for (const auto& t : params) states_.emplace_back(t.values.size(), cfg);
  }

  void step(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads) {
    if (params.size() != states_.size() || grads.size() != states_.size()) {
      throw ShapeError("AdaDelta: tensor count mismatch");
    }
    for (std::size_t t = 0; t < states_.size(); ++t) adadelta_step(params[t].values, grads[t].values, states_[t]);
  }

  const std::vector<AdaDeltaState>& states() const noexcept { return states_; }

 private:
  std::vector<AdaDeltaState> states_;
};

// ---------------------------------------------------------------------------
// Gradient checking

struct TensorCheck {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  std::size_t worst_coord = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t failures = 0;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  double tolerance = 0.0;

  double max_rel_error() const {
    double m = 0.0;
    for (const auto& t : tensors) m = std::max(m, t.max_rel_error);
    return m;
  }
  bool passed() const { return max_rel_error() < tolerance; }
  std::size_t coordinates_checked() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.checked;
    return n;
  }
};

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Tensors larger than this are checked on a seeded random subsample of
  // this many coordinates.
  std::size_t max_coords_per_tensor = 200;
  std::uint64_t seed = 0;
};

/// Compares `grads` against central differences of `loss()` obtained by
/// perturbing `params` in place. `loss` must read the parameters through the
/// same storage the spans point to.
template <typename LossFn>
GradCheckReport gradient_check(LossFn&& loss, const std::vector<TensorRef>& params,
                               const std::vector<TensorRef>& grads, const GradCheckOptions& opt = {}) {
  if (params.size() != grads.size()) throw ShapeError("gradient_check: parameter/gradient count mismatch");
  SeededRng rng(opt.seed);
  GradCheckReport report;
  report.tolerance = opt.tolerance;
  for (std::size_t t = 0; t < params.size(); ++t) {
    const auto values = params[t].values;
    const auto g = grads[t].values;
    if (values.size() != g.size()) throw ShapeError("gradient_check: tensor " + params[t].name + " shape mismatch");

    std::vector<std::size_t> coords(values.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > opt.max_coords_per_tensor) {
      rng.shuffle(coords);
      coords.resize(opt.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }

    TensorCheck check;
    check.name = params[t].name;
    for (std::size_t c : coords) {
      const double saved = values[c];
      values[c] = saved + opt.step;
      const double plus = loss();
      values[c] = saved - opt.step;
      const double minus = loss();
      values[c] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NumericError("gradient_check: non-finite loss while perturbing " + check.name);
      }
      const double numeric = (plus - minus) / (2.0 * opt.step);
      const double err = relative_error(g[c], numeric);
      ++check.checked;
      if (err >= opt.tolerance) ++check.failures;
      if (err > check.max_rel_error || check.checked == 1) {
        check.max_rel_error = err;
        check.worst_coord = c;
        check.analytic = g[c];
        check.numeric = numeric;
      }
    }
    report.tensors.push_back(std::move(check));
  }
  return report;
}

}  // namespace owl2seq

#endif  // OWL2SEQ_NN_HPP
