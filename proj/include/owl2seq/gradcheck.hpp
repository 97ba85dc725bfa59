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

#ifndef OWL2SEQ_GRADCHECK_HPP
#define OWL2SEQ_GRADCHECK_HPP

// Finite-difference checks of whole-model gradients on small random
// instances.

#include <cstdint>
#include <string>
#include <vector>

#include "owl2seq/dlkit.hpp"
#include "owl2seq/errors.hpp"
#include "owl2seq/nn.hpp"
#include "owl2seq/sequence.hpp"
#include "owl2seq/tagger.hpp"
#include "owl2seq/transducer.hpp"

namespace owl2seq {

struct TinyDims {
  std::size_t vocab = 12;
  std::size_t embed = 4;
  std::size_t hidden = 5;      // tagger hidden, transducer encoder
  std::size_t dec_hidden = 6;  // transducer decoder
  std::size_t window_half_width = 1;
  std::size_t max_length = 6;  // longest sequence, EOS included
  std::size_t batch = 2;

  void validate() const {
    if (vocab < 2 || embed == 0 || hidden == 0 || dec_hidden == 0 || max_length == 0 || batch == 0) {
      throw ConfigError("gradient check dimensions must be positive (vocab at least 2)");
    }
    const std::size_t coords = vocab * embed + 3 * hidden * ((2 * window_half_width + 1) * embed + hidden) +
                               3 * dec_hidden * (hidden + dec_hidden) + kFormulaTermCount * (dec_hidden + 1);
    if (coords > 100000) throw ConfigError("gradient check dimensions too large: " + std::to_string(coords) + " coordinates");
  }
};

struct GradCheckSetup {
  std::uint64_t seed = 0;
  GradCheckOptions options;
  // Test hook: multiplies the analytic gradient of this tensor by
  // `corrupt_scale` before comparison.
  std::string corrupt_tensor;
  double corrupt_scale = 1.01;
};

namespace detail {

// Sequence of length 1..max_length over [lo, n), EOS appended at the end.
inline std::vector<std::size_t> random_sequence(SeededRng& rng, std::size_t max_length, std::size_t lo, std::size_t n) {
  const std::size_t body = static_cast<std::size_t>(rng.below(max_length));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < body; ++i) out.push_back(lo + static_cast<std::size_t>(rng.below(n - lo)));
  out.push_back(kEosIndex);
  return out;
}

inline void corrupt(const std::vector<TensorRef>& grads, const GradCheckSetup& setup) {
  if (setup.corrupt_tensor.empty()) return;
  for (const auto& g : grads) {
    if (g.name == setup.corrupt_tensor) {
      for (double& v : g.values) v *= setup.corrupt_scale;
      return;
    }
  }
  throw ConfigError("no tensor named '" + setup.corrupt_tensor + "' to corrupt");
}

}  // namespace detail

inline GradCheckReport check_tagger_gradients(const TinyDims& dims, const GradCheckSetup& setup) {
  dims.validate();
  SeededRng rng(setup.seed);
  TaggerConfig cfg;
  cfg.window_half_width = dims.window_half_width;
  cfg.embed_dim = dims.embed;
  cfg.hidden_dim = dims.hidden;
  cfg.in_vocab = dims.vocab;
  TaggerModel model = TaggerModel::initialize(cfg, rng);
  std::vector<EncodedExample> batch(dims.batch);
  for (auto& ex : batch) {
    ex.words = detail::random_sequence(rng, dims.max_length, 1, dims.vocab);
    for (std::size_t i = 0; i + 1 < ex.words.size(); ++i) ex.tags.push_back(1 + rng.below(kTagCount - 1));
    ex.tags.push_back(kEosIndex);
  }
  auto analytic = loss_and_grads(model, batch);
  const auto grads = analytic.grads.tensors();
  detail::corrupt(grads, setup);
  return gradient_check([&] { return batch_loss(model, batch); }, model.tensors(), grads, setup.options);
}

inline GradCheckReport check_transducer_gradients(const TinyDims& dims, const GradCheckSetup& setup) {
  dims.validate();
  SeededRng rng(setup.seed);
  TransducerConfig cfg;
  cfg.embed_dim = dims.embed;
  cfg.enc_hidden = dims.hidden;
  cfg.dec_hidden = dims.dec_hidden;
  cfg.in_vocab = dims.vocab;
  cfg.max_output_len = dims.max_length + 1;
  TransducerModel model = TransducerModel::initialize(cfg, rng);
  std::vector<EncodedExample> batch(dims.batch);
  for (auto& ex : batch) {
    ex.words = detail::random_sequence(rng, dims.max_length, 1, dims.vocab);
    ex.formula = detail::random_sequence(rng, dims.max_length, 1, kFormulaTermCount);
  }
  auto analytic = loss_and_grads(model, batch);
  const auto grads = analytic.grads.tensors();
  detail::corrupt(grads, setup);
  return gradient_check([&] { return batch_loss(model, batch); }, model.tensors(), grads, setup.options);
}

}  // namespace owl2seq

#endif  // OWL2SEQ_GRADCHECK_HPP
