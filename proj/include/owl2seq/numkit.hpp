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

#ifndef OWL2SEQ_NUMKIT_HPP
#define OWL2SEQ_NUMKIT_HPP

// Dense row-major linear algebra, activations and a portable seeded RNG.
// Everything is 64-bit: the gradient checks need the headroom.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "owl2seq/errors.hpp"

namespace owl2seq {

class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  DenseVector(std::initializer_list<double> values) : data_(values) {}
  explicit DenseVector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t dim() const noexcept { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> data_;
};

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                       " does not match " + shape_string(rows, cols));
    }
  }
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  std::string shape() const { return shape_string(rows_, cols_); }

  static std::string shape_string(std::size_t r, std::size_t c) {
    return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Kernels over spans. These accumulate into `out` and are the hot loops of
// both networks; callers check shapes once at the layer boundary.

// out += W x
inline void gemv_acc(const DenseMatrix& w, std::span<const double> x, std::span<double> out) {
  assert(x.size() == w.cols() && out.size() == w.rows());
  const std::size_t n = w.cols();
  const double* p = w.span().data();
  for (std::size_t i = 0; i < w.rows(); ++i, p += n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += p[j] * x[j];
    out[i] += s;
  }
}

// out += W^T v
inline void gemv_t_acc(const DenseMatrix& w, std::span<const double> v, std::span<double> out) {
  assert(v.size() == w.rows() && out.size() == w.cols());
  const std::size_t n = w.cols();
  const double* p = w.span().data();
  for (std::size_t i = 0; i < w.rows(); ++i, p += n) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) out[j] += p[j] * vi;
  }
}

// G += a b^T
inline void ger_acc(DenseMatrix& g, std::span<const double> a, std::span<const double> b) {
  assert(a.size() == g.rows() && b.size() == g.cols());
  const std::size_t n = g.cols();
  double* p = g.span().data();
  for (std::size_t i = 0; i < g.rows(); ++i, p += n) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) p[j] += ai * b[j];
  }
}

// ---------------------------------------------------------------------------

inline DenseVector affine(const DenseMatrix& w, const DenseVector& x, const DenseVector& b) {
  if (w.cols() != x.dim() || w.rows() != b.dim()) {
    throw ShapeError("affine: W " + w.shape() + ", x [" + std::to_string(x.dim()) + "], b [" +
                     std::to_string(b.dim()) + "]");
  }
  DenseVector out = b;
  gemv_acc(w, x.span(), out.span());
  return out;
}

inline double sigmoid(double v) noexcept {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

inline DenseVector sigmoid_vec(const DenseVector& v) {
  DenseVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = sigmoid(v[i]);
  return out;
}

inline DenseVector tanh_vec(const DenseVector& v) {
  DenseVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

// In-place, max-shifted.
inline void softmax_inplace(std::span<double> v) {
  if (v.empty()) throw ShapeError("softmax of an empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - m);
    sum += x;
  }
  const double inv = 1.0 / sum;
  for (double& x : v) x *= inv;
}

inline DenseVector softmax(const DenseVector& v) {
  DenseVector out = v;
  softmax_inplace(out.span());
  return out;
}

// Lowest index wins ties.
inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------

/// xoshiro256** seeded through splitmix64. Fixed here so that corpora and
/// initializations are identical on every platform; std:: distributions are
/// deliberately avoided because their output is implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ConfigError("SeededRng::below(0)");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derive an independent stream for a named purpose.
  SeededRng fork(std::uint64_t salt) const {
    std::uint64_t x = seed_ ^ (salt * 0x9E3779B97F4A7C15ull);
    return SeededRng(splitmix64(x));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

inline DenseMatrix uniform_init(std::size_t rows, std::size_t cols, double bound, SeededRng& rng) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("cannot initialize a matrix of shape " + DenseMatrix::shape_string(rows, cols));
  }
  DenseMatrix m(rows, cols);
  for (double& v : m.span()) v = rng.uniform(-bound, bound);
  return m;
}

/// Glorot-uniform: U(-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))).
inline DenseMatrix glorot_init(std::size_t rows, std::size_t cols, SeededRng& rng) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("cannot initialize a matrix of shape " + DenseMatrix::shape_string(rows, cols));
  }
  return uniform_init(rows, cols, std::sqrt(6.0 / static_cast<double>(rows + cols)), rng);
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace owl2seq

#endif  // OWL2SEQ_NUMKIT_HPP
