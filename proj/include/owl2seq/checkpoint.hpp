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

#ifndef OWL2SEQ_CHECKPOINT_HPP
#define OWL2SEQ_CHECKPOINT_HPP

// Binary checkpoints. Layout (all integers little-endian):
//
//   "OWL2SEQ"                       7 bytes
//   u32 version
//   str task                        "tagger" | "transducer"
//   str config                      canonical key=value lines
//   u64 n_tables, then per table:   str name, u64 count, count x str
//   u64 n_tensors, then per tensor: str name, u64 rows, u64 cols,
//                                   rows*cols x f64 (row-major)
//
// where str = u64 byte length + bytes.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "owl2seq/config.hpp"
#include "owl2seq/corpus.hpp"
#include "owl2seq/dlkit.hpp"
#include "owl2seq/errors.hpp"
#include "owl2seq/nn.hpp"
#include "owl2seq/tagger.hpp"
#include "owl2seq/transducer.hpp"

namespace owl2seq {

inline constexpr std::string_view kCheckpointMagic = "OWL2SEQ";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct StoredTensor {
  std::string name;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> values;
  friend bool operator==(const StoredTensor&, const StoredTensor&) = default;
};

struct StoredTable {
  std::string name;
  std::vector<std::string> entries;
  friend bool operator==(const StoredTable&, const StoredTable&) = default;
};

struct Checkpoint {
  std::string task;
  KeyValueConfig config;
  std::vector<StoredTable> tables;
  std::vector<StoredTensor> tensors;

  const StoredTable& table(const std::string& name) const {
    for (const auto& t : tables) {
      if (t.name == name) return t;
    }
    throw CorruptionError("checkpoint has no '" + name + "' table");
  }
};

namespace detail {

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::string_view s) { out_.append(s); }
  void str(std::string_view s) {
    u64(s.size());
    raw(s);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string origin) : data_(data), origin_(std::move(origin)) {}

  std::string_view raw(std::size_t n, const char* what) {
    if (data_.size() - pos_ < n) {
      throw CorruptionError(origin_ + ": truncated while reading " + what + " at byte " + std::to_string(pos_));
    }
    const auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32(const char* what) {
    const auto s = raw(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[static_cast<std::size_t>(i)]);
    return v;
  }
  std::uint64_t u64(const char* what) {
    const auto s = raw(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[static_cast<std::size_t>(i)]);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(const char* what) {
    const auto n = u64(what);
    return std::string(raw(bounded(n, 1, what), what));
  }
  // Guards counts against the remaining bytes before anything is allocated.
  std::size_t bounded(std::uint64_t count, std::size_t unit, const char* what) const {
    if (count > (data_.size() - pos_) / unit) {
      throw CorruptionError(origin_ + ": truncated or corrupt " + what + " count " + std::to_string(count));
    }
    return static_cast<std::size_t>(count);
  }
  bool done() const noexcept { return pos_ == data_.size(); }
  std::size_t position() const noexcept { return pos_; }

 private:
  std::string_view data_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& ck) {
  detail::ByteWriter w;
  w.raw(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.str(ck.task);
  w.str(ck.config.canonical());
  w.u64(ck.tables.size());
  for (const auto& t : ck.tables) {
    w.str(t.name);
    w.u64(t.entries.size());
    for (const auto& e : t.entries) w.str(e);
  }
  w.u64(ck.tensors.size());
  for (const auto& t : ck.tensors) {
    w.str(t.name);
    w.u64(t.rows);
    w.u64(t.cols);
    for (double v : t.values) w.f64(v);
  }
  return w.take();
}

inline Checkpoint deserialize_checkpoint(std::string_view bytes, const std::string& origin = "checkpoint") {
  detail::ByteReader r(bytes, origin);
  if (bytes.size() < kCheckpointMagic.size() || r.raw(kCheckpointMagic.size(), "magic") != kCheckpointMagic) {
    throw CorruptionError(origin + ": not an owl2seq checkpoint (bad magic)");
  }
  const auto version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw VersionError(origin + ": checkpoint format version " + std::to_string(version) +
                       " but this build reads version " + std::to_string(kCheckpointVersion));
  }
  Checkpoint ck;
  ck.task = r.str("task");
  ck.config = KeyValueConfig::parse_string(r.str("config"), origin + " config");
  const auto n_tables = r.bounded(r.u64("table count"), 16, "table");
  for (std::size_t i = 0; i < n_tables; ++i) {
    StoredTable t;
    t.name = r.str("table name");
    const auto n = r.bounded(r.u64("table size"), 8, "table entry");
    t.entries.reserve(n);
    for (std::size_t j = 0; j < n; ++j) t.entries.push_back(r.str("table entry"));
    ck.tables.push_back(std::move(t));
  }
  const auto n_tensors = r.bounded(r.u64("tensor count"), 24, "tensor");
  for (std::size_t i = 0; i < n_tensors; ++i) {
    StoredTensor t;
    t.name = r.str("tensor name");
    t.rows = r.u64("tensor rows");
    t.cols = r.u64("tensor cols");
    if (t.cols != 0 && t.rows > UINT64_MAX / t.cols) throw CorruptionError(origin + ": tensor " + t.name + " too large");
    const auto n = r.bounded(t.rows * t.cols, 8, "tensor value");
    t.values.resize(n);
    for (auto& v : t.values) v = r.f64("tensor values");
    ck.tensors.push_back(std::move(t));
  }
  if (!r.done()) throw CorruptionError(origin + ": trailing bytes after tensor " + std::to_string(n_tensors));
  return ck;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path);
  const auto bytes = serialize_checkpoint(ck);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes, path);
}

// ---------------------------------------------------------------------------
// Model <-> checkpoint

namespace detail {

template <std::size_t N>
std::vector<std::string> name_table(const std::array<std::string_view, N>& names) {
  return {names.begin(), names.end()};
}

inline void store_tensors(std::vector<TensorRef> refs, Checkpoint& ck) {
  for (const auto& t : refs) ck.tensors.push_back({t.name, t.rows, t.cols, {t.values.begin(), t.values.end()}});
}

inline void restore_tensors(const Checkpoint& ck, std::vector<TensorRef> refs) {
  if (refs.size() != ck.tensors.size()) {
    throw CorruptionError("checkpoint holds " + std::to_string(ck.tensors.size()) + " tensors, model expects " +
                          std::to_string(refs.size()));
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto& s = ck.tensors[i];
    const auto& t = refs[i];
    if (s.name != t.name || s.rows != t.rows || s.cols != t.cols) {
      throw CorruptionError("checkpoint tensor " + s.name + " " + DenseMatrix::shape_string(s.rows, s.cols) +
                            " does not match expected " + t.name + " " + DenseMatrix::shape_string(t.rows, t.cols));
    }
    std::copy(s.values.begin(), s.values.end(), t.values.begin());
  }
}

inline void check_output_table(const Checkpoint& ck, const std::string& name, std::vector<std::string> expected) {
  if (ck.table(name).entries != expected) {
    throw IncompatibilityError("checkpoint '" + name + "' table differs from this build's set of " +
                               std::to_string(expected.size()));
  }
}

inline std::size_t config_size(const KeyValueConfig& kv, const std::string& key) {
  if (!kv.has(key)) throw CorruptionError("checkpoint config lacks '" + key + "'");
  return static_cast<std::size_t>(kv.get_uint(key, 0));
}

}  // namespace detail

/// `extra` carries run settings echoed next to the model dimensions.
inline Checkpoint make_checkpoint(TaggerModel& model, const Vocabulary& vocab, KeyValueConfig extra = {}) {
  model.validate();
  Checkpoint ck;
  ck.task = "tagger";
  ck.config = std::move(extra);
  ck.config.set("model.window_half_width", std::to_string(model.config.window_half_width));
  ck.config.set("model.embed_dim", std::to_string(model.config.embed_dim));
  ck.config.set("model.hidden_dim", std::to_string(model.config.hidden_dim));
  ck.config.set("model.in_vocab", std::to_string(model.config.in_vocab));
  ck.config.set("model.out_tags", std::to_string(model.config.out_tags));
  ck.tables.push_back({"words", vocab.table()});
  ck.tables.push_back({"tags", detail::name_table(kTagNames)});
  detail::store_tensors(model.tensors(), ck);
  return ck;
}

inline Checkpoint make_checkpoint(TransducerModel& model, const Vocabulary& vocab, KeyValueConfig extra = {}) {
  model.validate();
  Checkpoint ck;
  ck.task = "transducer";
  ck.config = std::move(extra);
  ck.config.set("model.embed_dim", std::to_string(model.config.embed_dim));
  ck.config.set("model.enc_hidden", std::to_string(model.config.enc_hidden));
  ck.config.set("model.dec_hidden", std::to_string(model.config.dec_hidden));
  ck.config.set("model.in_vocab", std::to_string(model.config.in_vocab));
  ck.config.set("model.out_terms", std::to_string(model.config.out_terms));
  ck.config.set("model.max_output_len", std::to_string(model.config.max_output_len));
  ck.tables.push_back({"words", vocab.table()});
  ck.tables.push_back({"terms", detail::name_table(kFormulaTokenNames)});
  detail::store_tensors(model.tensors(), ck);
  return ck;
}

template <typename Model>
struct Restored {
  Model model;
  Vocabulary vocab;
};

inline Restored<TaggerModel> restore_tagger(const Checkpoint& ck) {
  if (ck.task != "tagger") throw IncompatibilityError("checkpoint holds a " + ck.task + ", not a tagger");
  detail::check_output_table(ck, "tags", detail::name_table(kTagNames));
  TaggerConfig cfg;
  cfg.window_half_width = detail::config_size(ck.config, "model.window_half_width");
  cfg.embed_dim = detail::config_size(ck.config, "model.embed_dim");
  cfg.hidden_dim = detail::config_size(ck.config, "model.hidden_dim");
  cfg.in_vocab = detail::config_size(ck.config, "model.in_vocab");
  cfg.out_tags = detail::config_size(ck.config, "model.out_tags");
  Vocabulary vocab = Vocabulary::from_table(ck.table("words").entries);
  if (vocab.size() != cfg.in_vocab) throw CorruptionError("checkpoint vocabulary size disagrees with its config");
  TaggerModel model = TaggerModel::zeros(cfg);
  detail::restore_tensors(ck, model.tensors());
  return {std::move(model), std::move(vocab)};
}

inline Restored<TransducerModel> restore_transducer(const Checkpoint& ck) {
  if (ck.task != "transducer") throw IncompatibilityError("checkpoint holds a " + ck.task + ", not a transducer");
  detail::check_output_table(ck, "terms", detail::name_table(kFormulaTokenNames));
  TransducerConfig cfg;
  cfg.embed_dim = detail::config_size(ck.config, "model.embed_dim");
  cfg.enc_hidden = detail::config_size(ck.config, "model.enc_hidden");
  cfg.dec_hidden = detail::config_size(ck.config, "model.dec_hidden");
  cfg.in_vocab = detail::config_size(ck.config, "model.in_vocab");
  cfg.out_terms = detail::config_size(ck.config, "model.out_terms");
  cfg.max_output_len = detail::config_size(ck.config, "model.max_output_len");
  Vocabulary vocab = Vocabulary::from_table(ck.table("words").entries);
  if (vocab.size() != cfg.in_vocab) throw CorruptionError("checkpoint vocabulary size disagrees with its config");
  TransducerModel model = TransducerModel::zeros(cfg);
  detail::restore_tensors(ck, model.tensors());
  return {std::move(model), std::move(vocab)};
}

}  // namespace owl2seq

#endif  // OWL2SEQ_CHECKPOINT_HPP
