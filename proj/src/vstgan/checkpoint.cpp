/* Copyright (c) 2026 The vstgan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "vstgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace vst {
namespace {

constexpr char kMagic[4] = {'V', 'S', 'T', 'G'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <class T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  void need(std::size_t n, const char* what) const {
    if (pos_ + n > in_.size()) {
      throw Error(ErrorKind::kFormat, std::string("truncated checkpoint: ") + what + " ends early");
    }
  }
  template <class T>
  T le(const char* what) {
    need(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t pos() const { return pos_; }
  const std::uint8_t* here() const { return in_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& c) {
  Writer w;
  w.bytes(kMagic, 4);
  w.le<std::uint32_t>(kCheckpointVersion);
  w.le<std::uint64_t>(c.seed);
  w.le<std::uint64_t>(c.config_text.size());
  w.bytes(c.config_text.data(), c.config_text.size());
  w.le<std::uint32_t>(static_cast<std::uint32_t>(c.tensors.size()));
  for (const auto& [name, t] : c.tensors) {
    w.le<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.le<std::uint8_t>(kDtypeF64);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) w.le<std::uint64_t>(d);
  }
  for (const auto& [name, t] : c.tensors) {
    for (double v : t.data()) w.f64(v);
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::kFormat, "not a checkpoint (bad magic)");
  }
  Reader r(bytes);
  r.skip(4);
  const auto version = r.le<std::uint32_t>("header");
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kFormat, "unsupported checkpoint version " + std::to_string(version) + " (expected " +
                                        std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint c;
  c.seed = r.le<std::uint64_t>("header");
  const auto config_len = r.le<std::uint64_t>("header");
  if (config_len > r.remaining()) throw Error(ErrorKind::kFormat, "truncated checkpoint: config echo ends early");
  c.config_text = r.str(static_cast<std::size_t>(config_len), "config echo");
  const auto count = r.le<std::uint32_t>("manifest");

  struct Entry {
    std::string name;
    std::uint8_t dtype;
    Shape shape;
  };
  std::vector<Entry> manifest;
  std::uint64_t payload = 0;
  for (std::uint32_t k = 0; k < count; ++k) {
    Entry e;
    const auto name_len = r.le<std::uint32_t>("manifest");
    e.name = r.str(name_len, "manifest");
    e.dtype = r.le<std::uint8_t>("manifest");
    if (e.dtype != kDtypeF64 && e.dtype != kDtypeF32) {
      throw Error(ErrorKind::kFormat, "tensor '" + e.name + "' has unknown dtype " + std::to_string(e.dtype));
    }
    const auto rank = r.le<std::uint32_t>("manifest");
    if (rank == 0) throw Error(ErrorKind::kFormat, "tensor '" + e.name + "' has rank 0");
    for (std::uint32_t d = 0; d < rank; ++d) e.shape.push_back(static_cast<std::size_t>(r.le<std::uint64_t>("manifest")));
    if (!manifest.empty() && !(manifest.back().name < e.name)) {
      throw Error(ErrorKind::kFormat, "checkpoint manifest is not in lexicographic order at '" + e.name + "'");
    }
    payload += element_count(e.shape) * (e.dtype == kDtypeF64 ? 8u : 4u);
    manifest.push_back(std::move(e));
  }
  if (payload != r.remaining()) {
    throw Error(ErrorKind::kFormat, "checkpoint payload length mismatch: expected " + std::to_string(payload) +
                                        " bytes, found " + std::to_string(r.remaining()));
  }
  for (const Entry& e : manifest) {
    Tensor t(e.shape);
    for (double& v : t.data()) {
      if (e.dtype == kDtypeF64) {
        v = std::bit_cast<double>(r.le<std::uint64_t>("payload"));
      } else {
        v = static_cast<double>(std::bit_cast<float>(r.le<std::uint32_t>("payload")));
      }
    }
    c.tensors.emplace(e.name, std::move(t));
  }
  return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

Checkpoint to_checkpoint(const Model& model) {
  Checkpoint c;
  c.seed = model.config.seed;
  c.config_text = to_config_text(model.config);
  c.tensors = encoder_tensors(model.encoder);
  for (const auto& [name, t] : model.generator) c.tensors.emplace(name, t);
  return c;
}

Model from_checkpoint(const Checkpoint& checkpoint) {
  Model m;
  m.config = parse_config(checkpoint.config_text);
  m.encoder = encoder_from_tensors(m.config.encoder_seed, checkpoint.tensors);
  const GeneratorParams expected = init_generator(0);
  for (const auto& [name, t] : expected) {
    auto it = checkpoint.tensors.find(name);
    if (it == checkpoint.tensors.end()) throw Error(ErrorKind::kFormat, "checkpoint lacks generator tensor '" + name + "'");
    if (it->second.shape() != t.shape()) {
      throw Error(ErrorKind::kFormat, "generator tensor '" + name + "' has shape " + to_string(it->second.shape()) +
                                          ", expected " + to_string(t.shape()));
    }
    m.generator.emplace(name, it->second);
  }
  return m;
}

}  // namespace vst
