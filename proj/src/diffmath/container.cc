// Copyright 2026 The OSNIP Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "osnip/diffmath/container.h"

#include <bit>
#include <cstring>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"

namespace osnip {
namespace {

static_assert(std::endian::native == std::endian::little);

constexpr char kMagic[8] = {'O', 'S', 'N', 'I', 'P', 'C', 'K', '1'};
constexpr size_t kDigestBytes = 32;

template <typename T>
void Put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& b, size_t end) : b_(b), end_(end) {}

  template <typename T>
  T Get(const char* what) {
    Need(sizeof(T), what);
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string Bytes(size_t n, const char* what) {
    Need(n, what);
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void Doubles(double* dst, size_t n, const char* what) {
    if (n > (end_ - pos_) / sizeof(double)) {
      throw TruncatedError(std::string("container truncated in ") + what);
    }
    std::memcpy(dst, b_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
  }

  size_t pos() const { return pos_; }

 private:
  void Need(size_t n, const char* what) {
    if (n > end_ - pos_) throw TruncatedError(std::string("container truncated in ") + what);
  }
  const std::string& b_;
  size_t end_;
  size_t pos_ = 0;
};

std::string RawDigest(const std::string& bytes, size_t n) {
  const std::string hex = Sha256Hex(bytes.substr(0, n));
  std::string raw;
  for (size_t i = 0; i < hex.size(); i += 2) {
    raw.push_back(static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  }
  return raw;
}

}  // namespace

const Tensor& Container::Find(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  throw CorruptHeaderError("container has no tensor '" + name + "'");
}

std::string SerializeContainer(const Container& c) {
  std::string out(kMagic, sizeof(kMagic));
  Put<uint32_t>(out, kContainerVersion);
  const std::string meta = c.meta.dump();
  Put<uint64_t>(out, meta.size());
  out += meta;
  Put<uint64_t>(out, c.tensors.size());
  for (const auto& [name, t] : c.tensors) {
    Put<uint32_t>(out, static_cast<uint32_t>(name.size()));
    out += name;
    Put<uint32_t>(out, static_cast<uint32_t>(t.rank()));
    for (int64_t e : t.shape()) Put<uint64_t>(out, static_cast<uint64_t>(e));
    out.append(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(double));
  }
  out += RawDigest(out, out.size());
  return out;
}

Container ParseContainer(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + sizeof(uint32_t)) {
    if (bytes.compare(0, bytes.size(), kMagic, std::min(bytes.size(), sizeof(kMagic))) == 0) {
      throw TruncatedError("container truncated in header");
    }
    throw CorruptHeaderError("not a container: bad magic");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CorruptHeaderError("not a container: bad magic");
  }
  uint32_t version;
  std::memcpy(&version, bytes.data() + sizeof(kMagic), sizeof(version));
  if (version != kContainerVersion) {
    throw VersionMismatchError("container version " + std::to_string(version) +
                               ", expected " + std::to_string(kContainerVersion));
  }
  if (bytes.size() < sizeof(kMagic) + sizeof(uint32_t) + kDigestBytes) {
    throw TruncatedError("container truncated before payload");
  }
  const size_t body = bytes.size() - kDigestBytes;
  Reader r(bytes, body);
  r.Bytes(sizeof(kMagic), "magic");
  r.Get<uint32_t>("version");
  Container c;
  const uint64_t meta_len = r.Get<uint64_t>("meta length");
  const std::string meta = r.Bytes(meta_len, "meta");
  try {
    c.meta = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptHeaderError(std::string("unparseable container meta: ") + e.what());
  }
  const uint64_t count = r.Get<uint64_t>("tensor count");
  for (uint64_t i = 0; i < count; ++i) {
    const uint32_t name_len = r.Get<uint32_t>("tensor name length");
    std::string name = r.Bytes(name_len, "tensor name");
    const uint32_t rank = r.Get<uint32_t>("tensor rank");
    if (rank > 8) throw CorruptHeaderError("implausible rank for '" + name + "'");
    Shape shape;
    uint64_t n = 1;
    for (uint32_t k = 0; k < rank; ++k) {
      const uint64_t e = r.Get<uint64_t>("tensor extent");
      if (e == 0 || e > (uint64_t{1} << 40)) {
        throw CorruptHeaderError("implausible extent for '" + name + "'");
      }
      shape.push_back(static_cast<int64_t>(e));
      n *= e;
    }
    if (n > (body - r.pos()) / sizeof(double)) {
      throw TruncatedError("container truncated in payload of '" + name + "'");
    }
    Tensor t(shape);
    r.Doubles(t.data(), n, "payload");
    c.tensors.emplace_back(std::move(name), std::move(t));
  }
  if (r.pos() != body) {
    throw TruncatedError("container payload length disagrees with its index");
  }
  if (RawDigest(bytes, body) != bytes.substr(body)) {
    throw CorruptHeaderError("container checksum mismatch");
  }
  return c;
}

void SaveContainer(const Container& c, const std::string& path) {
  WriteFile(path, SerializeContainer(c));
}

Container LoadContainer(const std::string& path) { return ParseContainer(ReadFile(path)); }

void PackParams(const ParamStore& store, const std::string& prefix, Container& c) {
  nlohmann::json flags = nlohmann::json::object();
  for (const std::string& name : store.Names()) {
    c.tensors.emplace_back(prefix + name, store.Get(name));
    flags[name] = store.Trainable(name);
  }
  c.meta["trainable:" + prefix] = flags;
}

ParamStore UnpackParams(const Container& c, const std::string& prefix) {
  ParamStore store;
  const auto it = c.meta.find("trainable:" + prefix);
  if (it == c.meta.end()) throw CorruptHeaderError("missing parameter group '" + prefix + "'");
  for (const auto& [n, t] : c.tensors) {
    if (n.rfind(prefix, 0) != 0) continue;
    const std::string name = n.substr(prefix.size());
    if (!it->contains(name)) throw CorruptHeaderError("untracked parameter '" + n + "'");
    store.Add(name, t, (*it)[name].get<bool>());
  }
  return store;
}

}  // namespace osnip
