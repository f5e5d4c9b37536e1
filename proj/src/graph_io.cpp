// Copyright 2026 The tierload Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tierload/graph_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "tierload/error.hpp"

namespace tierload {
namespace {

constexpr std::string_view kGraphMagic = "GCSC";
constexpr std::string_view kFeatureMagic = "GFEA";

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path.string()), out_(path, std::ios::binary) {
    if (!out_) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  }

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }

  template <typename T>
  void le(T value) {
    std::array<unsigned char, sizeof(T)> buf;
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(value >> (8 * i));
    bytes(buf.data(), buf.size());
  }

  void finish() {
    out_.flush();
    if (!out_) throw IoError(fmt::format("write to {} failed", path_));
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path.string()), in_(path, std::ios::binary) {
    if (!in_) throw IoError(fmt::format("cannot open {} for reading", path.string()));
  }

  void bytes(void* data, std::size_t n, std::string_view what) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw TruncatedFileError(fmt::format("{}: truncated while reading {}", path_, what));
    }
  }

  template <typename T>
  T le(std::string_view what) {
    std::array<unsigned char, sizeof(T)> buf;
    bytes(buf.data(), buf.size(), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(T{buf[i]} << (8 * i));
    return value;
  }

  void expect_magic(std::string_view magic) {
    std::array<char, 4> buf{};
    bytes(buf.data(), buf.size(), "magic");
    if (std::string_view(buf.data(), buf.size()) != magic) {
      throw BadMagicError(fmt::format("{}: bad magic, expected \"{}\"", path_, magic));
    }
    const auto version = le<std::uint32_t>("version");
    if (version != kFormatVersion) {
      throw VersionMismatchError(fmt::format("{}: version mismatch, file has {} but reader supports {}",
                                             path_, version, kFormatVersion));
    }
  }

  // Guards allocations against headers that promise more data than exists.
  void require_remaining(std::uint64_t n, std::string_view what) {
    const auto here = in_.tellg();
    in_.seekg(0, std::ios::end);
    const auto end = in_.tellg();
    in_.seekg(here);
    if (here < 0 || end < here || static_cast<std::uint64_t>(end - here) < n) {
      throw TruncatedFileError(fmt::format("{}: truncated, {} needs {} bytes", path_, what, n));
    }
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw CorruptDataError(fmt::format("{}: trailing bytes after payload", path_));
    }
  }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace

void save_graph(const std::filesystem::path& path, const GraphCsc& g) {
  Writer w(path);
  w.bytes(kGraphMagic.data(), kGraphMagic.size());
  w.le<std::uint32_t>(kFormatVersion);
  w.le<std::uint64_t>(g.num_nodes());
  w.le<std::uint64_t>(g.num_edges());
  for (std::uint64_t x : g.indptr()) w.le(x);
  for (NodeId x : g.indices()) w.le(x);
  w.finish();
}

GraphCsc load_graph(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kGraphMagic);
  const auto num_nodes = r.le<std::uint64_t>("num_nodes");
  const auto num_edges = r.le<std::uint64_t>("num_edges");
  if (num_nodes > (std::uint64_t{1} << 40) || num_edges > (std::uint64_t{1} << 44)) {
    throw CorruptDataError(fmt::format("{}: implausible header sizes", path.string()));
  }
  r.require_remaining((num_nodes + 1 + num_edges) * 8, "graph arrays");
  std::vector<std::uint64_t> indptr(num_nodes + 1);
  for (auto& x : indptr) x = r.le<std::uint64_t>("indptr");
  std::vector<NodeId> indices(num_edges);
  for (auto& x : indices) x = r.le<std::uint64_t>("indices");
  r.expect_end();
  return GraphCsc(std::move(indptr), std::move(indices));
}

void save_features(const std::filesystem::path& path, const FeatureStore& features) {
  const FeatureSpec& spec = features.spec();
  Writer w(path);
  w.bytes(kFeatureMagic.data(), kFeatureMagic.size());
  w.le<std::uint32_t>(kFormatVersion);
  w.le<std::uint64_t>(spec.num_nodes);
  w.le<std::uint32_t>(spec.dim);
  w.le<std::uint32_t>(kDtypeFloat32);
  std::vector<std::byte> row(spec.row_bytes());
  std::array<unsigned char, 4> le{};
  for (NodeId v = 0; v < spec.num_nodes; ++v) {
    features.read_row(v, row);
    for (std::uint32_t c = 0; c < spec.dim; ++c) {
      std::uint32_t bits;
      std::memcpy(&bits, row.data() + std::size_t{c} * 4, 4);
      for (int i = 0; i < 4; ++i) le[i] = static_cast<unsigned char>(bits >> (8 * i));
      std::memcpy(row.data() + std::size_t{c} * 4, le.data(), 4);
    }
    w.bytes(row.data(), row.size());
  }
  w.finish();
}

FeatureStore load_features(const std::filesystem::path& path, std::uint32_t page_bytes) {
  Reader r(path);
  r.expect_magic(kFeatureMagic);
  FeatureSpec spec;
  spec.num_nodes = r.le<std::uint64_t>("num_nodes");
  spec.dim = r.le<std::uint32_t>("dim");
  const auto dtype = r.le<std::uint32_t>("dtype");
  spec.page_bytes = page_bytes;
  if (dtype != kDtypeFloat32) throw CorruptDataError(fmt::format("{}: unsupported dtype {}", path.string(), dtype));
  if (spec.dim == 0 || spec.num_nodes > (std::uint64_t{1} << 40)) {
    throw CorruptDataError(fmt::format("{}: implausible header sizes", path.string()));
  }
  r.require_remaining(spec.total_bytes(), "feature payload");
  std::vector<std::byte> bytes(spec.total_bytes());
  r.bytes(bytes.data(), bytes.size(), "feature payload");
  r.expect_end();
  // Payload is little-endian float32; convert in place on big-endian hosts.
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i + 4 <= bytes.size(); i += 4) {
      std::swap(bytes[i], bytes[i + 3]);
      std::swap(bytes[i + 1], bytes[i + 2]);
    }
  }
  return FeatureStore::from_bytes(spec, std::move(bytes));
}

}  // namespace tierload
