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

#include "tierload/features.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

#include <fmt/format.h>

#include "tierload/error.hpp"
#include "tierload/rng.hpp"

namespace tierload {

void FeatureSpec::validate() const {
  if (dim == 0) throw ParameterError("feature dim must be >= 1");
  if (element_bytes != 4) {
    throw ParameterError(fmt::format("unsupported element size {} (only float32)", element_bytes));
  }
  if (page_bytes == 0 || !std::has_single_bit(page_bytes)) {
    throw ParameterError(fmt::format("page_bytes {} is not a power of two", page_bytes));
  }
}

float synthetic_feature_value(std::uint64_t seed, NodeId node, std::uint32_t column) {
  const std::uint64_t key = splitmix64(seed) ^ splitmix64(node + 1);
  const std::uint64_t h = splitmix64(key + column);
  const auto centered = static_cast<std::int64_t>(h >> 40) - (std::int64_t{1} << 23);
  return static_cast<float>(centered) / static_cast<float>(1 << 23);
}

namespace {

void fill_synthetic_row(std::uint64_t seed, NodeId node, std::uint32_t dim,
                        std::span<std::byte> out) {
  for (std::uint32_t c = 0; c < dim; ++c) {
    const float v = synthetic_feature_value(seed, node, c);
    std::memcpy(out.data() + std::size_t{c} * sizeof(float), &v, sizeof(float));
  }
}

}  // namespace

FeatureStore FeatureStore::from_bytes(FeatureSpec spec, std::vector<std::byte> bytes) {
  spec.validate();
  if (bytes.size() != spec.total_bytes()) {
    throw ParameterError(fmt::format("feature table holds {} bytes, expected {} x {}",
                                     bytes.size(), spec.num_nodes, spec.row_bytes()));
  }
  return FeatureStore(spec, std::move(bytes), std::nullopt, false);
}

FeatureStore FeatureStore::procedural(FeatureSpec spec, std::uint64_t seed) {
  spec.validate();
  return FeatureStore(spec, {}, seed, true);
}

FeatureStore FeatureStore::materialized(FeatureSpec spec, std::uint64_t seed) {
  spec.validate();
  std::vector<std::byte> bytes(spec.total_bytes());
  const std::uint64_t row = spec.row_bytes();
  for (NodeId v = 0; v < spec.num_nodes; ++v) {
    fill_synthetic_row(seed, v, spec.dim, std::span(bytes).subspan(v * row, row));
  }
  return FeatureStore(spec, std::move(bytes), seed, false);
}

void FeatureStore::read_row(NodeId node, std::span<std::byte> out) const {
  if (node >= spec_.num_nodes) {
    throw std::out_of_range(fmt::format("feature row {} out of range ({} rows)", node, spec_.num_nodes));
  }
  const std::uint64_t row = spec_.row_bytes();
  if (out.size() != row) throw std::invalid_argument("row buffer has the wrong size");
  if (procedural_) {
    fill_synthetic_row(*seed_, node, spec_.dim, out);
  } else {
    std::memcpy(out.data(), bytes_.data() + node * row, row);
  }
}

std::vector<std::byte> FeatureStore::row(NodeId node) const {
  std::vector<std::byte> out(spec_.row_bytes());
  read_row(node, out);
  return out;
}

}  // namespace tierload
