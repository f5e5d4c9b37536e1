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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tierload/graph.hpp"

namespace tierload {

struct FeatureSpec {
  std::uint64_t num_nodes = 0;
  std::uint32_t dim = 1024;
  std::uint32_t element_bytes = 4;  // float32 is the only stored dtype
  std::uint32_t page_bytes = 4096;  // storage access granularity

  std::uint64_t row_bytes() const { return std::uint64_t{dim} * element_bytes; }
  std::uint64_t total_bytes() const { return num_nodes * row_bytes(); }

  // Throws ParameterError unless dim >= 1, element_bytes == 4 and page_bytes
  // is a power of two.
  void validate() const;
};

// Value of feature (node, column) in a synthetic table.
//
//   key = splitmix64(seed) ^ splitmix64(node + 1)
//   h   = splitmix64(key + column)
//   v   = (float(int64(h >> 40) - 2^23)) / 2^23        in [-1, 1)
//
// The formula is part of the contract so a gathered row can be checked
// without touching the feature file.
float synthetic_feature_value(std::uint64_t seed, NodeId node, std::uint32_t column);

// Row-major N x D float32 feature table.
//
// Either holds the bytes (loaded from file or generated) or computes rows on
// demand from synthetic_feature_value; the two backings are
// indistinguishable through read_row, which lets large desk-scale workloads
// run without materializing the table.
class FeatureStore {
 public:
  static FeatureStore from_bytes(FeatureSpec spec, std::vector<std::byte> bytes);
  static FeatureStore procedural(FeatureSpec spec, std::uint64_t seed);
  static FeatureStore materialized(FeatureSpec spec, std::uint64_t seed);

  const FeatureSpec& spec() const { return spec_; }

  // Copies row `node` into out (exactly row_bytes long).
  void read_row(NodeId node, std::span<std::byte> out) const;
  std::vector<std::byte> row(NodeId node) const;

  bool is_procedural() const { return procedural_; }
  std::optional<std::uint64_t> synthetic_seed() const { return seed_; }
  // Empty for procedural stores.
  std::span<const std::byte> bytes() const { return bytes_; }

 private:
  FeatureStore(FeatureSpec spec, std::vector<std::byte> bytes,
               std::optional<std::uint64_t> seed, bool procedural)
      : spec_(spec), bytes_(std::move(bytes)), seed_(seed), procedural_(procedural) {}

  FeatureSpec spec_;
  std::vector<std::byte> bytes_;
  std::optional<std::uint64_t> seed_;
  bool procedural_ = false;
};

}  // namespace tierload
