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

#include "tierload/features.hpp"
#include "tierload/graph.hpp"

namespace tierload {

// Fixed in-memory tier holding copies of selected feature rows.
//
// Built once, never modified: lookups are safe from any number of threads.
class ConstantBuffer {
 public:
  ConstantBuffer() = default;

  // Pins the floor(budget_bytes / row_bytes) highest-scoring nodes, ties to
  // the lower id. scores.size() must equal the feature row count.
  static ConstantBuffer from_scores(std::span<const double> scores, const FeatureStore& features,
                                    std::uint64_t budget_bytes);

  // Pins exactly `nodes` (duplicates ignored). Throws ParameterError if they
  // exceed the budget or name a row out of range.
  static ConstantBuffer from_nodes(std::span<const NodeId> nodes, const FeatureStore& features,
                                   std::uint64_t budget_bytes);

  // The pinned row, or nullopt when `node` is not pinned.
  std::optional<std::span<const std::byte>> lookup(NodeId node) const;
  bool contains(NodeId node) const {
    return node < slot_of_.size() && slot_of_[node] != kNotPinned;
  }

  const std::vector<NodeId>& pinned_nodes() const { return pinned_; }
  std::uint64_t budget_bytes() const { return budget_bytes_; }
  std::uint64_t row_bytes() const { return row_bytes_; }
  std::uint64_t used_bytes() const { return storage_.size(); }

  // FNV-1a over membership and row bytes; unchanged for the buffer's life.
  std::uint64_t content_hash() const;

 private:
  static constexpr std::uint32_t kNotPinned = ~std::uint32_t{0};

  ConstantBuffer(std::vector<NodeId> pinned, const FeatureStore& features,
                 std::uint64_t budget_bytes);

  std::vector<NodeId> pinned_;
  std::vector<std::uint32_t> slot_of_;
  std::vector<std::byte> storage_;
  std::uint64_t budget_bytes_ = 0;
  std::uint64_t row_bytes_ = 0;
};

}  // namespace tierload
