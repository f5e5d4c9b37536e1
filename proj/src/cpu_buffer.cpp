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

#include "tierload/cpu_buffer.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

#include "tierload/error.hpp"
#include "tierload/pagerank.hpp"

namespace tierload {

ConstantBuffer::ConstantBuffer(std::vector<NodeId> pinned, const FeatureStore& features,
                               std::uint64_t budget_bytes)
    : pinned_(std::move(pinned)),
      slot_of_(features.spec().num_nodes, kNotPinned),
      budget_bytes_(budget_bytes),
      row_bytes_(features.spec().row_bytes()) {
  storage_.resize(pinned_.size() * row_bytes_);
  for (std::size_t i = 0; i < pinned_.size(); ++i) {
    slot_of_[pinned_[i]] = static_cast<std::uint32_t>(i);
    features.read_row(pinned_[i], std::span(storage_).subspan(i * row_bytes_, row_bytes_));
  }
}

ConstantBuffer ConstantBuffer::from_scores(std::span<const double> scores,
                                           const FeatureStore& features,
                                           std::uint64_t budget_bytes) {
  const std::uint64_t n = features.spec().num_nodes;
  if (scores.size() != n) {
    throw ParameterError(fmt::format("{} scores for {} feature rows", scores.size(), n));
  }
  const std::uint64_t k = std::min(n, budget_bytes / features.spec().row_bytes());
  std::vector<NodeId> ranked = rank_by_score(scores);
  ranked.resize(k);
  return ConstantBuffer(std::move(ranked), features, budget_bytes);
}

ConstantBuffer ConstantBuffer::from_nodes(std::span<const NodeId> nodes,
                                          const FeatureStore& features,
                                          std::uint64_t budget_bytes) {
  std::vector<NodeId> pinned;
  std::unordered_set<NodeId> seen;
  for (NodeId v : nodes) {
    if (v >= features.spec().num_nodes) {
      throw ParameterError(fmt::format("pinned node {} out of range", v));
    }
    if (seen.insert(v).second) pinned.push_back(v);
  }
  if (pinned.size() * features.spec().row_bytes() > budget_bytes) {
    throw ParameterError(fmt::format("{} pinned rows exceed the {}-byte buffer budget",
                                     pinned.size(), budget_bytes));
  }
  return ConstantBuffer(std::move(pinned), features, budget_bytes);
}

std::optional<std::span<const std::byte>> ConstantBuffer::lookup(NodeId node) const {
  if (!contains(node)) return std::nullopt;
  return std::span(storage_).subspan(std::size_t{slot_of_[node]} * row_bytes_, row_bytes_);
}

std::uint64_t ConstantBuffer::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (NodeId v : pinned_) {
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(v >> (8 * i)));
  }
  for (std::byte b : storage_) mix(static_cast<unsigned char>(b));
  return h;
}

}  // namespace tierload
