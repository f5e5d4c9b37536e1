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

#include "tierload/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "tierload/error.hpp"

namespace tierload {

GraphCsc::GraphCsc(std::vector<std::uint64_t> indptr,
                   std::vector<NodeId> indices)
    : indptr_(std::move(indptr)), indices_(std::move(indices)) {
  if (indptr_.empty()) throw CorruptDataError("indptr must hold num_nodes + 1 entries");
  if (indptr_.front() != 0) throw CorruptDataError("indptr[0] must be 0");
  if (indptr_.back() != indices_.size()) {
    throw CorruptDataError(fmt::format("indptr[num_nodes] = {} but there are {} edges",
                                       indptr_.back(), indices_.size()));
  }
  for (std::size_t i = 1; i < indptr_.size(); ++i) {
    if (indptr_[i] < indptr_[i - 1]) {
      throw CorruptDataError(fmt::format("indptr decreases at position {}", i));
    }
  }
  const std::uint64_t n = num_nodes();
  for (std::size_t e = 0; e < indices_.size(); ++e) {
    if (indices_[e] >= n) {
      throw CorruptDataError(fmt::format("edge {} references node {} out of range", e, indices_[e]));
    }
  }
}

std::span<const NodeId> GraphCsc::neighbors(NodeId v) const {
  if (v >= num_nodes()) {
    throw std::out_of_range(fmt::format("node {} out of range (num_nodes {})", v, num_nodes()));
  }
  return {indices_.data() + indptr_[v], indices_.data() + indptr_[v + 1]};
}

std::uint64_t GraphCsc::degree(NodeId v) const { return neighbors(v).size(); }

GraphCsc build_csc(std::span<const std::pair<NodeId, NodeId>> edges,
                   std::uint64_t num_nodes) {
  std::vector<std::uint64_t> indptr(num_nodes + 1, 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [src, dst] = edges[e];
    if (src >= num_nodes || dst >= num_nodes) {
      const NodeId bad = src >= num_nodes ? src : dst;
      throw ParameterError(fmt::format("node {} out of range in edge {} ({} -> {}), num_nodes {}",
                                       bad, e, src, dst, num_nodes));
    }
    ++indptr[dst + 1];
  }
  for (std::uint64_t v = 0; v < num_nodes; ++v) indptr[v + 1] += indptr[v];

  std::vector<NodeId> indices(edges.size());
  std::vector<std::uint64_t> cursor(indptr.begin(), indptr.end() - 1);
  for (const auto& [src, dst] : edges) indices[cursor[dst]++] = src;
  for (std::uint64_t v = 0; v < num_nodes; ++v) {
    std::sort(indices.begin() + static_cast<std::ptrdiff_t>(indptr[v]),
              indices.begin() + static_cast<std::ptrdiff_t>(indptr[v + 1]));
  }
  return GraphCsc(std::move(indptr), std::move(indices));
}

EdgeList to_edge_list(const GraphCsc& g) {
  EdgeList edges;
  edges.reserve(g.num_edges());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (NodeId u : g.neighbors(v)) edges.emplace_back(u, v);
  }
  return edges;
}

GraphCsc transpose(const GraphCsc& g) {
  EdgeList edges = to_edge_list(g);
  for (auto& [src, dst] : edges) std::swap(src, dst);
  return build_csc(edges, g.num_nodes());
}

}  // namespace tierload
