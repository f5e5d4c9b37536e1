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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tierload {

using NodeId = std::uint64_t;
using EdgeList = std::vector<std::pair<NodeId, NodeId>>;  // (src, dst)

// Compressed sparse column adjacency.
//
// Column v lists the in-neighbors of v: every u with an edge u -> v, sorted
// ascending. Sampling walks these lists ("neighbors of the target node"), so
// traversal follows edges backwards from the seed. Reverse the edge list
// before construction to sample along out-edges instead.
//
// The structure is fully memory resident; reading it costs no simulated I/O.
class GraphCsc {
 public:
  GraphCsc() : indptr_{0} {}

  // Takes ownership of raw arrays after checking every CSC invariant.
  // Throws CorruptDataError on violation.
  GraphCsc(std::vector<std::uint64_t> indptr, std::vector<NodeId> indices);

  std::uint64_t num_nodes() const { return indptr_.size() - 1; }
  std::uint64_t num_edges() const { return indices_.size(); }

  // Throws std::out_of_range for v >= num_nodes().
  std::span<const NodeId> neighbors(NodeId v) const;
  std::uint64_t degree(NodeId v) const;

  const std::vector<std::uint64_t>& indptr() const { return indptr_; }
  const std::vector<NodeId>& indices() const { return indices_; }

  friend bool operator==(const GraphCsc&, const GraphCsc&) = default;

 private:
  std::vector<std::uint64_t> indptr_;
  std::vector<NodeId> indices_;
};

// Builds the in-neighbor CSC of a directed edge list. Parallel edges are kept.
// Throws ParameterError naming the first edge with an endpoint out of range.
GraphCsc build_csc(std::span<const std::pair<NodeId, NodeId>> edges,
                   std::uint64_t num_nodes);

// Edge list of g in (src, dst) form, ordered by dst then src.
EdgeList to_edge_list(const GraphCsc& g);

// Graph with every edge reversed.
GraphCsc transpose(const GraphCsc& g);

}  // namespace tierload
