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
#include <vector>

#include "tierload/graph.hpp"

namespace tierload {

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-8;  // stop once the L1 change between sweeps drops below
  std::uint32_t max_iter = 200;
  // Optional non-negative weight per CSC entry (same order as indices()).
  // Empty means every edge weighs 1.
  std::span<const double> edge_weights = {};
};

struct PageRankResult {
  std::vector<double> scores;  // sums to 1
  std::uint32_t iterations = 0;
  bool converged = false;
  double last_delta = 0.0;
};

// Power-iteration PageRank along edge direction (mass flows u -> v for each
// edge u -> v). Nodes without outgoing weight spread their mass uniformly.
PageRankResult pagerank(const GraphCsc& g, const PageRankOptions& opts = {});

// PageRank of the edge-reversed graph: mass flows from each node to its
// in-neighbors, so nodes that appear in many (important) neighbor lists
// score high. These are the nodes neighbor sampling keeps reaching.
PageRankResult reverse_pagerank(const GraphCsc& g, const PageRankOptions& opts = {});

// Node ids by descending score, ties by ascending id.
std::vector<NodeId> rank_by_score(std::span<const double> scores);

}  // namespace tierload
