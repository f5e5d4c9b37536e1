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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tierload/graph.hpp"
#include "tierload/rng.hpp"

namespace tierload {

// Per-layer neighbor caps, outermost (seed) layer first.
class Fanouts {
 public:
  // Throws ParameterError if empty or any entry is 0.
  explicit Fanouts(std::vector<std::uint32_t> per_layer);

  const std::vector<std::uint32_t>& per_layer() const { return per_layer_; }
  std::size_t num_layers() const { return per_layer_.size(); }

  // Upper bound on distinct nodes one seed can reach: 1 + sum_l prod_{k<=l} f_k.
  std::uint64_t max_nodes_per_seed() const;

 private:
  std::vector<std::uint32_t> per_layer_;
};

struct MiniBatch {
  std::uint64_t index = 0;                    // position in the batch stream
  std::vector<NodeId> seeds;                  // distinct, in input order
  std::vector<EdgeList> layers;               // layer l edges as (neighbor, target)
  std::vector<NodeId> unique_nodes;           // ascending, every node above

  std::uint64_t num_edges() const;
  friend bool operator==(const MiniBatch&, const MiniBatch&) = default;
};

// One hop of uniform neighbor sampling. For each frontier node v: all
// in-neighbors if degree(v) <= fanout, otherwise `fanout` distinct neighbor
// slots drawn uniformly without replacement. Edges come back as (neighbor, v).
EdgeList sample_layer(const GraphCsc& g, std::span<const NodeId> frontier,
                      std::uint32_t fanout, SamplerRng& rng);

// k-hop sampled subgraph rooted at `seeds`.
//
// Layer 0 expands the (deduplicated) seeds. Layer l expands every distinct
// node sampled as a neighbor at layer l-1, including nodes already seen at an
// earlier layer, so a node reached twice is expanded twice.
MiniBatch sample_subgraph(const GraphCsc& g, std::span<const NodeId> seeds,
                          const Fanouts& fanouts, SamplerRng& rng);

// Splits seed_set into consecutive batches of batch_size (last may be short).
// With shuffle, seed_set is first permuted by rng.
std::vector<std::vector<NodeId>> batch_iterator(std::span<const NodeId> seed_set,
                                                std::uint64_t batch_size, bool shuffle,
                                                SamplerRng& rng);

// `count` node ids drawn i.i.d. from a Zipf law over a seeded permutation of
// [0, num_nodes): the k-th most popular node has weight (k+1)^-exponent.
std::vector<NodeId> zipf_seeds(std::uint64_t num_nodes, std::uint64_t count, double exponent,
                               std::uint64_t seed);

// Endless (or epoch-limited) stream of seed batches.
//
// Epoch e is batch_iterator over seed_set with a generator derived from
// (seed, e), so batch k is a pure function of the schedule parameters and k.
class SeedSchedule {
 public:
  // max_epochs == 0 means unlimited.
  SeedSchedule(std::vector<NodeId> seed_set, std::uint64_t batch_size, bool shuffle,
               std::uint64_t seed, std::uint64_t max_epochs);

  // Seeds of batch k, or nullopt once the epoch limit is exhausted.
  std::optional<std::vector<NodeId>> batch(std::uint64_t k);

  std::uint64_t batches_per_epoch() const { return batches_per_epoch_; }

 private:
  std::vector<NodeId> seed_set_;
  std::uint64_t batch_size_;
  bool shuffle_;
  std::uint64_t seed_;
  std::uint64_t max_epochs_;
  std::uint64_t batches_per_epoch_;
  std::optional<std::uint64_t> cached_epoch_;
  std::vector<std::vector<NodeId>> cached_batches_;
};

}  // namespace tierload
