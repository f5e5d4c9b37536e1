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

#include "tierload/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "tierload/error.hpp"

namespace tierload {

Fanouts::Fanouts(std::vector<std::uint32_t> per_layer) : per_layer_(std::move(per_layer)) {
  if (per_layer_.empty()) throw ParameterError("fanouts must name at least one layer");
  for (std::size_t l = 0; l < per_layer_.size(); ++l) {
    if (per_layer_[l] == 0) throw ParameterError(fmt::format("fanout of layer {} must be >= 1", l));
  }
}

std::uint64_t Fanouts::max_nodes_per_seed() const {
  std::uint64_t total = 1;
  std::uint64_t width = 1;
  for (std::uint32_t f : per_layer_) {
    width *= f;
    total += width;
  }
  return total;
}

std::uint64_t MiniBatch::num_edges() const {
  std::uint64_t n = 0;
  for (const auto& layer : layers) n += layer.size();
  return n;
}

namespace {

// Partial Fisher-Yates over a read-only slice: only displaced positions are
// materialized, so the cost is O(fanout^2) regardless of degree.
class SparseShuffle {
 public:
  void draw(std::span<const NodeId> slice, std::uint32_t count, SamplerRng& rng,
            NodeId target, EdgeList& out) {
    displaced_.clear();
    const std::uint64_t n = slice.size();
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t j = i + rng.below(n - i);
      const NodeId at_j = value_at(slice, j);
      set(j, value_at(slice, i));
      out.emplace_back(at_j, target);
    }
  }

 private:
  NodeId value_at(std::span<const NodeId> slice, std::uint64_t pos) const {
    for (const auto& [p, v] : displaced_) {
      if (p == pos) return v;
    }
    return slice[pos];
  }

  void set(std::uint64_t pos, NodeId value) {
    for (auto& [p, v] : displaced_) {
      if (p == pos) {
        v = value;
        return;
      }
    }
    displaced_.emplace_back(pos, value);
  }

  std::vector<std::pair<std::uint64_t, NodeId>> displaced_;
};

std::vector<NodeId> dedup_in_order(std::span<const NodeId> nodes) {
  std::vector<NodeId> out;
  out.reserve(nodes.size());
  std::unordered_set<NodeId> seen;
  seen.reserve(nodes.size());
  for (NodeId v : nodes) {
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

}  // namespace

EdgeList sample_layer(const GraphCsc& g, std::span<const NodeId> frontier,
                      std::uint32_t fanout, SamplerRng& rng) {
  EdgeList edges;
  SparseShuffle shuffle;
  for (NodeId v : frontier) {
    const std::span<const NodeId> nbrs = g.neighbors(v);
    if (nbrs.size() <= fanout) {
      for (NodeId u : nbrs) edges.emplace_back(u, v);
    } else {
      shuffle.draw(nbrs, fanout, rng, v, edges);
    }
  }
  return edges;
}

MiniBatch sample_subgraph(const GraphCsc& g, std::span<const NodeId> seeds,
                          const Fanouts& fanouts, SamplerRng& rng) {
  if (seeds.empty()) throw ParameterError("sample_subgraph needs at least one seed");
  MiniBatch batch;
  batch.seeds = dedup_in_order(seeds);
  std::vector<NodeId> all(batch.seeds);
  std::vector<NodeId> frontier(batch.seeds);
  for (std::uint32_t fanout : fanouts.per_layer()) {
    EdgeList edges = sample_layer(g, frontier, fanout, rng);
    std::vector<NodeId> sampled;
    sampled.reserve(edges.size());
    for (const auto& [src, dst] : edges) sampled.push_back(src);
    frontier = dedup_in_order(sampled);
    all.insert(all.end(), frontier.begin(), frontier.end());
    batch.layers.push_back(std::move(edges));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  batch.unique_nodes = std::move(all);
  return batch;
}

std::vector<std::vector<NodeId>> batch_iterator(std::span<const NodeId> seed_set,
                                                std::uint64_t batch_size, bool shuffle,
                                                SamplerRng& rng) {
  if (batch_size == 0) throw ParameterError("batch_size must be >= 1");
  std::vector<NodeId> order(seed_set.begin(), seed_set.end());
  if (shuffle) {
    for (std::uint64_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<std::vector<NodeId>> batches;
  for (std::uint64_t start = 0; start < order.size(); start += batch_size) {
    const std::uint64_t end = std::min<std::uint64_t>(start + batch_size, order.size());
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::vector<NodeId> zipf_seeds(std::uint64_t num_nodes, std::uint64_t count, double exponent,
                               std::uint64_t seed) {
  if (num_nodes == 0) throw ParameterError("zipf_seeds needs num_nodes >= 1");
  if (!(exponent >= 0.0)) throw ParameterError("zipf exponent must be >= 0");
  Rng rng(seed);
  std::vector<NodeId> by_rank(num_nodes);
  std::iota(by_rank.begin(), by_rank.end(), NodeId{0});
  for (std::uint64_t i = num_nodes; i > 1; --i) std::swap(by_rank[i - 1], by_rank[rng.below(i)]);

  std::vector<double> cdf(num_nodes);
  double acc = 0.0;
  for (std::uint64_t k = 0; k < num_nodes; ++k) {
    acc += std::pow(static_cast<double>(k + 1), -exponent);
    cdf[k] = acc;
  }
  std::vector<NodeId> out(count);
  for (auto& v : out) {
    const double x = rng.uniform() * acc;
    const auto rank = static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
    v = by_rank[std::min(rank, num_nodes - 1)];
  }
  return out;
}

SeedSchedule::SeedSchedule(std::vector<NodeId> seed_set, std::uint64_t batch_size, bool shuffle,
                           std::uint64_t seed, std::uint64_t max_epochs)
    : seed_set_(std::move(seed_set)),
      batch_size_(batch_size),
      shuffle_(shuffle),
      seed_(seed),
      max_epochs_(max_epochs),
      batches_per_epoch_(0) {
  if (batch_size_ == 0) throw ParameterError("batch_size must be >= 1");
  batches_per_epoch_ = (seed_set_.size() + batch_size_ - 1) / batch_size_;
}

std::optional<std::vector<NodeId>> SeedSchedule::batch(std::uint64_t k) {
  if (batches_per_epoch_ == 0) return std::nullopt;
  const std::uint64_t epoch = k / batches_per_epoch_;
  if (max_epochs_ != 0 && epoch >= max_epochs_) return std::nullopt;
  if (cached_epoch_ != epoch) {
    SamplerRng rng(derive_seed(seed_, epoch));
    cached_batches_ = batch_iterator(seed_set_, batch_size_, shuffle_, rng);
    cached_epoch_ = epoch;
  }
  return cached_batches_[k % batches_per_epoch_];
}

}  // namespace tierload
