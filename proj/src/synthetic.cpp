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

#include "tierload/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>

#include "tierload/error.hpp"
#include "tierload/rng.hpp"

namespace tierload {
namespace {

std::vector<NodeId> random_permutation(std::uint64_t n, Rng& rng) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  for (std::uint64_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  return perm;
}

// Popularity weight per node: rank weights scattered by a random permutation.
std::vector<double> node_weights(std::uint64_t n, DegreeModel model, Rng& rng) {
  std::vector<double> weights(n, 1.0);
  if (model.kind == DegreeModel::Kind::kUniform) return weights;
  const double power = 1.0 / (model.exponent - 1.0);
  const std::vector<NodeId> perm = random_permutation(n, rng);
  for (std::uint64_t rank = 0; rank < n; ++rank) {
    weights[perm[rank]] = std::pow(static_cast<double>(rank + 1), -power);
  }
  return weights;
}

// Splits `total` into integer per-node targets proportional to weights
// (largest remainder), each capped at `cap`.
std::vector<std::uint64_t> apportion(std::uint64_t total, const std::vector<double>& weights,
                                     std::uint64_t cap) {
  const std::uint64_t n = weights.size();
  const long double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0L);
  std::vector<std::uint64_t> target(n);
  std::vector<long double> remainder(n);
  std::uint64_t assigned = 0;
  for (std::uint64_t v = 0; v < n; ++v) {
    const long double share = static_cast<long double>(total) * weights[v] / weight_sum;
    target[v] = static_cast<std::uint64_t>(std::floor(share));
    remainder[v] = share - static_cast<long double>(target[v]);
    assigned += target[v];
  }
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return remainder[a] != remainder[b] ? remainder[a] > remainder[b] : a < b;
  });
  for (std::uint64_t i = 0; assigned < total; ++i, ++assigned) ++target[order[i % n]];

  std::uint64_t excess = 0;
  for (auto& t : target) {
    if (t > cap) {
      excess += t - cap;
      t = cap;
    }
  }
  if (excess == 0) return target;
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return weights[a] != weights[b] ? weights[a] > weights[b] : a < b;
  });
  while (excess > 0) {
    for (NodeId v : order) {
      if (excess == 0) break;
      if (target[v] < cap) {
        ++target[v];
        --excess;
      }
    }
  }
  return target;
}

class SourcePicker {
 public:
  explicit SourcePicker(const std::vector<double>& weights) : weights_(weights), cdf_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cdf_.begin());
  }

  // `count` distinct sources, none equal to `dst`, appended to edges.
  void pick(NodeId dst, std::uint64_t count, Rng& rng, EdgeList& edges) {
    const std::uint64_t n = weights_.size();
    if (count == 0) return;
    if (count * 16 <= n) {
      seen_.clear();
      while (seen_.size() < count) {
        const NodeId u = draw(rng);
        if (u != dst && seen_.insert(u).second) edges.emplace_back(u, dst);
      }
      return;
    }
    // Dense case: weighted sampling without replacement by exponential keys.
    keyed_.clear();
    for (NodeId u = 0; u < n; ++u) {
      if (u == dst) continue;
      const double key = std::log(1.0 - rng.uniform()) / weights_[u];
      keyed_.emplace_back(key, u);
    }
    std::nth_element(keyed_.begin(), keyed_.begin() + static_cast<std::ptrdiff_t>(count - 1),
                     keyed_.end(), std::greater<>());
    for (std::uint64_t i = 0; i < count; ++i) edges.emplace_back(keyed_[i].second, dst);
  }

 private:
  NodeId draw(Rng& rng) {
    const double x = rng.uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
    return std::min<NodeId>(static_cast<NodeId>(it - cdf_.begin()), cdf_.size() - 1);
  }

  const std::vector<double>& weights_;
  std::vector<double> cdf_;
  std::unordered_set<NodeId> seen_;
  std::vector<std::pair<double, NodeId>> keyed_;
};

}  // namespace

GraphCsc generate_synthetic(std::uint64_t num_nodes, std::uint64_t avg_degree,
                            DegreeModel model, std::uint64_t seed) {
  if (num_nodes == 0) throw ParameterError("num_nodes must be >= 1");
  if (model.kind == DegreeModel::Kind::kPowerLaw && !(model.exponent > 1.0)) {
    throw ParameterError(fmt::format("powerlaw exponent must be > 1, got {}", model.exponent));
  }
  Rng rng(seed);
  const std::vector<double> in_weights = node_weights(num_nodes, model, rng);
  const std::vector<double> out_weights = node_weights(num_nodes, model, rng);

  const std::uint64_t cap = num_nodes - 1;
  const std::uint64_t total = std::min(num_nodes * avg_degree, num_nodes * cap);
  const std::vector<std::uint64_t> in_degree = apportion(total, in_weights, cap);

  EdgeList edges;
  edges.reserve(total);
  SourcePicker picker(out_weights);
  for (NodeId v = 0; v < num_nodes; ++v) picker.pick(v, in_degree[v], rng, edges);
  return build_csc(edges, num_nodes);
}

}  // namespace tierload
