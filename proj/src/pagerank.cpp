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

#include "tierload/pagerank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "tierload/error.hpp"

namespace tierload {
namespace {

void validate(const GraphCsc& g, const PageRankOptions& opts) {
  if (!(opts.damping > 0.0 && opts.damping < 1.0)) {
    throw ParameterError(fmt::format("damping {} outside (0, 1)", opts.damping));
  }
  if (!(opts.tol > 0.0)) throw ParameterError("tol must be > 0");
  if (!opts.edge_weights.empty()) {
    if (opts.edge_weights.size() != g.num_edges()) {
      throw ParameterError(fmt::format("{} edge weights for {} edges", opts.edge_weights.size(),
                                       g.num_edges()));
    }
    for (double w : opts.edge_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("edge weights must be finite and >= 0");
    }
  }
}

double weight_at(const PageRankOptions& opts, std::uint64_t e) {
  return opts.edge_weights.empty() ? 1.0 : opts.edge_weights[e];
}

// Shared power iteration. `spread(scores, next)` adds damping * the link
// contribution into next; `out_weight` is each node's total outgoing weight.
template <typename Spread>
PageRankResult iterate(std::uint64_t n, const std::vector<double>& out_weight,
                       const PageRankOptions& opts, Spread spread) {
  PageRankResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  result.scores.assign(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (std::uint32_t it = 0; it < opts.max_iter; ++it) {
    double dangling = 0.0;
    for (std::uint64_t v = 0; v < n; ++v) {
      if (out_weight[v] <= 0.0) dangling += result.scores[v];
    }
    const double base = (1.0 - opts.damping + opts.damping * dangling) / static_cast<double>(n);
    std::fill(next.begin(), next.end(), base);
    spread(result.scores, next);
    double delta = 0.0;
    for (std::uint64_t v = 0; v < n; ++v) delta += std::abs(next[v] - result.scores[v]);
    result.scores.swap(next);
    result.iterations = it + 1;
    result.last_delta = delta;
    if (delta < opts.tol) {
      result.converged = true;
      break;
    }
  }
  const double sum = std::accumulate(result.scores.begin(), result.scores.end(), 0.0);
  for (double& s : result.scores) s /= sum;
  return result;
}

}  // namespace

PageRankResult pagerank(const GraphCsc& g, const PageRankOptions& opts) {
  validate(g, opts);
  const std::uint64_t n = g.num_nodes();
  const auto& indptr = g.indptr();
  const auto& indices = g.indices();
  std::vector<double> out_weight(n, 0.0);
  for (std::uint64_t e = 0; e < indices.size(); ++e) out_weight[indices[e]] += weight_at(opts, e);

  return iterate(n, out_weight, opts, [&](const std::vector<double>& s, std::vector<double>& next) {
    for (NodeId v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::uint64_t e = indptr[v]; e < indptr[v + 1]; ++e) {
        const NodeId u = indices[e];
        acc += s[u] * weight_at(opts, e) / out_weight[u];
      }
      next[v] += opts.damping * acc;
    }
  });
}

PageRankResult reverse_pagerank(const GraphCsc& g, const PageRankOptions& opts) {
  validate(g, opts);
  const std::uint64_t n = g.num_nodes();
  const auto& indptr = g.indptr();
  const auto& indices = g.indices();
  // In the reversed graph the out-edges of v are exactly column v.
  std::vector<double> out_weight(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    for (std::uint64_t e = indptr[v]; e < indptr[v + 1]; ++e) out_weight[v] += weight_at(opts, e);
  }

  return iterate(n, out_weight, opts, [&](const std::vector<double>& s, std::vector<double>& next) {
    for (NodeId v = 0; v < n; ++v) {
      if (out_weight[v] <= 0.0) continue;
      const double share = opts.damping * s[v] / out_weight[v];
      for (std::uint64_t e = indptr[v]; e < indptr[v + 1]; ++e) {
        next[indices[e]] += share * weight_at(opts, e);
      }
    }
  });
}

std::vector<NodeId> rank_by_score(std::span<const double> scores) {
  std::vector<NodeId> order(scores.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace tierload
