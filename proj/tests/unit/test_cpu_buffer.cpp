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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "oracles/dense_pagerank.hpp"
#include "oracles/feature_oracle.hpp"
#include "tierload/cpu_buffer.hpp"
#include "tierload/error.hpp"
#include "tierload/pagerank.hpp"
#include "tierload/rng.hpp"
#include "tierload/sampler.hpp"
#include "tierload/synthetic.hpp"

using namespace tierload;

namespace {

EdgeList random_edges(std::uint64_t n, std::uint64_t m, std::uint64_t seed) {
  Rng rng(seed);
  EdgeList edges;
  for (std::uint64_t i = 0; i < m; ++i) edges.emplace_back(rng.below(n), rng.below(n));
  return edges;
}

EdgeList reversed(const EdgeList& edges) {
  EdgeList out;
  for (const auto& [u, v] : edges) out.emplace_back(v, u);
  return out;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double sum(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0); }

FeatureStore store(std::uint64_t n, std::uint32_t dim = 4) {
  return FeatureStore::procedural({n, dim, 4, 4096}, 17);
}

}  // namespace

TEST_CASE("reverse PageRank of a single node") {
  const PageRankResult r = reverse_pagerank(build_csc(EdgeList{}, 1));
  REQUIRE(r.scores.size() == 1);
  CHECK(r.scores[0] == doctest::Approx(1.0));
  CHECK(r.converged);
}

TEST_CASE("reverse PageRank of a directed cycle is uniform") {
  for (std::uint64_t n : {2ULL, 5ULL, 64ULL}) {
    EdgeList edges;
    for (NodeId v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
    const PageRankResult r = reverse_pagerank(build_csc(edges, n));
    for (double s : r.scores) CHECK(s == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("reverse PageRank matches the dense oracle on a 200-node graph") {
  const EdgeList edges = random_edges(200, 900, 31);
  const GraphCsc g = build_csc(edges, 200);
  PageRankOptions opts;
  opts.tol = 1e-13;
  opts.max_iter = 1000;
  const PageRankResult r = reverse_pagerank(g, opts);
  CHECK(r.converged);
  const std::vector<double> want = oracle::dense_pagerank(200, reversed(edges), 0.85);
  CHECK(linf(r.scores, want) <= 1e-9);
  CHECK(sum(r.scores) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("default tolerance bounds the distance to the fixed point") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EdgeList edges = random_edges(200, 900, 32 + seed);
    const PageRankResult r = reverse_pagerank(build_csc(edges, 200));
    CHECK(r.converged);
    CHECK(r.last_delta < 1e-8);
    // Geometric contraction by d per sweep leaves at most delta * d / (1 - d).
    CHECK(linf(r.scores, oracle::dense_pagerank(200, reversed(edges), 0.85)) <= 1e-8 * 0.85 / 0.15);
  }
}

TEST_CASE("reverse PageRank equals forward PageRank of the transpose") {
  const GraphCsc g = generate_synthetic(800, 6, DegreeModel::powerlaw(2.2), 8);
  PageRankOptions opts;
  opts.tol = 1e-12;
  const PageRankResult rev = reverse_pagerank(g, opts);
  const PageRankResult fwd = pagerank(transpose(g), opts);
  CHECK(linf(rev.scores, fwd.scores) <= 1e-9);
  const PageRankResult plain = pagerank(g, opts);
  CHECK(linf(plain.scores, oracle::dense_pagerank(800, to_edge_list(g), 0.85)) <= 1e-9);
}

TEST_CASE("non-convergence is flagged") {
  const GraphCsc g = generate_synthetic(500, 5, DegreeModel::uniform(), 2);
  PageRankOptions opts;
  opts.max_iter = 1;
  const PageRankResult r = reverse_pagerank(g, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(sum(r.scores) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("edge weight hook") {
  const EdgeList edges = random_edges(50, 200, 5);
  const GraphCsc g = build_csc(edges, 50);
  std::vector<double> ones(g.num_edges(), 1.0);
  PageRankOptions unit;
  unit.edge_weights = ones;
  CHECK(linf(reverse_pagerank(g, unit).scores, reverse_pagerank(g).scores) <= 1e-15);

  // Doubling every weight leaves the ranking unchanged; skewing them does not.
  std::vector<double> twos(g.num_edges(), 2.0);
  PageRankOptions doubled;
  doubled.edge_weights = twos;
  CHECK(linf(reverse_pagerank(g, doubled).scores, reverse_pagerank(g).scores) <= 1e-12);
  std::vector<double> skew(g.num_edges());
  for (std::size_t e = 0; e < skew.size(); ++e) skew[e] = 1.0 + static_cast<double>(e % 7);
  PageRankOptions skewed;
  skewed.edge_weights = skew;
  CHECK(linf(reverse_pagerank(g, skewed).scores, reverse_pagerank(g).scores) > 1e-6);

  std::vector<double> wrong(3, 1.0);
  PageRankOptions bad;
  bad.edge_weights = wrong;
  CHECK_THROWS_AS(reverse_pagerank(g, bad), ParameterError);
  PageRankOptions bad_damping;
  bad_damping.damping = 1.0;
  CHECK_THROWS_AS(reverse_pagerank(g, bad_damping), ParameterError);
}

TEST_CASE("rank_by_score orders by score then id") {
  const std::vector<double> s = {0.1, 0.4, 0.1, 0.4, 0.0};
  CHECK(rank_by_score(s) == std::vector<NodeId>{1, 3, 0, 2, 4});
}

TEST_CASE("constant buffer with zero budget is empty") {
  const FeatureStore f = store(4);
  const std::vector<double> scores = {0.4, 0.3, 0.2, 0.1};
  const ConstantBuffer b = ConstantBuffer::from_scores(scores, f, 0);
  CHECK(b.pinned_nodes().empty());
  CHECK_FALSE(b.lookup(0));
  CHECK(ConstantBuffer().pinned_nodes().empty());
  CHECK_FALSE(ConstantBuffer().lookup(7));
}

TEST_CASE("constant buffer pins the top-k by score") {
  const FeatureStore f = store(4);
  const std::vector<double> scores = {0.4, 0.3, 0.2, 0.1};
  const ConstantBuffer b = ConstantBuffer::from_scores(scores, f, 3 * f.spec().row_bytes());
  CHECK(std::set<NodeId>(b.pinned_nodes().begin(), b.pinned_nodes().end()) == std::set<NodeId>{0, 1, 2});
  CHECK(b.used_bytes() == 3 * f.spec().row_bytes());
  // A partial row of budget does not buy a row.
  CHECK(ConstantBuffer::from_scores(scores, f, 3 * f.spec().row_bytes() - 1).pinned_nodes().size() == 2);
}

TEST_CASE("constant buffer breaks score ties by ascending id") {
  const FeatureStore f = store(4);
  const std::vector<double> scores = {0.25, 0.25, 0.25, 0.25};
  const ConstantBuffer b = ConstantBuffer::from_scores(scores, f, 2 * f.spec().row_bytes());
  CHECK(std::set<NodeId>(b.pinned_nodes().begin(), b.pinned_nodes().end()) == std::set<NodeId>{0, 1});
}

TEST_CASE("constant buffer lookups return exact rows") {
  const FeatureStore f = store(100, 32);
  std::vector<double> scores(100);
  for (std::size_t i = 0; i < 100; ++i) scores[i] = static_cast<double>((i * 37) % 100);
  const ConstantBuffer b = ConstantBuffer::from_scores(scores, f, 10 * f.spec().row_bytes());
  std::size_t pinned = 0;
  for (NodeId v = 0; v < 100; ++v) {
    const auto row = b.lookup(v);
    CHECK(row.has_value() == b.contains(v));
    if (!row) continue;
    ++pinned;
    CHECK(std::vector<std::byte>(row->begin(), row->end()) == oracle::feature_row(17, v, 32));
  }
  CHECK(pinned == 10);
  CHECK_FALSE(b.contains(1000));
}

TEST_CASE("explicit pinned list") {
  const FeatureStore f = store(10);
  const std::vector<NodeId> nodes = {7, 3, 7};
  const ConstantBuffer b = ConstantBuffer::from_nodes(nodes, f, 2 * f.spec().row_bytes());
  CHECK(b.contains(7));
  CHECK(b.contains(3));
  CHECK_FALSE(b.contains(0));
  CHECK_THROWS_AS(ConstantBuffer::from_nodes(nodes, f, f.spec().row_bytes()), ParameterError);
  const std::vector<NodeId> out_of_range = {10};
  CHECK_THROWS_AS(ConstantBuffer::from_nodes(out_of_range, f, 1 << 20), ParameterError);
}

TEST_CASE("redirect fraction equals the access mass of the pinned set") {
  const std::uint64_t n = 5000;
  const FeatureStore f = store(n);
  const std::vector<NodeId> trace = zipf_seeds(n, 50'000, 1.1, 3);
  // Score nodes by a fixed popularity proxy unrelated to the trace order.
  std::vector<double> scores(n);
  for (NodeId v = 0; v < n; ++v) scores[v] = static_cast<double>(splitmix64(v) % 1000);
  const ConstantBuffer b = ConstantBuffer::from_scores(scores, f, 500 * f.spec().row_bytes());

  std::vector<std::uint64_t> freq(n, 0);
  for (NodeId v : trace) ++freq[v];
  std::uint64_t mass = 0;
  for (NodeId v : b.pinned_nodes()) mass += freq[v];
  std::uint64_t redirected = 0;
  for (NodeId v : trace) redirected += b.lookup(v) ? 1 : 0;
  CHECK(redirected == mass);
}

TEST_CASE("content hash reflects the pinned rows") {
  const FeatureStore f = store(50);
  const std::vector<NodeId> a = {1, 2, 3};
  const std::vector<NodeId> c = {1, 2, 4};
  const auto ha = ConstantBuffer::from_nodes(a, f, 1 << 20).content_hash();
  CHECK(ha == ConstantBuffer::from_nodes(a, f, 1 << 20).content_hash());
  CHECK(ha != ConstantBuffer::from_nodes(c, f, 1 << 20).content_hash());
}
