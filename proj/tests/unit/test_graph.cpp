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
#include <cstring>
#include <numeric>
#include <vector>

#include "oracles/feature_oracle.hpp"
#include "oracles/statistics.hpp"
#include "tierload/error.hpp"
#include "tierload/features.hpp"
#include "tierload/graph.hpp"
#include "tierload/graph_io.hpp"
#include "tierload/synthetic.hpp"
#include "unit/temp_dir.hpp"

using namespace tierload;
using testing_support::TempDir;

namespace {

std::vector<double> in_degrees(const GraphCsc& g) {
  std::vector<double> d(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) d[v] = static_cast<double>(g.degree(v));
  return d;
}

double top_share(std::vector<double> d, double share) {
  std::sort(d.rbegin(), d.rend());
  const auto k = static_cast<std::size_t>(static_cast<double>(d.size()) * share);
  const double top = std::accumulate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
  return top / std::accumulate(d.begin(), d.end(), 0.0);
}

GraphCsc two_edge_graph() {
  const EdgeList edges = {{0, 1}, {2, 1}};
  return build_csc(edges, 3);
}

}  // namespace

TEST_CASE("build_csc of an empty edge list") {
  const GraphCsc g = build_csc(EdgeList{}, 3);
  CHECK(g.indptr() == std::vector<std::uint64_t>{0, 0, 0, 0});
  CHECK(g.indices().empty());
  CHECK(g.num_edges() == 0);
}

TEST_CASE("build_csc groups sources under their destination") {
  const GraphCsc g = two_edge_graph();
  CHECK(g.indptr() == std::vector<std::uint64_t>{0, 0, 2, 2});
  CHECK(g.indices() == std::vector<NodeId>{0, 2});
}

TEST_CASE("build_csc sorts in-neighbors ascending") {
  const EdgeList edges = {{4, 0}, {1, 0}, {3, 0}, {2, 4}};
  const GraphCsc g = build_csc(edges, 5);
  const auto n0 = g.neighbors(0);
  CHECK(std::vector<NodeId>(n0.begin(), n0.end()) == std::vector<NodeId>{1, 3, 4});
}

TEST_CASE("build_csc names an out-of-range endpoint") {
  const EdgeList edges = {{5, 0}};
  CHECK_THROWS_WITH_AS(build_csc(edges, 3), doctest::Contains("node 5 out of range"), ParameterError);
}

TEST_CASE("neighbors") {
  const GraphCsc g = two_edge_graph();
  CHECK(g.neighbors(0).empty());
  const auto n1 = g.neighbors(1);
  CHECK(std::vector<NodeId>(n1.begin(), n1.end()) == std::vector<NodeId>{0, 2});
  CHECK(g.degree(1) == 2);
  CHECK(build_csc(EdgeList{}, 3).neighbors(1).empty());
  CHECK_THROWS_AS(g.neighbors(3), std::out_of_range);
}

TEST_CASE("GraphCsc rejects inconsistent arrays") {
  CHECK_THROWS_AS(GraphCsc({1, 1}, {0}), CorruptDataError);
  CHECK_THROWS_AS(GraphCsc({0, 2, 1}, {0, 0}), CorruptDataError);
  CHECK_THROWS_AS(GraphCsc({0, 1}, {3}), CorruptDataError);
  CHECK_THROWS_AS(GraphCsc({0, 1, 2}, {0}), CorruptDataError);
}

TEST_CASE("transpose swaps edge direction") {
  const GraphCsc g = two_edge_graph();
  const GraphCsc t = transpose(g);
  CHECK(t.neighbors(0).size() == 1);
  CHECK(t.neighbors(0)[0] == 1);
  CHECK(t.neighbors(2)[0] == 1);
  CHECK(transpose(t) == g);
}

TEST_CASE("generate_synthetic single node") {
  const GraphCsc g = generate_synthetic(1, 0, DegreeModel::uniform(), 7);
  CHECK(g.num_nodes() == 1);
  CHECK(g.num_edges() == 0);
}

TEST_CASE("generate_synthetic is deterministic") {
  const GraphCsc a = generate_synthetic(10'000, 15, DegreeModel::uniform(), 42);
  const GraphCsc b = generate_synthetic(10'000, 15, DegreeModel::uniform(), 42);
  CHECK(a == b);
  const GraphCsc c = generate_synthetic(10'000, 15, DegreeModel::uniform(), 43);
  CHECK_FALSE(a == c);
}

TEST_CASE("generate_synthetic edge count and degree sum") {
  for (const DegreeModel model : {DegreeModel::uniform(), DegreeModel::powerlaw(2.0), DegreeModel::powerlaw(2.5)}) {
    const GraphCsc g = generate_synthetic(10'000, 15, model, 42);
    CHECK(static_cast<double>(g.num_edges()) == doctest::Approx(150'000).epsilon(0.01));
    std::uint64_t sum = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      sum += g.degree(v);
      const auto nb = g.neighbors(v);
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      CHECK(std::find(nb.begin(), nb.end(), v) == nb.end());
    }
    CHECK(sum == g.num_edges());
  }
}

TEST_CASE("power-law in-degrees are heavier tailed than uniform") {
  const GraphCsc uni = generate_synthetic(10'000, 15, DegreeModel::uniform(), 42);
  const GraphCsc pl = generate_synthetic(10'000, 15, DegreeModel::powerlaw(2.0), 42);
  CHECK(oracle::gini(in_degrees(pl)) > oracle::gini(in_degrees(uni)));
  CHECK(top_share(in_degrees(pl), 0.01) > top_share(in_degrees(uni), 0.01));
}

TEST_CASE("generate_synthetic validates parameters") {
  CHECK_THROWS_AS(generate_synthetic(10, 2, DegreeModel::powerlaw(1.0), 1), ParameterError);
  CHECK_THROWS_AS(generate_synthetic(10, 2, DegreeModel::powerlaw(0.5), 1), ParameterError);
  CHECK_THROWS_AS(generate_synthetic(0, 2, DegreeModel::uniform(), 1), ParameterError);
}

TEST_CASE("dense degree targets saturate without self loops") {
  const GraphCsc g = generate_synthetic(20, 30, DegreeModel::uniform(), 5);
  CHECK(g.num_edges() == 20 * 19);
}

TEST_CASE("graph file round trip") {
  TempDir dir;
  const GraphCsc g = two_edge_graph();
  save_graph(dir / "g.gcsc", g);
  const GraphCsc back = load_graph(dir / "g.gcsc");
  CHECK(back.indptr() == g.indptr());
  CHECK(back.indices() == g.indices());

  const GraphCsc big = generate_synthetic(2000, 8, DegreeModel::powerlaw(2.2), 3);
  save_graph(dir / "big.gcsc", big);
  CHECK(load_graph(dir / "big.gcsc") == big);
}

TEST_CASE("graph file layout is little-endian with a fixed header") {
  TempDir dir;
  save_graph(dir / "g.gcsc", two_edge_graph());
  const std::string bytes = testing_support::slurp(dir / "g.gcsc");
  REQUIRE(bytes.size() == 4 + 4 + 8 + 8 + 4 * 8 + 2 * 8);
  CHECK(bytes.substr(0, 4) == "GCSC");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 3);
  CHECK(bytes[16] == 2);
}

TEST_CASE("graph loader reports distinct failures") {
  TempDir dir;
  save_graph(dir / "g.gcsc", two_edge_graph());
  const std::string good = testing_support::slurp(dir / "g.gcsc");

  std::string bad = good;
  bad[0] = 'X';
  testing_support::spit(dir / "magic.gcsc", bad);
  CHECK_THROWS_WITH_AS(load_graph(dir / "magic.gcsc"), doctest::Contains("bad magic"), BadMagicError);

  testing_support::spit(dir / "short.gcsc", good.substr(0, good.size() - 3));
  CHECK_THROWS_AS(load_graph(dir / "short.gcsc"), TruncatedFileError);

  std::string v2 = good;
  v2[4] = 2;
  testing_support::spit(dir / "v2.gcsc", v2);
  CHECK_THROWS_AS(load_graph(dir / "v2.gcsc"), VersionMismatchError);

  testing_support::spit(dir / "long.gcsc", good + "xx");
  CHECK_THROWS_AS(load_graph(dir / "long.gcsc"), CorruptDataError);

  CHECK_THROWS_AS(load_graph(dir / "missing.gcsc"), IoError);
}

TEST_CASE("feature file round trip and row offsets") {
  TempDir dir;
  const FeatureSpec spec{100, 8, 4, 4096};
  const FeatureStore store = FeatureStore::materialized(spec, 11);
  save_features(dir / "f.gfea", store);
  const FeatureStore back = load_features(dir / "f.gfea");
  CHECK(back.spec().num_nodes == 100);
  CHECK(back.spec().dim == 8);
  CHECK(std::equal(back.bytes().begin(), back.bytes().end(), store.bytes().begin(), store.bytes().end()));

  // Row 37 sits 37 * 8 * 4 bytes into the payload after the 24-byte header.
  const std::string raw = testing_support::slurp(dir / "f.gfea");
  REQUIRE(raw.size() == 24 + 100 * 8 * 4);
  const std::vector<std::byte> row = back.row(37);
  CHECK(std::memcmp(row.data(), raw.data() + 24 + 37 * 8 * 4, 32) == 0);
  CHECK(row == oracle::feature_row(11, 37, 8));
}

TEST_CASE("feature loader reports distinct failures") {
  TempDir dir;
  save_features(dir / "f.gfea", FeatureStore::materialized({10, 4, 4, 4096}, 1));
  const std::string good = testing_support::slurp(dir / "f.gfea");
  std::string bad = good;
  bad[1] = 'X';
  testing_support::spit(dir / "magic.gfea", bad);
  CHECK_THROWS_AS(load_features(dir / "magic.gfea"), BadMagicError);
  testing_support::spit(dir / "short.gfea", good.substr(0, 30));
  CHECK_THROWS_AS(load_features(dir / "short.gfea"), TruncatedFileError);
  std::string v9 = good;
  v9[4] = 9;
  testing_support::spit(dir / "v9.gfea", v9);
  CHECK_THROWS_AS(load_features(dir / "v9.gfea"), VersionMismatchError);
}

TEST_CASE("procedural features match the direct formula") {
  const FeatureSpec spec{1000, 16, 4, 4096};
  const FeatureStore procedural = FeatureStore::procedural(spec, 99);
  const FeatureStore materialized = FeatureStore::materialized(spec, 99);
  CHECK(procedural.is_procedural());
  CHECK_FALSE(materialized.is_procedural());
  for (NodeId v : {0ULL, 1ULL, 500ULL, 999ULL}) {
    CHECK(procedural.row(v) == oracle::feature_row(99, v, 16));
    CHECK(materialized.row(v) == oracle::feature_row(99, v, 16));
  }
  CHECK_THROWS_AS(procedural.row(1000), std::out_of_range);
}

TEST_CASE("FeatureSpec validation") {
  CHECK(FeatureSpec{10, 1024, 4, 4096}.row_bytes() == 4096);
  CHECK_THROWS_AS(FeatureSpec({10, 0, 4, 4096}).validate(), ParameterError);
  CHECK_THROWS_AS(FeatureSpec({10, 8, 4, 3000}).validate(), ParameterError);
  CHECK_THROWS_AS(FeatureStore::from_bytes({2, 4, 4, 4096}, std::vector<std::byte>(31)), ParameterError);
}
