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

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/dense_pagerank.hpp"
#include "tierload/cli.hpp"
#include "tierload/config.hpp"
#include "tierload/error.hpp"
#include "tierload/graph.hpp"
#include "tierload/graph_io.hpp"
#include "tierload/rng.hpp"
#include "unit/temp_dir.hpp"

using namespace tierload;
using testing_support::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::map<std::string, std::string> summary_of(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(": ");
    if (colon != std::string::npos) out[line.substr(0, colon)] = line.substr(colon + 2);
  }
  return out;
}

const std::string kConfigs = std::string(TIERLOAD_SOURCE_DIR) + "/configs/";

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"simulate", "--help"}).code == 0);
  CHECK(cli({"simulate", "--help"}).out.find("--window-depth") != std::string::npos);
  CHECK(cli({}).code == kExitParameter);
  CHECK(cli({"frobnicate"}).code == kExitParameter);
}

TEST_CASE("gen writes loadable, reproducible files") {
  TempDir dir;
  const std::string a = (dir / "a").string();
  const std::string b = (dir / "b").string();
  const Outcome r = cli({"gen", "--nodes", "10000", "--avg-degree", "15", "--dim", "8", "--seed", "4", "--out", a});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("nodes: 10000") != std::string::npos);
  const GraphCsc g = load_graph(a + ".gcsc");
  CHECK(g.num_nodes() == 10'000);
  CHECK(r.out.find("edges: " + std::to_string(g.num_edges())) != std::string::npos);
  CHECK(load_features(a + ".gfea").spec().num_nodes == 10'000);

  REQUIRE(cli({"gen", "--nodes", "10000", "--avg-degree", "15", "--dim", "8", "--seed", "4", "--out", b}).code == 0);
  CHECK(testing_support::slurp(a + ".gcsc") == testing_support::slurp(b + ".gcsc"));
  CHECK(testing_support::slurp(a + ".gfea") == testing_support::slurp(b + ".gfea"));
}

TEST_CASE("gen error codes") {
  TempDir dir;
  const Outcome bad = cli({"gen", "--nodes", "100", "--exponent", "0.5", "--out", (dir / "x").string()});
  CHECK(bad.code == kExitParameter);
  CHECK(bad.err.find("exponent") != std::string::npos);
  CHECK(cli({"gen", "--nodes", "100", "--model", "zipfish", "--out", (dir / "x").string()}).code == kExitParameter);
  CHECK(cli({"gen", "--nodes", "100", "--out", (dir / "no/such/dir/x").string()}).code == kExitIo);
}

TEST_CASE("model table") {
  const Outcome r = cli({"model", "--preset", "intel-optane"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 13);  // header, 0, then 16..16384
  CHECK(rows[0] == std::vector<std::string>{"n_access", "model_fraction", "sim_fraction", "model_bw_gbps", "sim_bw_gbps"});
  CHECK(rows[1][0] == "0");
  CHECK(std::stod(rows[1][1]) == 0.0);
  CHECK(std::stod(rows[1][2]) == 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::abs(std::stod(rows[i][1]) - std::stod(rows[i][2])) <= 0.02);
    if (rows[i][0] == "1024") CHECK(std::stod(rows[i][2]) >= 0.95);
  }

  const Outcome f = cli({"model", "--fractions", "0.5,0.95"});
  REQUIRE(f.code == 0);
  const auto frows = parse_csv(f.out);
  REQUIRE(frows.size() == 3);
  CHECK(frows[2][1] == "855");

  CHECK(cli({"model", "--preset", "floppy"}).code == kExitParameter);
  CHECK(cli({"model", "--fractions", "1.0"}).code == kExitParameter);
}

TEST_CASE("pagerank output") {
  TempDir dir;
  EdgeList cycle;
  for (NodeId v = 0; v < 6; ++v) cycle.emplace_back(v, (v + 1) % 6);
  save_graph(dir / "cycle.gcsc", build_csc(cycle, 6));
  const Outcome c = cli({"pagerank", (dir / "cycle.gcsc").string()});
  REQUIRE(c.code == 0);
  const auto crows = parse_csv(c.out);
  REQUIRE(crows.size() == 7);
  CHECK(crows[0] == std::vector<std::string>{"node_id", "score"});
  for (std::size_t i = 1; i < crows.size(); ++i) {
    CHECK(crows[i][0] == std::to_string(i - 1));
    CHECK(std::stod(crows[i][1]) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }

  Rng rng(12);
  EdgeList edges;
  for (int i = 0; i < 800; ++i) edges.emplace_back(rng.below(200), rng.below(200));
  save_graph(dir / "rand.gcsc", build_csc(edges, 200));
  const Outcome r = cli({"pagerank", (dir / "rand.gcsc").string(), "--tol", "1e-13", "--max-iter", "1000"});
  REQUIRE(r.code == 0);
  EdgeList rev;
  for (const auto& [u, v] : edges) rev.emplace_back(v, u);
  const std::vector<double> want = oracle::dense_pagerank(200, rev, 0.85);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 201);
  double prev = 2.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double s = std::stod(rows[i][1]);
    CHECK(s <= prev);
    prev = s;
    CHECK(std::abs(s - want[std::stoull(rows[i][0])]) <= 1e-9);
  }

  // The default tolerance bounds the remaining error by tol * d / (1 - d).
  for (const auto& row : parse_csv(cli({"pagerank", (dir / "rand.gcsc").string()}).out)) {
    if (row[0] == "node_id") continue;
    CHECK(std::abs(std::stod(row[1]) - want[std::stoull(row[0])]) <= 1e-8 * 0.85 / 0.15);
  }

  const Outcome top0 = cli({"pagerank", (dir / "rand.gcsc").string(), "--topk", "0"});
  CHECK(top0.code == 0);
  CHECK(top0.out == "node_id,score\n");
  CHECK(parse_csv(cli({"pagerank", (dir / "rand.gcsc").string(), "--topk", "5"}).out).size() == 6);
  CHECK(cli({"pagerank", (dir / "missing.gcsc").string()}).code == kExitIo);
  testing_support::spit(dir / "junk.gcsc", "not a graph");
  CHECK(cli({"pagerank", (dir / "junk.gcsc").string()}).code == kExitIo);
}

TEST_CASE("simulate with the desk config") {
  TempDir dir;
  const std::string csv = (dir / "stats.csv").string();
  const Outcome r = cli({"simulate", "--config", kConfigs + "desk.json", "--iterations", "5", "--out", csv});
  REQUIRE(r.code == 0);
  const std::string text = testing_support::slurp(csv);
  CHECK(text.substr(0, text.find('\n')) ==
        "iteration,sampled_nodes,cache_hits,cpu_buffer_hits,ssd_accesses,bypasses,redirect_fraction,"
        "fetch_time_us,effective_bandwidth_gbps,cumulative_time_us");
  CHECK(parse_csv(text).size() == 6);
  const auto summary = summary_of(r.out);
  CHECK(summary.at("iterations") == "5");
  CHECK(summary.contains("mean_effective_bandwidth_gbps"));
  CHECK(summary.contains("cache_hit_ratio"));
  CHECK(summary.contains("total_time_us"));
}

TEST_CASE("simulate is byte-for-byte repeatable") {
  const std::vector<std::string> args = {"simulate", "--config", kConfigs + "desk.json", "--iterations", "8"};
  const Outcome a = cli(args);
  const Outcome b = cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("lookahead does not lower the hit ratio on the locality workload") {
  const auto run = [](const std::string& depth) {
    const Outcome r = cli({"simulate", "--config", kConfigs + "locality.json", "--window-depth", depth,
                           "--iterations", "60", "--out", "/dev/null"});
    REQUIRE(r.code == 0);
    return std::stod(summary_of(r.out).at("cache_hit_ratio"));
  };
  CHECK(run("8") >= run("0"));
}

TEST_CASE("simulate error codes") {
  TempDir dir;
  testing_support::spit(dir / "unknown.json", R"({"num_nodes": 100, "colour": "blue"})");
  const Outcome unknown = cli({"simulate", "--config", (dir / "unknown.json").string()});
  CHECK(unknown.code == kExitParameter);
  CHECK(unknown.err.find("colour") != std::string::npos);
  testing_support::spit(dir / "broken.json", "{\"num_nodes\": ");
  CHECK(cli({"simulate", "--config", (dir / "broken.json").string()}).code == kExitParameter);
  CHECK(cli({"simulate", "--config", (dir / "missing.json").string()}).code == kExitIo);
  CHECK(cli({"simulate", "--num-nodes", "500", "--feature-dim", "2048", "--iterations", "1"}).code == kExitInfeasible);
  CHECK(cli({"simulate", "--num-nodes", "500", "--target-fraction", "1.0"}).code == kExitParameter);
  CHECK(cli({"simulate", "--set", "bogus=1"}).code == kExitParameter);
  CHECK(cli({"simulate", "--num-nodes", "500", "--graph-path", (dir / "none.gcsc").string()}).code == kExitIo);
}

TEST_CASE("config precedence: flag over file over default") {
  TempDir dir;
  testing_support::spit(dir / "c.json", R"({"batch_size": 128, "window_depth": 2, "fanouts": [7, 2]})");
  const PipelineConfig file_only = load_config((dir / "c.json").string());
  CHECK(file_only.batch_size == 128);
  CHECK(file_only.window_depth == 2);
  CHECK(file_only.fanouts == std::vector<std::uint32_t>{7, 2});
  CHECK(file_only.num_nodes == PipelineConfig{}.num_nodes);

  const PipelineConfig flagged = load_config((dir / "c.json").string(), {{"window_depth", "6"}, {"fanouts", "3,3,3"}});
  CHECK(flagged.window_depth == 6);
  CHECK(flagged.batch_size == 128);
  CHECK(flagged.fanouts == std::vector<std::uint32_t>{3, 3, 3});

  const PipelineConfig ssd = parse_config(R"({"ssd_preset": "samsung-980pro", "n_ssd": 2, "t_term_us": 7.5})");
  CHECK(ssd.ssd.iop_peak == 700'000);
  CHECK(ssd.ssd.n_ssd == 2);
  CHECK(ssd.ssd.t_term_ns == 7'500);
  CHECK_THROWS_AS(parse_config(R"({"ssd_preset": "tape"})"), ParameterError);
  CHECK_THROWS_AS(parse_config(R"({"batch_size": -4})"), ParameterError);
  CHECK_THROWS_AS(parse_config(R"({"shuffle": "yes"})"), ParameterError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ParameterError);
}

TEST_CASE("every config key has a parseable default") {
  const PipelineConfig defaults = parse_config("");
  const PipelineConfig from_doc = parse_config(default_config_json());
  CHECK(defaults.num_nodes == from_doc.num_nodes);
  CHECK(defaults.ssd.t_init_ns == from_doc.ssd.t_init_ns);
  CHECK(config_keys().size() > 30);
  for (const ConfigKey& k : config_keys()) CHECK_FALSE(k.help.empty());
}
