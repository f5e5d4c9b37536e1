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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tierload/cache.hpp"
#include "tierload/cpu_buffer.hpp"
#include "tierload/features.hpp"
#include "tierload/graph.hpp"
#include "tierload/sampler.hpp"
#include "tierload/storage_model.hpp"
#include "tierload/synthetic.hpp"

namespace tierload {

enum class SeedMode { kAllNodes, kZipf };

// Everything one simulated run needs. Defaults follow the reference setup:
// batch 4096, three sampling layers, one Optane-class SSD, 10% of rows in the
// constant buffer, an 8 GiB cache and a window of depth 8.
struct PipelineConfig {
  // Data. Empty paths select the synthetic generator.
  std::string graph_path;
  std::string feature_path;
  std::uint64_t num_nodes = 10'000;
  std::uint64_t avg_degree = 15;
  DegreeModel degree_model = DegreeModel::powerlaw(2.5);
  std::uint64_t graph_seed = 1;
  std::uint32_t feature_dim = 1024;
  std::uint32_t page_bytes = 4096;
  std::uint64_t feature_seed = 2;

  // Sampling.
  std::vector<std::uint32_t> fanouts = {5, 5, 5};
  std::uint64_t batch_size = 4096;
  bool shuffle = true;
  SeedMode seed_mode = SeedMode::kAllNodes;
  double zipf_exponent = 1.0;
  std::uint64_t seed_count = 0;  // zipf mode; 0 means num_nodes
  std::uint64_t sampler_seed = 3;
  std::uint64_t epochs = 0;      // 0 = unlimited

  // Storage and accumulator.
  SsdSpec ssd = find_ssd_preset("intel-optane")->spec();
  double target_fraction = 0.95;
  double redirect_ema_alpha = 0.2;
  std::uint64_t max_lookahead = 64;  // pending batches, beyond the window

  // Software cache. cache_lines > 0 overrides cache_bytes / page_bytes;
  // a cache of zero lines disables the tier.
  std::uint64_t cache_bytes = std::uint64_t{8} << 30;
  std::uint64_t cache_lines = 0;
  std::uint32_t window_depth = 8;
  std::uint64_t cache_seed = 4;

  // Constant CPU buffer: share of nodes pinned, by reverse PageRank unless
  // pinned_nodes_path names an explicit list (one id per line).
  double cpu_buffer_fraction = 0.10;
  std::string pinned_nodes_path;
  double pagerank_damping = 0.85;

  // Transfer rates in bytes/s; pcie_bandwidth 0 leaves ingress uncapped.
  std::uint64_t cpu_bandwidth = 25'000'000'000;
  std::uint64_t pcie_bandwidth = 32'000'000'000;

  // Training consumption in node features per second; 0 is infinitely fast.
  std::uint64_t consumption_rate = 0;

  std::uint64_t iterations = 100;
  std::uint64_t warmup = 10;
  bool threaded = false;
  std::uint64_t prefetch_depth = 4;

  std::uint64_t effective_cache_lines() const;
  // Throws ParameterError / std::domain_error on invalid values.
  void validate() const;
};

struct IterationStats {
  std::uint64_t iteration = 0;
  std::uint64_t sampled_nodes = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cpu_buffer_hits = 0;
  std::uint64_t ssd_accesses = 0;  // SSD reads inserted into the cache (or all, cache off)
  std::uint64_t bypasses = 0;      // SSD reads that could not be cached
  double redirect_fraction = 0.0;  // (cache + cpu buffer hits) / sampled
  std::int64_t fetch_time_ps = 0;
  double effective_bandwidth = 0.0;  // bytes/s; +inf when nothing left the GPU
  std::int64_t cumulative_time_ps = 0;

  // Diagnostics outside the CSV.
  std::uint64_t in_flight = 0;               // SSD reads timed together
  std::uint64_t pending_storage_at_dispatch = 0;
  double ssd_fraction = 0.0;                 // achieved share of peak IOPS
  std::int64_t ssd_time_ps = 0;
  std::int64_t cpu_time_ps = 0;
  std::int64_t train_time_ps = 0;
  std::uint64_t effective_threshold = 0;
  bool threshold_reached = false;
  bool seeds_remaining = true;

  std::uint64_t ssd_reads() const { return ssd_accesses + bypasses; }
};

struct AccumulatorState {
  std::uint64_t base_threshold = 0;
  std::uint64_t effective_threshold = 0;
  std::uint64_t pending_batches = 0;
  std::uint64_t pending_storage_accesses = 0;
  double redirect_fraction_ema = 0.0;
};

struct PreparedBatch {
  MiniBatch batch;
  std::vector<std::byte> rows;  // unique_nodes.size() x row_bytes, same order
  IterationStats stats;
};

struct RunSummary {
  std::uint64_t iterations = 0;
  std::uint64_t sampled_nodes = 0;
  double mean_effective_bandwidth = 0.0;  // total bytes / total fetch time
  double cache_hit_ratio = 0.0;
  double cpu_buffer_hit_ratio = 0.0;
  double redirect_fraction = 0.0;
  double mean_ssd_fraction = 0.0;         // over iterations with SSD reads
  std::int64_t total_time_ps = 0;         // sum of max(prep, train)
  std::int64_t prep_time_ps = 0;
  std::int64_t train_time_ps = 0;
};

struct RunResult {
  std::vector<IterationStats> stats;
  RunSummary summary;
};

class BatchSource;

// Tiered feature-gathering pipeline on a virtual clock.
//
// Sampling runs ahead of consumption until the accumulated SSD-bound reads
// reach the accumulator threshold and the window holds the next W batches.
// Each consumed batch is served cache -> constant buffer -> SSD; its SSD
// reads are timed jointly with every read still in flight.
class Dataloader {
 public:
  explicit Dataloader(PipelineConfig cfg);
  ~Dataloader();
  Dataloader(const Dataloader&) = delete;
  Dataloader& operator=(const Dataloader&) = delete;

  void run_ahead();
  // nullopt once the seed schedule is exhausted and nothing is pending.
  std::optional<PreparedBatch> next_batch();

  // warmup (from the config) then `iterations` measured batches. The
  // observer sees every batch, warmup ones with measured == false.
  using Observer = std::function<void(const PreparedBatch&, bool measured)>;
  RunResult run(std::uint64_t iterations, const Observer& observer = {});

  const PipelineConfig& config() const { return cfg_; }
  const GraphCsc& graph() const { return graph_; }
  const FeatureStore& features() const { return *features_; }
  const ConstantBuffer& constant_buffer() const { return buffer_; }
  const WindowedCache* cache() const { return cache_.get(); }
  const WindowBuffer& window() const { return window_; }
  const std::vector<double>& scores() const { return scores_; }
  AccumulatorState accumulator() const;
  std::uint64_t window_depth() const { return window_depth_; }

 private:
  struct Pending {
    MiniBatch batch;
    std::uint64_t storage_estimate;
  };

  std::uint64_t estimate_storage(const MiniBatch& batch) const;
  void sync_window(std::uint64_t current_index);

  PipelineConfig cfg_;
  GraphCsc graph_;
  std::unique_ptr<FeatureStore> features_;
  std::vector<double> scores_;
  ConstantBuffer buffer_;
  std::unique_ptr<WindowedCache> cache_;
  std::uint64_t window_depth_;
  WindowBuffer window_;
  std::optional<std::uint64_t> window_front_index_;
  std::optional<std::uint64_t> window_back_index_;
  std::deque<Pending> pending_;
  std::unique_ptr<BatchSource> source_;
  bool exhausted_ = false;

  std::uint64_t base_threshold_;
  std::uint64_t effective_threshold_;
  std::uint64_t pending_storage_ = 0;
  double redirect_ema_ = 0.0;
  bool threshold_reached_ = false;
  std::int64_t clock_ps_ = 0;
  std::uint64_t served_ = 0;
};

// Header: iteration,sampled_nodes,cache_hits,cpu_buffer_hits,ssd_accesses,
// bypasses,redirect_fraction,fetch_time_us,effective_bandwidth_gbps,
// cumulative_time_us (bandwidth in 1e9 bytes/s).
void write_stats_csv(std::ostream& out, std::span<const IterationStats> stats);
void write_summary(std::ostream& out, const RunSummary& summary);

}  // namespace tierload
