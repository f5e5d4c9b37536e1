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

#include "tierload/dataloader.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tierload/bounded_queue.hpp"
#include "tierload/error.hpp"
#include "tierload/graph_io.hpp"
#include "tierload/pagerank.hpp"

namespace tierload {
namespace {

constexpr double kMinStorageShare = 0.05;  // caps threshold inflation at 20x
constexpr std::int64_t kPicosPerSecond = 1'000'000'000'000LL;

// ceil(amount * 1e12 / rate) picoseconds.
std::int64_t transfer_ps(std::uint64_t amount, std::uint64_t rate) {
  if (rate == 0 || amount == 0) return 0;
  const detail::Uint128 num = static_cast<detail::Uint128>(amount) * kPicosPerSecond;
  return static_cast<std::int64_t>((num + rate - 1) / rate);
}

std::vector<NodeId> read_node_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open pinned node list {}", path));
  std::vector<NodeId> nodes;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::size_t used = 0;
      nodes.push_back(std::stoull(line.substr(first), &used));
    } catch (const std::exception&) {
      throw ParameterError(fmt::format("{}: not a node id: \"{}\"", path, line));
    }
  }
  return nodes;
}

}  // namespace

std::uint64_t PipelineConfig::effective_cache_lines() const {
  return cache_lines > 0 ? cache_lines : cache_bytes / page_bytes;
}

void PipelineConfig::validate() const {
  if (graph_path.empty() && num_nodes == 0) throw ParameterError("num_nodes must be >= 1");
  Fanouts checked(fanouts);
  (void)checked;
  if (batch_size == 0) throw ParameterError("batch_size must be >= 1");
  if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
    throw std::domain_error(fmt::format("target_fraction {} outside (0, 1)", target_fraction));
  }
  if (!(redirect_ema_alpha > 0.0 && redirect_ema_alpha <= 1.0)) {
    throw ParameterError("redirect_ema_alpha must be in (0, 1]");
  }
  if (!(cpu_buffer_fraction >= 0.0 && cpu_buffer_fraction <= 1.0)) {
    throw ParameterError("cpu_buffer_fraction must be in [0, 1]");
  }
  if (!(pagerank_damping > 0.0 && pagerank_damping < 1.0)) {
    throw ParameterError("pagerank_damping must be in (0, 1)");
  }
  if (!(zipf_exponent >= 0.0)) throw ParameterError("zipf_exponent must be >= 0");
  if (cpu_bandwidth == 0) throw ParameterError("cpu_bandwidth must be > 0");
  if (iterations == 0) throw ParameterError("iterations must be >= 1");
  if (max_lookahead == 0) throw ParameterError("max_lookahead must be >= 1");
  ssd.validate();
  FeatureSpec{0, feature_dim, 4, page_bytes}.validate();
  if (ssd.page_bytes != page_bytes) {
    throw ParameterError(fmt::format("SSD page size {} differs from feature page size {}",
                                     ssd.page_bytes, page_bytes));
  }
}

// Produces mini-batches in stream order, either inline or from a prefetch
// thread. Batch k is sampled with a generator derived from (seed, k), so both
// modes yield identical batches.
class BatchSource {
 public:
  BatchSource(const GraphCsc& graph, Fanouts fanouts, SeedSchedule schedule,
              std::uint64_t sampler_seed, bool threaded, std::uint64_t prefetch_depth)
      : graph_(graph),
        fanouts_(std::move(fanouts)),
        schedule_(std::move(schedule)),
        sampler_seed_(sampler_seed),
        queue_(prefetch_depth) {
    if (threaded) producer_ = std::thread([this] { produce(); });
  }

  ~BatchSource() {
    queue_.close();
    if (producer_.joinable()) producer_.join();
  }

  std::optional<MiniBatch> next() {
    if (producer_.joinable()) return queue_.pop();
    return sample(next_index_++);
  }

 private:
  std::optional<MiniBatch> sample(std::uint64_t k) {
    const std::optional<std::vector<NodeId>> seeds = schedule_.batch(k);
    if (!seeds) return std::nullopt;
    SamplerRng rng(derive_seed(sampler_seed_, k));
    MiniBatch batch = sample_subgraph(graph_, *seeds, fanouts_, rng);
    batch.index = k;
    return batch;
  }

  void produce() {
    for (std::uint64_t k = 0;; ++k) {
      std::optional<MiniBatch> batch = sample(k);
      if (!batch || !queue_.push(std::move(*batch))) break;
    }
    queue_.close();
  }

  const GraphCsc& graph_;
  Fanouts fanouts_;
  SeedSchedule schedule_;
  std::uint64_t sampler_seed_;
  std::uint64_t next_index_ = 0;
  BoundedQueue<MiniBatch> queue_;
  std::thread producer_;
};

Dataloader::Dataloader(PipelineConfig cfg) : cfg_(std::move(cfg)), window_(0) {
  cfg_.validate();

  graph_ = cfg_.graph_path.empty()
               ? generate_synthetic(cfg_.num_nodes, cfg_.avg_degree, cfg_.degree_model, cfg_.graph_seed)
               : load_graph(cfg_.graph_path);
  const std::uint64_t n = graph_.num_nodes();
  if (n == 0) throw ParameterError("graph has no nodes");

  if (cfg_.feature_path.empty()) {
    FeatureSpec spec{n, cfg_.feature_dim, 4, cfg_.page_bytes};
    features_ = std::make_unique<FeatureStore>(FeatureStore::procedural(spec, cfg_.feature_seed));
  } else {
    features_ = std::make_unique<FeatureStore>(load_features(cfg_.feature_path, cfg_.page_bytes));
    if (features_->spec().num_nodes != n) {
      throw ParameterError(fmt::format("feature table has {} rows but the graph has {} nodes",
                                       features_->spec().num_nodes, n));
    }
  }
  const std::uint64_t row_bytes = features_->spec().row_bytes();
  if (row_bytes > cfg_.page_bytes) {
    throw InfeasibleConfigError(fmt::format(
        "feature row of {} bytes exceeds the {}-byte page; multi-page rows are unsupported",
        row_bytes, cfg_.page_bytes));
  }

  const auto pinned_rows = static_cast<std::uint64_t>(std::floor(cfg_.cpu_buffer_fraction * static_cast<double>(n)));
  const std::uint64_t budget = pinned_rows * row_bytes;
  if (!cfg_.pinned_nodes_path.empty()) {
    buffer_ = ConstantBuffer::from_nodes(read_node_list(cfg_.pinned_nodes_path), *features_, budget);
  } else if (budget > 0) {
    PageRankOptions opts;
    opts.damping = cfg_.pagerank_damping;
    scores_ = reverse_pagerank(graph_, opts).scores;
    buffer_ = ConstantBuffer::from_scores(scores_, *features_, budget);
  }

  const std::uint64_t lines = cfg_.effective_cache_lines();
  if (lines > 0) {
    cache_ = std::make_unique<WindowedCache>(lines, cfg_.page_bytes, cfg_.cache_seed, row_bytes);
  }
  window_depth_ = cache_ ? cfg_.window_depth : 0;
  window_ = WindowBuffer(window_depth_);

  std::vector<NodeId> seed_set;
  if (cfg_.seed_mode == SeedMode::kZipf) {
    const std::uint64_t count = cfg_.seed_count > 0 ? cfg_.seed_count : n;
    seed_set = zipf_seeds(n, count, cfg_.zipf_exponent, derive_seed(cfg_.sampler_seed, 0x5eed));
  } else {
    seed_set.resize(n);
    for (NodeId v = 0; v < n; ++v) seed_set[v] = v;
  }
  SeedSchedule schedule(std::move(seed_set), cfg_.batch_size, cfg_.shuffle, cfg_.sampler_seed, cfg_.epochs);
  source_ = std::make_unique<BatchSource>(graph_, Fanouts(cfg_.fanouts), std::move(schedule),
                                          cfg_.sampler_seed, cfg_.threaded, cfg_.prefetch_depth);

  base_threshold_ = required_accesses(cfg_.ssd, cfg_.target_fraction);
  effective_threshold_ = base_threshold_;
}

Dataloader::~Dataloader() = default;

AccumulatorState Dataloader::accumulator() const {
  return {base_threshold_, effective_threshold_, pending_.size(), pending_storage_, redirect_ema_};
}

std::uint64_t Dataloader::estimate_storage(const MiniBatch& batch) const {
  std::uint64_t count = 0;
  for (NodeId v : batch.unique_nodes) {
    if (buffer_.contains(v)) continue;
    if (cache_ && cache_->resident(v)) continue;
    ++count;
  }
  return count;
}

// Window holds the batches with index in (current, current + W].
void Dataloader::sync_window(std::uint64_t current_index) {
  for (const Pending& p : pending_) {
    if (window_.full()) break;
    const std::uint64_t k = p.batch.index;
    if (k <= current_index || k > current_index + window_depth_) continue;
    if (window_back_index_ && k <= *window_back_index_) continue;
    window_.push(p.batch.unique_nodes);
    if (!window_front_index_) window_front_index_ = k;
    window_back_index_ = k;
  }
}

void Dataloader::run_ahead() {
  while (!exhausted_) {
    const bool need_window = pending_.size() < window_depth_ + 1;
    if (!need_window) {
      if (pending_storage_ >= effective_threshold_) break;
      if (pending_storage_ == 0) break;  // everything pending is redirected
      if (pending_.size() >= std::max<std::uint64_t>(window_depth_ + 1, cfg_.max_lookahead)) break;
    }
    std::optional<MiniBatch> batch = source_->next();
    if (!batch) {
      exhausted_ = true;
      break;
    }
    const std::uint64_t estimate = estimate_storage(*batch);
    pending_.push_back({std::move(*batch), estimate});
    pending_storage_ += estimate;
    sync_window(pending_.front().batch.index);
  }
}

std::optional<PreparedBatch> Dataloader::next_batch() {
  run_ahead();
  if (pending_.empty()) return std::nullopt;

  const std::uint64_t dispatch_storage = pending_storage_;
  if (dispatch_storage >= effective_threshold_) threshold_reached_ = true;
  PreparedBatch out;
  out.batch = std::move(pending_.front().batch);
  pending_storage_ -= pending_.front().storage_estimate;
  pending_.pop_front();

  const std::uint64_t current = out.batch.index;
  if (window_front_index_ && *window_front_index_ == current) {
    window_.pop();
    window_front_index_ = window_.size() > 0 ? std::optional(current + 1) : std::nullopt;
    if (!window_front_index_) window_back_index_.reset();
  }
  sync_window(current);

  IterationStats& st = out.stats;
  st.iteration = served_++;
  st.pending_storage_at_dispatch = dispatch_storage;
  st.effective_threshold = effective_threshold_;
  st.threshold_reached = threshold_reached_;
  st.seeds_remaining = !exhausted_;

  const std::vector<NodeId>& nodes = out.batch.unique_nodes;
  const std::uint64_t row_bytes = features_->spec().row_bytes();
  st.sampled_nodes = nodes.size();
  out.rows.resize(nodes.size() * row_bytes);

  if (cache_) cache_->window_update(window_, nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    const std::span<std::byte> dst = std::span(out.rows).subspan(i * row_bytes, row_bytes);
    std::optional<AccessResult> cached;
    if (cache_) {
      cached = cache_->access(v);
      if (cached->kind == AccessKind::kHit) {
        const auto line = cache_->line_data(*cached->slot);
        std::memcpy(dst.data(), line.data(), row_bytes);
        ++st.cache_hits;
        continue;
      }
    }
    if (const auto pinned = buffer_.lookup(v)) {
      std::memcpy(dst.data(), pinned->data(), row_bytes);
      ++st.cpu_buffer_hits;
    } else {
      features_->read_row(v, dst);
      if (cached && cached->kind == AccessKind::kBypass) {
        ++st.bypasses;
      } else {
        ++st.ssd_accesses;
      }
    }
    if (cached && cached->kind == AccessKind::kMiss) {
      const auto line = cache_->line_data(*cached->slot);
      std::memcpy(line.data(), dst.data(), row_bytes);
    }
  }

  // The batch's SSD reads drain alongside everything still accumulated.
  const std::uint64_t reads = st.ssd_reads();
  if (reads > 0) {
    st.in_flight = reads + pending_storage_;
    const FetchTiming timing = simulate_fetch(cfg_.ssd, st.in_flight);
    const SimTime share = timing.total() * SimTime(reads, st.in_flight);
    st.ssd_time_ps = to_picoseconds(share);
    st.ssd_fraction = timing.achieved_fraction;
  }
  st.cpu_time_ps = transfer_ps(st.cpu_buffer_hits * row_bytes, cfg_.cpu_bandwidth);
  const std::int64_t pcie_ps =
      transfer_ps(reads * cfg_.page_bytes + st.cpu_buffer_hits * row_bytes, cfg_.pcie_bandwidth);
  st.fetch_time_ps = std::max({st.ssd_time_ps, st.cpu_time_ps, pcie_ps});
  st.train_time_ps = transfer_ps(st.sampled_nodes, cfg_.consumption_rate);
  clock_ps_ += std::max(st.fetch_time_ps, st.train_time_ps);
  st.cumulative_time_ps = clock_ps_;

  const double bytes = static_cast<double>(st.sampled_nodes * row_bytes);
  st.effective_bandwidth = st.fetch_time_ps > 0
                               ? bytes / (static_cast<double>(st.fetch_time_ps) / kPicosPerSecond)
                               : std::numeric_limits<double>::infinity();
  if (st.sampled_nodes > 0) {
    st.redirect_fraction = static_cast<double>(st.cache_hits + st.cpu_buffer_hits) /
                           static_cast<double>(st.sampled_nodes);
  }
  redirect_ema_ = cfg_.redirect_ema_alpha * st.redirect_fraction +
                  (1.0 - cfg_.redirect_ema_alpha) * redirect_ema_;
  const double storage_share = std::max(kMinStorageShare, 1.0 - redirect_ema_);
  effective_threshold_ =
      static_cast<std::uint64_t>(std::ceil(static_cast<double>(base_threshold_) / storage_share - 1e-9));
  return out;
}

RunResult Dataloader::run(std::uint64_t iterations, const Observer& observer) {
  RunResult result;
  std::int64_t clock_origin = 0;
  std::uint64_t ssd_iterations = 0;
  double ssd_fraction_sum = 0.0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cpu_hits = 0;
  RunSummary& sum = result.summary;
  for (std::uint64_t i = 0; i < cfg_.warmup + iterations; ++i) {
    std::optional<PreparedBatch> prepared = next_batch();
    if (!prepared) break;
    const bool measured = i >= cfg_.warmup;
    if (observer) observer(*prepared, measured);
    if (!measured) {
      clock_origin = prepared->stats.cumulative_time_ps;
      continue;
    }
    IterationStats st = prepared->stats;
    st.iteration = sum.iterations++;
    st.cumulative_time_ps -= clock_origin;
    sum.sampled_nodes += st.sampled_nodes;
    cache_hits += st.cache_hits;
    cpu_hits += st.cpu_buffer_hits;
    sum.prep_time_ps += st.fetch_time_ps;
    sum.train_time_ps += st.train_time_ps;
    sum.total_time_ps += std::max(st.fetch_time_ps, st.train_time_ps);
    if (st.ssd_reads() > 0) {
      ++ssd_iterations;
      ssd_fraction_sum += st.ssd_fraction;
    }
    result.stats.push_back(st);
  }
  if (sum.sampled_nodes > 0) {
    const auto total = static_cast<double>(sum.sampled_nodes);
    sum.cache_hit_ratio = static_cast<double>(cache_hits) / total;
    sum.cpu_buffer_hit_ratio = static_cast<double>(cpu_hits) / total;
    sum.redirect_fraction = static_cast<double>(cache_hits + cpu_hits) / total;
    const double bytes = total * static_cast<double>(features_->spec().row_bytes());
    sum.mean_effective_bandwidth =
        sum.prep_time_ps > 0 ? bytes / (static_cast<double>(sum.prep_time_ps) / kPicosPerSecond)
                             : std::numeric_limits<double>::infinity();
  }
  if (ssd_iterations > 0) sum.mean_ssd_fraction = ssd_fraction_sum / static_cast<double>(ssd_iterations);
  return result;
}

namespace {
std::string fixed_us(std::int64_t ps) {
  const char* sign = ps < 0 ? "-" : "";
  const std::uint64_t mag = ps < 0 ? static_cast<std::uint64_t>(-ps) : static_cast<std::uint64_t>(ps);
  return fmt::format("{}{}.{:06}", sign, mag / 1'000'000, mag % 1'000'000);
}

std::string gbps(double bytes_per_s) {
  if (std::isinf(bytes_per_s)) return "inf";
  return fmt::format("{:.6f}", bytes_per_s / 1e9);
}
}  // namespace

void write_stats_csv(std::ostream& out, std::span<const IterationStats> stats) {
  out << "iteration,sampled_nodes,cache_hits,cpu_buffer_hits,ssd_accesses,bypasses,"
         "redirect_fraction,fetch_time_us,effective_bandwidth_gbps,cumulative_time_us\n";
  for (const IterationStats& s : stats) {
    fmt::print(out, "{},{},{},{},{},{},{:.6f},{},{},{}\n", s.iteration, s.sampled_nodes,
               s.cache_hits, s.cpu_buffer_hits, s.ssd_accesses, s.bypasses, s.redirect_fraction,
               fixed_us(s.fetch_time_ps), gbps(s.effective_bandwidth), fixed_us(s.cumulative_time_ps));
  }
}

void write_summary(std::ostream& out, const RunSummary& s) {
  fmt::print(out, "iterations: {}\n", s.iterations);
  fmt::print(out, "sampled_nodes: {}\n", s.sampled_nodes);
  fmt::print(out, "mean_effective_bandwidth_gbps: {}\n", gbps(s.mean_effective_bandwidth));
  fmt::print(out, "cache_hit_ratio: {:.6f}\n", s.cache_hit_ratio);
  fmt::print(out, "cpu_buffer_hit_ratio: {:.6f}\n", s.cpu_buffer_hit_ratio);
  fmt::print(out, "redirect_fraction: {:.6f}\n", s.redirect_fraction);
  fmt::print(out, "mean_ssd_fraction: {:.6f}\n", s.mean_ssd_fraction);
  fmt::print(out, "prep_time_us: {}\n", fixed_us(s.prep_time_ps));
  fmt::print(out, "train_time_us: {}\n", fixed_us(s.train_time_ps));
  fmt::print(out, "total_time_us: {}\n", fixed_us(s.total_time_ps));
}

}  // namespace tierload
