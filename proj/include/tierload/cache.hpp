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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tierload/graph.hpp"
#include "tierload/rng.hpp"

namespace tierload {

enum class LineState : std::uint8_t { kEmpty, kSafeToEvict, kInUse };

const char* to_string(LineState s);

// Deduplicated node lists of the next W iterations, nearest first.
class WindowBuffer {
 public:
  explicit WindowBuffer(std::size_t depth) : depth_(depth) {}

  // Appends the farthest iteration. The list is sorted here; duplicates are a
  // caller bug. Throws ProtocolError when the ring already holds `depth` lists
  // or the list has duplicates.
  void push(std::vector<NodeId> unique_nodes);
  // Drops the nearest iteration. Throws ProtocolError when empty.
  void pop();

  std::size_t depth() const { return depth_; }
  std::size_t size() const { return lists_.size(); }
  bool full() const { return lists_.size() >= depth_; }
  std::span<const NodeId> at(std::size_t i) const { return lists_.at(i); }
  bool contains(std::size_t i, NodeId node) const;

 private:
  std::size_t depth_;
  std::deque<std::vector<NodeId>> lists_;
};

struct ReuseEntry {
  NodeId node;
  std::uint32_t occurrences;  // future window iterations that contain node
  friend bool operator==(const ReuseEntry&, const ReuseEntry&) = default;
};

enum class AccessKind : std::uint8_t { kHit, kMiss, kBypass };

struct AccessResult {
  AccessKind kind;
  std::optional<std::uint64_t> slot;     // line now holding the node (hit/miss)
  std::optional<NodeId> evicted;         // victim of a miss, if any
  friend bool operator==(const AccessResult&, const AccessResult&) = default;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t bypasses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t predicted = 0;   // distinct (node, future iteration) reuses registered
  std::uint64_t consumed = 0;    // predicted reuses that were then accessed
  std::uint64_t expired = 0;     // predicted reuses whose iteration passed unaccessed

  // hits / (hits + misses + bypasses); 0 before any access.
  double hit_ratio() const;
  friend bool operator==(const CacheStats&, const CacheStats&) = default;
};

// Page-granularity software cache with random eviction restricted to
// Safe-to-Evict lines and lookahead pinning from a WindowBuffer.
//
// Reuse counters: window_update(window, batch) opens iteration j and, for
// every node of batch j, registers each future iteration k in (j, j+W] whose
// list contains the node. A (node, k) pair is registered once however many
// earlier iterations saw it coming. The counter is the number of registered,
// not yet realized reuses; it drops by one when the node is accessed during
// iteration k. A line is InUse exactly while its node's counter is positive
// and only Safe-to-Evict lines are eviction candidates. A reuse whose
// iteration passes without an access expires when the next iteration opens. When no Empty or
// Safe-to-Evict line exists the access bypasses the cache.
//
// Empty lines fill in slot order. The victim is the r-th Safe-to-Evict line
// in slot order, r drawn uniformly from a dedicated eviction stream.
//
// Single writer. stats() may be read from other threads.
class WindowedCache {
 public:
  // row_bytes > 0 allocates per-line data storage of that size (<= line_bytes),
  // grown as lines fill; 0 keeps the cache metadata-only.
  WindowedCache(std::uint64_t capacity_lines, std::uint64_t line_bytes,
                std::uint64_t eviction_seed, std::uint64_t row_bytes = 0);

  std::vector<ReuseEntry> window_update(const WindowBuffer& window,
                                        std::span<const NodeId> current_batch);
  AccessResult access(NodeId node);

  CacheStats stats() const;

  std::uint64_t capacity_lines() const { return lines_.size(); }
  std::uint64_t line_bytes() const { return line_bytes_; }
  std::uint64_t iteration() const { return iteration_; }

  bool resident(NodeId node) const { return resident_.contains(node); }
  std::optional<std::uint64_t> slot_of(NodeId node) const;
  LineState line_state(std::uint64_t slot) const { return lines_.at(slot).state; }
  std::optional<NodeId> line_key(std::uint64_t slot) const;
  std::uint32_t reuse_counter(NodeId node) const;
  // Nodes with a positive counter, resident or not.
  std::size_t tracked_keys() const { return predicted_.size(); }
  std::uint64_t safe_to_evict_lines() const { return safe_count_; }

  std::span<std::byte> line_data(std::uint64_t slot);
  std::span<const std::byte> line_data(std::uint64_t slot) const;

 private:
  struct Line {
    NodeId key = 0;
    LineState state = LineState::kEmpty;
  };

  // Fenwick tree over the Safe-to-Evict indicator of each slot.
  class SafeIndex {
   public:
    explicit SafeIndex(std::uint64_t n) : tree_(n + 1, 0) {}
    void add(std::uint64_t slot, std::int64_t delta);
    std::uint64_t find_kth(std::uint64_t k) const;  // 0-based rank -> slot

   private:
    std::vector<std::int64_t> tree_;
  };

  struct Tallies {
    std::atomic<std::uint64_t> hits{0}, misses{0}, bypasses{0}, evictions{0};
    std::atomic<std::uint64_t> predicted{0}, consumed{0}, expired{0};
  };

  void set_state(std::uint64_t slot, LineState state);
  void expire_stale(NodeId node);
  static void bump(std::atomic<std::uint64_t>& c) { c.fetch_add(1, std::memory_order_relaxed); }

  std::vector<Line> lines_;
  std::uint64_t line_bytes_;
  std::uint64_t row_bytes_;
  std::vector<std::byte> data_;
  std::unordered_map<NodeId, std::uint64_t> resident_;
  // Registered future iterations per node, ascending. Absent means counter 0.
  std::unordered_map<NodeId, std::vector<std::uint64_t>> predicted_;
  // Future iteration -> nodes registered for it, for expiry.
  std::map<std::uint64_t, std::vector<NodeId>> due_;
  SafeIndex safe_;
  std::uint64_t safe_count_ = 0;
  std::uint64_t next_empty_ = 0;
  std::uint64_t iteration_ = 0;
  std::uint64_t updates_ = 0;
  Rng eviction_rng_;
  Tallies tallies_;
};

}  // namespace tierload
