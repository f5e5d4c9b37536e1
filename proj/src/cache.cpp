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

#include "tierload/cache.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "tierload/error.hpp"

namespace tierload {

const char* to_string(LineState s) {
  switch (s) {
    case LineState::kEmpty:
      return "Empty";
    case LineState::kSafeToEvict:
      return "SafeToEvict";
    case LineState::kInUse:
      return "InUse";
  }
  return "?";
}

void WindowBuffer::push(std::vector<NodeId> unique_nodes) {
  if (full()) {
    throw ProtocolError(fmt::format("window buffer of depth {} is full; pop before pushing", depth_));
  }
  std::sort(unique_nodes.begin(), unique_nodes.end());
  if (std::adjacent_find(unique_nodes.begin(), unique_nodes.end()) != unique_nodes.end()) {
    throw ProtocolError("window buffer lists must be deduplicated");
  }
  lists_.push_back(std::move(unique_nodes));
}

void WindowBuffer::pop() {
  if (lists_.empty()) throw ProtocolError("pop from an empty window buffer");
  lists_.pop_front();
}

bool WindowBuffer::contains(std::size_t i, NodeId node) const {
  const auto& list = lists_.at(i);
  return std::binary_search(list.begin(), list.end(), node);
}

double CacheStats::hit_ratio() const {
  const std::uint64_t total = hits + misses + bypasses;
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

void WindowedCache::SafeIndex::add(std::uint64_t slot, std::int64_t delta) {
  for (std::uint64_t i = slot + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
}

std::uint64_t WindowedCache::SafeIndex::find_kth(std::uint64_t k) const {
  std::uint64_t pos = 0;
  std::uint64_t step = 1;
  while (step * 2 < tree_.size()) step *= 2;
  auto remaining = static_cast<std::int64_t>(k);
  for (; step > 0; step /= 2) {
    if (pos + step < tree_.size() && tree_[pos + step] <= remaining) {
      pos += step;
      remaining -= tree_[pos];
    }
  }
  return pos;  // 1-based index pos+1 holds the element, i.e. slot `pos`
}

WindowedCache::WindowedCache(std::uint64_t capacity_lines, std::uint64_t line_bytes,
                             std::uint64_t eviction_seed, std::uint64_t row_bytes)
    : lines_(capacity_lines),
      line_bytes_(line_bytes),
      row_bytes_(row_bytes),
      safe_(capacity_lines),
      eviction_rng_(eviction_seed) {
  if (row_bytes_ > line_bytes_) {
    throw InfeasibleConfigError(fmt::format("feature row of {} bytes does not fit a {}-byte cache line",
                                            row_bytes_, line_bytes_));
  }
}

CacheStats WindowedCache::stats() const {
  CacheStats s;
  s.hits = tallies_.hits.load(std::memory_order_relaxed);
  s.misses = tallies_.misses.load(std::memory_order_relaxed);
  s.bypasses = tallies_.bypasses.load(std::memory_order_relaxed);
  s.evictions = tallies_.evictions.load(std::memory_order_relaxed);
  s.predicted = tallies_.predicted.load(std::memory_order_relaxed);
  s.consumed = tallies_.consumed.load(std::memory_order_relaxed);
  s.expired = tallies_.expired.load(std::memory_order_relaxed);
  return s;
}

std::optional<std::uint64_t> WindowedCache::slot_of(NodeId node) const {
  const auto it = resident_.find(node);
  if (it == resident_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> WindowedCache::line_key(std::uint64_t slot) const {
  const Line& line = lines_.at(slot);
  if (line.state == LineState::kEmpty) return std::nullopt;
  return line.key;
}

std::uint32_t WindowedCache::reuse_counter(NodeId node) const {
  const auto it = predicted_.find(node);
  return it == predicted_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

std::span<std::byte> WindowedCache::line_data(std::uint64_t slot) {
  if (slot >= next_empty_ || row_bytes_ == 0) throw std::out_of_range("cache line holds no data");
  return std::span(data_).subspan(slot * row_bytes_, row_bytes_);
}

std::span<const std::byte> WindowedCache::line_data(std::uint64_t slot) const {
  if (slot >= next_empty_ || row_bytes_ == 0) throw std::out_of_range("cache line holds no data");
  return std::span(data_).subspan(slot * row_bytes_, row_bytes_);
}

void WindowedCache::set_state(std::uint64_t slot, LineState state) {
  Line& line = lines_[slot];
  if (line.state == state) return;
  if (line.state == LineState::kSafeToEvict) {
    safe_.add(slot, -1);
    --safe_count_;
  }
  if (state == LineState::kSafeToEvict) {
    safe_.add(slot, +1);
    ++safe_count_;
  }
  line.state = state;
}

void WindowedCache::expire_stale(NodeId node) {
  const auto it = predicted_.find(node);
  if (it == predicted_.end()) return;
  auto& iters = it->second;
  const auto live = std::lower_bound(iters.begin(), iters.end(), iteration_);
  const auto stale = static_cast<std::uint64_t>(live - iters.begin());
  if (stale == 0) return;
  tallies_.expired.fetch_add(stale, std::memory_order_relaxed);
  iters.erase(iters.begin(), live);
  if (iters.empty()) {
    predicted_.erase(it);
    if (const auto slot = slot_of(node)) set_state(*slot, LineState::kSafeToEvict);
  }
}

std::vector<ReuseEntry> WindowedCache::window_update(const WindowBuffer& window,
                                                     std::span<const NodeId> current_batch) {
  iteration_ = updates_++;
  while (!due_.empty() && due_.begin()->first < iteration_) {
    for (NodeId node : due_.begin()->second) expire_stale(node);
    due_.erase(due_.begin());
  }
  std::vector<ReuseEntry> report;
  report.reserve(current_batch.size());
  std::unordered_set<NodeId> seen;
  for (NodeId node : current_batch) {
    if (!seen.insert(node).second) continue;
    expire_stale(node);
    std::uint32_t occurrences = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
      if (!window.contains(i, node)) continue;
      ++occurrences;
      const std::uint64_t future = iteration_ + 1 + i;
      auto& iters = predicted_[node];
      if (!iters.empty() && iters.back() >= future) continue;  // already registered
      iters.push_back(future);
      due_[future].push_back(node);
      bump(tallies_.predicted);
      if (iters.size() == 1) {
        if (const auto slot = slot_of(node)) set_state(*slot, LineState::kInUse);
      }
    }
    report.push_back({node, occurrences});
  }
  return report;
}

AccessResult WindowedCache::access(NodeId node) {
  expire_stale(node);
  if (auto it = predicted_.find(node); it != predicted_.end() && it->second.front() == iteration_) {
    it->second.erase(it->second.begin());
    bump(tallies_.consumed);
    if (it->second.empty()) predicted_.erase(it);
  }
  const bool reused_later = predicted_.contains(node);

  if (const auto slot = slot_of(node)) {
    bump(tallies_.hits);
    if (!reused_later) set_state(*slot, LineState::kSafeToEvict);
    return {AccessKind::kHit, slot, std::nullopt};
  }

  std::uint64_t slot = 0;
  std::optional<NodeId> evicted;
  if (next_empty_ < lines_.size()) {
    slot = next_empty_++;
    data_.resize(next_empty_ * row_bytes_);
  } else if (safe_count_ > 0) {
    slot = safe_.find_kth(eviction_rng_.below(safe_count_));
    evicted = lines_[slot].key;
    if (lines_[slot].state != LineState::kSafeToEvict || predicted_.contains(*evicted)) {
      throw std::logic_error(fmt::format("eviction picked node {} with pending reuse", *evicted));
    }
    resident_.erase(*evicted);
    set_state(slot, LineState::kEmpty);
    bump(tallies_.evictions);
  } else {
    bump(tallies_.bypasses);
    return {AccessKind::kBypass, std::nullopt, std::nullopt};
  }

  bump(tallies_.misses);
  lines_[slot].key = node;
  set_state(slot, reused_later ? LineState::kInUse : LineState::kSafeToEvict);
  resident_.emplace(node, slot);
  return {AccessKind::kMiss, slot, evicted};
}

}  // namespace tierload
