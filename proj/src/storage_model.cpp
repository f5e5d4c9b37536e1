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

#include "tierload/storage_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "tierload/error.hpp"

namespace tierload {

using Int128 = boost::multiprecision::checked_int128_t;

namespace {
constexpr std::int64_t kNanosPerSecond = 1'000'000'000;
constexpr std::int64_t kFractionScale = 1'000'000'000;

double ratio_to_double(const Int128& num, const Int128& den) {
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}
}  // namespace

SimTime from_nanoseconds(std::uint64_t ns) {
  return SimTime(Int128(ns), Int128(kNanosPerSecond));
}

double to_seconds(const SimTime& t) { return ratio_to_double(t.numerator(), t.denominator()); }

double to_microseconds(const SimTime& t) {
  return ratio_to_double(t.numerator() * 1'000'000, t.denominator());
}

std::int64_t to_picoseconds(const SimTime& t) {
  const Int128 scaled = t.numerator() * Int128(1'000'000'000'000LL);
  const Int128 den = t.denominator();
  Int128 q = scaled / den;
  const Int128 r = scaled % den;
  if (r * 2 >= den) q += 1;
  return static_cast<std::int64_t>(q);
}

void SsdSpec::validate() const {
  if (iop_peak == 0) throw ParameterError("iop_peak must be > 0");
  if (n_ssd == 0) throw ParameterError("n_ssd must be >= 1");
  if (page_bytes == 0) throw ParameterError("page_bytes must be > 0");
}

double SsdSpec::peak_bandwidth() const {
  return static_cast<double>(array_iops()) * static_cast<double>(page_bytes);
}

SsdSpec SsdPreset::spec(std::uint32_t n_ssd, std::uint32_t page_bytes) const {
  SsdSpec s;
  s.iop_peak = iop_peak;
  s.n_ssd = n_ssd;
  s.t_init_ns = std::max(device_latency_ns, launch_overhead_ns);
  s.t_term_ns = t_term_ns;
  s.page_bytes = page_bytes;
  return s;
}

namespace {
constexpr std::array<SsdPreset, 2> kPresets{{
    {"intel-optane", 1'500'000, 11'000, 25'000, 5'000},
    {"samsung-980pro", 700'000, 324'000, 25'000, 5'000},
}};
}  // namespace

std::span<const SsdPreset> ssd_presets() { return kPresets; }

std::optional<SsdPreset> find_ssd_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::uint64_t required_accesses(const SsdSpec& spec, double target_fraction) {
  spec.validate();
  if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
    throw std::domain_error(fmt::format("target fraction {} outside (0, 1)", target_fraction));
  }
  const auto p = static_cast<std::int64_t>(std::llround(target_fraction * kFractionScale));
  if (p <= 0 || p >= kFractionScale) {
    throw std::domain_error(fmt::format("target fraction {} rounds to 0 or 1", target_fraction));
  }
  const Int128 num = Int128(p) * Int128(spec.t_init_ns + spec.t_term_ns) *
                     Int128(spec.iop_peak) * Int128(spec.n_ssd);
  const Int128 den = Int128(kFractionScale - p) * Int128(kNanosPerSecond);
  return static_cast<std::uint64_t>((num + den - 1) / den);
}

double achieved_fraction(const SsdSpec& spec, std::uint64_t n_access) {
  spec.validate();
  if (n_access == 0) return 0.0;
  // n / (n + (t_init + t_term) * R), everything in integer nanoseconds.
  const Int128 steady = Int128(n_access) * kNanosPerSecond;
  const Int128 overhead = Int128(spec.t_init_ns + spec.t_term_ns) * Int128(spec.array_iops());
  return ratio_to_double(steady, steady + overhead);
}

FetchTiming simulate_fetch(const SsdSpec& spec, std::uint64_t n_access) {
  spec.validate();
  // Event = one SSD finishing its k-th read at t_init + k / iop_peak. All
  // devices share rate and start time, so events order by (k, device) and
  // the clock is tracked in whole service quanta past t_init.
  using Event = std::pair<std::uint64_t, std::uint32_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> ready;
  for (std::uint32_t d = 0; d < spec.n_ssd; ++d) ready.emplace(0, d);

  std::uint64_t last_quantum = 0;
  for (std::uint64_t issued = 0; issued < n_access; ++issued) {
    auto [quantum, device] = ready.top();
    ready.pop();
    ++quantum;  // this read completes one quantum after the device frees up
    last_quantum = std::max(last_quantum, quantum);
    ready.emplace(quantum, device);
  }

  FetchTiming t;
  t.n_access = n_access;
  t.t_init = spec.t_init();
  t.t_steady = SimTime(Int128(last_quantum), Int128(spec.iop_peak));
  t.t_term = spec.t_term();
  if (n_access > 0) {
    const SimTime total = t.total();
    // achieved = n / total; fraction = achieved / (iop_peak * n_ssd)
    t.achieved_iops = ratio_to_double(Int128(n_access) * total.denominator(), total.numerator());
    t.achieved_fraction = ratio_to_double(Int128(n_access) * total.denominator(),
                                          total.numerator() * Int128(spec.array_iops()));
  }
  return t;
}

}  // namespace tierload
