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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace tierload {

// Exact virtual-clock duration in seconds.
using SimTime = boost::rational<boost::multiprecision::checked_int128_t>;

SimTime from_nanoseconds(std::uint64_t ns);
double to_seconds(const SimTime& t);
double to_microseconds(const SimTime& t);
// Rounded to the nearest picosecond.
std::int64_t to_picoseconds(const SimTime& t);

// Storage array parameters.
//
// n_access counts are always the TOTAL number of reads in flight across the
// whole array; the steady phase drains them at iop_peak * n_ssd reads/s.
struct SsdSpec {
  std::uint64_t iop_peak = 1'500'000;  // per SSD, reads/s
  std::uint32_t n_ssd = 1;
  std::uint64_t t_init_ns = 25'000;    // first-access latency incl. launch overhead
  std::uint64_t t_term_ns = 5'000;
  std::uint32_t page_bytes = 4096;

  void validate() const;  // throws ParameterError
  SimTime t_init() const { return from_nanoseconds(t_init_ns); }
  SimTime t_term() const { return from_nanoseconds(t_term_ns); }
  std::uint64_t array_iops() const { return iop_peak * n_ssd; }
  double peak_bandwidth() const;  // bytes/s for the whole array
};

// Named device with the initial-phase addends kept apart.
//
// The kernel-launch/software overhead and the first device access overlap,
// so the initial phase lasts max(launch_overhead, device_latency).
struct SsdPreset {
  std::string_view name;
  std::uint64_t iop_peak;
  std::uint64_t device_latency_ns;
  std::uint64_t launch_overhead_ns;
  std::uint64_t t_term_ns;

  SsdSpec spec(std::uint32_t n_ssd = 1, std::uint32_t page_bytes = 4096) const;
};

std::span<const SsdPreset> ssd_presets();
// "intel-optane" or "samsung-980pro".
std::optional<SsdPreset> find_ssd_preset(std::string_view name);

struct FetchTiming {
  SimTime t_init;
  SimTime t_steady;
  SimTime t_term;
  std::uint64_t n_access = 0;
  double achieved_iops = 0.0;      // whole array
  double achieved_fraction = 0.0;  // achieved_iops / (iop_peak * n_ssd)

  SimTime total() const { return t_init + t_steady + t_term; }
};

// Smallest number of in-flight reads whose modeled fraction of peak IOPS
// reaches `target_fraction`:
//
//   ceil( f / (1 - f) * (t_init + t_term) * iop_peak * n_ssd )
//
// f is quantized to 1e-9 so the result is computed exactly.
// Throws std::domain_error unless 0 < f < 1.
std::uint64_t required_accesses(const SsdSpec& spec, double target_fraction);

// T_s / (T_i + T_s + T_t) with T_s = n_access / (iop_peak * n_ssd).
double achieved_fraction(const SsdSpec& spec, std::uint64_t n_access);

// Discrete-event service of n_access page reads, all outstanding at t = 0.
// Each SSD becomes ready at t_init and then completes one read per
// 1/iop_peak; the termination phase follows the last completion.
FetchTiming simulate_fetch(const SsdSpec& spec, std::uint64_t n_access);

}  // namespace tierload
