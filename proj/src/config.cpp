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

#include "tierload/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tierload/error.hpp"

namespace tierload {
namespace {

using nlohmann::json;

std::uint64_t as_u64(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  throw ParameterError(fmt::format("config key {}: expected a non-negative integer, got {}", key, v.dump()));
}

std::uint32_t as_u32(const json& v, const std::string& key) {
  const std::uint64_t x = as_u64(v, key);
  if (x > 0xffffffffULL) throw ParameterError(fmt::format("config key {}: {} is too large", key, x));
  return static_cast<std::uint32_t>(x);
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) {
    throw ParameterError(fmt::format("config key {}: expected a number, got {}", key, v.dump()));
  }
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) {
    throw ParameterError(fmt::format("config key {}: expected true or false, got {}", key, v.dump()));
  }
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw ParameterError(fmt::format("config key {}: expected a string, got {}", key, v.dump()));
  }
  return v.get<std::string>();
}

// Storage settings are resolved after all keys are applied: preset first,
// then individual overrides.
struct SsdKeys {
  std::string preset = "intel-optane";
  std::uint32_t n_ssd = 1;
  json iop_peak;
  json t_init_us;
  json t_term_us;
};

using Apply = std::function<void(PipelineConfig&, SsdKeys&, const json&)>;

struct Def {
  const char* name;
  const char* default_value;
  const char* help;
  Apply apply;
};

#define TL_U64(field) [](PipelineConfig& c, SsdKeys&, const json& v) { c.field = as_u64(v, #field); }
#define TL_U32(field) [](PipelineConfig& c, SsdKeys&, const json& v) { c.field = as_u32(v, #field); }
#define TL_DBL(field) [](PipelineConfig& c, SsdKeys&, const json& v) { c.field = as_double(v, #field); }
#define TL_BOOL(field) [](PipelineConfig& c, SsdKeys&, const json& v) { c.field = as_bool(v, #field); }
#define TL_STR(field) [](PipelineConfig& c, SsdKeys&, const json& v) { c.field = as_string(v, #field); }

std::uint64_t gbps_to_bytes(const json& v, const char* key) {
  const double g = as_double(v, key);
  if (!(g >= 0)) throw ParameterError(fmt::format("config key {}: must be >= 0", key));
  return static_cast<std::uint64_t>(std::llround(g * 1e9));
}

const std::vector<Def>& defs() {
  static const std::vector<Def> table = {
      {"graph_path", "\"\"", "GCSC graph file; empty generates a synthetic graph", TL_STR(graph_path)},
      {"feature_path", "\"\"", "GFEA feature file; empty uses procedural features", TL_STR(feature_path)},
      {"num_nodes", "10000", "synthetic graph size", TL_U64(num_nodes)},
      {"avg_degree", "15", "synthetic mean in-degree", TL_U64(avg_degree)},
      {"degree_model", "\"powerlaw\"", "synthetic degree model: uniform or powerlaw",
       [](PipelineConfig& c, SsdKeys&, const json& v) {
         const std::string m = as_string(v, "degree_model");
         if (m == "uniform") {
           c.degree_model = DegreeModel::uniform();
         } else if (m == "powerlaw") {
           c.degree_model = DegreeModel::powerlaw(c.degree_model.exponent);
         } else {
           throw ParameterError(fmt::format("config key degree_model: unknown model \"{}\"", m));
         }
       }},
      {"powerlaw_exponent", "2.5", "power-law exponent, > 1",
       [](PipelineConfig& c, SsdKeys&, const json& v) { c.degree_model.exponent = as_double(v, "powerlaw_exponent"); }},
      {"graph_seed", "1", "synthetic graph seed", TL_U64(graph_seed)},
      {"feature_dim", "1024", "float32 features per node", TL_U32(feature_dim)},
      {"page_bytes", "4096", "storage page and cache line size", TL_U32(page_bytes)},
      {"feature_seed", "2", "procedural feature seed", TL_U64(feature_seed)},
      {"fanouts", "[5, 5, 5]", "neighbors sampled per node, per layer",
       [](PipelineConfig& c, SsdKeys&, const json& v) {
         if (!v.is_array()) throw ParameterError("config key fanouts: expected an array");
         c.fanouts.clear();
         for (const json& f : v) c.fanouts.push_back(as_u32(f, "fanouts"));
       }},
      {"batch_size", "4096", "seed nodes per mini-batch", TL_U64(batch_size)},
      {"shuffle", "true", "reshuffle seeds every epoch", TL_BOOL(shuffle)},
      {"seed_mode", "\"all\"", "seed set: all (every node) or zipf",
       [](PipelineConfig& c, SsdKeys&, const json& v) {
         const std::string m = as_string(v, "seed_mode");
         if (m == "all") {
           c.seed_mode = SeedMode::kAllNodes;
         } else if (m == "zipf") {
           c.seed_mode = SeedMode::kZipf;
         } else {
           throw ParameterError(fmt::format("config key seed_mode: unknown mode \"{}\"", m));
         }
       }},
      {"zipf_exponent", "1.0", "Zipf skew of the seed draw", TL_DBL(zipf_exponent)},
      {"seed_count", "0", "Zipf draws per epoch; 0 means num_nodes", TL_U64(seed_count)},
      {"sampler_seed", "3", "sampling and shuffling seed", TL_U64(sampler_seed)},
      {"epochs", "0", "epochs before the loader stops; 0 is unlimited", TL_U64(epochs)},
      {"ssd_preset", "\"intel-optane\"", "intel-optane or samsung-980pro",
       [](PipelineConfig&, SsdKeys& s, const json& v) { s.preset = as_string(v, "ssd_preset"); }},
      {"n_ssd", "1", "SSDs striped together",
       [](PipelineConfig&, SsdKeys& s, const json& v) { s.n_ssd = as_u32(v, "n_ssd"); }},
      {"iop_peak", "null", "per-SSD peak reads/s; null keeps the preset",
       [](PipelineConfig&, SsdKeys& s, const json& v) { s.iop_peak = v; }},
      {"t_init_us", "null", "initial latency in microseconds; null keeps the preset",
       [](PipelineConfig&, SsdKeys& s, const json& v) { s.t_init_us = v; }},
      {"t_term_us", "null", "termination latency in microseconds; null keeps the preset",
       [](PipelineConfig&, SsdKeys& s, const json& v) { s.t_term_us = v; }},
      {"target_fraction", "0.95", "share of peak SSD throughput to sustain", TL_DBL(target_fraction)},
      {"redirect_ema_alpha", "0.2", "smoothing of the measured redirect fraction", TL_DBL(redirect_ema_alpha)},
      {"max_lookahead", "64", "most batches held ahead of the consumer", TL_U64(max_lookahead)},
      {"cache_bytes", "8589934592", "software cache size in bytes", TL_U64(cache_bytes)},
      {"cache_lines", "0", "cache size in lines; overrides cache_bytes when > 0", TL_U64(cache_lines)},
      {"window_depth", "8", "future iterations visible to the cache", TL_U32(window_depth)},
      {"cache_seed", "4", "eviction choice seed", TL_U64(cache_seed)},
      {"cpu_buffer_fraction", "0.1", "share of nodes pinned in the CPU buffer", TL_DBL(cpu_buffer_fraction)},
      {"pinned_nodes_path", "\"\"", "explicit pinned node list, one id per line", TL_STR(pinned_nodes_path)},
      {"pagerank_damping", "0.85", "reverse PageRank damping", TL_DBL(pagerank_damping)},
      {"cpu_bandwidth_gbps", "25.0", "CPU buffer to GPU rate, GB/s",
       [](PipelineConfig& c, SsdKeys&, const json& v) { c.cpu_bandwidth = gbps_to_bytes(v, "cpu_bandwidth_gbps"); }},
      {"pcie_bandwidth_gbps", "32.0", "GPU ingress cap, GB/s; 0 is uncapped",
       [](PipelineConfig& c, SsdKeys&, const json& v) { c.pcie_bandwidth = gbps_to_bytes(v, "pcie_bandwidth_gbps"); }},
      {"consumption_rate", "0", "training rate in nodes/s; 0 is infinitely fast", TL_U64(consumption_rate)},
      {"iterations", "100", "measured iterations", TL_U64(iterations)},
      {"warmup", "10", "unmeasured leading iterations", TL_U64(warmup)},
      {"threaded", "false", "sample on a producer thread", TL_BOOL(threaded)},
      {"prefetch_depth", "4", "producer queue capacity", TL_U64(prefetch_depth)},
  };
  return table;
}

#undef TL_U64
#undef TL_U32
#undef TL_DBL
#undef TL_BOOL
#undef TL_STR

const Def* find_def(std::string_view name) {
  for (const Def& d : defs()) {
    if (name == d.name) return &d;
  }
  return nullptr;
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParameterError(fmt::format("{}: {}", what, e.what()));
  }
}

// Override text: JSON if it parses, comma list for arrays, else a string.
json override_value(const Def& def, const std::string& text) {
  const json dflt = json::parse(def.default_value);
  if (dflt.is_array()) {
    json arr = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      arr.push_back(parse_json(item, fmt::format("override {}", def.name)));
    }
    return arr;
  }
  if (dflt.is_string()) return text;
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

SsdSpec resolve_ssd(const SsdKeys& s, std::uint32_t page_bytes) {
  const std::optional<SsdPreset> preset = find_ssd_preset(s.preset);
  if (!preset) throw ParameterError(fmt::format("unknown SSD preset \"{}\"", s.preset));
  SsdSpec spec = preset->spec(s.n_ssd, page_bytes);
  if (!s.iop_peak.is_null()) spec.iop_peak = as_u64(s.iop_peak, "iop_peak");
  const auto us_to_ns = [](const json& v, const char* key) {
    const double us = as_double(v, key);
    if (!(us >= 0)) throw ParameterError(fmt::format("config key {}: must be >= 0", key));
    return static_cast<std::uint64_t>(std::llround(us * 1000.0));
  };
  if (!s.t_init_us.is_null()) spec.t_init_ns = us_to_ns(s.t_init_us, "t_init_us");
  if (!s.t_term_us.is_null()) spec.t_term_ns = us_to_ns(s.t_term_us, "t_term_us");
  return spec;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const Def& d : defs()) out.push_back({d.name, d.default_value, d.help});
    return out;
  }();
  return keys;
}

PipelineConfig parse_config(std::string_view json_text, const ConfigOverrides& overrides) {
  json doc = json::object();
  if (!json_text.empty()) doc = parse_json(json_text, "config");
  if (!doc.is_object()) throw ParameterError("config: top level must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!find_def(key)) throw ParameterError(fmt::format("config: unknown key \"{}\"", key));
  }
  for (const auto& [key, text] : overrides) {
    const Def* def = find_def(key);
    if (!def) throw ParameterError(fmt::format("unknown setting \"{}\"", key));
    doc[key] = override_value(*def, text);
  }

  PipelineConfig cfg;
  SsdKeys ssd;
  for (const Def& d : defs()) {
    const auto it = doc.find(d.name);
    d.apply(cfg, ssd, it != doc.end() ? *it : json::parse(d.default_value));
  }
  cfg.ssd = resolve_ssd(ssd, cfg.page_bytes);
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read config {}", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string default_config_json() {
  json doc = json::object();
  for (const Def& d : defs()) doc[d.name] = json::parse(d.default_value);
  return doc.dump(2);
}

}  // namespace tierload
