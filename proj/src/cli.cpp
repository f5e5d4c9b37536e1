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

#include "tierload/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tierload/config.hpp"
#include "tierload/dataloader.hpp"
#include "tierload/error.hpp"
#include "tierload/features.hpp"
#include "tierload/graph_io.hpp"
#include "tierload/pagerank.hpp"
#include "tierload/storage_model.hpp"
#include "tierload/synthetic.hpp"

namespace tierload {
namespace {

std::string dashed(std::string name) {
  std::replace(name.begin(), name.end(), '_', '-');
  return name;
}

std::vector<std::uint64_t> default_sweep() {
  std::vector<std::uint64_t> ns = {0};
  for (std::uint64_t n = 16; n <= 16384; n *= 2) ns.push_back(n);
  return ns;
}

struct GenArgs {
  std::uint64_t num_nodes = 10'000;
  std::uint64_t avg_degree = 15;
  std::string model = "powerlaw";
  double exponent = 2.5;
  std::uint32_t dim = 1024;
  std::uint64_t seed = 1;
  std::string out_prefix;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  DegreeModel model;
  if (a.model == "uniform") {
    model = DegreeModel::uniform();
  } else if (a.model == "powerlaw") {
    model = DegreeModel::powerlaw(a.exponent);
  } else {
    throw ParameterError(fmt::format("unknown degree model \"{}\"", a.model));
  }
  FeatureSpec spec{a.num_nodes, a.dim, 4, 4096};
  spec.validate();
  const GraphCsc graph = generate_synthetic(a.num_nodes, a.avg_degree, model, a.seed);
  const FeatureStore features = FeatureStore::materialized(spec, derive_seed(a.seed, 1));
  save_graph(a.out_prefix + ".gcsc", graph);
  save_features(a.out_prefix + ".gfea", features);
  fmt::print(out, "nodes: {}\nedges: {}\n", graph.num_nodes(), graph.num_edges());
  return kExitOk;
}

struct ModelArgs {
  std::string preset = "intel-optane";
  std::uint32_t n_ssd = 1;
  std::uint32_t page_bytes = 4096;
  std::optional<std::uint64_t> iop_peak;
  std::optional<double> t_init_us;
  std::optional<double> t_term_us;
  std::vector<std::uint64_t> n_access;
  std::vector<double> fractions;
};

SsdSpec model_spec(const ModelArgs& a) {
  const std::optional<SsdPreset> preset = find_ssd_preset(a.preset);
  if (!preset) throw ParameterError(fmt::format("unknown SSD preset \"{}\"", a.preset));
  SsdSpec spec = preset->spec(a.n_ssd, a.page_bytes);
  if (a.iop_peak) spec.iop_peak = *a.iop_peak;
  if (a.t_init_us) spec.t_init_ns = static_cast<std::uint64_t>(std::llround(*a.t_init_us * 1000.0));
  if (a.t_term_us) spec.t_term_ns = static_cast<std::uint64_t>(std::llround(*a.t_term_us * 1000.0));
  spec.validate();
  return spec;
}

void model_row(std::ostream& out, const SsdSpec& spec, std::uint64_t n) {
  const double model = achieved_fraction(spec, n);
  const double sim = simulate_fetch(spec, n).achieved_fraction;
  const double peak_gbps = spec.peak_bandwidth() / 1e9;
  fmt::print(out, "{},{:.6f},{:.6f},{:.6f},{:.6f}\n", n, model, sim, model * peak_gbps, sim * peak_gbps);
}

int cmd_model(const ModelArgs& a, std::ostream& out) {
  const SsdSpec spec = model_spec(a);
  if (!a.fractions.empty()) {
    out << "target_fraction,n_access,model_fraction,sim_fraction,model_bw_gbps,sim_bw_gbps\n";
    for (double f : a.fractions) {
      fmt::print(out, "{},", f);
      model_row(out, spec, required_accesses(spec, f));
    }
    return kExitOk;
  }
  out << "n_access,model_fraction,sim_fraction,model_bw_gbps,sim_bw_gbps\n";
  for (std::uint64_t n : a.n_access.empty() ? default_sweep() : a.n_access) model_row(out, spec, n);
  return kExitOk;
}

struct PagerankArgs {
  std::string graph_path;
  double damping = 0.85;
  double tol = 1e-8;
  std::uint32_t max_iter = 200;
  std::optional<std::uint64_t> topk;
  bool forward = false;
};

int cmd_pagerank(const PagerankArgs& a, std::ostream& out) {
  const GraphCsc graph = load_graph(a.graph_path);
  PageRankOptions opts;
  opts.damping = a.damping;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;
  const PageRankResult result = a.forward ? pagerank(graph, opts) : reverse_pagerank(graph, opts);
  std::vector<NodeId> order = rank_by_score(result.scores);
  if (a.topk && *a.topk < order.size()) order.resize(*a.topk);
  out << "node_id,score\n";
  for (NodeId v : order) fmt::print(out, "{},{:.17g}\n", v, result.scores[v]);
  return kExitOk;
}

struct SimulateArgs {
  std::string config_path;
  std::string csv_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  ConfigOverrides overrides;
  for (const std::string& s : a.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParameterError(fmt::format("--set expects key=value, got \"{}\"", s));
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [key, value] : a.flags) overrides.emplace_back(key, value);
  const PipelineConfig cfg = a.config_path.empty() ? parse_config("", overrides) : load_config(a.config_path, overrides);

  Dataloader loader(cfg);
  const RunResult result = loader.run(cfg.iterations);
  if (a.csv_path.empty() || a.csv_path == "-") {
    write_stats_csv(out, result.stats);
    out << '\n';
  } else {
    std::ofstream csv(a.csv_path, std::ios::binary);
    if (!csv) throw IoError(fmt::format("cannot write {}", a.csv_path));
    write_stats_csv(csv, result.stats);
    if (!csv.flush()) throw IoError(fmt::format("cannot write {}", a.csv_path));
  }
  write_summary(out, result.summary);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tiered feature-loading simulator for GNN mini-batch training", "tierload"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic graph and feature table");
  gen_cmd->add_option("--nodes", gen.num_nodes, "Number of nodes")->capture_default_str();
  gen_cmd->add_option("--avg-degree", gen.avg_degree, "Mean in-degree")->capture_default_str();
  gen_cmd->add_option("--model", gen.model, "Degree model: uniform or powerlaw")->capture_default_str();
  gen_cmd->add_option("--exponent", gen.exponent, "Power-law exponent")->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "Feature dimension (float32)")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out_prefix, "Output prefix; writes <prefix>.gcsc and <prefix>.gfea")
      ->required();

  ModelArgs model;
  CLI::App* model_cmd = app.add_subcommand("model", "Tabulate modeled and simulated SSD throughput");
  model_cmd->add_option("--preset", model.preset, "SSD preset: intel-optane or samsung-980pro")
      ->capture_default_str();
  model_cmd->add_option("--n-ssd", model.n_ssd, "Number of SSDs")->capture_default_str();
  model_cmd->add_option("--page-bytes", model.page_bytes, "Access size in bytes")->capture_default_str();
  model_cmd->add_option("--iop-peak", model.iop_peak, "Override per-SSD peak reads/s");
  model_cmd->add_option("--t-init-us", model.t_init_us, "Override initial latency (us)");
  model_cmd->add_option("--t-term-us", model.t_term_us, "Override termination latency (us)");
  model_cmd->add_option("--n-access", model.n_access, "Access counts to tabulate (default 0,16..16384)")
      ->delimiter(',');
  model_cmd->add_option("--fractions", model.fractions, "Target fractions; tabulates required accesses")
      ->delimiter(',');

  PagerankArgs pr;
  CLI::App* pr_cmd = app.add_subcommand("pagerank", "Rank nodes by reverse PageRank");
  pr_cmd->add_option("graph", pr.graph_path, "GCSC graph file")->required();
  pr_cmd->add_option("--damping", pr.damping, "Damping factor")->capture_default_str();
  pr_cmd->add_option("--tol", pr.tol, "Stop once the L1 change per sweep is below this")->capture_default_str();
  pr_cmd->add_option("--max-iter", pr.max_iter, "Sweep limit")->capture_default_str();
  pr_cmd->add_option("--topk", pr.topk, "Emit only the k highest-ranked nodes");
  pr_cmd->add_flag("--forward", pr.forward, "Rank by ordinary PageRank instead");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run the pipeline and report per-iteration statistics");
  sim_cmd->add_option("--config", sim.config_path, "JSON config file");
  sim_cmd->add_option("--out", sim.csv_path, "Per-iteration CSV path (default: stdout)");
  sim_cmd->add_option("--set", sim.sets, "Override a config key: key=value");
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> key_options;
  for (const ConfigKey& key : config_keys()) {
    CLI::Option* opt = sim_cmd->add_option("--" + dashed(key.name), flag_values[key.name],
                                           fmt::format("{} [{}]", key.help, key.default_value));
    key_options.emplace_back(key.name, opt);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParameter;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*model_cmd) return cmd_model(model, out);
    if (*pr_cmd) return cmd_pagerank(pr, out);
    if (*sim_cmd) {
      for (const auto& [name, opt] : key_options) {
        if (opt->count() > 0) sim.flags[name] = flag_values[name];
      }
      return cmd_simulate(sim, out);
    }
  } catch (const InfeasibleConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInfeasible;
  } catch (const ParameterError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitParameter;
  } catch (const std::domain_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitParameter;
  } catch (const IoError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitIo;
  } catch (const FormatError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitParameter;
}

}  // namespace tierload
