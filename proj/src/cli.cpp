// Copyright 2026 The nnkgraph Authors.
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


#include "nnk/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nnk/dataset.hpp"
#include "nnk/error.hpp"
#include "nnk/graph_builder.hpp"
#include "nnk/kernel.hpp"
#include "nnk/neighbors.hpp"
#include "nnk/spectral.hpp"
#include "nnk/threads.hpp"
#include "nnk/verification.hpp"

namespace nnk {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Reads {"threads": 2, "build": {"k": 30, "kernel": {"kind": "gaussian",
// "sigma_sq": 0.5}}}. Keys match long flag names, '_' and '-' alike.
class ConfigJSON : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
  }

  static std::string scalar(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config value for '" + key + "' must be a scalar");
  }

  static void flatten(const json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object() && key == "kernel") {
        // kernel spec object: {"kind": ..., "sigma_sq": ...}
        for (const auto& [k2, v2] : value.items()) {
          const std::string name = k2 == "kind" ? "kernel" : flag_name(k2);
          items.push_back({parents, name, {scalar(v2, k2)}});
        }
      } else if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        flatten(value, sub, items);
      } else if (value.is_array()) {
        CLI::ConfigItem item{parents, flag_name(key), {}};
        for (const auto& v : value) item.inputs.push_back(scalar(v, key));
        items.push_back(std::move(item));
      } else {
        items.push_back({parents, flag_name(key), {scalar(value, key)}});
      }
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct DataOptions {
  std::string input;
  bool labels = false;
  bool header = false;
  std::string idx_images;
  std::string idx_labels;
  bool swiss_roll = false;
  Index n = 1000;
  double noise = 0.0;
  std::string sampling = "nonuniform";
  std::uint64_t data_seed = 0;
};

void add_data_options(CLI::App* sub, DataOptions& d, bool generator) {
  auto* input = sub->add_option("--input", d.input, "Point CSV, one row per point");
  sub->add_flag("--labels", d.labels, "Last CSV column is an integer class label");
  sub->add_flag("--header", d.header, "Skip the first CSV row");
  auto* images = sub->add_option("--idx-images", d.idx_images, "IDX image file");
  auto* idx_labels = sub->add_option("--idx-labels", d.idx_labels, "IDX label file");
  images->needs(idx_labels);
  idx_labels->needs(images);
  input->excludes(images);
  if (generator) {
    auto* roll = sub->add_flag("--swiss-roll", d.swiss_roll, "Generate a swiss roll");
    roll->excludes(input)->excludes(images);
    sub->add_option("--n", d.n, "Generated points")->check(CLI::Range(Index{1}, Index{10000000}));
    sub->add_option("--noise", d.noise, "Generator noise std")->check(CLI::NonNegativeNumber);
    sub->add_option("--sampling", d.sampling, "uniform or nonuniform")
        ->check(CLI::IsMember({"uniform", "nonuniform"}));
    sub->add_option("--data-seed", d.data_seed, "Generator seed");
  }
}

SwissRollConfig roll_config(const DataOptions& d, std::uint64_t seed) {
  SwissRollConfig cfg;
  cfg.n_points = d.n;
  cfg.noise_std = d.noise;
  cfg.sampling = d.sampling == "uniform" ? Sampling::uniform : Sampling::nonuniform;
  cfg.seed = seed;
  return cfg;
}

PointSet load_points(const DataOptions& d) {
  if (!d.idx_images.empty()) return load_idx(d.idx_images, d.idx_labels);
  if (!d.input.empty()) {
    CsvOptions opts;
    opts.has_label_column = d.labels;
    opts.skip_header = d.header;
    return load_csv(d.input, opts);
  }
  if (d.swiss_roll) return make_swiss_roll(roll_config(d, d.data_seed));
  throw InvalidArgument("no data source: give --input, --idx-images or --swiss-roll");
}

struct KernelOptions {
  std::string kind = "gaussian";
  double sigma_sq = 0.0;
  bool sigma_auto = false;
  CLI::Option* sigma_opt = nullptr;
};

void add_kernel_options(CLI::App* sub, KernelOptions& k) {
  sub->add_option("--kernel", k.kind, "gaussian or cosine_at_node")
      ->check(CLI::IsMember({"gaussian", "cosine_at_node"}));
  k.sigma_opt = sub->add_option("--sigma-sq", k.sigma_sq, "Gaussian bandwidth sigma^2")
                    ->check(CLI::PositiveNumber);
  auto* autoflag = sub->add_flag("--sigma-auto", k.sigma_auto,
                                 "Bandwidth from the mean K-th neighbor distance (default)");
  autoflag->excludes(k.sigma_opt);
}

KernelSpec resolve_kernel(const KernelOptions& k, const NeighborList& neighbors) {
  if (k.kind == "cosine_at_node") return KernelSpec::cosine_at_node();
  if (k.sigma_opt->count() > 0) return KernelSpec::gaussian(k.sigma_sq);
  return KernelSpec::gaussian(bandwidth_from_neighbors(neighbors));
}

LleConstraint lle_constraint_from(const std::string& name) {
  return name == "nonneg" ? LleConstraint::nonneg : LleConstraint::nonneg_sum1;
}

SparseGraph build_graph(const PointSet& ps, const NeighborList& neighbors,
                        BuilderTag tag, const KernelSpec& spec, LleConstraint lle) {
  switch (tag) {
    case BuilderTag::nnk:
      return build_nnk(ps, neighbors, spec);
    case BuilderTag::nnk_mp:
      return build_nnk_greedy(ps, neighbors, spec, GreedyMode::mp);
    case BuilderTag::nnk_omp:
      return build_nnk_greedy(ps, neighbors, spec, GreedyMode::omp);
    case BuilderTag::knn:
      return build_knn(ps, neighbors, spec);
    case BuilderTag::lle_pos:
      return build_lle_positive(ps, neighbors.k(), lle);
  }
  throw InvalidArgument("unknown builder");
}

std::vector<std::string> builder_names() {
  return {"nnk", "nnk_mp", "nnk_omp", "knn", "lle_pos"};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IOError("cannot write " + path.string());
  f << text;
  if (!f) throw IOError("write failed for " + path.string());
}

// --- build ---------------------------------------------------------------

struct BuildOptions {
  DataOptions data;
  KernelOptions kernel;
  std::string method = "nnk";
  std::string lle_constraint = "sum1";
  Index k = 10;
  double threshold = 1e-8;
  std::string out;
  std::string header_out;
};

int cmd_build(const BuildOptions& o, std::ostream& out) {
  const auto ps = load_points(o.data);
  const auto start = std::chrono::steady_clock::now();
  const auto neighbors = knn_search(ps, o.k);
  const auto spec = resolve_kernel(o.kernel, neighbors);
  auto g = build_graph(ps, neighbors, builder_tag_from_string(o.method), spec,
                       lle_constraint_from(o.lle_constraint));
  const double elapsed = seconds_since(start);

  std::erase_if(g.edges, [&](const Edge& e) { return !(e.weight > o.threshold); });
  write_edge_list(g, o.out);
  fs::path header = o.header_out;
  if (header.empty()) {
    header = o.out;
    header = header.extension() == ".json" ? fs::path(o.out + ".header.json")
                                           : header.replace_extension(".json");
  }
  write_text(header, graph_header_json(g, o.threshold) + "\n");

  out << "n=" << g.n << " edges=" << g.edges.size()
      << " density=" << num(edge_density(g, o.threshold))
      << " build_seconds=" << num(elapsed);
  if (g.kernel && g.kernel->kind == KernelKind::gaussian) {
    out << " sigma_sq=" << num(g.kernel->sigma_sq);
  }
  if (g.dropped_neighbors > 0) out << " dropped_neighbors=" << g.dropped_neighbors;
  out << "\n";
  return kExitOk;
}

// --- density-sweep ---------------------------------------------------------

struct SweepOptions {
  DataOptions data;
  KernelOptions kernel;
  std::vector<Index> ks{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  std::vector<std::string> methods{"knn", "nnk", "nnk_mp"};
  std::string lle_constraint = "sum1";
  Index sigma_k = 0;
  double threshold = 1e-8;
  std::string out;
};

int cmd_density_sweep(const SweepOptions& o, std::ostream& out) {
  const auto ps = load_points(o.data);
  std::optional<KernelSpec> fixed;
  if (o.sigma_k > 0 && o.kernel.kind == "gaussian" && o.kernel.sigma_opt->count() == 0) {
    fixed = KernelSpec::gaussian(bandwidth_from_neighbors(ps, o.sigma_k));
  }
  std::ostringstream csv;
  csv << "builder,K,density,seconds\n";
  for (Index k : o.ks) {
    const auto search_start = std::chrono::steady_clock::now();
    const auto neighbors = knn_search(ps, k);
    const double search_seconds = seconds_since(search_start);
    const auto spec = fixed ? *fixed : resolve_kernel(o.kernel, neighbors);
    for (const auto& m : o.methods) {
      const auto start = std::chrono::steady_clock::now();
      const auto g = build_graph(ps, neighbors, builder_tag_from_string(m), spec,
                                 lle_constraint_from(o.lle_constraint));
      const double elapsed = seconds_since(start) + search_seconds;
      csv << m << ',' << k << ',' << num(edge_density(g, o.threshold)) << ','
          << num(elapsed) << '\n';
    }
  }
  if (!o.out.empty()) write_text(o.out, csv.str());
  out << csv.str();
  return kExitOk;
}

// --- ssl -----------------------------------------------------------------

struct SslOptions {
  DataOptions data;
  std::vector<std::string> methods{"knn", "nnk"};
  std::vector<std::string> laplacians{"combinatorial", "sym_normalized"};
  Index k = 30;
  std::vector<Index> ks;
  std::vector<double> fractions{0.1};
  int trials = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_ssl(const SslOptions& o, std::ostream& out) {
  const auto ps = load_points(o.data);
  if (!ps.has_labels()) throw NoLabels("ssl needs labeled input (--labels or --idx-labels)");

  SslConfig cfg;
  cfg.builders.clear();
  for (const auto& m : o.methods) cfg.builders.push_back(builder_tag_from_string(m));
  cfg.laplacians.clear();
  for (const auto& l : o.laplacians) cfg.laplacians.push_back(laplacian_kind_from_string(l));
  cfg.label_fractions = o.fractions;
  cfg.n_trials = o.trials;
  cfg.seed = o.seed;

  SslTable table;
  const auto ks = o.ks.empty() ? std::vector<Index>{o.k} : o.ks;
  for (Index k : ks) {
    cfg.k = k;
    auto part = ssl_experiment(ps, cfg);
    table.trials.insert(table.trials.end(), part.trials.begin(), part.trials.end());
    table.aggregates.insert(table.aggregates.end(), part.aggregates.begin(),
                            part.aggregates.end());
  }
  write_ssl_csv(table, o.out);

  out << "builder,laplacian,K,fraction,mean,std,build_seconds,edge_density\n";
  for (const auto& a : table.aggregates) {
    out << to_string(a.builder) << ',' << to_string(a.laplacian) << ',' << a.k << ','
        << num(a.fraction) << ',' << num(a.mean) << ',' << num(a.stddev) << ','
        << num(a.build_seconds) << ',' << num(a.edge_density) << '\n';
  }
  return kExitOk;
}

// --- verify ----------------------------------------------------------------

struct VerifyOptions {
  std::vector<std::string> checks{"qp_oracle", "kri", "plane", "polytope",
                                  "lle_equivalence", "lle_equivalence_unit_directions",
                                  "objective_dominance"};
  Index instances = 1000;
  Index clouds = 100;
  Index datasets = 50;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  json report = json::array();
  bool clean = true;
  for (const auto& c : o.checks) {
    VerifyResult r;
    if (c == "qp_oracle") {
      r = verify_qp_oracle(o.instances, o.seed);
    } else if (c == "kri") {
      r = verify_kri(o.instances, o.seed);
    } else if (c == "plane") {
      r = verify_plane(o.clouds, o.seed);
    } else if (c == "polytope") {
      r = verify_polytope(o.clouds, o.seed);
    } else if (c == "lle_equivalence") {
      r = verify_lle(o.datasets, o.seed, LleComparison::observation_space);
    } else if (c == "lle_equivalence_unit_directions") {
      r = verify_lle(o.datasets, o.seed, LleComparison::unit_directions);
    } else {
      r = verify_objective_dominance(o.clouds, o.seed);
    }
    clean = clean && r.ok();
    report.push_back({{"check", r.check},
                      {"n_cases", r.n_cases},
                      {"n_violations", r.n_violations},
                      {"max_deviation", r.max_deviation}});
  }
  const std::string text = report.dump(2) + "\n";
  if (!o.out.empty()) write_text(o.out, text);
  out << text;
  return clean ? kExitOk : kExitViolations;
}

// --- make-dataset ------------------------------------------------------------

struct MakeOptions {
  DataOptions data;
  std::string kind = "swiss_roll";
  Index per_class = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_make_dataset(const MakeOptions& o, std::ostream& out) {
  PointSet ps;
  if (o.kind == "swiss_roll") {
    ps = make_swiss_roll(roll_config(o.data, o.seed));
  } else {
    const auto source = load_points(o.data);
    ps = o.kind == "usps_subsample" ? subsample_usps_style(source, o.seed)
                                    : subsample_per_class(source, o.per_class, o.seed);
  }
  save_csv(ps, o.out);
  out << "wrote " << ps.size() << " points of dimension " << ps.dim() << " to " << o.out
      << "\n";
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return kExitConfig;
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  return kExitSolver;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse graph construction by non-negative kernel regression", "nnkgraph"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<ConfigJSON>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = library default)")
      ->check(CLI::NonNegativeNumber);

  const auto methods = builder_names();
  const std::vector<std::string> laplacians{"combinatorial", "sym_normalized", "L", "sym"};

  BuildOptions build;
  auto* build_cmd = app.add_subcommand("build", "Build one graph");
  add_data_options(build_cmd, build.data, true);
  add_kernel_options(build_cmd, build.kernel);
  build_cmd->add_option("--method", build.method, "Graph builder")->check(CLI::IsMember(methods));
  build_cmd->add_option("--lle-constraint", build.lle_constraint, "nonneg or sum1")
      ->check(CLI::IsMember({"nonneg", "sum1"}));
  build_cmd->add_option("--k", build.k, "Neighbors per node")
      ->check(CLI::Range(Index{1}, Index{1000000}));
  build_cmd->add_option("--threshold", build.threshold, "Edge weight threshold")
      ->check(CLI::NonNegativeNumber);
  build_cmd->add_option("--out", build.out, "Edge list CSV")->required();
  build_cmd->add_option("--header-out", build.header_out, "JSON header (default: next to --out)");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("density-sweep", "Edge density against K");
  add_data_options(sweep_cmd, sweep.data, true);
  add_kernel_options(sweep_cmd, sweep.kernel);
  sweep_cmd->add_option("--ks", sweep.ks, "K values")->check(CLI::Range(Index{1}, Index{1000000}));
  sweep_cmd->add_option("--methods", sweep.methods, "Graph builders")
      ->check(CLI::IsMember(methods));
  sweep_cmd->add_option("--lle-constraint", sweep.lle_constraint, "nonneg or sum1")
      ->check(CLI::IsMember({"nonneg", "sum1"}));
  sweep_cmd->add_option("--sigma-k", sweep.sigma_k,
                        "Fix the bandwidth from this neighbor count for all K")
      ->check(CLI::Range(Index{1}, Index{1000000}));
  sweep_cmd->add_option("--threshold", sweep.threshold, "Edge weight threshold")
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--out", sweep.out, "Result CSV (also printed)");

  SslOptions ssl;
  auto* ssl_cmd = app.add_subcommand("ssl", "Label propagation experiment");
  add_data_options(ssl_cmd, ssl.data, false);
  ssl_cmd->add_option("--methods", ssl.methods, "Graph builders")->check(CLI::IsMember(methods));
  ssl_cmd->add_option("--laplacians", ssl.laplacians, "Laplacian kinds")
      ->check(CLI::IsMember(laplacians));
  auto* ssl_k = ssl_cmd->add_option("--k", ssl.k, "Neighbors per node")
                    ->check(CLI::Range(Index{1}, Index{1000000}));
  ssl_cmd->add_option("--ks", ssl.ks, "Several K values")
      ->check(CLI::Range(Index{1}, Index{1000000}))
      ->excludes(ssl_k);
  ssl_cmd->add_option("--fractions", ssl.fractions, "Labeled fractions")
      ->check(CLI::Range(0.0, 1.0));
  ssl_cmd->add_option("--trials", ssl.trials, "Label draws per fraction")
      ->check(CLI::Range(1, 100000));
  ssl_cmd->add_option("--seed", ssl.seed, "Label reveal seed");
  ssl_cmd->add_option("--out", ssl.out, "Per-trial CSV")->required();

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Randomized property suites");
  verify_cmd->add_option("--checks", verify.checks, "Suites to run")
      ->check(CLI::IsMember(verify.checks));
  verify_cmd->add_option("--instances", verify.instances, "Instances for qp_oracle and kri")
      ->check(CLI::Range(Index{1}, Index{100000000}));
  verify_cmd->add_option("--clouds", verify.clouds, "Clouds for plane/polytope/objective")
      ->check(CLI::Range(Index{1}, Index{1000000}));
  verify_cmd->add_option("--datasets", verify.datasets, "Datasets for the LLE suites")
      ->check(CLI::Range(Index{1}, Index{1000000}));
  verify_cmd->add_option("--seed", verify.seed, "Suite seed");
  verify_cmd->add_option("--out", verify.out, "JSON report (also printed)");

  MakeOptions make;
  auto* make_cmd = app.add_subcommand("make-dataset", "Generate or subsample a dataset");
  add_data_options(make_cmd, make.data, true);
  make_cmd->add_option("--kind", make.kind, "swiss_roll, usps_subsample or per_class")
      ->check(CLI::IsMember({"swiss_roll", "usps_subsample", "per_class"}));
  make_cmd->add_option("--per-class", make.per_class, "Points kept per class")
      ->check(CLI::Range(Index{1}, Index{100000000}));
  make_cmd->add_option("--seed", make.seed, "Generator / subsample seed");
  make_cmd->add_option("--out", make.out, "Output CSV")->required();

  try {
    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitConfig;
  }

  try {
    if (threads > 0) set_max_threads(threads);
    if (build_cmd->parsed()) return cmd_build(build, out);
    if (sweep_cmd->parsed()) return cmd_density_sweep(sweep, out);
    if (ssl_cmd->parsed()) return cmd_ssl(ssl, out);
    if (verify_cmd->parsed()) return cmd_verify(verify, out);
    if (make_cmd->parsed()) {
      if (make.kind != "swiss_roll" && make.data.input.empty() && make.data.idx_images.empty()) {
        throw InvalidArgument("--kind " + make.kind + " needs labeled --input or --idx-images");
      }
      return cmd_make_dataset(make, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitConfig;
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace nnk
