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

#include "nnk/spectral.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>

#include "nnk/error.hpp"
#include "nnk/kernel.hpp"
#include "nnk/neighbors.hpp"

namespace nnk {

namespace {

constexpr Index kDenseLimit = 2000;

std::vector<Index> components(const SparseGraph& g) {
  std::vector<Index> parent(static_cast<std::size_t>(g.n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) {
    const Index a = find(e.i), b = find(e.j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  for (Index v = 0; v < g.n; ++v) parent[v] = find(v);
  return parent;
}

Eigen::VectorXd degree_vector(const SparseGraph& g) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(g.n);
  for (const auto& e : g.edges) {
    d(e.i) += e.weight;
    d(e.j) += e.weight;
  }
  return d;
}

Eigen::MatrixXd solve_spd(const SparseMatrix& a, const Eigen::MatrixXd& rhs) {
  if (a.rows() <= kDenseLimit) {
    Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(a)};
    if (llt.info() != Eigen::Success) {
      throw SingularSystem("harmonic system is not positive definite");
    }
    return llt.solve(rhs);
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-8);
  cg.compute(a);
  Eigen::MatrixXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success) {
    throw SingularSystem("conjugate gradient did not converge");
  }
  return x;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

SparseGraph build_for_ssl(const PointSet& ps, const NeighborList& neighbors,
                          BuilderTag tag, const KernelSpec& spec) {
  switch (tag) {
    case BuilderTag::nnk: return build_nnk(ps, neighbors, spec);
    case BuilderTag::nnk_mp: return build_nnk_greedy(ps, neighbors, spec, GreedyMode::mp);
    case BuilderTag::nnk_omp: return build_nnk_greedy(ps, neighbors, spec, GreedyMode::omp);
    case BuilderTag::knn: return build_knn(ps, neighbors, spec);
    case BuilderTag::lle_pos:
      return build_lle_positive(ps, neighbors.k(), LleConstraint::nonneg_sum1);
  }
  throw InvalidArgument("unknown builder");
}

}  // namespace

std::string_view to_string(LaplacianKind kind) {
  return kind == LaplacianKind::combinatorial ? "combinatorial" : "sym_normalized";
}

LaplacianKind laplacian_kind_from_string(std::string_view name) {
  if (name == "combinatorial" || name == "L") return LaplacianKind::combinatorial;
  if (name == "sym_normalized" || name == "sym") return LaplacianKind::sym_normalized;
  throw InvalidArgument("unknown Laplacian '" + std::string(name) + "'");
}

SparseMatrix adjacency_matrix(const SparseGraph& g) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * g.edges.size());
  for (const auto& e : g.edges) {
    t.emplace_back(e.i, e.j, e.weight);
    t.emplace_back(e.j, e.i, e.weight);
  }
  SparseMatrix w(g.n, g.n);
  w.setFromTriplets(t.begin(), t.end());
  return w;
}

SparseMatrix laplacian(const SparseGraph& g, LaplacianKind kind) {
  if (g.n == 0) throw InvalidArgument("empty graph");
  const Eigen::VectorXd d = degree_vector(g);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * g.edges.size() + g.n);
  if (kind == LaplacianKind::combinatorial) {
    for (Index v = 0; v < g.n; ++v) t.emplace_back(v, v, d(v));
    for (const auto& e : g.edges) {
      t.emplace_back(e.i, e.j, -e.weight);
      t.emplace_back(e.j, e.i, -e.weight);
    }
  } else {
    for (Index v = 0; v < g.n; ++v) {
      if (d(v) > 0.0) t.emplace_back(v, v, 1.0);
    }
    for (const auto& e : g.edges) {
      const double s = e.weight / std::sqrt(d(e.i) * d(e.j));
      t.emplace_back(e.i, e.j, -s);
      t.emplace_back(e.j, e.i, -s);
    }
  }
  SparseMatrix l(g.n, g.n);
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

LabelField propagate_labels(const SparseGraph& g, std::span<const int> labels,
                            LaplacianKind kind, int n_classes) {
  if (static_cast<Index>(labels.size()) != g.n) {
    throw DimensionMismatch("labels length does not match graph size");
  }
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  if (max_label < 0) throw NoLabels("no labeled nodes");
  const int c = std::max(n_classes, max_label + 1);

  LabelField field;
  field.scores = Eigen::MatrixXd::Zero(g.n, c);
  field.decided.assign(static_cast<std::size_t>(g.n), kUnlabeled);
  field.unreachable.assign(static_cast<std::size_t>(g.n), false);

  const auto comp = components(g);
  std::vector<bool> comp_labeled(static_cast<std::size_t>(g.n), false);
  for (Index v = 0; v < g.n; ++v) {
    if (labels[v] >= 0) {
      comp_labeled[comp[v]] = true;
      field.scores(v, labels[v]) = 1.0;
    }
  }
  // Position of each solvable unlabeled node in the reduced system.
  std::vector<Index> slot(static_cast<std::size_t>(g.n), -1);
  Index n_free = 0;
  for (Index v = 0; v < g.n; ++v) {
    if (labels[v] >= 0) continue;
    if (comp_labeled[comp[v]]) {
      slot[v] = n_free++;
    } else {
      field.unreachable[v] = true;
    }
  }

  if (n_free > 0) {
    const Eigen::VectorXd d = degree_vector(g);
    std::vector<Eigen::Triplet<double>> t;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_free, c);
    for (Index v = 0; v < g.n; ++v) {
      if (slot[v] < 0) continue;
      t.emplace_back(slot[v], slot[v],
                     kind == LaplacianKind::combinatorial ? d(v) : 1.0);
    }
    for (const auto& e : g.edges) {
      const double w = kind == LaplacianKind::combinatorial
                           ? e.weight
                           : e.weight / std::sqrt(d(e.i) * d(e.j));
      for (auto [u, v] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
        if (slot[u] < 0) continue;
        if (slot[v] >= 0) {
          t.emplace_back(slot[u], slot[v], -w);
        } else if (labels[v] >= 0) {
          rhs(slot[u], labels[v]) += w;
        }
      }
    }
    SparseMatrix a(n_free, n_free);
    a.setFromTriplets(t.begin(), t.end());
    const Eigen::MatrixXd f = solve_spd(a, rhs);
    for (Index v = 0; v < g.n; ++v) {
      if (slot[v] >= 0) field.scores.row(v) = f.row(slot[v]);
    }
  }

  for (Index v = 0; v < g.n; ++v) {
    if (field.unreachable[v]) continue;
    Index best = 0;
    for (Index k = 1; k < c; ++k) {
      if (field.scores(v, k) > field.scores(v, best)) best = k;
    }
    field.decided[v] = static_cast<int>(best);
  }
  return field;
}

std::vector<int> reveal_labels(std::span<const int> truth, double fraction,
                               std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("label fraction must lie in (0, 1]");
  }
  const auto n = static_cast<Index>(truth.size());
  int n_classes = 0;
  for (int l : truth) n_classes = std::max(n_classes, l + 1);
  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(n_classes));
  for (Index v = 0; v < n; ++v) {
    if (truth[v] >= 0) by_class[truth[v]].push_back(v);
  }

  std::mt19937_64 rng(seed);
  std::vector<int> revealed(static_cast<std::size_t>(n), kUnlabeled);
  std::vector<Index> rest;
  for (auto& members : by_class) {
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);
    revealed[members.front()] = truth[members.front()];
    rest.insert(rest.end(), members.begin() + 1, members.end());
  }
  std::sort(rest.begin(), rest.end());
  std::shuffle(rest.begin(), rest.end(), rng);
  Index target = std::llround(fraction * static_cast<double>(n));
  Index have = n - static_cast<Index>(rest.size());
  for (std::size_t r = 0; r < rest.size() && have < target; ++r, ++have) {
    revealed[rest[r]] = truth[rest[r]];
  }
  return revealed;
}

const SslAggregate& SslTable::find(BuilderTag builder, LaplacianKind laplacian,
                                   Index k, double fraction) const {
  for (const auto& a : aggregates) {
    if (a.builder == builder && a.laplacian == laplacian && a.k == k &&
        std::abs(a.fraction - fraction) < 1e-12) {
      return a;
    }
  }
  throw InvalidArgument("no such aggregate row");
}

SslTable ssl_experiment(const PointSet& ps, const SslConfig& cfg) {
  if (!ps.has_labels()) throw NoLabels("SSL experiment needs a labeled point set");
  if (cfg.n_trials < 1) throw InvalidArgument("n_trials must be >= 1");
  const auto& truth = *ps.labels;
  const int n_classes = ps.num_classes();

  const auto neighbors = knn_search(ps, cfg.k);
  const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(neighbors));

  SslTable table;
  for (BuilderTag tag : cfg.builders) {
    const auto start = std::chrono::steady_clock::now();
    const auto g = build_for_ssl(ps, neighbors, tag, spec);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double density = edge_density(g);

    for (LaplacianKind lap : cfg.laplacians) {
      for (std::size_t f = 0; f < cfg.label_fractions.size(); ++f) {
        const double fraction = cfg.label_fractions[f];
        std::vector<double> errors;
        for (int trial = 0; trial < cfg.n_trials; ++trial) {
          std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                            static_cast<std::uint32_t>(cfg.seed >> 32),
                            static_cast<std::uint32_t>(f),
                            static_cast<std::uint32_t>(trial)};
          std::array<std::uint32_t, 2> words{};
          seq.generate(words.begin(), words.end());
          const std::uint64_t trial_seed =
              (std::uint64_t{words[0]} << 32) | std::uint64_t{words[1]};
          const auto revealed = reveal_labels(truth, fraction, trial_seed);
          const auto field = propagate_labels(g, revealed, lap, n_classes);

          Index wrong = 0, scored = 0, unreachable = 0;
          for (Index v = 0; v < ps.size(); ++v) {
            if (revealed[v] >= 0 || truth[v] < 0) continue;
            if (field.unreachable[v]) {
              ++unreachable;
              continue;
            }
            ++scored;
            if (field.decided[v] != truth[v]) ++wrong;
          }
          const double err = scored == 0 ? 0.0 : static_cast<double>(wrong) / scored;
          errors.push_back(err);
          table.trials.push_back(
              {tag, lap, cfg.k, fraction, trial, err, seconds, density, unreachable});
        }
        table.aggregates.push_back({tag, lap, cfg.k, fraction, mean_of(errors),
                                    stddev_of(errors), seconds, density});
      }
    }
  }
  return table;
}

void write_ssl_csv(const SslTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write " + path.string());
  out << "builder,laplacian,K,fraction,trial,misclassification,build_seconds,"
         "edge_density\n";
  char buf[256];
  for (const auto& t : table.trials) {
    std::snprintf(buf, sizeof buf, "%s,%s,%lld,%.12g,%d,%.12g,%.12g,%.12g\n",
                  std::string(to_string(t.builder)).c_str(),
                  std::string(to_string(t.laplacian)).c_str(),
                  static_cast<long long>(t.k), t.fraction, t.trial,
                  t.misclassification, t.build_seconds, t.edge_density);
    out << buf;
  }
  for (const auto& a : table.aggregates) {
    for (auto [name, value] : {std::pair{"mean", a.mean}, std::pair{"std", a.stddev}}) {
      std::snprintf(buf, sizeof buf, "%s,%s,%lld,%.12g,%s,%.12g,%.12g,%.12g\n",
                    std::string(to_string(a.builder)).c_str(),
                    std::string(to_string(a.laplacian)).c_str(),
                    static_cast<long long>(a.k), a.fraction, name, value,
                    a.build_seconds, a.edge_density);
      out << buf;
    }
  }
  if (!out) throw IOError("write failed: " + path.string());
}

}  // namespace nnk
