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

#include "nnk/graph_builder.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "nnk/error.hpp"
#include "nnk/nnqp.hpp"
#include "nnk/serialization.hpp"
#include "parallel.hpp"

namespace nnk {

namespace {

// Rethrows solver failures with the node id prepended, keeping the type.
template <class Fn>
auto with_node_context(Index node, Fn&& fn) {
  const auto prefix = "node " + std::to_string(node) + ": ";
  try {
    return fn();
  } catch (const SingularSystem& e) {
    throw SingularSystem(prefix + e.what());
  } catch (const NonConvergence& e) {
    throw NonConvergence(prefix + e.what());
  } catch (const DegenerateInput& e) {
    throw DegenerateInput(prefix + e.what());
  }
}

double local_objective(const LocalKernel& lk, const Eigen::VectorXd& theta) {
  return 0.5 * theta.dot(lk.support.values * theta) - lk.center.dot(theta) + 0.5;
}

SparseGraph assemble(const PointSet& ps, Index k, BuilderTag tag,
                     std::optional<KernelSpec> spec, std::vector<LocalFit> fits) {
  SparseGraph g;
  g.n = ps.size();
  g.k = k;
  g.tag = tag;
  g.kernel = spec;
  g.edges = symmetrize_by_error(g.n, fits);
  g.fits = std::move(fits);
  return g;
}

}  // namespace

std::string_view to_string(BuilderTag tag) {
  switch (tag) {
    case BuilderTag::nnk: return "nnk";
    case BuilderTag::nnk_mp: return "nnk_mp";
    case BuilderTag::nnk_omp: return "nnk_omp";
    case BuilderTag::knn: return "knn";
    case BuilderTag::lle_pos: return "lle_pos";
  }
  return "unknown";
}

BuilderTag builder_tag_from_string(std::string_view name) {
  for (auto tag : {BuilderTag::nnk, BuilderTag::nnk_mp, BuilderTag::nnk_omp,
                   BuilderTag::knn, BuilderTag::lle_pos}) {
    if (to_string(tag) == name) return tag;
  }
  throw InvalidArgument("unknown builder '" + std::string(name) + "'");
}

void LocalFit::refresh_support() {
  support.clear();
  weights.clear();
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    if (theta[a] > 0.0) {
      support.push_back(candidates[a]);
      weights.push_back(theta[a]);
    }
  }
}

std::vector<Index> SparseGraph::degrees() const {
  std::vector<Index> deg(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

std::vector<Edge> symmetrize_by_error(Index n, const std::vector<LocalFit>& fits) {
  struct Directed {
    Index lo, hi, from;
    double weight, error;
  };
  std::vector<Directed> all;
  for (const auto& fit : fits) {
    for (std::size_t a = 0; a < fit.candidates.size(); ++a) {
      const Index other = fit.candidates[a];
      if (other == fit.node || other < 0 || other >= n) {
        throw InvalidArgument("fit for node " + std::to_string(fit.node) +
                              " has an invalid candidate");
      }
      all.push_back({std::min(fit.node, other), std::max(fit.node, other),
                     fit.node, fit.theta[a], fit.objective});
    }
  }
  std::sort(all.begin(), all.end(), [](const Directed& x, const Directed& y) {
    return std::tie(x.lo, x.hi, x.from) < std::tie(y.lo, y.hi, y.from);
  });

  std::vector<Edge> edges;
  for (std::size_t s = 0; s < all.size();) {
    std::size_t e = s + 1;
    while (e < all.size() && all[e].lo == all[s].lo && all[e].hi == all[s].hi) ++e;
    // Sorted by origin, so all[s] comes from the lower index when both exist.
    const Directed* chosen = &all[s];
    if (e - s > 1 && all[s + 1].from != all[s].from &&
        all[s + 1].error < all[s].error) {
      chosen = &all[s + 1];
    }
    if (chosen->weight > 0.0) {
      edges.push_back({chosen->lo, chosen->hi, chosen->weight, chosen->from});
    }
    s = e;
  }
  return edges;
}

LocalFit fit_nnk(const PointSet& ps, Index center, std::span<const Index> support,
                 const KernelSpec& spec) {
  LocalFit fit;
  fit.node = center;
  fit.candidates.assign(support.begin(), support.end());
  const auto lk = kernel_submatrix(ps, center, support, spec);
  QPProblem problem{lk.support.values, lk.center};
  const auto sol = solve(problem);
  fit.theta.assign(sol.theta.data(), sol.theta.data() + sol.theta.size());
  fit.objective = sol.objective;
  fit.refresh_support();
  return fit;
}

SparseGraph build_nnk(const PointSet& ps, const NeighborList& neighbors,
                      const KernelSpec& spec) {
  spec.validate();
  std::vector<LocalFit> fits(static_cast<std::size_t>(ps.size()));
  parallel_for(ps.size(), [&](Index i) {
    fits[i] = with_node_context(
        i, [&] { return fit_nnk(ps, i, neighbors.indices(i), spec); });
  });
  return assemble(ps, neighbors.k(), BuilderTag::nnk, spec, std::move(fits));
}

SparseGraph build_nnk(const PointSet& ps, Index k, const KernelSpec& spec) {
  return build_nnk(ps, knn_search(ps, k), spec);
}

LocalFit fit_nnk_greedy(const PointSet& ps, Index center,
                        std::span<const Index> candidates,
                        const KernelSpec& spec, GreedyMode mode) {
  const auto lk = kernel_submatrix(ps, center, candidates, spec);
  const auto& kss = lk.support.values;
  const auto& ksi = lk.center;
  const Index m = ksi.size();

  std::vector<Index> selected;
  std::vector<bool> taken(static_cast<std::size_t>(m), false);
  Eigen::VectorXd theta;

  Index first = 0;
  for (Index a = 1; a < m; ++a) {
    if (ksi(a) > ksi(first)) first = a;
  }
  selected.push_back(first);
  taken[first] = true;
  theta = Eigen::VectorXd::Constant(1, ksi(first));

  while (static_cast<Index>(selected.size()) < m) {
    Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Index a = 0; a < m; ++a) {
      if (taken[a]) continue;
      double score = ksi(a);
      for (std::size_t t = 0; t < selected.size(); ++t) {
        score -= kss(selected[t], a) * theta(static_cast<Index>(t));
      }
      if (score > best_score) {
        best_score = score;
        best = a;
      }
    }
    if (best_score < 0.0) break;
    selected.push_back(best);
    taken[best] = true;
    const auto s = static_cast<Index>(selected.size());
    if (mode == GreedyMode::omp) {
      QPProblem problem;
      problem.K_SS.resize(s, s);
      problem.K_Si.resize(s);
      for (Index r = 0; r < s; ++r) {
        problem.K_Si(r) = ksi(selected[r]);
        for (Index c = 0; c < s; ++c) problem.K_SS(r, c) = kss(selected[r], selected[c]);
      }
      theta = solve(problem).theta;
    } else {
      theta.conservativeResize(s);
      theta(s - 1) = ksi(best);
    }
  }

  LocalFit fit;
  fit.node = center;
  const auto s = static_cast<Index>(selected.size());
  Eigen::MatrixXd k_sel(s, s);
  Eigen::VectorXd k_center(s);
  for (Index r = 0; r < s; ++r) {
    fit.candidates.push_back(candidates[selected[r]]);
    fit.theta.push_back(theta(r));
    k_center(r) = ksi(selected[r]);
    for (Index c = 0; c < s; ++c) k_sel(r, c) = kss(selected[r], selected[c]);
  }
  fit.objective = 0.5 * theta.dot(k_sel * theta) - k_center.dot(theta) + 0.5;
  fit.refresh_support();
  return fit;
}

SparseGraph build_nnk_greedy(const PointSet& ps, const NeighborList& neighbors,
                             const KernelSpec& spec, GreedyMode mode) {
  spec.validate();
  std::vector<LocalFit> fits(static_cast<std::size_t>(ps.size()));
  parallel_for(ps.size(), [&](Index i) {
    fits[i] = with_node_context(i, [&] {
      return fit_nnk_greedy(ps, i, neighbors.indices(i), spec, mode);
    });
  });
  const auto tag = mode == GreedyMode::omp ? BuilderTag::nnk_omp : BuilderTag::nnk_mp;
  return assemble(ps, neighbors.k(), tag, spec, std::move(fits));
}

SparseGraph build_nnk_greedy(const PointSet& ps, Index k, const KernelSpec& spec,
                             GreedyMode mode) {
  return build_nnk_greedy(ps, knn_search(ps, k), spec, mode);
}

SparseGraph build_knn(const PointSet& ps, const NeighborList& neighbors,
                      const KernelSpec& spec) {
  spec.validate();
  std::vector<LocalFit> fits(static_cast<std::size_t>(ps.size()));
  parallel_for(ps.size(), [&](Index i) {
    const auto cand = neighbors.indices(i);
    const auto lk = kernel_submatrix(ps, i, cand, spec);
    LocalFit fit;
    fit.node = i;
    fit.candidates.assign(cand.begin(), cand.end());
    fit.theta.assign(lk.center.data(), lk.center.data() + lk.center.size());
    fit.objective = local_objective(lk, lk.center);
    fit.refresh_support();
    fits[i] = std::move(fit);
  });
  return assemble(ps, neighbors.k(), BuilderTag::knn, spec, std::move(fits));
}

SparseGraph build_knn(const PointSet& ps, Index k, const KernelSpec& spec) {
  return build_knn(ps, knn_search(ps, k), spec);
}

LocalFit fit_lle_positive(const PointSet& ps, Index center,
                          std::span<const Index> support,
                          LleConstraint constraint) {
  const auto m = static_cast<Index>(support.size());
  const auto xi = ps.points.row(center);
  Eigen::MatrixXd z(m, ps.dim());
  for (Index a = 0; a < m; ++a) {
    z.row(a) = ps.points.row(support[a]) - xi;
    if (z.row(a).isZero(0.0)) {
      throw DegenerateInput("neighbor " + std::to_string(support[a]) +
                            " coincides with center " + std::to_string(center));
    }
  }
  LocalFit fit;
  fit.node = center;
  fit.candidates.assign(support.begin(), support.end());
  if (m == 0) {
    fit.objective = constraint == LleConstraint::nonneg ? xi.squaredNorm() : 0.0;
    return fit;
  }
  if (constraint == LleConstraint::nonneg_sum1) {
    const auto sol = solve_simplex_qp(z * z.transpose());
    fit.theta.assign(sol.theta.data(), sol.theta.data() + m);
    fit.objective = sol.objective;
  } else {
    Eigen::MatrixXd xs(m, ps.dim());
    for (Index a = 0; a < m; ++a) xs.row(a) = ps.points.row(support[a]);
    QPProblem problem;
    problem.K_SS = xs * xs.transpose();
    problem.K_Si = xs * xi.transpose();
    problem.self_similarity = xi.squaredNorm();
    const auto sol = solve(problem);
    fit.theta.assign(sol.theta.data(), sol.theta.data() + m);
    // The QP objective is half the squared residual.
    fit.objective = std::max(0.0, 2.0 * sol.objective);
  }
  fit.refresh_support();
  return fit;
}

SparseGraph build_lle_positive(const PointSet& ps, Index k,
                               LleConstraint constraint) {
  const auto neighbors = knn_search(ps, k);
  std::vector<LocalFit> fits(static_cast<std::size_t>(ps.size()));
  std::vector<Index> dropped(static_cast<std::size_t>(ps.size()), 0);
  parallel_for(ps.size(), [&](Index i) {
    std::vector<Index> support;
    for (Index j : neighbors.indices(i)) {
      if (ps.points.row(j) == ps.points.row(i)) {
        ++dropped[i];
      } else {
        support.push_back(j);
      }
    }
    fits[i] = with_node_context(
        i, [&] { return fit_lle_positive(ps, i, support, constraint); });
  });
  auto g = assemble(ps, k, BuilderTag::lle_pos, std::nullopt, std::move(fits));
  for (Index d : dropped) g.dropped_neighbors += d;
  return g;
}

double edge_density(const SparseGraph& g, double threshold) {
  if (g.n == 0) return 0.0;
  const auto count = std::count_if(g.edges.begin(), g.edges.end(),
                                   [&](const Edge& e) { return e.weight > threshold; });
  return static_cast<double>(count) / static_cast<double>(g.n);
}

void write_edge_list(const SparseGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write " + path.string());
  char buf[64];
  for (const auto& e : g.edges) {
    std::snprintf(buf, sizeof buf, "%lld,%lld,%.12g\n", static_cast<long long>(e.i),
                  static_cast<long long>(e.j), e.weight);
    out << buf;
  }
  if (!out) throw IOError("write failed: " + path.string());
}

std::string graph_header_json(const SparseGraph& g, double threshold) {
  nlohmann::json j;
  j["n"] = g.n;
  j["builder_tag"] = std::string(to_string(g.tag));
  j["kernel"] = g.kernel ? to_json(*g.kernel) : nlohmann::json(nullptr);
  j["K"] = g.k;
  j["threshold"] = threshold;
  j["edges"] = g.edges.size();
  if (g.dropped_neighbors > 0) j["dropped_neighbors"] = g.dropped_neighbors;
  return j.dump(2);
}

}  // namespace nnk
