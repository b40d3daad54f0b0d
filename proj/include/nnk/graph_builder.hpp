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

#ifndef NNK_GRAPH_BUILDER_HPP
#define NNK_GRAPH_BUILDER_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nnk/dataset.hpp"
#include "nnk/kernel.hpp"
#include "nnk/neighbors.hpp"

namespace nnk {

enum class BuilderTag { nnk, nnk_mp, nnk_omp, knn, lle_pos };

std::string_view to_string(BuilderTag tag);
/// Throws InvalidArgument on unknown names.
BuilderTag builder_tag_from_string(std::string_view name);

/// One node's directed solution.
///
/// `candidates` are the nodes the fit looked at (the K nearest neighbors, or
/// the greedily selected atoms) and `theta` the weight given to each, zeros
/// included. `support`/`weights` keep only the nonzero entries.
struct LocalFit {
  Index node = 0;
  std::vector<Index> candidates;
  std::vector<double> theta;
  std::vector<Index> support;
  std::vector<double> weights;
  /// Local error used for symmetrization: J_i for kernel builders, the
  /// squared reconstruction residual for LLE.
  double objective = 0.0;

  /// Fills support/weights from candidates/theta.
  void refresh_support();
};

struct Edge {
  Index i = 0;  // i < j
  Index j = 0;
  double weight = 0.0;
  Index source = 0;  // endpoint whose local fit supplied the weight
};

/// Undirected weighted graph stored as an upper-triangular edge list.
struct SparseGraph {
  Index n = 0;
  std::vector<Edge> edges;
  BuilderTag tag = BuilderTag::nnk;
  std::optional<KernelSpec> kernel;  // empty for LLE
  Index k = 0;
  std::vector<LocalFit> fits;
  /// Neighbors dropped by LLE because they coincide with their center.
  Index dropped_neighbors = 0;

  std::vector<Index> degrees() const;
};

/// Resolves directed proposals into undirected edges. When both endpoints
/// list each other as candidates the weight comes from the endpoint with the
/// smaller objective (the lower index on ties), and may be zero. When only
/// one endpoint lists the other its weight is kept.
std::vector<Edge> symmetrize_by_error(Index n, const std::vector<LocalFit>& fits);

/// Non-negative kernel regression over each node's K nearest neighbors.
SparseGraph build_nnk(const PointSet& ps, Index k, const KernelSpec& spec);

/// Same, reusing a precomputed neighbor list (k = neighbors.k()).
SparseGraph build_nnk(const PointSet& ps, const NeighborList& neighbors,
                      const KernelSpec& spec);

enum class GreedyMode { mp, omp };

/// Greedy atom selection restricted to the K nearest neighbors: each step
/// adds argmax_j K_ij - K_Sj' theta and stops once that residual
/// correlation is negative. OMP re-solves the constrained QP on the selected
/// set; MP appends K_ij as the new weight.
SparseGraph build_nnk_greedy(const PointSet& ps, Index k, const KernelSpec& spec,
                             GreedyMode mode);
SparseGraph build_nnk_greedy(const PointSet& ps, const NeighborList& neighbors,
                             const KernelSpec& spec, GreedyMode mode);

/// Kernel-weighted K nearest neighbor graph, union-symmetrized.
SparseGraph build_knn(const PointSet& ps, Index k, const KernelSpec& spec);
SparseGraph build_knn(const PointSet& ps, const NeighborList& neighbors,
                      const KernelSpec& spec);

enum class LleConstraint { nonneg, nonneg_sum1 };

/// min ||x_i - X_S theta||^2 in observation space with theta >= 0 and, for
/// nonneg_sum1, sum(theta) = 1.
SparseGraph build_lle_positive(const PointSet& ps, Index k,
                               LleConstraint constraint);

/// Weights of one node's LLE fit over `support`; throws DegenerateInput if a
/// support point coincides with the center.
LocalFit fit_lle_positive(const PointSet& ps, Index center,
                          std::span<const Index> support,
                          LleConstraint constraint);

/// Local fits without assembling a graph, one per node.
LocalFit fit_nnk(const PointSet& ps, Index center, std::span<const Index> support,
                 const KernelSpec& spec);

/// One node's greedy fit over its candidate list.
LocalFit fit_nnk_greedy(const PointSet& ps, Index center,
                        std::span<const Index> candidates,
                        const KernelSpec& spec, GreedyMode mode);

/// Edges with weight > threshold per node.
double edge_density(const SparseGraph& g, double threshold = 1e-8);

/// "i,j,weight" rows, 0-based, 12 significant digits.
void write_edge_list(const SparseGraph& g, const std::filesystem::path& path);

/// {"n", "builder_tag", "kernel", "K", "threshold", "edges"} as JSON text.
std::string graph_header_json(const SparseGraph& g, double threshold = 1e-8);

}  // namespace nnk

#endif  // NNK_GRAPH_BUILDER_HPP
