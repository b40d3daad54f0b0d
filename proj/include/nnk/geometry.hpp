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

#ifndef NNK_GEOMETRY_HPP
#define NNK_GEOMETRY_HPP

#include <vector>

#include <Eigen/Core>

#include "nnk/dataset.hpp"
#include "nnk/graph_builder.hpp"
#include "nnk/kernel.hpp"

namespace nnk {

/// Slack on the non-strict side of every geometric check.
inline constexpr double kGeometrySlack = 1e-8;

/// Kernel ratio interval verdict for candidates j and k of node i.
struct KRIVerdict {
  double ratio = 0.0;  // K_ij / K_ik
  double lower = 0.0;  // K_jk
  double upper = 0.0;  // 1 / K_jk
  bool j_connected = false;  // K_jk < ratio
  bool k_connected = false;  // ratio < 1 / K_jk

  bool both_connected() const { return j_connected && k_connected; }
};

/// Throws InvalidKernelValue unless all values lie in (0, 1] and K_jk < 1.
KRIVerdict kri_predict(double k_ij, double k_ik, double k_jk);

struct PlaneViolation {
  Index node = 0;
  Index j = 0;  // connected neighbor defining the plane
  Index k = 0;  // neighbor beyond the plane that still has weight
  double excess = 0.0;  // (x_k - x_i)'(x_j - x_i) - ||x_j - x_i||^2 > 0
};

struct PlaneReport {
  Index n_checks = 0;  // (node, j, k) triples with k strictly beyond j's plane
  std::vector<PlaneViolation> violations;
};

/// For every local fit, every neighbor j with positive weight and every
/// candidate k with (x_k - x_i)'(x_j - x_i) > ||x_j - x_i||^2, requires
/// theta_ik = 0. Checked on the directed local fits. Requires a Gaussian
/// kernel graph.
PlaneReport check_plane_property(const SparseGraph& g, const PointSet& ps);

struct CandidateCheck {
  Index candidate = 0;
  bool retained = false;
  /// Retained: |(K_bb theta_b - K_bi)_j|. Pruned: K_bk' theta_b - K_ik.
  double value = 0.0;
  bool pass = false;
};

struct PolytopeReport {
  std::vector<CandidateCheck> candidates;
  bool pass = true;
  double max_stationarity = 0.0;
  double min_pruned_margin = 0.0;  // 0 when nothing was pruned
};

/// Retained candidates satisfy K_bb theta_b = K_bi and pruned candidates
/// K_bk' theta_b - K_ik >= 0, both within kGeometrySlack. `k_full` is the
/// N x N kernel matrix the fit was computed from.
PolytopeReport check_polytope_conditions(const LocalFit& fit,
                                         const Eigen::MatrixXd& k_full);

/// Same, evaluating only the kernel entries the fit touches.
PolytopeReport check_polytope_conditions(const LocalFit& fit, const PointSet& ps,
                                         const KernelSpec& spec);

enum class LleComparison {
  /// Cosine-kernel NNK weights against sum-to-one LLE on the raw difference
  /// vectors, weights compared as they are.
  observation_space,
  /// Cosine-kernel NNK weights rescaled to sum to one against sum-to-one LLE
  /// on unit-length difference vectors.
  unit_directions,
};

struct LleEquivalenceReport {
  Index n_nodes = 0;
  Index nodes_with_support_mismatch = 0;
  Index max_support_difference = 0;  // size of the symmetric difference
  double max_weight_deviation = 0.0;  // over common support
  Index nodes_with_weight_mismatch = 0;  // deviation above weight_tol
  /// unit_directions only: |LLE objective at the rescaled NNK weights minus
  /// the LLE optimum|.
  double max_objective_gap = 0.0;
  /// observation_space: support or weight mismatch. unit_directions:
  /// objective gap above kGeometrySlack.
  Index nodes_failing = 0;
};

/// Per node over its K nearest neighbors. Throws DegenerateInput when a
/// neighbor coincides with its center.
LleEquivalenceReport check_lle_equivalence(
    const PointSet& ps, Index k,
    LleComparison mode = LleComparison::observation_space,
    double weight_tol = 1e-4);

}  // namespace nnk

#endif  // NNK_GEOMETRY_HPP
