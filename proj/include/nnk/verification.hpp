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


#ifndef NNK_VERIFICATION_HPP
#define NNK_VERIFICATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nnk/dataset.hpp"
#include "nnk/geometry.hpp"
#include "nnk/graph_builder.hpp"

namespace nnk {

/// One randomized suite's tally, the row format of `verify`.
struct VerifyResult {
  std::string check;
  Index n_cases = 0;
  Index n_violations = 0;
  double max_deviation = 0.0;

  bool ok() const { return n_violations == 0; }
};

/// Gaussian cloud with standard-normal coordinates.
PointSet random_cloud(Index n, Index dim, std::uint64_t seed);

/// active-set solve against enumeration on random problems with |S| <= 8:
/// same support, weights within 1e-6, KKT residuals within 1e-8.
VerifyResult verify_qp_oracle(Index n_instances, std::uint64_t seed);

/// Solver support on random three-point Gaussian configurations against the
/// kernel ratio interval. Near-boundary draws are resampled.
VerifyResult verify_kri(Index n_instances, std::uint64_t seed);

/// Plane property on NNK graphs over random clouds (N=100, K=10,
/// alternating 2D/5D); one case per (node, j, k) triple checked.
VerifyResult verify_plane(Index n_clouds, std::uint64_t seed);

/// Polytope conditions on every local fit of the same graphs.
VerifyResult verify_polytope(Index n_clouds, std::uint64_t seed);

/// Cosine-kernel NNK against sum-to-one positive LLE on random datasets
/// (N=100, d cycling 2..5, K=5); one case per node. observation_space:
/// same support and weights within 1e-4, max_deviation is the weight gap.
/// unit_directions: rescaled weights optimal for the LLE problem,
/// max_deviation is the objective gap.
VerifyResult verify_lle(Index n_datasets, std::uint64_t seed,
                        LleComparison mode = LleComparison::observation_space);

/// Per node: J_nnk <= J(theta = K_Si) and J_nnk <= J_omp <= 1/2.
/// `nnk` and `omp` must come from the same points and neighbor lists.
VerifyResult check_objective_dominance(const PointSet& ps, const SparseGraph& nnk,
                                       const SparseGraph& omp);

/// The dominance check over the random clouds used by verify_plane.
VerifyResult verify_objective_dominance(Index n_clouds, std::uint64_t seed);

}  // namespace nnk

#endif  // NNK_VERIFICATION_HPP
