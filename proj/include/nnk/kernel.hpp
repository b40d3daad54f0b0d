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

#ifndef NNK_KERNEL_HPP
#define NNK_KERNEL_HPP

#include <span>

#include <Eigen/Core>

#include "nnk/dataset.hpp"

namespace nnk {
class NeighborList;
}

namespace nnk {

enum class KernelKind { gaussian, cosine_at_node };

/// Similarity used as the inner product of the lifted space.
///
/// The Gaussian kernel is exp(-||x_i - x_j||^2 / (2 sigma_sq)). The
/// cosine-at-node kernel is centered at the node whose neighborhood is being
/// fit; the center is supplied at evaluation time.
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double sigma_sq = 1.0;

  static KernelSpec gaussian(double sigma_sq);
  static KernelSpec cosine_at_node();

  /// Throws InvalidArgument unless sigma_sq is positive and finite (Gaussian).
  void validate() const;
};

/// Evaluated kernel values; symmetric with unit diagonal.
struct KernelMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;
};

/// K_{S,S} and K_{S,i} for one node.
struct LocalKernel {
  KernelMatrix support;    // K_SS
  Eigen::VectorXd center;  // K_Si
};

using PointRef = Eigen::Ref<const Eigen::RowVectorXd>;

double eval_gaussian(const PointRef& xi, const PointRef& xj, double sigma_sq);

/// 1/2 + cos(angle between x_p - x_i and x_q - x_i) / 2, clamped to [0, 1].
/// An argument equal to the center x_i gives 1 (the limit along the other
/// difference vector). Whether such an argument is the center itself or a
/// duplicate of it is only known by index; see eval_kernel.
double eval_cosine_at_node(const PointRef& xp, const PointRef& xq,
                           const PointRef& xi);

/// Kernel value between rows p and q of `ps` for a fit centered at `center`.
double eval_kernel(const PointSet& ps, Index p, Index q, Index center,
                   const KernelSpec& spec);

LocalKernel kernel_submatrix(const PointSet& ps, Index center,
                             std::span<const Index> support,
                             const KernelSpec& spec);

/// Full N x N Gaussian kernel matrix.
KernelMatrix gaussian_kernel_matrix(const PointSet& ps, double sigma_sq);

/// sigma = (mean over nodes of the distance to the K-th nearest neighbor) / 3,
/// so that K neighbors fall within three standard deviations. Returns sigma^2.
double bandwidth_from_neighbors(const PointSet& ps, Index k);

/// Same rule on an existing search; K is the list length.
double bandwidth_from_neighbors(const NeighborList& neighbors);

}  // namespace nnk

#endif  // NNK_KERNEL_HPP
