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

#include "nnk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnk/error.hpp"
#include "nnk/neighbors.hpp"

namespace nnk {

KernelSpec KernelSpec::gaussian(double sigma_sq) {
  KernelSpec spec{KernelKind::gaussian, sigma_sq};
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::cosine_at_node() {
  return KernelSpec{KernelKind::cosine_at_node, 0.0};
}

void KernelSpec::validate() const {
  if (kind == KernelKind::gaussian && !(sigma_sq > 0.0 && std::isfinite(sigma_sq))) {
    throw InvalidArgument("Gaussian kernel needs finite sigma_sq > 0");
  }
}

double eval_gaussian(const PointRef& xi, const PointRef& xj, double sigma_sq) {
  if (xi.size() != xj.size()) {
    throw DimensionMismatch("points have dimensions " + std::to_string(xi.size()) +
                            " and " + std::to_string(xj.size()));
  }
  if (!(sigma_sq > 0.0 && std::isfinite(sigma_sq))) {
    throw InvalidArgument("Gaussian kernel needs finite sigma_sq > 0");
  }
  return std::exp(-(xi - xj).squaredNorm() / (2.0 * sigma_sq));
}

double eval_cosine_at_node(const PointRef& xp, const PointRef& xq,
                           const PointRef& xi) {
  if (xp.size() != xi.size() || xq.size() != xi.size()) {
    throw DimensionMismatch("cosine kernel arguments differ in dimension");
  }
  const Eigen::RowVectorXd zp = xp - xi;
  const Eigen::RowVectorXd zq = xq - xi;
  const double np = zp.norm();
  const double nq = zq.norm();
  if (np == 0.0 || nq == 0.0) return 1.0;
  const double value = 0.5 + zp.dot(zq) / (2.0 * np * nq);
  return std::clamp(value, 0.0, 1.0);
}

double eval_kernel(const PointSet& ps, Index p, Index q, Index center,
                   const KernelSpec& spec) {
  if (spec.kind == KernelKind::gaussian) {
    if (p == q) return 1.0;
    return eval_gaussian(ps.points.row(p), ps.points.row(q), spec.sigma_sq);
  }
  const auto xi = ps.points.row(center);
  for (Index r : {p, q}) {
    if (r != center && ps.points.row(r) == xi) {
      throw DegenerateInput("point " + std::to_string(r) +
                            " coincides with center " + std::to_string(center));
    }
  }
  if (p == q) return 1.0;
  return eval_cosine_at_node(ps.points.row(p), ps.points.row(q), xi);
}

LocalKernel kernel_submatrix(const PointSet& ps, Index center,
                             std::span<const Index> support,
                             const KernelSpec& spec) {
  if (support.empty()) throw InvalidArgument("empty support set");
  const auto m = static_cast<Index>(support.size());
  LocalKernel out;
  out.support.spec = spec;
  out.support.values.resize(m, m);
  out.center.resize(m);
  for (Index a = 0; a < m; ++a) {
    if (support[a] == center) {
      throw InvalidArgument("support set contains its center");
    }
    out.support.values(a, a) = 1.0;
    out.center(a) = eval_kernel(ps, support[a], center, center, spec);
    for (Index b = a + 1; b < m; ++b) {
      const double v = eval_kernel(ps, support[a], support[b], center, spec);
      out.support.values(a, b) = v;
      out.support.values(b, a) = v;
    }
  }
  return out;
}

KernelMatrix gaussian_kernel_matrix(const PointSet& ps, double sigma_sq) {
  KernelMatrix k{Eigen::MatrixXd(ps.size(), ps.size()), KernelSpec::gaussian(sigma_sq)};
  for (Index p = 0; p < ps.size(); ++p) {
    k.values(p, p) = 1.0;
    for (Index q = p + 1; q < ps.size(); ++q) {
      const double v = eval_gaussian(ps.points.row(p), ps.points.row(q), sigma_sq);
      k.values(p, q) = v;
      k.values(q, p) = v;
    }
  }
  return k;
}

double bandwidth_from_neighbors(const PointSet& ps, Index k) {
  return bandwidth_from_neighbors(knn_search(ps, k));
}

double bandwidth_from_neighbors(const NeighborList& nl) {
  double total = 0.0;
  for (Index i = 0; i < nl.num_nodes(); ++i) total += nl.distances(i).back();
  const double sigma = total / static_cast<double>(nl.num_nodes()) / 3.0;
  return sigma * sigma;
}

}  // namespace nnk
