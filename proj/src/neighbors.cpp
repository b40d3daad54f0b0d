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

#include "nnk/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "nnk/error.hpp"
#include "parallel.hpp"

namespace nnk {

NeighborList::NeighborList(Index n, Index k, std::vector<Index> indices,
                           std::vector<double> distances)
    : n_(n), k_(k), indices_(std::move(indices)), distances_(std::move(distances)) {}

NeighborList NeighborList::truncated(Index k) const {
  if (k < 1 || k > k_) throw InvalidK("truncation K out of range");
  std::vector<Index> idx;
  std::vector<double> dist;
  idx.reserve(n_ * k);
  dist.reserve(n_ * k);
  for (Index i = 0; i < n_; ++i) {
    auto a = indices(i);
    auto b = distances(i);
    idx.insert(idx.end(), a.begin(), a.begin() + k);
    dist.insert(dist.end(), b.begin(), b.begin() + k);
  }
  return NeighborList(n_, k, std::move(idx), std::move(dist));
}

NeighborList knn_search(const PointSet& ps, Index k) {
  const Index n = ps.size();
  if (k < 1 || k >= n) {
    throw InvalidK("K must satisfy 1 <= K < N (K=" + std::to_string(k) +
                   ", N=" + std::to_string(n) + ")");
  }
  std::vector<Index> indices(static_cast<std::size_t>(n * k));
  std::vector<double> distances(static_cast<std::size_t>(n * k));

  parallel_for(n, [&](Index i) {
    std::vector<std::pair<double, Index>> cand;
    cand.reserve(static_cast<std::size_t>(n - 1));
    const auto xi = ps.points.row(i);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back((ps.points.row(j) - xi).squaredNorm(), j);
    }
    // Pair ordering gives the index tie-break.
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (Index r = 0; r < k; ++r) {
      indices[i * k + r] = cand[r].second;
      distances[i * k + r] = std::sqrt(cand[r].first);
    }
  });
  return NeighborList(n, k, std::move(indices), std::move(distances));
}

}  // namespace nnk
