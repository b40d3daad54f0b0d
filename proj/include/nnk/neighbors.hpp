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

#ifndef NNK_NEIGHBORS_HPP
#define NNK_NEIGHBORS_HPP

#include <span>
#include <vector>

#include "nnk/dataset.hpp"

namespace nnk {

/// K nearest other nodes of every node, ascending distance, ties broken by
/// lower index. Stored flat: node i owns entries [i*K, (i+1)*K).
class NeighborList {
 public:
  NeighborList() = default;
  NeighborList(Index n, Index k, std::vector<Index> indices,
               std::vector<double> distances);

  Index num_nodes() const { return n_; }
  Index k() const { return k_; }

  std::span<const Index> indices(Index node) const {
    return {indices_.data() + node * k_, static_cast<std::size_t>(k_)};
  }
  std::span<const double> distances(Index node) const {
    return {distances_.data() + node * k_, static_cast<std::size_t>(k_)};
  }

  /// First `k` entries of every list; equal to a fresh search with `k`.
  NeighborList truncated(Index k) const;

 private:
  Index n_ = 0;
  Index k_ = 0;
  std::vector<Index> indices_;
  std::vector<double> distances_;
};

/// Exact brute-force search over Euclidean distance. Throws InvalidK unless
/// 1 <= k < N.
NeighborList knn_search(const PointSet& ps, Index k);

}  // namespace nnk

#endif  // NNK_NEIGHBORS_HPP
