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

#ifndef NNK_SPECTRAL_HPP
#define NNK_SPECTRAL_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "nnk/dataset.hpp"
#include "nnk/graph_builder.hpp"

namespace nnk {

enum class LaplacianKind { combinatorial, sym_normalized };

std::string_view to_string(LaplacianKind kind);
LaplacianKind laplacian_kind_from_string(std::string_view name);

using SparseMatrix = Eigen::SparseMatrix<double>;

SparseMatrix adjacency_matrix(const SparseGraph& g);

/// D - W, or I - D^{-1/2} W D^{-1/2} with all-zero rows for isolated nodes.
SparseMatrix laplacian(const SparseGraph& g, LaplacianKind kind);

/// Class scores on every node plus the argmax decision.
struct LabelField {
  Eigen::MatrixXd scores;  // N x C
  std::vector<int> decided;
  /// Unlabeled nodes with no path to a labeled node. Their scores are zero
  /// and their decision is kUnlabeled.
  std::vector<bool> unreachable;
};

/// Harmonic solution with the labeled nodes as boundary:
///   combinatorial   L_UU f_U = W_UL f_L
///   sym_normalized  (I - S)_UU f_U = S_UL f_L,  S = D^{-1/2} W D^{-1/2}
/// `labels` uses kUnlabeled for hidden nodes. Argmax ties go to the lowest
/// class. Throws NoLabels if nothing is labeled.
LabelField propagate_labels(const SparseGraph& g, std::span<const int> labels,
                            LaplacianKind kind, int n_classes = 0);

/// Reveals round(fraction * N) labels, at least one per class.
std::vector<int> reveal_labels(std::span<const int> truth, double fraction,
                               std::uint64_t seed);

struct SslConfig {
  std::vector<BuilderTag> builders{BuilderTag::knn, BuilderTag::nnk};
  std::vector<LaplacianKind> laplacians{LaplacianKind::combinatorial,
                                        LaplacianKind::sym_normalized};
  Index k = 30;
  std::vector<double> label_fractions{0.1};
  int n_trials = 10;
  std::uint64_t seed = 0;
};

struct SslTrial {
  BuilderTag builder = BuilderTag::nnk;
  LaplacianKind laplacian = LaplacianKind::combinatorial;
  Index k = 0;
  double fraction = 0.0;
  int trial = 0;
  double misclassification = 0.0;
  double build_seconds = 0.0;
  double edge_density = 0.0;
  Index unreachable = 0;
};

struct SslAggregate {
  BuilderTag builder = BuilderTag::nnk;
  LaplacianKind laplacian = LaplacianKind::combinatorial;
  Index k = 0;
  double fraction = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double build_seconds = 0.0;
  double edge_density = 0.0;
};

struct SslTable {
  std::vector<SslTrial> trials;
  std::vector<SslAggregate> aggregates;

  /// Aggregate for one cell; throws InvalidArgument if absent.
  const SslAggregate& find(BuilderTag builder, LaplacianKind laplacian, Index k,
                           double fraction) const;
};

/// Builds each graph once (Gaussian kernel, bandwidth from the K-th neighbor
/// distance; LLE uses the sum-to-one variant), then for every label
/// fraction and trial reveals labels, propagates, and scores
/// misclassification over hidden reachable nodes. Label reveals depend only
/// on (seed, fraction, trial), so every builder sees the same ones.
SslTable ssl_experiment(const PointSet& ps, const SslConfig& cfg);

/// builder,laplacian,K,fraction,trial,misclassification,build_seconds,
/// edge_density; aggregate rows carry "mean" / "std" in the trial column.
void write_ssl_csv(const SslTable& table, const std::filesystem::path& path);

}  // namespace nnk

#endif  // NNK_SPECTRAL_HPP
