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

#ifndef NNK_DATASET_HPP
#define NNK_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace nnk {

using Index = Eigen::Index;

/// Row-major so that each observation is a contiguous row.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Label value for points whose class is hidden.
inline constexpr int kUnlabeled = -1;

/// N observations in R^d with optional integer class ids.
struct PointSet {
  PointMatrix points;
  std::optional<std::vector<int>> labels;
  std::vector<std::int64_t> ids;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  bool has_labels() const { return labels.has_value(); }

  /// Number of classes, i.e. one past the largest label. 0 without labels.
  int num_classes() const;

  /// Throws DataError if any invariant is broken: empty, non-finite entries,
  /// label/id lengths, labels outside {-1, 0, ..., C-1} or fewer than two
  /// classes.
  void validate() const;

  /// Builds a point set with ids 0..N-1 and validates it.
  static PointSet from_points(PointMatrix points,
                              std::optional<std::vector<int>> labels = {});
};

enum class Sampling { uniform, nonuniform };

struct SwissRollConfig {
  Index n_points = 1000;
  double noise_std = 0.0;
  Sampling sampling = Sampling::nonuniform;
  std::uint64_t seed = 0;
};

struct CsvOptions {
  bool has_label_column = false;  // label is the last column
  bool skip_header = false;
};

PointSet load_csv(const std::filesystem::path& path, CsvOptions options = {});

/// Writes the same convention load_csv reads, 12 significant digits.
void save_csv(const PointSet& ps, const std::filesystem::path& path,
              bool include_labels = true);

/// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixels are scaled to [0, 1] and flattened row by row.
PointSet load_idx(const std::filesystem::path& images_path,
                  const std::filesystem::path& labels_path);

/// Points (t cos t, h, t sin t) + N(0, noise_std^2) per coordinate with
/// t in [1.5 pi, 4.5 pi] and h uniform in [0, 20]. Nonuniform sampling draws
/// t with density proportional to 1/t.
PointSet make_swiss_roll(const SwissRollConfig& cfg);

inline constexpr double kSwissRollTMin = 1.5 * 3.14159265358979323846;
inline constexpr double kSwissRollTMax = 4.5 * 3.14159265358979323846;
inline constexpr double kSwissRollHeight = 20.0;

/// Class c = label + 1 keeps round(2.6 c^2) points drawn without
/// replacement; ten classes give 1001 points. Original order is kept.
PointSet subsample_usps_style(const PointSet& ps, std::uint64_t seed);

/// Per-class counts used by subsample_usps_style.
std::vector<Index> usps_style_class_counts();

/// Keeps `per_class` random points of each class, original order kept.
PointSet subsample_per_class(const PointSet& ps, Index per_class,
                             std::uint64_t seed);

/// Rows selected by index, carrying labels and ids along.
PointSet select_rows(const PointSet& ps, const std::vector<Index>& rows);

}  // namespace nnk

#endif  // NNK_DATASET_HPP
