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

#include "nnk/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <string_view>

#include "nnk/error.hpp"

namespace nnk {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t col) {
  cell = trim(cell);
  double value = 0.0;
  // from_chars rejects a leading '+', which some writers emit.
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": not a number: '" +
                     std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": non-finite value");
  }
  return value;
}

std::uint32_t read_be32(std::istream& in, const std::string& what) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw FormatError(what + ": truncated header");
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path.string());
  return in;
}

std::vector<std::vector<Index>> rows_by_class(const PointSet& ps) {
  if (!ps.has_labels()) throw NoLabels("point set has no labels");
  std::vector<std::vector<Index>> by_class(ps.num_classes());
  const auto& labels = *ps.labels;
  for (Index i = 0; i < ps.size(); ++i) {
    if (labels[i] >= 0) by_class[labels[i]].push_back(i);
  }
  return by_class;
}

}  // namespace

int PointSet::num_classes() const {
  if (!labels) return 0;
  int max_label = -1;
  for (int l : *labels) max_label = std::max(max_label, l);
  return max_label + 1;
}

void PointSet::validate() const {
  if (points.rows() < 1 || points.cols() < 1) {
    throw DataError("point set must have N >= 1 and d >= 1");
  }
  if (!points.allFinite()) throw DataError("point set has non-finite entries");
  if (static_cast<Index>(ids.size()) != points.rows()) {
    throw DataError("ids length does not match number of points");
  }
  if (labels) {
    if (static_cast<Index>(labels->size()) != points.rows()) {
      throw DataError("labels length does not match number of points");
    }
    for (int l : *labels) {
      if (l < kUnlabeled) throw DataError("label below -1");
    }
    if (num_classes() < 2) throw DataError("labels must span at least 2 classes");
  }
}

PointSet PointSet::from_points(PointMatrix points,
                               std::optional<std::vector<int>> labels) {
  PointSet ps;
  ps.points = std::move(points);
  ps.labels = std::move(labels);
  ps.ids.resize(ps.points.rows());
  for (Index i = 0; i < ps.points.rows(); ++i) ps.ids[i] = i;
  ps.validate();
  return ps;
}

PointSet load_csv(const std::filesystem::path& path, CsvOptions options) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open " + path.string());

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.skip_header && line_no == 1) continue;
    std::string_view view = trim(line);
    if (view.empty()) continue;

    std::size_t cols = 0;
    std::size_t start = 0;
    std::vector<double> row;
    while (true) {
      const auto comma = view.find(',', start);
      const auto cell = view.substr(start, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - start);
      row.push_back(parse_cell(cell, line_no, ++cols));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      width = row.size();
      if (options.has_label_column && width < 2) {
        throw ParseError("label column requested but rows have one column");
      }
    } else if (row.size() != width) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " columns, found " +
                       std::to_string(row.size()));
    }
    if (options.has_label_column) {
      const double l = row.back();
      if (l != std::floor(l) || l < kUnlabeled) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": label must be an integer >= -1");
      }
      labels.push_back(static_cast<int>(l));
      row.pop_back();
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw ParseError(path.string() + ": no data rows");

  const Index d = static_cast<Index>(options.has_label_column ? width - 1 : width);
  PointMatrix points =
      Eigen::Map<PointMatrix>(values.data(), static_cast<Index>(rows), d);
  std::optional<std::vector<int>> maybe_labels;
  if (options.has_label_column) maybe_labels = std::move(labels);
  try {
    return PointSet::from_points(std::move(points), std::move(maybe_labels));
  } catch (const DataError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_csv(const PointSet& ps, const std::filesystem::path& path,
              bool include_labels) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write " + path.string());
  char buf[32];
  for (Index i = 0; i < ps.size(); ++i) {
    for (Index c = 0; c < ps.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12g", ps.points(i, c));
      if (c > 0) out << ',';
      out << buf;
    }
    if (include_labels && ps.has_labels()) out << ',' << (*ps.labels)[i];
    out << '\n';
  }
  if (!out) throw IOError("write failed: " + path.string());
}

PointSet load_idx(const std::filesystem::path& images_path,
                  const std::filesystem::path& labels_path) {
  auto images = open_binary(images_path);
  const auto image_magic = read_be32(images, images_path.string());
  if (image_magic != 0x00000803u) {
    throw FormatError(images_path.string() + ": bad image magic");
  }
  const auto n_images = read_be32(images, images_path.string());
  const auto rows = read_be32(images, images_path.string());
  const auto cols = read_be32(images, images_path.string());

  auto labels_in = open_binary(labels_path);
  const auto label_magic = read_be32(labels_in, labels_path.string());
  if (label_magic != 0x00000801u) {
    throw FormatError(labels_path.string() + ": bad label magic");
  }
  const auto n_labels = read_be32(labels_in, labels_path.string());
  if (n_images != n_labels) {
    throw MismatchError("image count " + std::to_string(n_images) +
                        " differs from label count " + std::to_string(n_labels));
  }
  if (n_images == 0 || rows == 0 || cols == 0) {
    throw FormatError(images_path.string() + ": empty payload");
  }

  const std::size_t d = std::size_t{rows} * cols;
  std::vector<unsigned char> pixels(std::size_t{n_images} * d);
  if (!images.read(reinterpret_cast<char*>(pixels.data()),
                   static_cast<std::streamsize>(pixels.size()))) {
    throw FormatError(images_path.string() + ": truncated payload");
  }
  std::vector<unsigned char> raw_labels(n_labels);
  if (!labels_in.read(reinterpret_cast<char*>(raw_labels.data()),
                      static_cast<std::streamsize>(raw_labels.size()))) {
    throw FormatError(labels_path.string() + ": truncated payload");
  }

  PointMatrix points(static_cast<Index>(n_images), static_cast<Index>(d));
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index c = 0; c < points.cols(); ++c) {
      points(i, c) = pixels[static_cast<std::size_t>(i) * d + c] / 255.0;
    }
  }
  std::vector<int> labels(raw_labels.begin(), raw_labels.end());
  return PointSet::from_points(std::move(points), std::move(labels));
}

PointSet make_swiss_roll(const SwissRollConfig& cfg) {
  if (cfg.n_points < 10) throw InvalidArgument("swiss roll needs n_points >= 10");
  if (!std::isfinite(cfg.noise_std) || cfg.noise_std < 0.0) {
    throw InvalidArgument("swiss roll noise_std must be finite and >= 0");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  PointMatrix points(cfg.n_points, 3);
  for (Index i = 0; i < cfg.n_points; ++i) {
    const double u = unit(rng);
    // Inverse CDF of the density proportional to 1/t on [tmin, tmax].
    const double t = cfg.sampling == Sampling::nonuniform
                         ? kSwissRollTMin * std::pow(kSwissRollTMax / kSwissRollTMin, u)
                         : kSwissRollTMin + (kSwissRollTMax - kSwissRollTMin) * u;
    const double h = kSwissRollHeight * unit(rng);
    points(i, 0) = t * std::cos(t);
    points(i, 1) = h;
    points(i, 2) = t * std::sin(t);
    if (cfg.noise_std > 0.0) {
      for (Index c = 0; c < 3; ++c) points(i, c) += cfg.noise_std * noise(rng);
    }
  }
  return PointSet::from_points(std::move(points));
}

std::vector<Index> usps_style_class_counts() {
  std::vector<Index> counts;
  for (int c = 1; c <= 10; ++c) {
    counts.push_back(static_cast<Index>(std::lround(2.6 * c * c)));
  }
  return counts;
}

PointSet select_rows(const PointSet& ps, const std::vector<Index>& rows) {
  PointSet out;
  out.points.resize(static_cast<Index>(rows.size()), ps.dim());
  out.ids.reserve(rows.size());
  std::vector<int> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.points.row(static_cast<Index>(r)) = ps.points.row(rows[r]);
    out.ids.push_back(ps.ids[rows[r]]);
    if (ps.has_labels()) labels.push_back((*ps.labels)[rows[r]]);
  }
  if (ps.has_labels()) out.labels = std::move(labels);
  return out;
}

PointSet subsample_usps_style(const PointSet& ps, std::uint64_t seed) {
  auto by_class = rows_by_class(ps);
  if (by_class.size() != 10) {
    throw InvalidArgument("USPS-style subsampling needs exactly 10 classes");
  }
  const auto counts = usps_style_class_counts();
  std::mt19937_64 rng(seed);
  std::vector<Index> picked;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (static_cast<Index>(rows.size()) < counts[c]) {
      throw InsufficientSamples("class " + std::to_string(c) + " has " +
                                std::to_string(rows.size()) + " points, needs " +
                                std::to_string(counts[c]));
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    picked.insert(picked.end(), rows.begin(), rows.begin() + counts[c]);
  }
  std::sort(picked.begin(), picked.end());
  return select_rows(ps, picked);
}

PointSet subsample_per_class(const PointSet& ps, Index per_class,
                             std::uint64_t seed) {
  auto by_class = rows_by_class(ps);
  std::mt19937_64 rng(seed);
  std::vector<Index> picked;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (static_cast<Index>(rows.size()) < per_class) {
      throw InsufficientSamples("class " + std::to_string(c) + " has " +
                                std::to_string(rows.size()) + " points, needs " +
                                std::to_string(per_class));
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    picked.insert(picked.end(), rows.begin(), rows.begin() + per_class);
  }
  std::sort(picked.begin(), picked.end());
  return select_rows(ps, picked);
}

}  // namespace nnk
