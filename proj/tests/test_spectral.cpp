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


#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "nnk/error.hpp"
#include "nnk/spectral.hpp"
#include "oracles.hpp"

using namespace nnk;

namespace {

SparseGraph graph_of(Index n, std::vector<std::tuple<Index, Index, double>> edges) {
  SparseGraph g;
  g.n = n;
  for (auto [i, j, w] : edges) g.edges.push_back({i, j, w, i});
  return g;
}

Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

PointSet two_blobs(int per_blob, std::uint64_t seed) {
  auto x = oracle::normal_points(2 * per_blob, 2, seed);
  std::vector<int> labels(2 * per_blob);
  for (int r = 0; r < 2 * per_blob; ++r) {
    labels[r] = r < per_blob ? 0 : 1;
    x(r, 0) += r < per_blob ? -4.0 : 4.0;
  }
  return PointSet::from_points(x, labels);
}

}  // namespace

TEST_CASE("laplacian definitions") {
  const auto one = graph_of(2, {{0, 1, 0.3}});
  const auto L = dense(laplacian(one, LaplacianKind::combinatorial));
  CHECK(L(0, 0) == doctest::Approx(0.3));
  CHECK(L(0, 1) == doctest::Approx(-0.3));
  CHECK(L(1, 0) == doctest::Approx(-0.3));
  CHECK(L(1, 1) == doctest::Approx(0.3));

  const auto tri = graph_of(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  const auto S = dense(laplacian(tri, LaplacianKind::sym_normalized));
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) CHECK(S(a, b) == doctest::Approx(a == b ? 1.0 : -0.5));
  }

  // isolated node keeps an all-zero row
  const auto iso = graph_of(3, {{0, 1, 2.0}});
  const auto Si = dense(laplacian(iso, LaplacianKind::sym_normalized));
  CHECK(Si.row(2).isZero());
  CHECK(Si(0, 0) == doctest::Approx(1.0));
  CHECK(dense(adjacency_matrix(iso))(1, 0) == 2.0);
  CHECK(laplacian_kind_from_string("sym") == LaplacianKind::sym_normalized);
  CHECK(laplacian_kind_from_string("L") == LaplacianKind::combinatorial);
  CHECK_THROWS_AS(laplacian_kind_from_string("rw"), InvalidArgument);
}

TEST_CASE("spectra of built graphs") {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto ps = PointSet::from_points(oracle::normal_points(150, 3, seed));
    const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(ps, 10));
    for (const auto& g : {build_nnk(ps, 10, spec), build_knn(ps, 10, spec)}) {
      const auto L = dense(laplacian(g, LaplacianKind::combinatorial));
      CHECK((L - L.transpose()).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((L * Eigen::VectorXd::Ones(150)).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L).eigenvalues();
      CHECK(ev.minCoeff() >= -1e-10);
      const auto S = dense(laplacian(g, LaplacianKind::sym_normalized));
      const Eigen::VectorXd es = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues();
      CHECK(es.minCoeff() >= -1e-10);
      CHECK(es.maxCoeff() <= 2.0 + 1e-10);
    }
  }
}

TEST_CASE("harmonic midpoint") {
  const auto chain = graph_of(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const std::vector<int> labels{0, kUnlabeled, 1};
  for (auto kind : {LaplacianKind::combinatorial, LaplacianKind::sym_normalized}) {
    const auto f = propagate_labels(chain, labels, kind);
    // sym: f_b = W_ba / sqrt(d_a d_b) with d_a = 1, d_b = 2
    const double expect = kind == LaplacianKind::combinatorial ? 0.5 : 1.0 / std::sqrt(2.0);
    CHECK(f.scores(1, 0) == doctest::Approx(expect));
    CHECK(f.scores(1, 0) == doctest::Approx(f.scores(1, 1)));
    CHECK(f.decided[1] == 0);
    CHECK(f.scores.row(0) == Eigen::RowVector2d(1, 0));
  }
}

TEST_CASE("all labeled and unlabeled edge cases") {
  const auto chain = graph_of(4, {{0, 1, 1.0}, {1, 2, 1.0}});
  const std::vector<int> all{1, 0, 1, 0};
  const auto f = propagate_labels(chain, all, LaplacianKind::combinatorial);
  CHECK(f.decided == all);

  const std::vector<int> some{1, kUnlabeled, kUnlabeled, kUnlabeled};
  const auto g = propagate_labels(chain, some, LaplacianKind::sym_normalized, 2);
  CHECK(f.scores.cols() == 2);
  CHECK(g.decided[2] == 1);
  CHECK(g.unreachable[3]);
  CHECK(g.decided[3] == kUnlabeled);
  CHECK(g.scores.row(3).isZero());

  const std::vector<int> none(4, kUnlabeled);
  CHECK_THROWS_AS(propagate_labels(chain, none, LaplacianKind::combinatorial), NoLabels);
}

TEST_CASE("maximum principle and equivariance") {
  const auto ps = two_blobs(60, 3);
  const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(ps, 8));
  const auto g = build_nnk(ps, 8, spec);
  auto labels = reveal_labels(*ps.labels, 0.1, 2);
  const auto f = propagate_labels(g, labels, LaplacianKind::combinatorial);
  for (Index v = 0; v < g.n; ++v) {
    if (labels[v] >= 0 || f.unreachable[v]) continue;
    CHECK(f.scores.row(v).minCoeff() >= -1e-10);
    CHECK(f.scores.row(v).maxCoeff() <= 1.0 + 1e-10);
  }

  // relabel nodes by a random permutation
  std::vector<Index> perm(g.n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(9));
  SparseGraph h;
  h.n = g.n;
  for (const auto& e : g.edges) {
    const Index a = perm[e.i], b = perm[e.j];
    h.edges.push_back({std::min(a, b), std::max(a, b), e.weight, a});
  }
  std::vector<int> hl(g.n);
  for (Index v = 0; v < g.n; ++v) hl[perm[v]] = labels[v];
  for (auto kind : {LaplacianKind::combinatorial, LaplacianKind::sym_normalized}) {
    const auto a = propagate_labels(g, labels, kind);
    const auto b = propagate_labels(h, hl, kind);
    for (Index v = 0; v < g.n; ++v) {
      CHECK((a.scores.row(v) - b.scores.row(perm[v])).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(a.decided[v] == b.decided[perm[v]]);
    }
  }
}

TEST_CASE("two blobs") {
  const auto ps = two_blobs(100, 5);
  const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(ps, 10));
  const auto g = build_nnk(ps, 10, spec);
  std::vector<int> labels(200, kUnlabeled);
  labels[0] = 0;
  labels[100] = 1;
  for (auto kind : {LaplacianKind::combinatorial, LaplacianKind::sym_normalized}) {
    const auto f = propagate_labels(g, labels, kind);
    int correct = 0, scored = 0;
    for (Index v = 0; v < 200; ++v) {
      if (labels[v] >= 0 || f.unreachable[v]) continue;
      ++scored;
      if (f.decided[v] == (*ps.labels)[v]) ++correct;
    }
    CHECK(scored >= 190);
    CHECK(static_cast<double>(correct) / scored >= 0.95);
  }
}

TEST_CASE("label reveal") {
  std::vector<int> truth(500);
  for (int v = 0; v < 500; ++v) truth[v] = v < 5 ? 4 : v % 4;
  const auto r = reveal_labels(truth, 0.01, 3);
  std::map<int, int> per;
  int shown = 0;
  for (int v = 0; v < 500; ++v) {
    if (r[v] == kUnlabeled) continue;
    CHECK(r[v] == truth[v]);
    ++per[r[v]];
    ++shown;
  }
  CHECK(shown == 5);
  CHECK(per.size() == 5);
  CHECK(reveal_labels(truth, 0.01, 3) == r);
  CHECK(reveal_labels(truth, 0.01, 4) != r);
  const auto fifth = reveal_labels(truth, 0.2, 1);
  CHECK(std::count(fifth.begin(), fifth.end(), kUnlabeled) == 400);
  CHECK_THROWS_AS(reveal_labels(truth, 0.0, 1), InvalidArgument);
}

TEST_CASE("experiment table") {
  const auto ps = two_blobs(50, 8);
  SslConfig cfg;
  cfg.k = 6;
  cfg.label_fractions = {0.1, 1.0};
  cfg.n_trials = 3;
  cfg.seed = 4;
  const auto a = ssl_experiment(ps, cfg);
  const auto b = ssl_experiment(ps, cfg);
  CHECK(a.trials.size() == 2 * 2 * 2 * 3);
  CHECK(a.aggregates.size() == 2 * 2 * 2);
  for (std::size_t t = 0; t < a.trials.size(); ++t) {
    CHECK(a.trials[t].misclassification == b.trials[t].misclassification);
  }
  for (auto builder : {BuilderTag::knn, BuilderTag::nnk}) {
    for (auto kind : {LaplacianKind::combinatorial, LaplacianKind::sym_normalized}) {
      CHECK(a.find(builder, kind, 6, 1.0).mean == 0.0);
      const auto& cell = a.find(builder, kind, 6, 0.1);
      double mean = 0.0;
      for (const auto& t : a.trials) {
        if (t.builder == builder && t.laplacian == kind && t.fraction == 0.1) {
          mean += t.misclassification / 3.0;
        }
      }
      CHECK(cell.mean == doctest::Approx(mean));
      CHECK(cell.edge_density > 0.0);
    }
  }
  CHECK_THROWS_AS(a.find(BuilderTag::lle_pos, LaplacianKind::combinatorial, 6, 0.1),
                  InvalidArgument);

  const auto path = std::filesystem::temp_directory_path() / "nnk_ssl.csv";
  write_ssl_csv(a, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "builder,laplacian,K,fraction,trial,misclassification,build_seconds,edge_density");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 24 + 2 * 8);

  auto unlabeled = ps;
  unlabeled.labels.reset();
  CHECK_THROWS_AS(ssl_experiment(unlabeled, cfg), NoLabels);
}
