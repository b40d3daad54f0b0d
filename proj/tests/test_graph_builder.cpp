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
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "nnk/error.hpp"
#include "nnk/graph_builder.hpp"
#include "nnk/nnqp.hpp"
#include "oracles.hpp"

using namespace nnk;

namespace {

std::map<std::pair<Index, Index>, double> edge_map(const SparseGraph& g) {
  std::map<std::pair<Index, Index>, double> m;
  for (const auto& e : g.edges) m[{e.i, e.j}] = e.weight;
  return m;
}

PointSet cloud(int n, int d, std::uint64_t seed) {
  return PointSet::from_points(oracle::normal_points(n, d, seed));
}

// Expected undirected edges from directed fits, spelled out pair by pair.
std::map<std::pair<Index, Index>, double> expected_edges(const std::vector<LocalFit>& fits) {
  std::map<std::pair<Index, Index>, std::vector<std::pair<Index, double>>> offers;
  std::map<Index, double> err;
  for (const auto& f : fits) {
    err[f.node] = f.objective;
    for (std::size_t a = 0; a < f.candidates.size(); ++a) {
      const Index o = f.candidates[a];
      offers[{std::min(f.node, o), std::max(f.node, o)}].push_back({f.node, f.theta[a]});
    }
  }
  std::map<std::pair<Index, Index>, double> out;
  for (const auto& [key, list] : offers) {
    double w = list[0].second;
    if (list.size() == 2) {
      const auto& lo = list[0].first == key.first ? list[0] : list[1];
      const auto& hi = list[0].first == key.first ? list[1] : list[0];
      w = err[lo.first] <= err[hi.first] ? lo.second : hi.second;
    }
    if (w > 0.0) out[key] = w;
  }
  return out;
}

}  // namespace

TEST_CASE("two points") {
  PointMatrix x(2, 2);
  x << 0, 0, 1, 1;
  const auto ps = PointSet::from_points(x);
  const auto g = build_nnk(ps, 1, KernelSpec::gaussian(1.0));
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].i == 0);
  CHECK(g.edges[0].j == 1);
  CHECK(g.edges[0].weight == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("collinear points form a chain") {
  PointMatrix x(4, 1);
  x << 0, 1, 2, 3;
  const auto g = build_nnk(PointSet::from_points(x), 3, KernelSpec::gaussian(1.0));
  const auto m = edge_map(g);
  CHECK(m.size() == 3);
  CHECK(m.count({0, 1}) == 1);
  CHECK(m.count({1, 2}) == 1);
  CHECK(m.count({2, 3}) == 1);
  CHECK(edge_density(g) == doctest::Approx(0.75));
  // end nodes have a single neighbor: weight = kernel value
  CHECK(g.fits[0].support.size() == 1);
  CHECK(g.fits[0].weights[0] == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("symmetrization follows the smaller local error") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto ps = cloud(80, 3, seed);
    const auto g = build_nnk(ps, 8, KernelSpec::gaussian(0.8));
    const auto want = expected_edges(g.fits);
    const auto got = edge_map(g);
    CHECK(got == want);
    for (const auto& e : g.edges) {
      CHECK(e.i < e.j);
      CHECK(e.weight > 0.0);
      CHECK(std::isfinite(e.weight));
      CHECK((e.source == e.i || e.source == e.j));
    }
  }
}

TEST_CASE("symmetrization edge cases") {
  auto fit = [](Index node, std::vector<Index> c, std::vector<double> t, double j) {
    LocalFit f;
    f.node = node;
    f.candidates = std::move(c);
    f.theta = std::move(t);
    f.objective = j;
    f.refresh_support();
    return f;
  };
  SUBCASE("tie keeps the lower index") {
    const auto e = symmetrize_by_error(2, {fit(0, {1}, {0.4}, 0.2), fit(1, {0}, {0.6}, 0.2)});
    REQUIRE(e.size() == 1);
    CHECK(e[0].weight == 0.4);
    CHECK(e[0].source == 0);
  }
  SUBCASE("winner may prune the edge") {
    const auto e = symmetrize_by_error(2, {fit(0, {1}, {0.0}, 0.1), fit(1, {0}, {0.6}, 0.3)});
    CHECK(e.empty());
  }
  SUBCASE("one-sided proposal survives") {
    const auto e = symmetrize_by_error(3, {fit(0, {1}, {0.5}, 0.3), fit(1, {2}, {0.2}, 0.1),
                                           fit(2, {1}, {0.7}, 0.2)});
    REQUIRE(e.size() == 2);
    CHECK(e[0].i == 0);
    CHECK(e[0].weight == 0.5);
    CHECK(e[1].weight == 0.2);
  }
}

TEST_CASE("nnk prunes the knn candidate set") {
  const auto ps = cloud(120, 2, 7);
  const auto spec = KernelSpec::gaussian(0.3);
  const auto nl = knn_search(ps, 10);
  const auto nnk = build_nnk(ps, nl, spec);
  const auto knn = build_knn(ps, nl, spec);
  for (Index i = 0; i < ps.size(); ++i) {
    const auto& s = nnk.fits[i].support;
    for (Index j : s) {
      CHECK(std::find(nl.indices(i).begin(), nl.indices(i).end(), j) != nl.indices(i).end());
    }
    CHECK(s.size() <= 10);
  }
  CHECK(edge_density(nnk) <= edge_density(knn));

  // knn: weights are kernel values, every node keeps its own K selections
  const auto deg = knn.degrees();
  for (Index i = 0; i < ps.size(); ++i) CHECK(deg[i] >= 10);
  for (const auto& e : knn.edges) {
    CHECK(e.weight == doctest::Approx(oracle::gauss(ps.points.row(e.i).transpose(),
                                                    ps.points.row(e.j).transpose(), 0.3))
                          .epsilon(1e-14));
  }
}

TEST_CASE("knn tie rule") {
  PointMatrix x(3, 3);
  x << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  const auto g = build_knn(PointSet::from_points(x), 1, KernelSpec::gaussian(1.0));
  const auto m = edge_map(g);
  CHECK(m.size() == 2);
  CHECK(m.count({0, 1}) == 1);
  CHECK(m.count({0, 2}) == 1);
}

TEST_CASE("objective chain") {
  const auto ps = cloud(150, 3, 12);
  const auto spec = KernelSpec::gaussian(0.6);
  const auto nl = knn_search(ps, 15);
  const auto nnk = build_nnk(ps, nl, spec);
  const auto omp = build_nnk_greedy(ps, nl, spec, GreedyMode::omp);
  const auto mp = build_nnk_greedy(ps, nl, spec, GreedyMode::mp);
  const auto knn = build_knn(ps, nl, spec);
  for (Index i = 0; i < ps.size(); ++i) {
    CAPTURE(i);
    CHECK(nnk.fits[i].objective <= omp.fits[i].objective + 1e-12);
    CHECK(omp.fits[i].objective <= 0.5 + 1e-12);
    CHECK(nnk.fits[i].objective >= -1e-12);
    CHECK(nnk.fits[i].objective <= knn.fits[i].objective + 1e-12);
    // first greedy atom is the most similar candidate
    CHECK(omp.fits[i].candidates[0] == nl.indices(i)[0]);
    std::set<Index> a(omp.fits[i].candidates.begin(), omp.fits[i].candidates.end());
    std::set<Index> b(mp.fits[i].candidates.begin(), mp.fits[i].candidates.end());
    if (a == b) CHECK(omp.fits[i].objective <= mp.fits[i].objective + 1e-12);
    if (omp.fits[i].support.size() == 1) {
      const Index j = omp.fits[i].support[0];
      CHECK(omp.fits[i].weights[0] ==
            doctest::Approx(oracle::gauss(ps.points.row(i).transpose(),
                                          ps.points.row(j).transpose(), 0.6)));
    }
  }
}

TEST_CASE("lle on exact configurations") {
  SUBCASE("midpoint") {
    PointMatrix x(3, 2);
    x << 0, 0, -1, 0.5, 1, -0.5;
    const std::vector<Index> s{1, 2};
    const auto f = fit_lle_positive(PointSet::from_points(x), 0, s, LleConstraint::nonneg_sum1);
    REQUIRE(f.weights.size() == 2);
    CHECK(f.weights[0] == doctest::Approx(0.5));
    CHECK(f.weights[1] == doctest::Approx(0.5));
    CHECK(f.objective == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("affine combination") {
    PointMatrix x(3, 2);
    x << 0.3 * 2 + 0.7 * -1, 0.3 * 1 + 0.7 * 4, 2, 1, -1, 4;
    const std::vector<Index> s{1, 2};
    const auto f = fit_lle_positive(PointSet::from_points(x), 0, s, LleConstraint::nonneg_sum1);
    CHECK(f.theta[0] == doctest::Approx(0.3));
    CHECK(f.theta[1] == doctest::Approx(0.7));
    CHECK(f.objective < 1e-12);
  }
  SUBCASE("coincident neighbor") {
    PointMatrix x(3, 1);
    x << 1, 1, 2;
    const std::vector<Index> s{1, 2};
    const auto ps = PointSet::from_points(x);
    CHECK_THROWS_AS(fit_lle_positive(ps, 0, s, LleConstraint::nonneg), DegenerateInput);
    const auto g = build_lle_positive(ps, 2, LleConstraint::nonneg_sum1);
    CHECK(g.dropped_neighbors == 2);
    CHECK(!g.kernel.has_value());
  }
}

TEST_CASE("lle matches projected gradient") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 25; ++t) {
    // more dimensions than atoms, so both problems have unique minimizers
    const auto x = oracle::normal_points(7, 8, rng());
    const auto ps = PointSet::from_points(x);
    const std::vector<Index> s{1, 2, 3, 4, 5, 6};
    Eigen::MatrixXd z(6, 8);
    for (int a = 0; a < 6; ++a) z.row(a) = x.row(a + 1) - x.row(0);

    const auto sum1 = fit_lle_positive(ps, 0, s, LleConstraint::nonneg_sum1);
    const auto ref1 = oracle::simplex_pg(z * z.transpose(), 400000);
    const auto nonneg = fit_lle_positive(ps, 0, s, LleConstraint::nonneg);
    Eigen::MatrixXd atoms(6, 8);
    for (int a = 0; a < 6; ++a) atoms.row(a) = x.row(a + 1);
    const auto ref2 = oracle::nnls_pg(atoms, x.row(0).transpose(), 400000);
    CAPTURE(t);
    for (int a = 0; a < 6; ++a) {
      CHECK(sum1.theta[a] == doctest::Approx(ref1[a]).epsilon(1e-6).scale(1.0));
      CHECK(nonneg.theta[a] == doctest::Approx(ref2[a]).epsilon(1e-6).scale(1.0));
    }
    const double r1 = (z.transpose() * ref1).squaredNorm();
    CHECK(sum1.objective <= r1 + 1e-10);
  }
}

TEST_CASE("edge density and output") {
  SparseGraph empty;
  empty.n = 5;
  CHECK(edge_density(empty) == 0.0);

  PointMatrix x(4, 1);
  x << 0, 1, 2, 3;
  auto g = build_nnk(PointSet::from_points(x), 3, KernelSpec::gaussian(1.0));
  CHECK(edge_density(g, 0.7) == 0.0);

  // node 1 has the smaller error, so edge (0,1) carries its weight
  CHECK(g.edges[0].source == 1);
  CHECK(g.edges[0].weight == doctest::Approx(g.fits[1].weights[0]));
  const auto path = std::filesystem::temp_directory_path() / "nnk_chain_edges.csv";
  write_edge_list(g, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  char expect[64];
  std::snprintf(expect, sizeof expect, "0,1,%.12g", g.edges[0].weight);
  CHECK(line == expect);

  const auto h = nlohmann::json::parse(graph_header_json(g));
  CHECK(h["n"] == 4);
  CHECK(h["builder_tag"] == "nnk");
  CHECK(h["K"] == 3);
  CHECK(h["edges"] == 3);
  CHECK(h["threshold"].get<double>() == 1e-8);
  CHECK(h["kernel"]["kind"] == "gaussian");
  CHECK(h["kernel"]["sigma_sq"].get<double>() == 1.0);
}

TEST_CASE("deterministic builds") {
  const auto ps = cloud(100, 4, 31);
  const auto spec = KernelSpec::gaussian(1.1);
  for (auto tag : {BuilderTag::nnk, BuilderTag::nnk_mp, BuilderTag::nnk_omp, BuilderTag::knn}) {
    SparseGraph a, b;
    if (tag == BuilderTag::nnk) {
      a = build_nnk(ps, 9, spec);
      b = build_nnk(ps, 9, spec);
    } else if (tag == BuilderTag::knn) {
      a = build_knn(ps, 9, spec);
      b = build_knn(ps, 9, spec);
    } else {
      const auto mode = tag == BuilderTag::nnk_mp ? GreedyMode::mp : GreedyMode::omp;
      a = build_nnk_greedy(ps, 9, spec, mode);
      b = build_nnk_greedy(ps, 9, spec, mode);
    }
    CHECK(a.tag == tag);
    CHECK(edge_map(a) == edge_map(b));
  }
  CHECK(builder_tag_from_string("nnk_omp") == BuilderTag::nnk_omp);
  CHECK_THROWS_AS(builder_tag_from_string("aew"), InvalidArgument);
}
